#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qpart/layout.hpp"
#include "qpart/random.hpp"

using namespace qpart;

TEST_CASE("contiguous layout basics") {
    const auto layout = PartitionLayout::contiguous({2, 3});
    CHECK(layout.n_qubits() == 5);
    CHECK(layout.subsystem_count() == 2);
    CHECK(layout.subsystem_size(0) == 2);
    CHECK(layout.subsystem_size(1) == 3);
    CHECK(layout.locate(0) == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(layout.locate(3) == std::pair<std::size_t, std::size_t>{1, 1});
    CHECK(layout.global_index(1, 2) == 4);
}

TEST_CASE("layout validation rejects non-bijections") {
    using Mapping = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
    CHECK_THROWS_AS(PartitionLayout(Mapping{{0, 0}, {0, 0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PartitionLayout(Mapping{{0, 0}, {0, 2}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PartitionLayout(Mapping{{0, 0}, {2, 0}}),
                    std::invalid_argument);
}

TEST_CASE("restriction splits support across blocks") {
    const auto layout = PartitionLayout::uniform(2, 2);

    // Support confined to the first block.
    auto factors = restrict_to_partition(PauliString::parse("X1 X2", 4),
                                         layout);
    CHECK(factors[0] == PauliString::parse("X1 X2", 2));
    CHECK(factors[1] == PauliString::identity(2));

    // Boundary term splits.
    factors = restrict_to_partition(PauliString::parse("X2 X3", 4), layout);
    CHECK(factors[0] == PauliString::parse("X2", 2));
    CHECK(factors[1] == PauliString::parse("X1", 2));
}

TEST_CASE("restrict then join is the identity on strings") {
    Rng rng(5);
    const auto layout = PartitionLayout::uniform(2, 4);
    for (int trial = 0; trial < 200; ++trial) {
        PauliString p(8);
        for (std::size_t q = 0; q < 8; ++q) {
            p.set_op(q, static_cast<Pauli>(rng.index(4)));
        }
        const auto factors = restrict_to_partition(p, layout);
        CHECK(join_partition(factors, layout) == p.phaseless());
    }
}

TEST_CASE("round trip through a scrambled (non-contiguous) layout") {
    // Global qubits alternate between the two subsystems.
    using Mapping = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
    const PartitionLayout layout(
        Mapping{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 2}, {1, 2}});
    CHECK(layout.subsystem_size(0) == 3);

    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        PauliString p(6);
        for (std::size_t q = 0; q < 6; ++q) {
            p.set_op(q, static_cast<Pauli>(rng.index(4)));
        }
        const auto factors = restrict_to_partition(p, layout);
        CHECK(join_partition(factors, layout) == p);
    }
}

TEST_CASE("size mismatches rejected") {
    const auto layout = PartitionLayout::uniform(2, 2);
    CHECK_THROWS_AS(restrict_to_partition(PauliString(3), layout),
                    std::invalid_argument);
    const std::vector<PauliString> bad = {PauliString(2), PauliString(3)};
    CHECK_THROWS_AS(join_partition(bad, layout), std::invalid_argument);
}
