#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qpart/conjugate.hpp"
#include "qpart/hamiltonian.hpp"
#include "qpart/layout.hpp"
#include "qpart/random.hpp"
#include "support/dense.hpp"

using namespace qpart;
using testing::dense_matrix;
using testing::dense_unitary;
using testing::Matrix;

namespace {

/// Random weight-2 strings on adjacent qubit pairs, the shape used by the
/// shipped factor sets.
std::vector<PauliString> random_border_factors(std::size_t n, std::size_t count,
                                               Rng& rng) {
    std::vector<PauliString> out;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = rng.index(n - 1);
        PauliString p(n);
        if (rng.index(2) == 0) {
            p.set_op(i, Pauli::Z);
            p.set_op(i + 1, Pauli::Y);
        } else {
            p.set_op(i, Pauli::Y);
            p.set_op(i + 1, Pauli::Z);
        }
        out.push_back(p);
    }
    return out;
}

Matrix evaluated_dense(const FactoredObservable& factored,
                       std::span<const double> angles) {
    const Eigen::Index dim = Eigen::Index{1}
                             << factored.layout.n_qubits();
    Matrix m = Matrix::Zero(dim, dim);
    for (const FactoredTerm& term : factored.terms) {
        m += term.coeff.eval(angles) *
             dense_matrix(join_partition(term.factors, factored.layout));
    }
    return m;
}

}  // namespace

TEST_CASE("pruning keeps the non-commuting chain for the n=8 X3 example") {
    const std::size_t n = 8;
    const RestrictedUnitary v(
        n, {PauliString::parse("Z3 Y4", n), PauliString::parse("Z4 Y5", n),
            PauliString::parse("Z5 Y6", n), PauliString::parse("Z7 Y8", n),
            PauliString::parse("Y1 Z8", n), PauliString::parse("Z1 Y2", n)});
    const auto keep = prune_factors(v, PauliString::parse("X3", n));
    CHECK(keep == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("fully commuting target keeps nothing and passes through") {
    const std::size_t n = 4;
    const RestrictedUnitary v(n, {PauliString::parse("Z1 Z2", n)});
    const auto target = PauliString::parse("Z1", n);
    CHECK(prune_factors(v, target).empty());

    Observable m(n);
    m.add(target, 2.5);
    const auto layout = PartitionLayout::uniform(2, 2);
    const FactoredObservable factored = conjugate_observable(v, m, layout);
    REQUIRE(factored.terms.size() == 1);
    CHECK(factored.terms[0].coeff.factors().empty());
    CHECK(factored.terms[0].coeff.base() == std::complex<double>{2.5, 0.0});
    CHECK(join_partition(factored.terms[0].factors, layout) ==
          target.phaseless());
}

TEST_CASE("pruned expansion equals full-set dense conjugation at n=6") {
    Rng rng(41);
    const std::size_t n = 6;
    const auto layout = PartitionLayout::uniform(2, 3);
    for (int trial = 0; trial < 25; ++trial) {
        const RestrictedUnitary v(n, random_border_factors(n, 4, rng));
        PauliString target(n);
        for (std::size_t q = 0; q < n; ++q) {
            target.set_op(q, static_cast<Pauli>(rng.index(4)));
        }
        Observable m(n);
        m.add(target, 1.0);

        std::vector<double> angles(v.factor_count());
        rng.fill_uniform_angles(angles);

        const Matrix u = dense_unitary(v, angles);
        const Matrix expected =
            u.adjoint() * dense_matrix(target) * u;
        const Matrix got =
            evaluated_dense(conjugate_observable(v, m, layout), angles);
        CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("zero angles reproduce the input observable") {
    const std::size_t n = 8;
    const auto layout = PartitionLayout::uniform(2, 4);
    Rng rng(43);
    const RestrictedUnitary v(n, random_border_factors(n, 5, rng));
    const Observable h = build_tfim({n, 1.0, 1.0});
    const FactoredObservable factored = conjugate_observable(v, h, layout);

    const std::vector<double> zeros(v.factor_count(), 0.0);
    Observable back(n);
    for (const FactoredTerm& term : factored.terms) {
        back.add(join_partition(term.factors, layout),
                 term.coeff.eval(zeros));
    }
    back.simplify();
    const auto expected = h.sorted_terms();
    const auto got = back.sorted_terms();
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].first == expected[i].first);
        CHECK(std::abs(got[i].second - expected[i].second) < 1e-12);
    }
}

TEST_CASE("table n=8 term bound: at most 64 terms per Hamiltonian term") {
    const std::size_t n = 8;
    const RestrictedUnitary v(
        n, {PauliString::parse("Z3 Y4", n), PauliString::parse("Z4 Y5", n),
            PauliString::parse("Z5 Y6", n), PauliString::parse("Z7 Y8", n),
            PauliString::parse("Y1 Z8", n), PauliString::parse("Z1 Y2", n)});
    const Observable h = build_tfim({n, 1.0, 1.0});
    ConjugateReport report;
    conjugate_observable(v, h, PartitionLayout::uniform(2, 4), {}, &report);
    REQUIRE(report.sources.size() == h.size());
    for (const auto& source : report.sources) {
        CHECK(source.retained_factors <= 3);
        CHECK(source.expansion_terms <=
              (std::size_t{1} << (2 * source.retained_factors)));
    }
    const auto x3 = PauliString::parse("X3", n);
    bool found = false;
    for (const auto& source : report.sources) {
        if (source.source == x3.phaseless()) {
            found = true;
            CHECK(source.retained_factors == 3);
            CHECK(source.expansion_terms <= 64);
        }
    }
    CHECK(found);
}

TEST_CASE("dense conjugation oracle at n in {4, 6, 8} with full Hamiltonian") {
    Rng rng(47);
    for (const std::size_t n : {std::size_t{4}, std::size_t{6},
                                std::size_t{8}}) {
        const auto layout = PartitionLayout::uniform(2, n / 2);
        const RestrictedUnitary v(
            n, random_border_factors(n, 2 + rng.index(4), rng));
        const Observable h = build_tfim({n, 1.0, 1.0});
        std::vector<double> angles(v.factor_count());
        rng.fill_uniform_angles(angles);

        const Matrix u = dense_unitary(v, angles);
        const Matrix expected = u.adjoint() * dense_matrix(h) * u;
        const Matrix got =
            evaluated_dense(conjugate_observable(v, h, layout), angles);
        CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("restricted unitaries are unitary (dense check)") {
    Rng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.index(7);
        const RestrictedUnitary v(
            n, random_border_factors(n, 1 + rng.index(5), rng));
        std::vector<double> angles(v.factor_count());
        rng.fill_uniform_angles(angles);
        const Matrix u = dense_unitary(v, angles);
        const Matrix residue =
            u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
        CHECK(residue.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("evaluated term weights of a hermitian input are real") {
    Rng rng(59);
    const std::size_t n = 6;
    const RestrictedUnitary v(n, random_border_factors(n, 4, rng));
    const Observable h = build_tfim({n, 1.0, 1.0});
    const FactoredObservable factored =
        conjugate_observable(v, h, PartitionLayout::uniform(2, 3));
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> angles(v.factor_count());
        rng.fill_uniform_angles(angles);
        for (const FactoredTerm& term : factored.terms) {
            CHECK(std::abs(term.coeff.eval(angles).imag()) < 1e-10);
        }
    }
}

TEST_CASE("coefficient tree evaluation basics") {
    CoefficientTree cos2;
    cos2.push_factor(0, FactorKind::Cos2);
    CHECK(cos2.eval(std::vector<double>{0.0}) ==
          std::complex<double>{1.0, 0.0});

    CoefficientTree sin2;
    sin2.push_factor(0, FactorKind::Sin2);
    CHECK(sin2.eval(std::vector<double>{std::numbers::pi / 2}).real() ==
          doctest::Approx(1.0));

    // d/dc cos^2 at 0 is 0; absent index has zero derivative.
    CHECK(cos2.grad(std::vector<double>{0.0}, 0) ==
          std::complex<double>{0.0, 0.0});
    CHECK(cos2.grad(std::vector<double>{0.3}, 1) ==
          std::complex<double>{0.0, 0.0});
}

TEST_CASE("tree gradients match finite differences on random trees") {
    Rng rng(61);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t count = 1 + rng.index(5);
        CoefficientTree tree({rng.uniform(-2.0, 2.0), rng.uniform(-1.0, 1.0)});
        std::vector<std::size_t> used;
        std::size_t index = 0;
        for (std::size_t k = 0; k < count; ++k) {
            index += rng.index(3);
            tree.push_factor(index,
                             static_cast<FactorKind>(rng.index(4)));
            used.push_back(index);
            ++index;
        }
        std::vector<double> angles(index + 2);
        rng.fill_uniform_angles(angles);
        const std::size_t target = used[rng.index(used.size())];

        const auto analytic = tree.grad(angles, target);
        const double h = 1e-6;
        auto shifted = angles;
        shifted[target] = angles[target] + h;
        const auto plus = tree.eval(shifted);
        shifted[target] = angles[target] - h;
        const auto minus = tree.eval(shifted);
        const auto fd = (plus - minus) / (2.0 * h);
        const double scale = std::max(1.0, std::abs(fd));
        CHECK(std::abs(analytic - fd) / scale < 1e-6);
    }
}

TEST_CASE("term cap aborts runaway expansions") {
    const std::size_t n = 8;
    Rng rng(67);
    const RestrictedUnitary v(n, random_border_factors(n, 7, rng));
    const Observable h = build_tfim({n, 1.0, 1.0});
    ConjugateOptions options;
    options.term_cap = 8;
    CHECK_THROWS_WITH_AS(
        conjugate_observable(v, h, PartitionLayout::uniform(2, 4), options),
        doctest::Contains("cap"), std::runtime_error);
}

TEST_CASE("factored observable pool deduplicates") {
    const std::size_t n = 4;
    const RestrictedUnitary v(n, {PauliString::parse("Z2 Y3", n),
                                  PauliString::parse("Y1 Z4", n)});
    const Observable h = build_tfim({n, 1.0, 1.0});
    const FactoredObservable factored =
        conjugate_observable(v, h, PartitionLayout::uniform(2, 2));
    const auto pool = factored.operator_pool();
    for (std::size_t i = 1; i < pool.size(); ++i) {
        const bool ordered =
            pool[i - 1].first < pool[i].first ||
            (pool[i - 1].first == pool[i].first &&
             PauliString::less(pool[i - 1].second, pool[i].second));
        CHECK(ordered);
    }
    CHECK_FALSE(factored.to_json().empty());
}
