#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qpart/random.hpp"
#include "qpart/simulator.hpp"
#include "support/dense.hpp"

using namespace qpart;

namespace {

StateVector random_state_vector(std::size_t n, Rng& rng) {
    StateVector s = StateVector::zero_state(n);
    double norm_sq = 0.0;
    for (auto& a : s.amplitudes) {
        a = {rng.normal(), rng.normal()};
        norm_sq += std::norm(a);
    }
    for (auto& a : s.amplitudes) {
        a /= std::sqrt(norm_sq);
    }
    return s;
}

}  // namespace

TEST_CASE("empty circuit leaves the zero state") {
    const SubsystemCircuit c(3);
    const StateVector s = run(c, {}, {});
    CHECK(s.amplitudes[0] == std::complex<double>{1.0, 0.0});
    CHECK(s.norm() == doctest::Approx(1.0));
}

TEST_CASE("ry(pi) flips the single qubit") {
    SubsystemCircuit c(1);
    c.ry(0, std::numbers::pi);
    const StateVector s = run(c, {}, {});
    CHECK(std::abs(s.amplitudes[0]) < 1e-15);
    CHECK(std::abs(s.amplitudes[1] - std::complex<double>{1.0, 0.0}) < 1e-15);
}

TEST_CASE("hardware ansatz state matches the dense gate-product oracle") {
    Rng rng(3);
    const SubsystemCircuit c = hardware_efficient_ansatz(4, 2);
    CHECK(c.param_count() == 8);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> theta(c.param_count());
        rng.fill_uniform_angles(theta);
        const StateVector s = run(c, theta, {});
        CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
        const testing::Vector oracle = testing::dense_run(c, theta);
        for (std::size_t i = 0; i < s.amplitudes.size(); ++i) {
            CHECK(std::abs(s.amplitudes[i] - oracle(i)) < 1e-12);
        }
    }
}

TEST_CASE("expectation basics") {
    const StateVector zero = StateVector::zero_state(1);
    CHECK(expectation(zero, PauliString::single(1, 0, Pauli::Z)) ==
          doctest::Approx(1.0));
    CHECK(expectation(zero, PauliString::single(1, 0, Pauli::X)) ==
          doctest::Approx(0.0));
    CHECK(expectation(zero, PauliString::identity(1)) == doctest::Approx(1.0));
}

TEST_CASE("expectation rejects non-hermitian phases") {
    const StateVector zero = StateVector::zero_state(2);
    auto p = PauliString::parse("X1 Z2", 2);
    p.set_phase_exponent(1);
    CHECK_THROWS_AS(expectation(zero, p), std::invalid_argument);
    p.set_phase_exponent(2);  // -1 is fine
    CHECK(expectation(zero, p) == doctest::Approx(0.0));
}

TEST_CASE("random six-qubit expectations match the dense quadratic form") {
    Rng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const StateVector s = random_state_vector(6, rng);
        PauliString w(6);
        for (std::size_t q = 0; q < 6; ++q) {
            w.set_op(q, static_cast<Pauli>(rng.index(4)));
        }
        if (rng.index(2) == 1) {
            w.set_phase_exponent(2);
        }
        testing::Vector v(s.amplitudes.size());
        for (std::size_t i = 0; i < s.amplitudes.size(); ++i) {
            v(i) = s.amplitudes[i];
        }
        const auto expected =
            testing::quadratic_form(v, testing::dense_matrix(w));
        CHECK(expectation(s, w) == doctest::Approx(expected.real())
                                       .epsilon(1e-10));
        CHECK(std::abs(expected.imag()) < 1e-10);
    }
}

TEST_CASE("expectation is linear over observables") {
    Rng rng(21);
    const SubsystemCircuit c = hardware_efficient_ansatz(4, 2);
    std::vector<double> theta(c.param_count());
    rng.fill_uniform_angles(theta);
    const StateVector s = run(c, theta, {});

    Observable obs(4);
    double combined = 0.0;
    for (int k = 0; k < 6; ++k) {
        PauliString w(4);
        for (std::size_t q = 0; q < 4; ++q) {
            w.set_op(q, static_cast<Pauli>(rng.index(4)));
        }
        const double coeff = rng.uniform(-2.0, 2.0);
        obs.add(w, coeff);
        combined += coeff * expectation(s, w);
    }
    double summed = 0.0;
    for (const auto& [w, coeff] : obs.sorted_terms()) {
        summed += coeff.real() * expectation(s, w);
    }
    CHECK(summed == doctest::Approx(combined).epsilon(1e-10));
}

TEST_CASE("parameter shift on the single-qubit rotation") {
    SubsystemCircuit c(1);
    c.ry_param(0, 0);
    const PauliString z = PauliString::single(1, 0, Pauli::Z);
    // E(theta) = cos(theta).
    CHECK(param_shift_grad(c, std::vector<double>{0.0}, {}, z, 0) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(param_shift_grad(c, std::vector<double>{std::numbers::pi / 2}, {},
                           z, 0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("parameter shift matches finite differences on the ansatz") {
    Rng rng(31);
    const SubsystemCircuit c = hardware_efficient_ansatz(4, 2);
    const PauliString w = PauliString::parse("X1 Z3", 4);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> theta(c.param_count());
        rng.fill_uniform_angles(theta);
        const std::size_t slot = rng.index(c.param_count());

        const double analytic = param_shift_grad(c, theta, {}, w, slot);
        const double h = 1e-5;
        std::vector<double> shifted = theta;
        shifted[slot] = theta[slot] + h;
        const double plus = expectation(run(c, shifted, {}), w);
        shifted[slot] = theta[slot] - h;
        const double minus = expectation(run(c, shifted, {}), w);
        CHECK(std::abs(analytic - (plus - minus) / (2 * h)) < 1e-5);
    }
}

TEST_CASE("input validation") {
    SubsystemCircuit c(2);
    c.ry_param(0, 0).ry_data(1, 0).cnot(0, 1);
    CHECK(c.param_count() == 1);
    CHECK(c.data_count() == 1);
    CHECK_THROWS_AS(run(c, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(run(c, std::vector<double>{1.0}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        param_shift_grad(c, std::vector<double>{1.0},
                         std::vector<double>{0.5},
                         PauliString::single(2, 0, Pauli::Z), 1),
        std::invalid_argument);

    CHECK_THROWS_AS(c.ry_param(1, 0), std::invalid_argument);  // slot reuse
    CHECK_THROWS_AS(c.cnot(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(c.ry(5, 0.0), std::invalid_argument);
}

TEST_CASE("subsystem size cap enforced at run time") {
    SubsystemCircuit big(15);
    big.ry(0, 0.1);
    CHECK_THROWS_AS(run(big, {}, {}), std::invalid_argument);
    CHECK_NOTHROW(run(big, {}, {}, 15));
}
