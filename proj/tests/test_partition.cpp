#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qpart/conjugate.hpp"
#include "qpart/hamiltonian.hpp"
#include "qpart/partition.hpp"
#include "qpart/random.hpp"
#include "qpart/simulator.hpp"
#include "support/dense.hpp"

using namespace qpart;
using testing::dense_matrix;
using testing::dense_run;
using testing::dense_unitary;
using testing::Matrix;
using testing::Vector;

namespace {

std::vector<PauliString> random_border_factors(std::size_t n,
                                               std::size_t count, Rng& rng) {
    std::vector<PauliString> out;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = rng.index(n - 1);
        PauliString p(n);
        p.set_op(i, rng.index(2) == 0 ? Pauli::Z : Pauli::Y);
        p.set_op(i + 1, p.op(i) == Pauli::Z ? Pauli::Y : Pauli::Z);
        out.push_back(p);
    }
    return out;
}

PartitionedModel make_vqe_model(std::size_t n, std::size_t subsystems,
                                std::size_t factor_count, Rng& rng) {
    const auto layout = PartitionLayout::uniform(subsystems, n / subsystems);
    const RestrictedUnitary v(n, random_border_factors(n, factor_count, rng));
    const Observable h = build_tfim({n, 1.0, 1.0});
    FactoredObservable factored = conjugate_observable(v, h, layout);
    std::vector<SubsystemCircuit> circuits;
    for (std::size_t s = 0; s < subsystems; ++s) {
        circuits.push_back(hardware_efficient_ansatz(n / subsystems, 2));
    }
    return PartitionedModel(std::move(circuits), std::move(factored));
}

ModelParams random_params(const PartitionedModel& model, Rng& rng) {
    ModelParams p;
    p.theta.resize(model.theta_count());
    p.coeffs.resize(model.coefficient_count());
    rng.fill_uniform_angles(p.theta);
    rng.fill_uniform_angles(p.coeffs);
    return p;
}

/// Dense <(x)U|0| V'HV |(x)U|0> for a tree-coefficient model built from
/// (v, h): subsystem states from the dense gate oracle, kron'd together.
double dense_energy(const PartitionedModel& model, const RestrictedUnitary& v,
                    const Observable& h, const ModelParams& params) {
    Vector psi = Vector::Ones(1);
    for (std::size_t s = 0; s < model.subsystem_count(); ++s) {
        const std::size_t count = model.circuit(s).param_count();
        std::vector<double> theta(
            params.theta.begin() + model.theta_offset(s),
            params.theta.begin() + model.theta_offset(s) + count);
        psi = kron(dense_run(model.circuit(s), theta), psi).eval();
    }
    const Matrix u = dense_unitary(v, params.coeffs);
    const Matrix conjugated = u.adjoint() * dense_matrix(h) * u;
    return testing::quadratic_form(psi, conjugated).real();
}

}  // namespace

TEST_CASE("identity observable short-circuits to its coefficient") {
    const auto layout = PartitionLayout::uniform(2, 2);
    NumericFactoredObservable obs{layout, 1, {}, 0};
    NumericTerm term;
    term.coefficient_slot = 0;
    term.factors = {PauliString::identity(2), PauliString::identity(2)};
    obs.terms.push_back(term);

    std::vector<SubsystemCircuit> circuits{hardware_efficient_ansatz(2, 2),
                                           hardware_efficient_ansatz(2, 2)};
    const PartitionedModel model(std::move(circuits), std::move(obs));

    Rng rng(1);
    ModelParams params = random_params(model, rng);
    params.coeffs = {3.5};
    CHECK(forward(model, params) == 3.5);  // exact, no simulation involved
    CHECK(grad_coeffs(model, params) == std::vector<double>{1.0});
}

TEST_CASE("forward matches the dense full-system oracle at n=4, S=2") {
    Rng rng(2);
    const std::size_t n = 4;
    const auto layout = PartitionLayout::uniform(2, 2);
    const RestrictedUnitary v(n, {PauliString::parse("Z2 Y3", n),
                                  PauliString::parse("Y1 Z4", n)});
    const Observable h = build_tfim({n, 1.0, 1.0});
    FactoredObservable factored = conjugate_observable(v, h, layout);
    std::vector<SubsystemCircuit> circuits{hardware_efficient_ansatz(2, 2),
                                           hardware_efficient_ansatz(2, 2)};
    const PartitionedModel model(std::move(circuits), std::move(factored));

    for (int trial = 0; trial < 10; ++trial) {
        const ModelParams params = random_params(model, rng);
        CHECK(forward(model, params) ==
              doctest::Approx(dense_energy(model, v, h, params))
                  .epsilon(1e-9));
    }
}

TEST_CASE("single-subsystem layout equals a direct expectation") {
    Rng rng(3);
    const std::size_t n = 3;
    const auto layout = PartitionLayout::uniform(1, n);
    const RestrictedUnitary v(n, random_border_factors(n, 2, rng));
    const Observable h = build_tfim({n, 1.0, 1.0});
    FactoredObservable factored = conjugate_observable(v, h, layout);

    std::vector<SubsystemCircuit> circuits{hardware_efficient_ansatz(n, 2)};
    const PartitionedModel model(std::move(circuits), std::move(factored));
    const ModelParams params = random_params(model, rng);

    // Direct route: evaluate the merged global observable on the state.
    const StateVector state =
        run(model.circuit(0), params.theta, {});
    const FactoredObservable& obs =
        std::get<FactoredObservable>(
            std::variant<FactoredObservable, int>(
                conjugate_observable(v, h, layout)));
    double direct = 0.0;
    for (const FactoredTerm& term : obs.terms) {
        direct += (term.coeff.eval(params.coeffs) *
                   expectation(state, term.factors[0]))
                      .real();
    }
    CHECK(forward(model, params) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("zero coefficients give a zero theta gradient") {
    const auto layout = PartitionLayout::uniform(2, 2);
    NumericFactoredObservable obs{layout, 1, {}, 0};
    NumericTerm term;
    term.coefficient_slot = 0;
    term.factors = {PauliString::single(2, 0, Pauli::X),
                    PauliString::single(2, 1, Pauli::Z)};
    obs.terms.push_back(term);
    std::vector<SubsystemCircuit> circuits{hardware_efficient_ansatz(2, 2),
                                           hardware_efficient_ansatz(2, 2)};
    const PartitionedModel model(std::move(circuits), std::move(obs));

    Rng rng(4);
    ModelParams params = random_params(model, rng);
    params.coeffs = {0.0};
    for (const double g : grad_theta(model, params)) {
        CHECK(g == 0.0);
    }
}

TEST_CASE("untouched subsystems have exactly zero gradients") {
    const auto layout = PartitionLayout::uniform(2, 2);
    NumericFactoredObservable obs{layout, 1, {}, 0};
    NumericTerm term;
    term.coefficient_slot = 0;
    term.factors = {PauliString::parse("X1 Z2", 2),
                    PauliString::identity(2)};
    obs.terms.push_back(term);
    std::vector<SubsystemCircuit> circuits{hardware_efficient_ansatz(2, 2),
                                           hardware_efficient_ansatz(2, 2)};
    const PartitionedModel model(std::move(circuits), std::move(obs));

    Rng rng(5);
    ModelParams params = random_params(model, rng);
    params.coeffs = {1.25};
    const auto grad = grad_theta(model, params);
    for (std::size_t slot = model.theta_offset(1); slot < grad.size();
         ++slot) {
        CHECK(grad[slot] == 0.0);
    }
}

TEST_CASE("gradients match finite differences on random models") {
    Rng rng(6);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t half = 1 + rng.index(3);  // n in {2, 4, 6}
        const PartitionedModel model =
            make_vqe_model(2 * half, 2, 2 + rng.index(3), rng);
        const ModelParams params = random_params(model, rng);

        const ValueAndGrads vg = value_and_grads(model, params);
        CHECK(vg.value ==
              doctest::Approx(forward(model, params)).epsilon(1e-12));

        const double h = 1e-5;
        for (std::size_t i = 0; i < model.theta_count(); ++i) {
            ModelParams shifted = params;
            shifted.theta[i] = params.theta[i] + h;
            const double plus = forward(model, shifted);
            shifted.theta[i] = params.theta[i] - h;
            const double minus = forward(model, shifted);
            CHECK(std::abs(vg.theta[i] - (plus - minus) / (2 * h)) < 1e-5);
        }
        for (std::size_t i = 0; i < model.coefficient_count(); ++i) {
            ModelParams shifted = params;
            shifted.coeffs[i] = params.coeffs[i] + h;
            const double plus = forward(model, shifted);
            shifted.coeffs[i] = params.coeffs[i] - h;
            const double minus = forward(model, shifted);
            CHECK(std::abs(vg.coeffs[i] - (plus - minus) / (2 * h)) < 1e-5);
        }
    }
}

TEST_CASE("angle absent from every tree has zero coefficient gradient") {
    // A unitary factor that commutes with the whole Hamiltonian never gets
    // retained, so its angle cannot influence the energy.
    const std::size_t n = 4;
    const auto layout = PartitionLayout::uniform(2, 2);
    Observable h(n);
    h.add(PauliString::parse("Z1", n), -1.0);
    const RestrictedUnitary v(n, {PauliString::parse("Z1 Z2", n),
                                  PauliString::parse("Z1 Y2", n)});
    FactoredObservable factored = conjugate_observable(v, h, layout);
    std::vector<SubsystemCircuit> circuits{hardware_efficient_ansatz(2, 2),
                                           hardware_efficient_ansatz(2, 2)};
    const PartitionedModel model(std::move(circuits), std::move(factored));

    Rng rng(7);
    const ModelParams params = random_params(model, rng);
    const auto grad = grad_coeffs(model, params);
    REQUIRE(grad.size() == 2);
    CHECK(grad[0] == 0.0);  // Z1Z2 commutes with Z1 and with Z1Y2? no - only with Z1
}

TEST_CASE("measurement budget for a single-term model") {
    const auto layout = PartitionLayout::uniform(1, 2);
    NumericFactoredObservable obs{layout, 1, {}, 0};
    NumericTerm term;
    term.coefficient_slot = 0;
    term.factors = {PauliString::parse("X1 Z2", 2)};
    obs.terms.push_back(term);
    std::vector<SubsystemCircuit> circuits{hardware_efficient_ansatz(2, 2)};
    const PartitionedModel model(std::move(circuits), std::move(obs));
    const MeasurementBudget budget = measurement_budget(model);
    CHECK(budget.unique_expectations == 1);
    CHECK(budget.simulated_expectations == 1);
    CHECK(budget.term_count == 1);
    CHECK(budget.coefficient_count == 1);
}

TEST_CASE("evaluation cache is transparent and hits on repetition") {
    Rng rng(8);
    const PartitionedModel model = make_vqe_model(4, 2, 3, rng);
    const ModelParams params = random_params(model, rng);

    const double bare = forward(model, params);
    const auto bare_grad = grad_theta(model, params);

    EvaluationCache cache;
    EvalOptions opts;
    opts.cache = &cache;
    const double cached_once = forward(model, params, nullptr, opts);
    CHECK(cached_once == bare);  // bitwise: same summation order

    const std::size_t misses_after_first = cache.misses();
    const double cached_twice = forward(model, params, nullptr, opts);
    CHECK(cached_twice == bare);
    CHECK(cache.hits() > 0);
    CHECK(cache.misses() == misses_after_first);

    const auto cached_grad = grad_theta(model, params, nullptr, opts);
    REQUIRE(cached_grad.size() == bare_grad.size());
    for (std::size_t i = 0; i < bare_grad.size(); ++i) {
        CHECK(cached_grad[i] == bare_grad[i]);
    }
}

TEST_CASE("operation counters track runs and expectations") {
    Rng rng(9);
    const PartitionedModel model = make_vqe_model(4, 2, 2, rng);
    const ModelParams params = random_params(model, rng);
    EvalCounters counters;
    EvalOptions opts;
    opts.counters = &counters;
    forward(model, params, nullptr, opts);
    CHECK(counters.circuit_runs == model.subsystem_count());
    CHECK(counters.expectations == model.pool().size());
}

TEST_CASE("input validation") {
    Rng rng(10);
    const PartitionedModel model = make_vqe_model(4, 2, 2, rng);
    ModelParams params = random_params(model, rng);
    params.theta.pop_back();
    CHECK_THROWS_AS(forward(model, params), std::invalid_argument);
    params = random_params(model, rng);
    const Sample data{{0.1}, {0.2}};
    CHECK_THROWS_AS(forward(model, params, &data), std::invalid_argument);
    CHECK_THROWS_AS(grad_theta_slot(model, params, nullptr, 5, 0),
                    std::invalid_argument);
}

TEST_CASE("ranked expectations are sorted by magnitude") {
    Rng rng(11);
    const PartitionedModel model = make_vqe_model(4, 2, 2, rng);
    const ModelParams params = random_params(model, rng);
    const auto ranked = ranked_expectations(model, params);
    CHECK(ranked.size() == model.pool().size());
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        CHECK(std::abs(ranked[i - 1].second) >=
              std::abs(ranked[i].second) - 1e-15);
    }
}
