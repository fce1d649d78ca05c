#include "qpart/variance.hpp"

#include <cmath>
#include <stdexcept>

#include "qpart/parallel.hpp"
#include "qpart/random.hpp"
#include "qpart/simulator.hpp"

namespace qpart {

PartitionedModel build_scan_model(std::size_t subsystems,
                                  std::size_t subsystem_qubits) {
    const PartitionLayout layout =
        PartitionLayout::uniform(subsystems, subsystem_qubits);

    NumericFactoredObservable obs{layout, 0, {}, 0};
    std::size_t slot = 0;
    for (std::size_t s = 0; s < subsystems; ++s) {
        for (std::size_t sp = s + 1; sp < subsystems; ++sp) {
            for (std::size_t i = 0; i < subsystem_qubits; ++i) {
                for (std::size_t j = 0; j < subsystem_qubits; ++j) {
                    NumericTerm term;
                    term.coefficient_slot = slot++;
                    for (std::size_t k = 0; k < subsystems; ++k) {
                        term.factors.emplace_back(subsystem_qubits);
                    }
                    term.factors[s].set_op(i, Pauli::X);
                    term.factors[sp].set_op(j, Pauli::X);
                    obs.terms.push_back(std::move(term));
                }
            }
        }
    }
    obs.coefficient_count = slot;

    std::vector<SubsystemCircuit> circuits;
    circuits.reserve(subsystems);
    for (std::size_t s = 0; s < subsystems; ++s) {
        circuits.push_back(hardware_efficient_ansatz(subsystem_qubits, 2));
    }
    return PartitionedModel(std::move(circuits), std::move(obs));
}

std::vector<VarianceScanPoint> run_variance_scan(
    const VarianceScanSpec& spec) {
    if (spec.trials < 2) {
        throw std::invalid_argument("variance needs at least two trials");
    }
    if (spec.min_subsystems < 2 || spec.max_subsystems < spec.min_subsystems) {
        throw std::invalid_argument("bad subsystem range");
    }

    std::vector<VarianceScanPoint> points;
    for (std::size_t subsystems = spec.min_subsystems;
         subsystems <= spec.max_subsystems; ++subsystems) {
        const PartitionedModel model =
            build_scan_model(subsystems, spec.subsystem_qubits);

        std::vector<double> gradients(spec.trials, 0.0);
        std::vector<EvalCounters> counters(spec.trials);
        parallel_for(0, spec.trials, [&](std::size_t trial) {
            Rng rng(derive_seed(spec.seed, subsystems, trial));
            ModelParams params;
            params.theta.resize(model.theta_count());
            rng.fill_uniform_angles(params.theta);
            params.coeffs.assign(model.coefficient_count(), 1.0);
            if (spec.coefficient_sigma > 0.0) {
                for (double& d : params.coeffs) {
                    d = spec.coefficient_sigma * rng.normal();
                }
            }
            EvalOptions opts;
            opts.counters = &counters[trial];
            gradients[trial] =
                grad_theta_slot(model, params, nullptr, 0, 0, opts);
        });

        double mean = 0.0;
        for (const double g : gradients) {
            mean += g;
        }
        mean /= static_cast<double>(spec.trials);
        double variance = 0.0;
        for (const double g : gradients) {
            variance += (g - mean) * (g - mean);
        }
        variance /= static_cast<double>(spec.trials - 1);

        VarianceScanPoint point;
        point.total_qubits = subsystems * spec.subsystem_qubits;
        point.subsystems = subsystems;
        point.variance = variance;
        point.trials = spec.trials;
        for (const EvalCounters& c : counters) {
            point.operations += c.circuit_runs + c.expectations;
        }
        points.push_back(point);
    }
    return points;
}

HaarMoments haar_moment_check(std::size_t n_qubits, std::size_t depth,
                              std::size_t samples, std::uint64_t seed) {
    if (samples < 2) {
        throw std::invalid_argument("need at least two samples");
    }
    const SubsystemCircuit circuit =
        hardware_efficient_ansatz(n_qubits, depth);
    const PauliString w_z = PauliString::single(n_qubits, 0, Pauli::Z);
    const PauliString w_x = PauliString::single(n_qubits, 0, Pauli::X);
    const PauliString w_i = PauliString::identity(n_qubits);

    std::vector<double> square(samples, 0.0);
    std::vector<double> cross(samples, 0.0);
    std::vector<double> ident(samples, 0.0);
    parallel_for(0, samples, [&](std::size_t k) {
        Rng rng(derive_seed(seed, k));
        std::vector<double> angles(circuit.param_count());
        rng.fill_uniform_angles(angles);
        const StateVector state = run(circuit, angles);
        const double b_z = expectation(state, w_z);
        const double b_x = expectation(state, w_x);
        square[k] = b_z * b_z;
        cross[k] = b_x * b_z;
        ident[k] = expectation(state, w_i);
    });

    const auto mean_and_stderr = [&](const std::vector<double>& xs) {
        double mean = 0.0;
        for (const double x : xs) {
            mean += x;
        }
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        for (const double x : xs) {
            var += (x - mean) * (x - mean);
        }
        var /= static_cast<double>(xs.size() - 1);
        return std::pair<double, double>(
            mean, std::sqrt(var / static_cast<double>(xs.size())));
    };

    HaarMoments out;
    out.samples = samples;
    out.dimension = std::size_t{1} << n_qubits;
    std::tie(out.mean_square, out.stderr_square) = mean_and_stderr(square);
    std::tie(out.mean_cross, out.stderr_cross) = mean_and_stderr(cross);
    const auto [identity_mean, identity_se] = mean_and_stderr(ident);
    double var = 0.0;
    for (const double x : ident) {
        var += (x - identity_mean) * (x - identity_mean);
    }
    out.identity_variance = var / static_cast<double>(samples - 1);
    return out;
}

ScanMoments measure_scan_moments(std::size_t subsystem_qubits,
                                 std::size_t trials, std::uint64_t seed) {
    const SubsystemCircuit circuit =
        hardware_efficient_ansatz(subsystem_qubits, 2);
    std::vector<double> r_sums(trials, 0.0);
    std::vector<double> b_sums(trials, 0.0);
    parallel_for(0, trials, [&](std::size_t trial) {
        Rng rng(derive_seed(seed, trial));
        std::vector<double> angles(circuit.param_count());
        rng.fill_uniform_angles(angles);
        const StateVector state = run(circuit, angles);
        for (std::size_t q = 0; q < subsystem_qubits; ++q) {
            const PauliString w =
                PauliString::single(subsystem_qubits, q, Pauli::X);
            const double b = expectation(state, w);
            const double r = param_shift_grad(circuit, angles, {}, w, 0);
            b_sums[trial] += b * b;
            r_sums[trial] += r * r;
        }
    });
    ScanMoments out;
    out.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        out.sum_r_squared += r_sums[t];
        out.sum_b_squared += b_sums[t];
    }
    out.sum_r_squared /= static_cast<double>(trials);
    out.sum_b_squared /= static_cast<double>(trials);
    return out;
}

}  // namespace qpart
