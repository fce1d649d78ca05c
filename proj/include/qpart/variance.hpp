#pragma once

#include <cstdint>
#include <vector>

#include "qpart/partition.hpp"

namespace qpart {

/// Gradient-variance scan: grow the system one fixed-size subsystem at a
/// time, measure every two-local X(x)X string between distinct subsystems,
/// and sample the gradient with respect to the first parameter of the
/// first subsystem over random initializations.  Only subsystem-sized
/// simulations ever run, whatever the total qubit count.
struct VarianceScanSpec {
    std::size_t subsystem_qubits = 8;
    std::size_t min_subsystems = 2;
    std::size_t max_subsystems = 8;
    std::size_t trials = 20;
    std::uint64_t seed = 1;
    /// 0 fixes every observable coefficient to 1; a positive value draws
    /// them per trial from a zero-mean normal with this sigma.
    double coefficient_sigma = 0.0;

    bool operator==(const VarianceScanSpec&) const = default;
};

struct VarianceScanPoint {
    std::size_t total_qubits = 0;
    std::size_t subsystems = 0;
    double variance = 0.0;  // unbiased, over trials
    std::size_t trials = 0;
    /// Circuit runs + expectation evaluations spent on this point; grows
    /// linearly in the subsystem count.
    std::size_t operations = 0;
};

std::vector<VarianceScanPoint> run_variance_scan(const VarianceScanSpec& spec);

/// The model used per scan point (exposed for tests).
PartitionedModel build_scan_model(std::size_t subsystems,
                                  std::size_t subsystem_qubits);

/// Empirical second moments of subsystem expectations under deep random
/// circuits (approximate 2-designs): B = <0| U' W U |0> for W = Z on the
/// first qubit, and the cross moment for the pair (X, Z) on the first
/// qubit.  For Haar-random U, E[B^2] = 1/(2^n + 1) and the cross moment
/// vanishes; the identity operator gives B = 1 with zero variance.
struct HaarMoments {
    std::size_t samples = 0;
    std::size_t dimension = 0;      // 2^n
    double mean_square = 0.0;       // mean of B^2, W = Z1
    double stderr_square = 0.0;
    double mean_cross = 0.0;        // mean of B_X * B_Z
    double stderr_cross = 0.0;
    double identity_variance = 0.0; // variance of <I>, exactly 0
};

HaarMoments haar_moment_check(std::size_t n_qubits, std::size_t depth,
                              std::size_t samples, std::uint64_t seed);

/// Moments that feed the semi-analytic variance prediction: over random
/// parameters of one scan-ansatz subsystem, the sums over i of E[R_i^2]
/// (squared shift-rule gradient of <X_i> w.r.t. the first parameter) and
/// of E[<X_i>^2].
struct ScanMoments {
    double sum_r_squared = 0.0;
    double sum_b_squared = 0.0;
    std::size_t trials = 0;
};

ScanMoments measure_scan_moments(std::size_t subsystem_qubits,
                                 std::size_t trials, std::uint64_t seed);

}  // namespace qpart
