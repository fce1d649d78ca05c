#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qpart/optimize.hpp"
#include "qpart/partition.hpp"
#include "qpart/simulator.hpp"

namespace qpart {

/// One 8x8 handwritten-digit image (classes 3 and 6 only), with pixels
/// already scaled from [0, 16] to rotation angles in [0, pi].
struct DigitSample {
    std::array<double, 64> angles{};  // row-major: angles[8*row + column]
    int label = 0;                    // 3 or 6
    double target = 0.0;              // 0.0 for digit 3, 1.0 for digit 6
};

struct SplitDataset {
    std::vector<DigitSample> train;       // 182 samples
    std::vector<DigitSample> validation;  // 91 samples
    std::vector<DigitSample> test;        // 91 samples
    std::uint64_t seed = 0;
};

/// Loads a headerless CSV of 64 integer pixel columns plus a label column,
/// keeps only labels 3 and 6, scales pixels by pi/16, shuffles with the
/// seed and splits 182/91/91.  Fails loudly when the filtered corpus does
/// not hold exactly 364 samples (a different corpus revision).
SplitDataset load_digits_csv(const std::string& path, std::uint64_t seed);

/// Per-subsystem feature vectors: column s of the image feeds subsystem s.
Sample subsystem_features(const DigitSample& sample);

enum class PairBasis : std::uint8_t { Full, Reduced };

/// Alternating two-qubit correlation observable over 8 subsystems of 8
/// qubits: seven pair blocks indexed s = 1..7, where odd blocks correlate
/// the first qubits of subsystems (s, s+1) and even blocks the eighth
/// qubits of subsystems (s+1, s+2), each block summing one trainable real
/// coefficient per ordered basis pair.
struct PairObservableSpec {
    std::vector<Pauli> basis;

    static PairObservableSpec make(PairBasis basis);

    std::size_t block_count() const { return 7; }
    /// 7 * |basis|^2: 112 for the full basis, 28 for {I, X}.
    std::size_t coefficient_count() const;
    /// 7 * 2 * |basis| expectation slots per sample (identity slots
    /// included, matching the slot-wise accounting of the reference
    /// results): 56 full, 28 reduced.
    std::size_t expectations_per_sample() const;
};

NumericFactoredObservable build_pair_observable(const PairObservableSpec& spec,
                                                const PartitionLayout& layout);

/// Data re-uploading ansatz U(x) V(theta1) W U(x) V(theta2) W U(x) W:
/// U applies RY(x_q) to every qubit, V applies RY(theta_q), and W is the
/// CNOT ladder 0->1, ..., (n-2)->(n-1) plus the closing CNOT (n-1)->0.
/// 2n trainable parameters and n data slots (16 and 8 at the default
/// width).
SubsystemCircuit build_classifier_ansatz(std::size_t n_qubits = 8);

/// Decision rule: model outputs below the threshold predict digit 3,
/// otherwise digit 6.
int classify_output(double output, double threshold = 0.5);

/// Fraction of samples whose predicted label matches.
double classification_accuracy(const PartitionedModel& model,
                               const ModelParams& params,
                               const std::vector<DigitSample>& samples,
                               double threshold = 0.5);

/// MSE of model outputs against the regression targets.
double classification_mse(const PartitionedModel& model,
                          const ModelParams& params,
                          const std::vector<DigitSample>& samples);

SupervisedDataset to_supervised(const SplitDataset& split);

}  // namespace qpart
