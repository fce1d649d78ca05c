#include "qpart/digits.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qpart/random.hpp"

namespace qpart {

namespace {

constexpr std::size_t kImageSide = 8;
constexpr std::size_t kPixelCount = 64;
constexpr std::size_t kExpectedSamples = 364;
constexpr std::size_t kTrainSize = 182;
constexpr std::size_t kValidationSize = 91;
constexpr std::size_t kTestSize = 91;

int parse_int(const std::string& token, std::size_t line_no) {
    int value = 0;
    const auto* begin = token.data();
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": bad integer field '" + token + "'");
    }
    return value;
}

}  // namespace

SplitDataset load_digits_csv(const std::string& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset file: " + path);
    }

    std::vector<DigitSample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream row(line);
        std::string token;
        while (std::getline(row, token, ',')) {
            fields.push_back(token);
        }
        if (fields.size() != kPixelCount + 1) {
            throw std::runtime_error(
                "line " + std::to_string(line_no) + ": expected " +
                std::to_string(kPixelCount + 1) + " columns, found " +
                std::to_string(fields.size()));
        }
        const int label = parse_int(fields.back(), line_no);
        if (label < 0 || label > 9) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": unknown label " +
                                     std::to_string(label));
        }
        if (label != 3 && label != 6) {
            continue;
        }
        DigitSample sample;
        sample.label = label;
        sample.target = label == 3 ? 0.0 : 1.0;
        for (std::size_t i = 0; i < kPixelCount; ++i) {
            const int pixel = parse_int(fields[i], line_no);
            if (pixel < 0 || pixel > 16) {
                throw std::runtime_error("line " + std::to_string(line_no) +
                                         ": pixel value " +
                                         std::to_string(pixel) +
                                         " outside [0, 16]");
            }
            sample.angles[i] =
                static_cast<double>(pixel) * std::numbers::pi / 16.0;
        }
        samples.push_back(sample);
    }

    if (samples.size() != kExpectedSamples) {
        throw std::runtime_error(
            "dataset at " + path + " holds " + std::to_string(samples.size()) +
            " samples of digits 3 and 6, expected exactly " +
            std::to_string(kExpectedSamples) +
            " (different corpus revision?)");
    }

    Rng rng(seed);
    for (std::size_t i = samples.size(); i-- > 1;) {
        std::swap(samples[i], samples[rng.index(i + 1)]);
    }

    SplitDataset split;
    split.seed = seed;
    split.train.assign(samples.begin(), samples.begin() + kTrainSize);
    split.validation.assign(samples.begin() + kTrainSize,
                            samples.begin() + kTrainSize + kValidationSize);
    split.test.assign(samples.begin() + kTrainSize + kValidationSize,
                      samples.end());
    if (split.test.size() != kTestSize) {
        throw std::runtime_error("split bookkeeping failed");
    }
    return split;
}

Sample subsystem_features(const DigitSample& sample) {
    Sample features(kImageSide, std::vector<double>(kImageSide, 0.0));
    for (std::size_t column = 0; column < kImageSide; ++column) {
        for (std::size_t row = 0; row < kImageSide; ++row) {
            features[column][row] = sample.angles[kImageSide * row + column];
        }
    }
    return features;
}

PairObservableSpec PairObservableSpec::make(PairBasis basis) {
    PairObservableSpec spec;
    if (basis == PairBasis::Full) {
        spec.basis = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
    } else {
        spec.basis = {Pauli::I, Pauli::X};
    }
    return spec;
}

std::size_t PairObservableSpec::coefficient_count() const {
    return block_count() * basis.size() * basis.size();
}

std::size_t PairObservableSpec::expectations_per_sample() const {
    return block_count() * 2 * basis.size();
}

NumericFactoredObservable build_pair_observable(
    const PairObservableSpec& spec, const PartitionLayout& layout) {
    if (layout.subsystem_count() != 8) {
        throw std::invalid_argument("pair observable needs 8 subsystems");
    }
    for (std::size_t s = 0; s < layout.subsystem_count(); ++s) {
        if (layout.subsystem_size(s) != 8) {
            throw std::invalid_argument(
                "pair observable needs 8 qubits per subsystem");
        }
    }

    NumericFactoredObservable obs{layout, spec.coefficient_count(), {},
                                  spec.expectations_per_sample()};
    std::size_t slot = 0;
    for (std::size_t block = 1; block <= spec.block_count(); ++block) {
        // Odd blocks correlate the first qubits of (block, block+1); even
        // blocks the eighth qubits of (block+1, block+2).  1-based in the
        // description, 0-based here.
        const bool odd = block % 2 == 1;
        const std::size_t first = odd ? block - 1 : block;
        const std::size_t second = first + 1;
        const std::size_t qubit = odd ? 0 : 7;
        for (const Pauli a : spec.basis) {
            for (const Pauli b : spec.basis) {
                NumericTerm term;
                term.coefficient_slot = slot++;
                term.factors.reserve(layout.subsystem_count());
                for (std::size_t s = 0; s < layout.subsystem_count(); ++s) {
                    term.factors.emplace_back(layout.subsystem_size(s));
                }
                term.factors[first].set_op(qubit, a);
                term.factors[second].set_op(qubit, b);
                obs.terms.push_back(std::move(term));
            }
        }
    }
    return obs;
}

SubsystemCircuit build_classifier_ansatz(std::size_t n_qubits) {
    SubsystemCircuit c(n_qubits);
    const auto upload = [&]() {
        for (std::size_t q = 0; q < n_qubits; ++q) {
            c.ry_data(q, q);
        }
    };
    const auto rotations = [&](std::size_t block) {
        for (std::size_t q = 0; q < n_qubits; ++q) {
            c.ry_param(q, block * n_qubits + q);
        }
    };
    const auto entangle = [&]() {
        for (std::size_t q = 0; q + 1 < n_qubits; ++q) {
            c.cnot(q, q + 1);
        }
        c.cnot(n_qubits - 1, 0);  // closing gate of the ladder
    };

    upload();
    rotations(0);
    entangle();
    upload();
    rotations(1);
    entangle();
    upload();
    entangle();
    return c;
}

int classify_output(double output, double threshold) {
    return output < threshold ? 3 : 6;
}

double classification_accuracy(const PartitionedModel& model,
                               const ModelParams& params,
                               const std::vector<DigitSample>& samples,
                               double threshold) {
    if (samples.empty()) {
        return 0.0;
    }
    std::size_t correct = 0;
    for (const DigitSample& sample : samples) {
        const Sample features = subsystem_features(sample);
        if (classify_output(forward(model, params, &features), threshold) ==
            sample.label) {
            ++correct;
        }
    }
    return static_cast<double>(correct) /
           static_cast<double>(samples.size());
}

double classification_mse(const PartitionedModel& model,
                          const ModelParams& params,
                          const std::vector<DigitSample>& samples) {
    std::vector<Sample> inputs;
    std::vector<double> targets;
    inputs.reserve(samples.size());
    targets.reserve(samples.size());
    for (const DigitSample& sample : samples) {
        inputs.push_back(subsystem_features(sample));
        targets.push_back(sample.target);
    }
    return mean_squared_error(model, params, inputs, targets);
}

SupervisedDataset to_supervised(const SplitDataset& split) {
    SupervisedDataset data;
    for (const DigitSample& sample : split.train) {
        data.train_inputs.push_back(subsystem_features(sample));
        data.train_targets.push_back(sample.target);
    }
    for (const DigitSample& sample : split.validation) {
        data.validation_inputs.push_back(subsystem_features(sample));
        data.validation_targets.push_back(sample.target);
    }
    return data;
}

}  // namespace qpart
