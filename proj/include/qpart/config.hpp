#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpart/digits.hpp"
#include "qpart/hamiltonian.hpp"
#include "qpart/variance.hpp"

namespace qpart {

/// File-level failures (missing dataset, unwritable output) — mapped to a
/// distinct process exit code by the CLI.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind : std::uint8_t {
    Vqe,
    Classify,
    BpScan,
    ConjugateDump,
    HaarCheck,
};

std::string experiment_kind_name(ExperimentKind kind);

struct VqeConfig {
    TfimSpec tfim{4, 1.0, 1.0};
    std::size_t subsystems = 2;
    std::vector<std::string> factors;  // text Pauli strings, 1-based qubits
    std::size_t steps = 200;
    double learning_rate = 0.1;

    bool operator==(const VqeConfig&) const = default;
};

struct ClassifyConfig {
    std::string dataset;
    PairBasis basis = PairBasis::Full;
    std::size_t epochs = 400;
    double learning_rate = 0.1;

    bool operator==(const ClassifyConfig&) const = default;
};

struct BpScanConfig {
    VarianceScanSpec scan{};

    bool operator==(const BpScanConfig&) const = default;
};

struct HaarCheckConfig {
    std::size_t qubits = 2;
    std::size_t depth = 8;
    std::size_t samples = 10000;

    bool operator==(const HaarCheckConfig&) const = default;
};

struct ConjugateDumpConfig {
    TfimSpec tfim{8, 1.0, 1.0};
    std::size_t subsystems = 2;
    std::vector<std::string> factors;

    bool operator==(const ConjugateDumpConfig&) const = default;
};

/// One experiment run: exactly one kind-specific block is active.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Vqe;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    std::optional<VqeConfig> vqe;
    std::optional<ClassifyConfig> classify;
    std::optional<BpScanConfig> bp_scan;
    std::optional<HaarCheckConfig> haar_check;
    std::optional<ConjugateDumpConfig> conjugate_dump;

    bool operator==(const ExperimentConfig&) const = default;

    /// Throws unless exactly the block matching kind is present and every
    /// referenced file exists.
    void validate() const;
};

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Shipped presets: the six ground-state rows (vqe-n4 ... vqe-n16), both
/// classifier bases, the variance scan and the moment check.
std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name,
                               const std::string& dataset_path = "");

}  // namespace qpart
