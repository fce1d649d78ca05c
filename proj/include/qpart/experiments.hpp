#pragma once

#include <string>

#include "qpart/config.hpp"
#include "qpart/partition.hpp"

namespace qpart {

inline constexpr const char* kVersion = "0.1.0";

/// Ground-state model for one configuration row: equal subsystems, the
/// two-round hardware-efficient ansatz per subsystem, and the conjugated
/// Ising Hamiltonian as the observable.
PartitionedModel build_vqe_model(const VqeConfig& config);

/// Digits classifier model: 8 subsystems of 8 qubits, the data
/// re-uploading ansatz, and the alternating pair observable.
PartitionedModel build_classifier_model(PairBasis basis);

/// Runs the configured experiment and writes its result files (CSV traces,
/// summary.json, manifest.json) into config.output_dir.  File contents are
/// byte-stable for a fixed config, seed and thread count; wall-clock
/// timings appear only in the manifest.
void run_experiment(const ExperimentConfig& config);

}  // namespace qpart
