#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qpart/partition.hpp"

namespace qpart {

struct AdamConfig {
    double learning_rate = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Bias-corrected Adam.  step() is deterministic and pure given the state,
/// parameter and gradient values; a non-finite gradient component aborts
/// with the offending slot.
class AdamState {
  public:
    AdamState(std::size_t parameter_count, AdamConfig config = {});

    void step(std::span<double> params, std::span<const double> grads);

    std::size_t step_count() const { return step_; }
    const AdamConfig& config() const { return config_; }
    const std::vector<double>& first_moment() const { return m_; }
    const std::vector<double>& second_moment() const { return v_; }

  private:
    AdamConfig config_;
    std::size_t step_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

struct TrainRecord {
    std::size_t step = 0;
    double loss = 0.0;
    double grad_norm = 0.0;
    double seconds = 0.0;
};

struct TrainLog {
    std::vector<TrainRecord> records;
};

struct VqeOptions {
    std::size_t steps = 200;
    AdamConfig adam{};
    std::uint64_t seed = 1;
};

struct VqeResult {
    TrainLog log;
    ModelParams best_params;
    double best_energy = 0.0;
    std::size_t best_step = 0;
    ModelParams final_params;
    double final_energy = 0.0;
};

/// Minimizes the model energy over rotations and coefficient angles
/// jointly.  All parameters start uniform on [0, 2*pi); the best energy
/// seen over the run (including the post-update final point) is returned.
VqeResult run_vqe(const PartitionedModel& model, const VqeOptions& options);

struct SupervisedDataset {
    std::vector<Sample> train_inputs;
    std::vector<double> train_targets;
    std::vector<Sample> validation_inputs;
    std::vector<double> validation_targets;
};

struct SupervisedOptions {
    std::size_t epochs = 400;
    AdamConfig adam{};
    std::uint64_t seed = 1;
    /// Standard deviation of the zero-mean normal initialization of the
    /// observable coefficients; rotations start uniform on [0, 2*pi).
    double coefficient_sigma = 0.1;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_mse = 0.0;
    double validation_mse = 0.0;
    double grad_norm = 0.0;
    double seconds = 0.0;
};

struct SupervisedResult {
    std::vector<EpochRecord> log;
    ModelParams selected_params;  // validation-minimum snapshot
    std::size_t selected_epoch = 0;
    double selected_validation_mse = 0.0;
    ModelParams final_params;
};

/// Full-batch MSE training: one epoch is exactly one pass over the training
/// set and one Adam update.  Every epoch records train and validation MSE
/// at the pre-update parameters; the returned selection is the snapshot
/// with minimum validation MSE (earliest epoch on ties).
SupervisedResult run_supervised(const PartitionedModel& model,
                                const SupervisedDataset& dataset,
                                const SupervisedOptions& options);

/// Mean squared error of model outputs against targets.
double mean_squared_error(const PartitionedModel& model,
                          const ModelParams& params,
                          std::span<const Sample> inputs,
                          std::span<const double> targets);

}  // namespace qpart
