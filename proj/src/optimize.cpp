#include "qpart/optimize.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qpart/parallel.hpp"
#include "qpart/random.hpp"

namespace qpart {

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

double l2_norm(std::span<const double> v) {
    double sum = 0.0;
    for (const double x : v) {
        sum += x * x;
    }
    return std::sqrt(sum);
}

ModelParams split_params(const PartitionedModel& model,
                         std::span<const double> flat) {
    ModelParams p;
    p.theta.assign(flat.begin(), flat.begin() + model.theta_count());
    p.coeffs.assign(flat.begin() + model.theta_count(), flat.end());
    return p;
}

}  // namespace

AdamState::AdamState(std::size_t parameter_count, AdamConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void AdamState::step(std::span<double> params,
                     std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw std::invalid_argument("parameter/gradient size mismatch");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw std::runtime_error("non-finite gradient at slot " +
                                     std::to_string(i));
        }
    }
    ++step_;
    const double bias1 = 1.0 - std::pow(config_.beta1, step_);
    const double bias2 = 1.0 - std::pow(config_.beta2, step_);
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grads[i];
        v_[i] = config_.beta2 * v_[i] +
                (1.0 - config_.beta2) * grads[i] * grads[i];
        const double m_hat = m_[i] / bias1;
        const double v_hat = v_[i] / bias2;
        params[i] -=
            config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
}

VqeResult run_vqe(const PartitionedModel& model, const VqeOptions& options) {
    Rng rng(options.seed);
    ModelParams params;
    params.theta.resize(model.theta_count());
    params.coeffs.resize(model.coefficient_count());
    rng.fill_uniform_angles(params.theta);
    rng.fill_uniform_angles(params.coeffs);

    AdamState adam(model.parameter_count(), options.adam);
    std::vector<double> flat = params.flattened();

    VqeResult result;
    result.best_energy = std::numeric_limits<double>::infinity();
    const auto start = std::chrono::steady_clock::now();

    for (std::size_t step = 1; step <= options.steps; ++step) {
        const ModelParams current = split_params(model, flat);
        const ValueAndGrads vg = value_and_grads(model, current);
        std::vector<double> grad;
        grad.reserve(model.parameter_count());
        grad.insert(grad.end(), vg.theta.begin(), vg.theta.end());
        grad.insert(grad.end(), vg.coeffs.begin(), vg.coeffs.end());

        result.log.records.push_back(
            {step, vg.value, l2_norm(grad), elapsed_seconds(start)});
        if (vg.value < result.best_energy) {
            result.best_energy = vg.value;
            result.best_params = current;
            result.best_step = step;
        }
        adam.step(flat, grad);
    }

    result.final_params = split_params(model, flat);
    result.final_energy = forward(model, result.final_params);
    if (result.final_energy < result.best_energy) {
        result.best_energy = result.final_energy;
        result.best_params = result.final_params;
        result.best_step = options.steps + 1;
    }
    return result;
}

double mean_squared_error(const PartitionedModel& model,
                          const ModelParams& params,
                          std::span<const Sample> inputs,
                          std::span<const double> targets) {
    if (inputs.size() != targets.size()) {
        throw std::invalid_argument("inputs and targets differ in length");
    }
    std::vector<double> outputs(inputs.size(), 0.0);
    parallel_for(0, inputs.size(), [&](std::size_t k) {
        outputs[k] = forward(model, params, &inputs[k]);
    });
    double sum = 0.0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const double diff = outputs[k] - targets[k];
        sum += diff * diff;
    }
    return inputs.empty() ? 0.0 : sum / static_cast<double>(inputs.size());
}

SupervisedResult run_supervised(const PartitionedModel& model,
                                const SupervisedDataset& dataset,
                                const SupervisedOptions& options) {
    const std::size_t n_train = dataset.train_inputs.size();
    if (n_train == 0 || n_train != dataset.train_targets.size()) {
        throw std::invalid_argument("bad training split");
    }
    if (dataset.validation_inputs.size() !=
        dataset.validation_targets.size()) {
        throw std::invalid_argument("bad validation split");
    }

    Rng rng(options.seed);
    ModelParams params;
    params.theta.resize(model.theta_count());
    params.coeffs.resize(model.coefficient_count());
    rng.fill_uniform_angles(params.theta);
    for (double& d : params.coeffs) {
        d = options.coefficient_sigma * rng.normal();
    }

    AdamState adam(model.parameter_count(), options.adam);
    std::vector<double> flat = params.flattened();

    SupervisedResult result;
    double best_val = std::numeric_limits<double>::infinity();
    const auto start = std::chrono::steady_clock::now();

    std::vector<double> outputs(n_train, 0.0);
    std::vector<std::vector<double>> theta_grads(n_train);
    std::vector<std::vector<double>> coeff_grads(n_train);

    for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
        const ModelParams current = split_params(model, flat);

        // One pass over the training set; per-sample work is independent
        // and the reduction below runs in sample order.
        parallel_for(0, n_train, [&](std::size_t k) {
            const ValueAndGrads vg =
                value_and_grads(model, current, &dataset.train_inputs[k]);
            outputs[k] = vg.value;
            theta_grads[k] = vg.theta;
            coeff_grads[k] = vg.coeffs;
        });

        double train_mse = 0.0;
        std::vector<double> grad(model.parameter_count(), 0.0);
        for (std::size_t k = 0; k < n_train; ++k) {
            const double diff = outputs[k] - dataset.train_targets[k];
            train_mse += diff * diff;
            const double scale = 2.0 * diff / static_cast<double>(n_train);
            for (std::size_t i = 0; i < model.theta_count(); ++i) {
                grad[i] += scale * theta_grads[k][i];
            }
            for (std::size_t i = 0; i < model.coefficient_count(); ++i) {
                grad[model.theta_count() + i] += scale * coeff_grads[k][i];
            }
        }
        train_mse /= static_cast<double>(n_train);

        const double val_mse =
            mean_squared_error(model, current, dataset.validation_inputs,
                               dataset.validation_targets);
        result.log.push_back({epoch, train_mse, val_mse, l2_norm(grad),
                              elapsed_seconds(start)});
        if (val_mse < best_val) {
            best_val = val_mse;
            result.selected_params = current;
            result.selected_epoch = epoch;
            result.selected_validation_mse = val_mse;
        }
        adam.step(flat, grad);
    }

    result.final_params = split_params(model, flat);
    return result;
}

}  // namespace qpart
