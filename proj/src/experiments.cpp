#include "qpart/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "qpart/digits.hpp"
#include "qpart/optimize.hpp"
#include "qpart/parallel.hpp"
#include "qpart/variance.hpp"

namespace qpart {

namespace {

using nlohmann::json;

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

std::filesystem::path prepare_output_dir(const ExperimentConfig& config) {
    std::filesystem::path dir(config.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() +
                      ": " + ec.message());
    }
    return dir;
}

void write_manifest(const std::filesystem::path& dir,
                    const ExperimentConfig& config, double wall_seconds) {
    json j;
    j["config"] = json::parse(config_to_json(config));
    j["seed"] = config.seed;
    j["version"] = kVersion;
    j["threads"] = worker_threads();
    j["wall_seconds"] = wall_seconds;
    open_output(dir / "manifest.json") << j.dump(2) << "\n";
}

json budget_to_json(const MeasurementBudget& budget) {
    return json{{"unique_expectations", budget.unique_expectations},
                {"simulated_expectations", budget.simulated_expectations},
                {"term_count", budget.term_count},
                {"coefficient_count", budget.coefficient_count}};
}

void run_vqe_experiment(const ExperimentConfig& config,
                        const std::filesystem::path& dir) {
    const VqeConfig& vc = *config.vqe;
    const PartitionedModel model = build_vqe_model(vc);

    VqeOptions options;
    options.steps = vc.steps;
    options.adam.learning_rate = vc.learning_rate;
    options.seed = config.seed;
    const VqeResult result = run_vqe(model, options);
    const double exact = exact_ground_energy(vc.tfim);
    const double relative_error = (result.best_energy - exact) / exact;

    auto trace = open_output(dir / "energy_trace.csv");
    trace << "step,energy,best_energy\n";
    double best = std::numeric_limits<double>::infinity();
    for (const TrainRecord& r : result.log.records) {
        best = std::min(best, r.loss);
        trace << r.step << ',' << format_double(r.loss) << ','
              << format_double(best) << "\n";
    }

    json summary;
    summary["experiment"] = "vqe";
    summary["sites"] = vc.tfim.sites;
    summary["subsystems"] = vc.subsystems;
    summary["coupling"] = vc.tfim.coupling;
    summary["field"] = vc.tfim.field;
    summary["seed"] = config.seed;
    summary["steps"] = vc.steps;
    summary["learning_rate"] = vc.learning_rate;
    summary["final_energy"] = result.final_energy;
    summary["best_energy"] = result.best_energy;
    summary["best_step"] = result.best_step;
    summary["exact_energy"] = exact;
    summary["relative_error"] = relative_error;
    summary["abs_relative_error"] = std::abs(relative_error);
    summary["budget"] = budget_to_json(measurement_budget(model));
    open_output(dir / "summary.json") << summary.dump(2) << "\n";
}

void run_classify_experiment(const ExperimentConfig& config,
                             const std::filesystem::path& dir) {
    const ClassifyConfig& cc = *config.classify;
    const SplitDataset split = load_digits_csv(cc.dataset, config.seed);
    const PartitionedModel model = build_classifier_model(cc.basis);

    SupervisedOptions options;
    options.epochs = cc.epochs;
    options.adam.learning_rate = cc.learning_rate;
    options.seed = config.seed;
    const SupervisedResult result =
        run_supervised(model, to_supervised(split), options);

    auto trace = open_output(dir / "loss_trace.csv");
    trace << "epoch,train_mse,val_mse\n";
    for (const EpochRecord& r : result.log) {
        trace << r.epoch << ',' << format_double(r.train_mse) << ','
              << format_double(r.validation_mse) << "\n";
    }

    const ModelParams& params = result.selected_params;
    struct Row {
        const char* name;
        const std::vector<DigitSample>& samples;
    };
    const Row rows[] = {{"Training", split.train},
                        {"Validation", split.validation},
                        {"Testing", split.test}};
    auto accuracy_csv = open_output(dir / "accuracy.csv");
    accuracy_csv << "split,accuracy,mse\n";
    json accuracy_json;
    for (const Row& row : rows) {
        const double acc =
            classification_accuracy(model, params, row.samples);
        const double mse = classification_mse(model, params, row.samples);
        accuracy_csv << row.name << ',' << format_double(acc) << ','
                     << format_double(mse) << "\n";
        accuracy_json[row.name] = {{"accuracy", acc}, {"mse", mse}};
    }

    json summary;
    summary["experiment"] = "classify";
    summary["basis"] = cc.basis == PairBasis::Full ? "full" : "reduced";
    summary["seed"] = config.seed;
    summary["epochs"] = cc.epochs;
    summary["learning_rate"] = cc.learning_rate;
    summary["selected_epoch"] = result.selected_epoch;
    summary["selected_validation_mse"] = result.selected_validation_mse;
    summary["results"] = accuracy_json;
    summary["rotation_parameters"] = model.theta_count();
    summary["coefficient_parameters"] = model.coefficient_count();
    summary["total_parameters"] = model.parameter_count();
    summary["budget"] = budget_to_json(measurement_budget(model));
    open_output(dir / "summary.json") << summary.dump(2) << "\n";
}

void run_scan_experiment(const ExperimentConfig& config,
                         const std::filesystem::path& dir) {
    VarianceScanSpec spec = config.bp_scan->scan;
    spec.seed = config.seed;
    const auto points = run_variance_scan(spec);

    auto csv = open_output(dir / "variance.csv");
    csv << "n_qubits,variance,trials,seed\n";
    for (const VarianceScanPoint& p : points) {
        csv << p.total_qubits << ',' << format_double(p.variance) << ','
            << p.trials << ',' << config.seed << "\n";
    }

    json summary;
    summary["experiment"] = "bp-scan";
    summary["seed"] = config.seed;
    json points_json = json::array();
    for (const VarianceScanPoint& p : points) {
        points_json.push_back({{"n_qubits", p.total_qubits},
                               {"subsystems", p.subsystems},
                               {"variance", p.variance},
                               {"operations", p.operations}});
    }
    summary["points"] = std::move(points_json);
    summary["variance_ratio_last_to_first"] =
        points.back().variance / points.front().variance;
    open_output(dir / "summary.json") << summary.dump(2) << "\n";
}

void run_haar_experiment(const ExperimentConfig& config,
                         const std::filesystem::path& dir) {
    const HaarCheckConfig& hc = *config.haar_check;
    const HaarMoments moments =
        haar_moment_check(hc.qubits, hc.depth, hc.samples, config.seed);
    const double expected =
        1.0 / (static_cast<double>(moments.dimension) + 1.0);

    auto csv = open_output(dir / "haar_moments.csv");
    csv << "qubits,samples,mean_b_squared,stderr_b_squared,"
           "expected_b_squared,mean_cross,stderr_cross,identity_variance\n";
    csv << hc.qubits << ',' << moments.samples << ','
        << format_double(moments.mean_square) << ','
        << format_double(moments.stderr_square) << ','
        << format_double(expected) << ','
        << format_double(moments.mean_cross) << ','
        << format_double(moments.stderr_cross) << ','
        << format_double(moments.identity_variance) << "\n";

    json summary;
    summary["experiment"] = "haar-check";
    summary["seed"] = config.seed;
    summary["qubits"] = hc.qubits;
    summary["depth"] = hc.depth;
    summary["samples"] = moments.samples;
    summary["mean_b_squared"] = moments.mean_square;
    summary["stderr_b_squared"] = moments.stderr_square;
    summary["expected_b_squared"] = expected;
    summary["mean_cross"] = moments.mean_cross;
    summary["stderr_cross"] = moments.stderr_cross;
    summary["identity_variance"] = moments.identity_variance;
    open_output(dir / "summary.json") << summary.dump(2) << "\n";
}

void run_dump_experiment(const ExperimentConfig& config,
                         const std::filesystem::path& dir) {
    const ConjugateDumpConfig& dc = *config.conjugate_dump;
    if (dc.tfim.sites % dc.subsystems != 0) {
        throw std::invalid_argument(
            "site count must divide evenly into subsystems");
    }
    const PartitionLayout layout = PartitionLayout::uniform(
        dc.subsystems, dc.tfim.sites / dc.subsystems);
    std::vector<PauliString> factors;
    for (const std::string& text : dc.factors) {
        factors.push_back(PauliString::parse(text, dc.tfim.sites));
    }
    const RestrictedUnitary v(dc.tfim.sites, std::move(factors));
    const Observable h = build_tfim(dc.tfim);
    ConjugateReport report;
    const FactoredObservable factored =
        conjugate_observable(v, h, layout, {}, &report);

    open_output(dir / "factored.json") << factored.to_json() << "\n";

    json summary;
    summary["experiment"] = "conjugate-dump";
    summary["sites"] = dc.tfim.sites;
    summary["subsystems"] = dc.subsystems;
    summary["term_count"] = factored.terms.size();
    summary["operator_pool_size"] = factored.operator_pool().size();
    json sources = json::array();
    for (const auto& s : report.sources) {
        sources.push_back({{"source", s.source.str()},
                           {"retained_factors", s.retained_factors},
                           {"expansion_terms", s.expansion_terms}});
    }
    summary["sources"] = std::move(sources);
    open_output(dir / "summary.json") << summary.dump(2) << "\n";
}

}  // namespace

PartitionedModel build_vqe_model(const VqeConfig& config) {
    const std::size_t sites = config.tfim.sites;
    if (config.subsystems == 0 || sites % config.subsystems != 0) {
        throw std::invalid_argument(
            "site count must divide evenly into subsystems");
    }
    const std::size_t per = sites / config.subsystems;
    const PartitionLayout layout =
        PartitionLayout::uniform(config.subsystems, per);

    std::vector<PauliString> factors;
    factors.reserve(config.factors.size());
    for (const std::string& text : config.factors) {
        factors.push_back(PauliString::parse(text, sites));
    }
    const RestrictedUnitary v(sites, std::move(factors));
    const Observable h = build_tfim(config.tfim);
    FactoredObservable factored = conjugate_observable(v, h, layout);

    std::vector<SubsystemCircuit> circuits;
    circuits.reserve(config.subsystems);
    for (std::size_t s = 0; s < config.subsystems; ++s) {
        circuits.push_back(hardware_efficient_ansatz(per, 2));
    }
    return PartitionedModel(std::move(circuits), std::move(factored));
}

PartitionedModel build_classifier_model(PairBasis basis) {
    const PartitionLayout layout = PartitionLayout::uniform(8, 8);
    NumericFactoredObservable obs =
        build_pair_observable(PairObservableSpec::make(basis), layout);
    std::vector<SubsystemCircuit> circuits;
    circuits.reserve(8);
    for (std::size_t s = 0; s < 8; ++s) {
        circuits.push_back(build_classifier_ansatz(8));
    }
    return PartitionedModel(std::move(circuits), std::move(obs));
}

void run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto dir = prepare_output_dir(config);
    const auto start = std::chrono::steady_clock::now();
    switch (config.kind) {
        case ExperimentKind::Vqe: run_vqe_experiment(config, dir); break;
        case ExperimentKind::Classify:
            run_classify_experiment(config, dir);
            break;
        case ExperimentKind::BpScan: run_scan_experiment(config, dir); break;
        case ExperimentKind::HaarCheck:
            run_haar_experiment(config, dir);
            break;
        case ExperimentKind::ConjugateDump:
            run_dump_experiment(config, dir);
            break;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();
    write_manifest(dir, config, wall);
}

}  // namespace qpart
