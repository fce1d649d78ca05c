#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpart/config.hpp"
#include "qpart/experiments.hpp"
#include "qpart/parallel.hpp"

namespace {

// Exit codes: 0 ok, 1 unexpected, 2 config/usage, 3 file I/O,
// 4 runtime failure (non-convergence, term explosion).
enum ExitCode : int {
    kOk = 0,
    kUnexpected = 1,
    kConfigError = 2,
    kIoError = 3,
    kRuntimeError = 4,
};

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::size_t threads = 0;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path,
                    "JSON experiment configuration file");
    cmd->add_option("--preset", args.preset,
                    "named preset (see `qpart presets`)");
    cmd->add_option("--seed", args.seed, "override the run seed");
    cmd->add_option("--out", args.output_dir, "output directory");
    cmd->add_option("--threads", args.threads,
                    "worker thread cap (0 = hardware)");
}

qpart::ExperimentConfig resolve_config(const CommonArgs& args,
                                       qpart::ExperimentKind kind) {
    qpart::ExperimentConfig config;
    if (!args.config_path.empty() && !args.preset.empty()) {
        throw std::invalid_argument("give either --config or --preset");
    }
    if (!args.config_path.empty()) {
        config = qpart::load_config_file(args.config_path);
    } else if (!args.preset.empty()) {
        config = qpart::preset_config(args.preset);
    } else {
        throw std::invalid_argument("a --config file or --preset is required");
    }
    if (config.kind != kind) {
        throw std::invalid_argument(
            "config is for '" + qpart::experiment_kind_name(config.kind) +
            "', not '" + qpart::experiment_kind_name(kind) + "'");
    }
    if (args.seed) {
        config.seed = *args.seed;
    }
    if (args.output_dir) {
        config.output_dir = *args.output_dir;
    }
    qpart::set_worker_threads(args.threads);
    config.validate();
    return config;
}

int report_error(const char* kind, const std::exception& e, int code) {
    nlohmann::json record;
    record["error"] = e.what();
    record["kind"] = kind;
    record["exit_code"] = code;
    std::cerr << record.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partitioned quantum model experiments"};
    app.require_subcommand(1);

    CommonArgs args;
    struct Sub {
        CLI::App* cmd;
        qpart::ExperimentKind kind;
    };
    const Sub subs[] = {
        {app.add_subcommand("vqe", "ground-state energy minimization"),
         qpart::ExperimentKind::Vqe},
        {app.add_subcommand("classify", "digits 3-vs-6 classifier"),
         qpart::ExperimentKind::Classify},
        {app.add_subcommand("bp-scan", "gradient-variance scan"),
         qpart::ExperimentKind::BpScan},
        {app.add_subcommand("conjugate-dump",
                            "dump a conjugated observable to JSON"),
         qpart::ExperimentKind::ConjugateDump},
        {app.add_subcommand("haar-check", "moment check of random circuits"),
         qpart::ExperimentKind::HaarCheck},
    };
    for (const Sub& sub : subs) {
        add_common_options(sub.cmd, args);
    }
    CLI::App* presets_cmd =
        app.add_subcommand("presets", "list shipped preset names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (presets_cmd->parsed()) {
            for (const std::string& name : qpart::preset_names()) {
                std::cout << name << "\n";
            }
            return kOk;
        }
        for (const Sub& sub : subs) {
            if (sub.cmd->parsed()) {
                qpart::run_experiment(resolve_config(args, sub.kind));
                return kOk;
            }
        }
        return kConfigError;
    } catch (const qpart::IoError& e) {
        return report_error("io", e, kIoError);
    } catch (const std::invalid_argument& e) {
        return report_error("config", e, kConfigError);
    } catch (const std::runtime_error& e) {
        return report_error("runtime", e, kRuntimeError);
    } catch (const std::exception& e) {
        return report_error("unexpected", e, kUnexpected);
    }
}
