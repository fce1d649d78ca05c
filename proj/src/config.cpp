#include "qpart/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qpart {

namespace {

using nlohmann::json;

const char* kKindNames[] = {"vqe", "classify", "bp-scan", "conjugate-dump",
                            "haar-check"};

ExperimentKind kind_from_name(const std::string& name) {
    for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
        if (name == kKindNames[i]) {
            return static_cast<ExperimentKind>(i);
        }
    }
    throw std::invalid_argument("unknown experiment kind '" + name + "'");
}

json vqe_to_json(const VqeConfig& c) {
    return json{{"sites", c.tfim.sites},
                {"coupling", c.tfim.coupling},
                {"field", c.tfim.field},
                {"subsystems", c.subsystems},
                {"factors", c.factors},
                {"steps", c.steps},
                {"learning_rate", c.learning_rate}};
}

VqeConfig vqe_from_json(const json& j) {
    VqeConfig c;
    c.tfim.sites = j.at("sites").get<std::size_t>();
    c.tfim.coupling = j.at("coupling").get<double>();
    c.tfim.field = j.at("field").get<double>();
    c.subsystems = j.at("subsystems").get<std::size_t>();
    c.factors = j.at("factors").get<std::vector<std::string>>();
    c.steps = j.at("steps").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    return c;
}

json classify_to_json(const ClassifyConfig& c) {
    return json{{"dataset", c.dataset},
                {"basis", c.basis == PairBasis::Full ? "full" : "reduced"},
                {"epochs", c.epochs},
                {"learning_rate", c.learning_rate}};
}

ClassifyConfig classify_from_json(const json& j) {
    ClassifyConfig c;
    c.dataset = j.at("dataset").get<std::string>();
    const auto basis = j.at("basis").get<std::string>();
    if (basis == "full") {
        c.basis = PairBasis::Full;
    } else if (basis == "reduced") {
        c.basis = PairBasis::Reduced;
    } else {
        throw std::invalid_argument("basis must be 'full' or 'reduced'");
    }
    c.epochs = j.at("epochs").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    return c;
}

json scan_to_json(const BpScanConfig& c) {
    return json{{"subsystem_qubits", c.scan.subsystem_qubits},
                {"min_subsystems", c.scan.min_subsystems},
                {"max_subsystems", c.scan.max_subsystems},
                {"trials", c.scan.trials},
                {"coefficient_sigma", c.scan.coefficient_sigma}};
}

BpScanConfig scan_from_json(const json& j) {
    BpScanConfig c;
    c.scan.subsystem_qubits = j.at("subsystem_qubits").get<std::size_t>();
    c.scan.min_subsystems = j.at("min_subsystems").get<std::size_t>();
    c.scan.max_subsystems = j.at("max_subsystems").get<std::size_t>();
    c.scan.trials = j.at("trials").get<std::size_t>();
    c.scan.coefficient_sigma = j.at("coefficient_sigma").get<double>();
    return c;
}

json haar_to_json(const HaarCheckConfig& c) {
    return json{{"qubits", c.qubits},
                {"depth", c.depth},
                {"samples", c.samples}};
}

HaarCheckConfig haar_from_json(const json& j) {
    HaarCheckConfig c;
    c.qubits = j.at("qubits").get<std::size_t>();
    c.depth = j.at("depth").get<std::size_t>();
    c.samples = j.at("samples").get<std::size_t>();
    return c;
}

json dump_to_json(const ConjugateDumpConfig& c) {
    return json{{"sites", c.tfim.sites},
                {"coupling", c.tfim.coupling},
                {"field", c.tfim.field},
                {"subsystems", c.subsystems},
                {"factors", c.factors}};
}

ConjugateDumpConfig dump_from_json(const json& j) {
    ConjugateDumpConfig c;
    c.tfim.sites = j.at("sites").get<std::size_t>();
    c.tfim.coupling = j.at("coupling").get<double>();
    c.tfim.field = j.at("field").get<double>();
    c.subsystems = j.at("subsystems").get<std::size_t>();
    c.factors = j.at("factors").get<std::vector<std::string>>();
    return c;
}

const std::vector<std::string>& table_factors(std::size_t sites) {
    static const std::vector<std::string> n4 = {"Z2 Y3", "Y1 Z4"};
    static const std::vector<std::string> n6 = {"Z3 Y4", "Y1 Z6"};
    static const std::vector<std::string> n8 = {"Z3 Y4", "Z4 Y5", "Z5 Y6",
                                                "Z7 Y8", "Y1 Z8", "Z1 Y2"};
    static const std::vector<std::string> n10 = {"Z4 Y5",  "Z5 Y6", "Z6 Y7",
                                                 "Z9 Y10", "Y1 Z10",
                                                 "Z1 Y2"};
    static const std::vector<std::string> n12 = {
        "Z3 Y4",   "Z4 Y5",  "Z5 Y6", "Z7 Y8", "Z8 Y9",
        "Z9 Y10",  "Z11 Y12", "Y1 Z12", "Z1 Y2"};
    static const std::vector<std::string> n16 = {
        "Z3 Y4",   "Z4 Y5",   "Z5 Y6",   "Z7 Y8",   "Z8 Y9",  "Z9 Y10",
        "Z11 Y12", "Z12 Y13", "Z13 Y14", "Z15 Y16", "Y1 Z16", "Z1 Y2"};
    switch (sites) {
        case 4: return n4;
        case 6: return n6;
        case 8: return n8;
        case 10: return n10;
        case 12: return n12;
        case 16: return n16;
    }
    throw std::invalid_argument("no shipped factor set for " +
                                std::to_string(sites) + " sites");
}

std::size_t table_subsystems(std::size_t sites) {
    switch (sites) {
        case 4:
        case 6:
        case 8:
        case 10: return 2;
        case 12: return 3;
        case 16: return 4;
    }
    throw std::invalid_argument("no shipped subsystem count for " +
                                std::to_string(sites) + " sites");
}

}  // namespace

std::string experiment_kind_name(ExperimentKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

void ExperimentConfig::validate() const {
    const std::size_t active = (vqe.has_value() ? 1 : 0) +
                               (classify.has_value() ? 1 : 0) +
                               (bp_scan.has_value() ? 1 : 0) +
                               (haar_check.has_value() ? 1 : 0) +
                               (conjugate_dump.has_value() ? 1 : 0);
    if (active != 1) {
        throw std::invalid_argument(
            "config must carry exactly one experiment block, found " +
            std::to_string(active));
    }
    const bool matches =
        (kind == ExperimentKind::Vqe && vqe.has_value()) ||
        (kind == ExperimentKind::Classify && classify.has_value()) ||
        (kind == ExperimentKind::BpScan && bp_scan.has_value()) ||
        (kind == ExperimentKind::HaarCheck && haar_check.has_value()) ||
        (kind == ExperimentKind::ConjugateDump && conjugate_dump.has_value());
    if (!matches) {
        throw std::invalid_argument("experiment block does not match kind '" +
                                    experiment_kind_name(kind) + "'");
    }
    if (classify.has_value() &&
        !std::filesystem::exists(classify->dataset)) {
        throw IoError("dataset file not found: " + classify->dataset);
    }
}

std::string config_to_json(const ExperimentConfig& config) {
    json j;
    j["experiment"] = experiment_kind_name(config.kind);
    j["seed"] = config.seed;
    j["output"] = config.output_dir;
    if (config.vqe) {
        j["vqe"] = vqe_to_json(*config.vqe);
    }
    if (config.classify) {
        j["classify"] = classify_to_json(*config.classify);
    }
    if (config.bp_scan) {
        j["bp_scan"] = scan_to_json(*config.bp_scan);
    }
    if (config.haar_check) {
        j["haar_check"] = haar_to_json(*config.haar_check);
    }
    if (config.conjugate_dump) {
        j["conjugate_dump"] = dump_to_json(*config.conjugate_dump);
    }
    return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") +
                                    e.what());
    }
    ExperimentConfig config;
    try {
        config.kind = kind_from_name(j.at("experiment").get<std::string>());
        config.seed = j.at("seed").get<std::uint64_t>();
        config.output_dir = j.at("output").get<std::string>();
        if (j.contains("vqe")) {
            config.vqe = vqe_from_json(j.at("vqe"));
        }
        if (j.contains("classify")) {
            config.classify = classify_from_json(j.at("classify"));
        }
        if (j.contains("bp_scan")) {
            config.bp_scan = scan_from_json(j.at("bp_scan"));
        }
        if (j.contains("haar_check")) {
            config.haar_check = haar_from_json(j.at("haar_check"));
        }
        if (j.contains("conjugate_dump")) {
            config.conjugate_dump = dump_from_json(j.at("conjugate_dump"));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config field error: ") +
                                    e.what());
    }
    config.validate();
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return config_from_json(buffer.str());
}

std::vector<std::string> preset_names() {
    return {"vqe-n4",        "vqe-n6",           "vqe-n8",
            "vqe-n10",       "vqe-n12",          "vqe-n16",
            "classify-full", "classify-reduced", "bp-scan",
            "haar-check"};
}

ExperimentConfig preset_config(const std::string& name,
                               const std::string& dataset_path) {
    ExperimentConfig config;
    config.seed = 1;
    config.output_dir = "out";

    if (name.rfind("vqe-n", 0) == 0) {
        const std::size_t sites = std::stoul(name.substr(5));
        VqeConfig vqe;
        vqe.tfim = TfimSpec{sites, 1.0, 1.0};
        vqe.subsystems = table_subsystems(sites);
        vqe.factors = table_factors(sites);
        config.kind = ExperimentKind::Vqe;
        config.vqe = vqe;
        return config;
    }
    if (name == "classify-full" || name == "classify-reduced") {
        ClassifyConfig classify;
        classify.dataset =
            dataset_path.empty() ? "data/digits_364.csv" : dataset_path;
        classify.basis = name == "classify-full" ? PairBasis::Full
                                                 : PairBasis::Reduced;
        config.kind = ExperimentKind::Classify;
        config.classify = classify;
        return config;
    }
    if (name == "bp-scan") {
        config.kind = ExperimentKind::BpScan;
        config.bp_scan = BpScanConfig{};
        return config;
    }
    if (name == "haar-check") {
        config.kind = ExperimentKind::HaarCheck;
        config.haar_check = HaarCheckConfig{};
        return config;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace qpart
