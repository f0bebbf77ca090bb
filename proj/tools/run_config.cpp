#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "reichlab/io.hpp"

namespace reichlab::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& object, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : object.items()) {
        if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const json& object, const char* key, T& target) {
    if (object.contains(key)) target = object.at(key).get<T>();
}

}  // namespace

std::string_view to_string(GroupKind kind) {
    switch (kind) {
        case GroupKind::trivial: return "trivial";
        case GroupKind::cyclic: return "cyclic";
        case GroupKind::gamma2: return "gamma2";
    }
    return "trivial";
}

GroupKind parse_group_kind(std::string_view name) {
    if (name == "trivial") return GroupKind::trivial;
    if (name == "cyclic") return GroupKind::cyclic;
    if (name == "gamma2") return GroupKind::gamma2;
    throw ConfigError("unknown group '" + std::string(name) + "'");
}

RunConfig parse_config(std::string_view json_text) {
    RunConfig config;
    try {
        const json j = json::parse(json_text);
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        reject_unknown(j, {"model", "lattice", "tol", "max_evaluations", "n_list", "k_list", "sum_radius",
                           "sum_points", "kernel", "out"},
                       "config");
        if (j.contains("model")) {
            const auto& m = j.at("model");
            reject_unknown(m, {"kind", "cyclic_length", "word_depth", "puncture_radius", "r0"}, "model");
            if (m.contains("kind")) {
                try {
                    config.model.kind = partition::parse_model_kind(m.at("kind").get<std::string>());
                } catch (const DomainError& e) {
                    throw ConfigError(e.what());
                }
            }
            read(m, "cyclic_length", config.model.cyclic_length);
            read(m, "word_depth", config.model.word_depth);
            read(m, "puncture_radius", config.model.puncture_radius);
            read(m, "r0", config.model.r0);
        }
        if (j.contains("lattice")) {
            const auto& l = j.at("lattice");
            reject_unknown(l, {"seed", "delta", "window"}, "lattice");
            read(l, "seed", config.model.seed);
            read(l, "delta", config.model.delta);
            read(l, "window", config.window_size);
        }
        read(j, "tol", config.tol);
        read(j, "max_evaluations", config.max_evaluations);
        read(j, "n_list", config.n_list);
        read(j, "k_list", config.k_list);
        if (j.contains("sum_radius") && !j.at("sum_radius").is_null()) {
            config.sum_radius = j.at("sum_radius").get<double>();
        }
        read(j, "sum_points", config.sum_points);
        if (j.contains("kernel")) {
            const auto& k = j.at("kernel");
            reject_unknown(k, {"group", "depth", "trials", "seed"}, "kernel");
            if (k.contains("group")) config.kernel_group = parse_group_kind(k.at("group").get<std::string>());
            read(k, "depth", config.kernel_depth);
            read(k, "trials", config.kernel_trials);
            read(k, "seed", config.kernel_seed);
        }
        if (j.contains("out")) config.out_dir = j.at("out").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    validate(config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = io::read_text(path);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text);
}

void validate(RunConfig& config) {
    if (!(config.tol > 0.0) || !std::isfinite(config.tol)) throw ConfigError("tol must be positive");
    if (config.max_evaluations == 0) throw ConfigError("max_evaluations must be positive");
    if (config.window_size < 1) throw ConfigError("window must be at least 1");
    if (!(config.model.delta >= 0.0) || config.model.delta > lattice::kMaxQuasilatticeDelta) {
        throw ConfigError("delta must lie in [0, 1/8]");
    }
    if (!(config.model.r0 > 0.0) || config.model.r0 > 1.0) throw ConfigError("r0 must lie in (0, 1]");
    if (!(config.model.cyclic_length > 0.0)) throw ConfigError("cyclic_length must be positive");
    if (config.model.word_depth < 0) throw ConfigError("word_depth must be nonnegative");
    if (!(config.model.puncture_radius > 0.0) || config.model.puncture_radius >= 0.125) {
        throw ConfigError("puncture_radius must lie in (0, 1/8)");
    }
    if (config.n_list.empty()) throw ConfigError("n_list must not be empty");
    for (std::size_t i = 0; i < config.n_list.size(); ++i) {
        if (config.n_list[i] < 1) throw ConfigError("n_list entries must be at least 1");
        if (i > 0 && config.n_list[i] <= config.n_list[i - 1]) throw ConfigError("n_list must be ascending");
    }
    for (double k : config.k_list) {
        if (!(k >= 100.0)) throw ConfigError("k_list entries must be at least 100");
    }
    if (config.sum_radius && !(*config.sum_radius > 0.0)) throw ConfigError("sum_radius must be positive");
    if (config.kernel_depth < 0 || config.kernel_depth > 12) throw ConfigError("kernel depth must lie in [0, 12]");
    config.model.window = lattice::centered_window(config.window_size);
}

}  // namespace reichlab::cli
