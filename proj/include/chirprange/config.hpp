#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chirprange/experiments.hpp"

namespace chirprange {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat "section.key" -> raw string map parsed from an INI-style file:
// [section] headers, key = value pairs, # or ; comments.
using KvMap = std::map<std::string, std::string>;

namespace detail_cfg {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "room.lx", "room.ly", "room.lz", "room.absorption", "room.speed_of_sound",
        "chirp.f_start", "chirp.f_end", "chirp.duration", "chirp.amplitude",
        "chirp.sample_rate",
        "timing.tau_tx", "timing.tau_rx", "timing.wake_offset", "timing.speed_of_sound",
        "timing.sample_rate",
        "source.x", "source.y", "source.z",
        "receiver.x", "receiver.y", "receiver.z",
        "grid.nx", "grid.ny", "grid.spacing", "grid.margin", "grid.z",
        "run.scale", "run.trials", "run.snr", "run.master_seed", "run.threads",
        "run.adc_bits",
        "estimators.list", "estimators.ppf", "estimators.window_shape",
        "estimators.window_slope", "estimators.window_half_life",
    };
    return keys;
}

inline double parse_double(const std::string& value, const std::string& key,
                           std::vector<std::string>& errors) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        errors.push_back(key + ": bad number '" + value + "'");
        return 0.0;
    }
    return v;
}

inline long parse_integer(const std::string& value, const std::string& key,
                          std::vector<std::string>& errors) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0') {
        errors.push_back(key + ": bad integer '" + value + "'");
        return 0;
    }
    return v;
}

inline std::uint64_t parse_seed(const std::string& value, const std::string& key,
                                std::vector<std::string>& errors) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const auto v = std::strtoull(begin, &end, 0);
    if (end == begin || *end != '\0') {
        errors.push_back(key + ": bad seed '" + value + "'");
        return 0;
    }
    return v;
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string cur;
    for (char c : value) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) items.push_back(cur), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) items.push_back(cur);
    return items;
}

}  // namespace detail_cfg

inline KvMap parse_config_text(const std::string& text) {
    KvMap kv;
    std::vector<std::string> bad;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail_cfg::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                bad.push_back("line " + std::to_string(lineno) + ": malformed section '" + t + "'");
                continue;
            }
            section = detail_cfg::trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            bad.push_back("line " + std::to_string(lineno) + ": expected key = value, got '" + t +
                          "'");
            continue;
        }
        const std::string key = detail_cfg::trim(t.substr(0, eq));
        if (key.empty() || section.empty()) {
            bad.push_back("line " + std::to_string(lineno) + ": key outside a [section]");
            continue;
        }
        kv[section + "." + key] = detail_cfg::trim(t.substr(eq + 1));
    }
    if (!bad.empty()) {
        std::string msg = "config parse errors:";
        for (const auto& b : bad) msg += "\n  - " + b;
        throw ConfigError(msg);
    }
    return kv;
}

inline KvMap load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

// --set section.key=value (also used by the dedicated CLI flags).
inline void apply_override(KvMap& kv, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
    const std::string key = detail_cfg::trim(assignment.substr(0, eq));
    if (key.find('.') == std::string::npos)
        throw ConfigError("override key '" + key + "' is not of the form section.key");
    kv[key] = detail_cfg::trim(assignment.substr(eq + 1));
}

// What the experiment pipeline should assume when a key is absent.
enum class Purpose { single, monte_carlo, grid };

// Resolves scale-dependent workload defaults. Scale never touches algorithm
// parameters, only trial counts and grid density.
struct ScalePreset {
    long mc_trials;
    GridSpec grid;
};

inline ScalePreset scale_preset(const std::string& scale) {
    if (scale == "desk") return {1000, GridSpec{15, 10, 0.2, 0.2, 1.0}};
    if (scale == "paper") return {10000, GridSpec{30, 20, 0.1, 0.1, 1.0}};
    throw ConfigError("run.scale must be 'desk' or 'paper', got '" + scale + "'");
}

inline std::vector<EstimatorSpec> parse_estimator_list(const KvMap& kv,
                                                       const std::string& list,
                                                       std::vector<std::string>& errors) {
    const auto get = [&kv](const std::string& key, const std::string& fallback) {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    };
    WindowSpec window;
    window.slope = detail_cfg::parse_double(get("estimators.window_slope", "-1"),
                                            "estimators.window_slope", errors);
    window.half_life_s = detail_cfg::parse_double(get("estimators.window_half_life", "0.003"),
                                                  "estimators.window_half_life", errors);
    const std::string shape = get("estimators.window_shape", "linear");
    if (shape == "linear")
        window.shape = WindowShape::linear;
    else if (shape == "quad_pos")
        window.shape = WindowShape::quadratic_pos;
    else if (shape == "quad_neg")
        window.shape = WindowShape::quadratic_neg;
    else if (shape == "exp")
        window.shape = WindowShape::exponential;
    else
        errors.push_back("estimators.window_shape: unknown shape '" + shape + "'");
    const double ppf =
        detail_cfg::parse_double(get("estimators.ppf", "65"), "estimators.ppf", errors);

    std::vector<EstimatorSpec> specs;
    for (const std::string& token : detail_cfg::split_list(list)) {
        EstimatorSpec est;
        est.window = window;
        est.ppf = ppf;
        if (token == "maximum") {
            est.method = EstimatorMethod::maximum;
        } else if (token == "window") {
            est.method = EstimatorMethod::windowed;
        } else if (token == "window_linear") {
            est.method = EstimatorMethod::windowed;
            est.window.shape = WindowShape::linear;
        } else if (token == "window_quad_pos") {
            est.method = EstimatorMethod::windowed;
            est.window.shape = WindowShape::quadratic_pos;
        } else if (token == "window_quad_neg") {
            est.method = EstimatorMethod::windowed;
            est.window.shape = WindowShape::quadratic_neg;
        } else if (token == "window_exp") {
            est.method = EstimatorMethod::windowed;
            est.window.shape = WindowShape::exponential;
        } else if (token == "prominence") {
            est.method = EstimatorMethod::prominence;
        } else if (token == "delta") {
            est.method = EstimatorMethod::delta_peak;
        } else {
            errors.push_back("estimators.list: unknown estimator '" + token + "'");
            continue;
        }
        specs.push_back(est);
    }
    if (specs.empty()) errors.push_back("estimators.list: no valid estimators");
    return specs;
}

// Builds the experiment configuration from merged key/values; accumulates
// every key-level problem in errors instead of stopping at the first.
inline ExperimentConfig build_experiment(const KvMap& kv, Purpose purpose,
                                         std::vector<std::string>& errors) {
    for (const auto& [key, value] : kv)
        if (!detail_cfg::known_keys().count(key)) errors.push_back("unknown config key: " + key);

    const auto get = [&kv](const std::string& key, const std::string& fallback) {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    };
    const auto num = [&](const std::string& key, double fallback) {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : detail_cfg::parse_double(it->second, key, errors);
    };

    ScalePreset preset{1000, GridSpec{15, 10, 0.2, 0.2, 1.0}};
    try {
        preset = scale_preset(get("run.scale", "desk"));
    } catch (const ConfigError& e) {
        errors.emplace_back(e.what());
    }

    ExperimentConfig cfg;
    cfg.room.lx_m = num("room.lx", 6.0);
    cfg.room.ly_m = num("room.ly", 4.0);
    cfg.room.lz_m = num("room.lz", 2.5);
    cfg.room.absorption = num("room.absorption", 0.3);
    cfg.room.speed_of_sound_mps = num("room.speed_of_sound", 340.0);

    cfg.chirp.f_start_hz = num("chirp.f_start", 45000.0);
    cfg.chirp.f_end_hz = num("chirp.f_end", 25000.0);
    cfg.chirp.duration_s = num("chirp.duration", 0.030);
    cfg.chirp.amplitude = num("chirp.amplitude", 1.0);
    cfg.chirp.sample_rate_hz = num("chirp.sample_rate", 196000.0);

    cfg.timing.tau_tx_s = num("timing.tau_tx", cfg.chirp.duration_s);
    cfg.timing.tau_rx_s = num("timing.tau_rx", 0.001);
    cfg.timing.wake_offset_s = num("timing.wake_offset", 0.029);
    cfg.timing.speed_of_sound_mps = num("timing.speed_of_sound", cfg.room.speed_of_sound_mps);
    cfg.timing.sample_rate_hz = num("timing.sample_rate", cfg.chirp.sample_rate_hz);

    cfg.source = {num("source.x", 3.1), num("source.y", 2.1), num("source.z", 1.0)};

    if (purpose == Purpose::grid) {
        GridSpec grid = preset.grid;
        grid.nx = static_cast<std::size_t>(
            std::max(0L, detail_cfg::parse_integer(
                             get("grid.nx", std::to_string(preset.grid.nx)), "grid.nx", errors)));
        grid.ny = static_cast<std::size_t>(
            std::max(0L, detail_cfg::parse_integer(
                             get("grid.ny", std::to_string(preset.grid.ny)), "grid.ny", errors)));
        grid.spacing_m = num("grid.spacing", preset.grid.spacing_m);
        grid.margin_m = num("grid.margin", preset.grid.margin_m);
        grid.z_m = num("grid.z", preset.grid.z_m);
        cfg.grid = grid;
        cfg.trials = detail_cfg::parse_integer(get("run.trials", "1"), "run.trials", errors);
    } else {
        cfg.receivers = {
            {num("receiver.x", 4.653), num("receiver.y", 2.1), num("receiver.z", 1.0)}};
        const std::string default_trials =
            purpose == Purpose::monte_carlo ? std::to_string(preset.mc_trials) : "1";
        cfg.trials =
            detail_cfg::parse_integer(get("run.trials", default_trials), "run.trials", errors);
    }

    cfg.snr_db_list.clear();
    for (const std::string& token : detail_cfg::split_list(get("run.snr", "20"))) {
        if (token == "inf") {
            cfg.snr_db_list.push_back(std::numeric_limits<double>::infinity());
        } else {
            cfg.snr_db_list.push_back(detail_cfg::parse_double(token, "run.snr", errors));
        }
    }
    if (cfg.snr_db_list.empty()) errors.push_back("run.snr: empty list");

    cfg.master_seed = detail_cfg::parse_seed(get("run.master_seed", "51966"), "run.master_seed",
                                             errors);
    cfg.threads = static_cast<unsigned>(std::max(
        0L, detail_cfg::parse_integer(get("run.threads", "0"), "run.threads", errors)));
    cfg.adc_bits = static_cast<int>(
        detail_cfg::parse_integer(get("run.adc_bits", "12"), "run.adc_bits", errors));

    cfg.estimators = parse_estimator_list(kv, get("estimators.list", "maximum"), errors);
    return cfg;
}

// Key-level problems plus semantic violations, all at once.
inline ExperimentConfig resolve_config(const KvMap& kv, Purpose purpose) {
    std::vector<std::string> errors;
    ExperimentConfig cfg = build_experiment(kv, purpose, errors);
    if (errors.empty())
        for (const auto& violation : validate_config(cfg)) errors.push_back(violation);
    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

}  // namespace chirprange
