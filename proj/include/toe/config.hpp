#pragma once

// Experiment configuration: a flat key = value file with [sections].
//
//   # comment
//   n = 1000000
//   seed = 42
//   modes = both                       # correct | flawed | both
//   experiments = gof, invariance      # comma separated, may be empty
//   out = results                      # optional, default "results"
//
//   [model]
//   hW = {"family":"constant","rate":1.0}
//   h0 = {"family":"piecewise","breaks":[1.0],"rates":[0.5,2.0]}
//   h1 = {"family":"constant","rate":2.0}
//   alt_h1 = {"family":"constant","rate":5.0}   # optional, invariance test
//   alt_h0 = {"family":"constant","rate":1.0}   # optional, invariance contrast
//
// Unknown sections, unknown keys and repeated keys are errors.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toe/hazard.hpp"
#include "toe/model.hpp"

namespace toe {

enum class Experiment { gof, invariance, dgp_compare, closed_form, regression_demo };

inline const char* to_string(Experiment e) noexcept {
    switch (e) {
        case Experiment::gof: return "gof";
        case Experiment::invariance: return "invariance";
        case Experiment::dgp_compare: return "dgp-compare";
        case Experiment::closed_form: return "closed-form";
        case Experiment::regression_demo: return "regression-demo";
    }
    return "?";
}

struct ExperimentConfig {
    TreatmentModel model;
    std::optional<HazardSpec> alt_post_treatment;
    std::optional<HazardSpec> alt_pre_treatment;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::vector<InversionMode> modes;
    std::vector<Experiment> experiments;
    std::string out = "results";

    bool wants(Experiment e) const {
        for (auto x : experiments) {
            if (x == e) return true;
        }
        return false;
    }
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, const std::string& key, const std::string& message)
        : std::runtime_error(format(line, key, message)), line_(line), key_(key) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    static std::string format(std::size_t line, const std::string& key, const std::string& message) {
        std::string out = "config";
        if (line > 0) out += ":" + std::to_string(line);
        if (!key.empty()) out += ": key '" + key + "'";
        return out + ": " + message;
    }

    std::size_t line_;
    std::string key_;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Strips a '#' comment that is not inside a JSON string.
inline std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

struct Entry {
    std::string value;
    std::size_t line;
};

inline std::vector<double> json_numbers(const nlohmann::json& j, const std::string& field, std::size_t line,
                                        const std::string& key) {
    if (!j.is_array()) throw ConfigError(line, key, "'" + field + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(line, key, "'" + field + "' must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline HazardSpec parse_hazard(const Entry& entry, const std::string& key) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(entry.value);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(entry.line, key, std::string("hazard is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string()) {
        throw ConfigError(entry.line, key, "hazard must be an object with a string \"family\"");
    }
    const auto family = j["family"].get<std::string>();
    const auto only = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [k, v] : j.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) throw ConfigError(entry.line, key, "unknown hazard field '" + k + "'");
        }
    };
    try {
        if (family == "constant") {
            only({"family", "rate"});
            if (!j.contains("rate") || !j["rate"].is_number()) {
                throw ConfigError(entry.line, key, "constant hazard needs a numeric \"rate\"");
            }
            return HazardSpec::constant(j["rate"].get<double>());
        }
        if (family == "piecewise") {
            only({"family", "breaks", "rates"});
            if (!j.contains("breaks") || !j.contains("rates")) {
                throw ConfigError(entry.line, key, "piecewise hazard needs \"breaks\" and \"rates\"");
            }
            return HazardSpec::piecewise(json_numbers(j["breaks"], "breaks", entry.line, key),
                                         json_numbers(j["rates"], "rates", entry.line, key));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(entry.line, key, e.what());
    }
    throw ConfigError(entry.line, key, "unknown hazard family '" + family + "'");
}

inline std::uint64_t parse_unsigned(const Entry& entry, const std::string& key) {
    const auto& s = entry.value;
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError(entry.line, key, "expected a nonnegative integer, got '" + s + "'");
    }
    try {
        return std::stoull(s);
    } catch (const std::out_of_range&) {
        throw ConfigError(entry.line, key, "integer out of range");
    }
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
    // section -> key -> entry
    std::map<std::string, std::map<std::string, detail::Entry>> entries;
    const std::map<std::string, std::vector<std::string>> schema = {
        {"", {"n", "seed", "modes", "experiments", "out"}},
        {"model", {"hW", "h0", "h1", "alt_h1", "alt_h0"}},
    };

    std::string section;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::trim(detail::strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "", "malformed section header '" + line + "'");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (!schema.contains(section)) throw ConfigError(line_no, "", "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "", "expected 'key = value', got '" + line + "'");
        const auto key = detail::trim(line.substr(0, eq));
        const auto qualified = section.empty() ? key : section + "." + key;
        const auto& allowed = schema.at(section);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(line_no, qualified, "unknown key");
        }
        if (entries[section].contains(key)) throw ConfigError(line_no, qualified, "repeated key");
        entries[section][key] = {detail::trim(line.substr(eq + 1)), line_no};
    }

    const auto find = [&](const std::string& sec, const std::string& key) -> const detail::Entry* {
        const auto s = entries.find(sec);
        if (s == entries.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };
    const auto require = [&](const std::string& sec, const std::string& key) -> const detail::Entry& {
        const auto* e = find(sec, key);
        if (!e) throw ConfigError(0, sec.empty() ? key : sec + "." + key, "missing required key");
        return *e;
    };

    ExperimentConfig cfg{
        .model = {detail::parse_hazard(require("model", "hW"), "model.hW"),
                  detail::parse_hazard(require("model", "h0"), "model.h0"),
                  detail::parse_hazard(require("model", "h1"), "model.h1")},
    };
    if (const auto* e = find("model", "alt_h1")) cfg.alt_post_treatment = detail::parse_hazard(*e, "model.alt_h1");
    if (const auto* e = find("model", "alt_h0")) cfg.alt_pre_treatment = detail::parse_hazard(*e, "model.alt_h0");

    cfg.n = static_cast<std::size_t>(detail::parse_unsigned(require("", "n"), "n"));
    cfg.seed = detail::parse_unsigned(require("", "seed"), "seed");
    if (const auto* e = find("", "out")) {
        if (e->value.empty()) throw ConfigError(e->line, "out", "output directory must not be empty");
        cfg.out = e->value;
    }

    cfg.modes = {InversionMode::correct, InversionMode::flawed};
    if (const auto* e = find("", "modes")) {
        if (e->value == "correct") {
            cfg.modes = {InversionMode::correct};
        } else if (e->value == "flawed") {
            cfg.modes = {InversionMode::flawed};
        } else if (e->value != "both") {
            throw ConfigError(e->line, "modes", "expected correct, flawed or both, got '" + e->value + "'");
        }
    }

    const auto& exp_entry = require("", "experiments");
    for (const auto& name : detail::split_list(exp_entry.value)) {
        Experiment e{};
        if (name == "gof") e = Experiment::gof;
        else if (name == "invariance") e = Experiment::invariance;
        else if (name == "dgp-compare") e = Experiment::dgp_compare;
        else if (name == "closed-form") e = Experiment::closed_form;
        else if (name == "regression-demo") e = Experiment::regression_demo;
        else throw ConfigError(exp_entry.line, "experiments", "unknown experiment '" + name + "'");
        if (cfg.wants(e)) throw ConfigError(exp_entry.line, "experiments", "experiment '" + name + "' listed twice");
        cfg.experiments.push_back(e);
    }

    if (!cfg.experiments.empty() && cfg.n < 100) {
        throw ConfigError(require("", "n").line, "n", "statistical experiments need n >= 100");
    }
    if (cfg.wants(Experiment::invariance) && !cfg.alt_post_treatment) {
        throw ConfigError(0, "model.alt_h1", "the invariance experiment needs an alternative post-treatment hazard");
    }
    if (cfg.wants(Experiment::closed_form) &&
        !(cfg.model.treatment.is_constant() && cfg.model.pre_treatment.is_constant() &&
          cfg.model.post_treatment.is_constant())) {
        throw ConfigError(0, "experiments", "closed-form needs constant hW, h0 and h1");
    }
    return cfg;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "", "cannot open '" + path + "'");
    return parse_config(in);
}

}  // namespace toe
