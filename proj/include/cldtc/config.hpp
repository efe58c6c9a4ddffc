#pragma once

#include "cldtc/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cldtc {

/// Bad or missing config content. The message starts with the key name.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Config file could not be read.
class ConfigIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string_view to_string(Cadence c) noexcept
{
    switch (c) {
    case Cadence::every_phase: return "every_phase";
    case Cadence::half_period: return "half_period";
    case Cadence::period: return "period";
    }
    return "half_period";
}

inline Cadence parse_cadence(std::string_view s)
{
    if (s == "every_phase") return Cadence::every_phase;
    if (s == "half_period") return Cadence::half_period;
    if (s == "period") return Cadence::period;
    throw std::invalid_argument("expected one of \"every_phase\", \"half_period\", \"period\", got \"" + std::string(s)
                                + "\"");
}

inline EffectiveKind parse_effective_kind(std::string_view s)
{
    if (s == "D0" || s == "d0") return EffectiveKind::d0;
    if (s == "Dx" || s == "dx") return EffectiveKind::dx;
    throw std::invalid_argument("expected \"D0\" or \"Dx\", got \"" + std::string(s) + "\"");
}

struct ConfigOptions {
    /// Reject unknown keys instead of reporting them as warnings.
    bool strict = true;
};

struct ParsedConfig {
    ScenarioSpec spec;
    std::vector<std::string> warnings;
};

namespace detail {

using json = nlohmann::json;

struct KeyReader {
    const json& doc;

    bool has(const char* key) const { return doc.contains(key); }

    template <class Fn>
    auto guarded(const char* key, Fn&& fn) const
    {
        try {
            return fn(doc.at(key));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(std::string(key) + ": " + e.what());
        }
    }

    double real(const char* key) const
    {
        return guarded(key, [&](const json& v) {
            if (!v.is_number()) throw std::invalid_argument("expected a number");
            return v.get<double>();
        });
    }

    std::uint64_t uint(const char* key) const
    {
        return guarded(key, [&](const json& v) {
            if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
                throw std::invalid_argument("expected a non-negative integer");
            }
            return v.get<std::uint64_t>();
        });
    }

    bool boolean(const char* key) const
    {
        return guarded(key, [&](const json& v) {
            if (!v.is_boolean()) throw std::invalid_argument("expected true or false");
            return v.get<bool>();
        });
    }

    std::string text(const char* key) const
    {
        return guarded(key, [&](const json& v) {
            if (!v.is_string()) throw std::invalid_argument("expected a string");
            return v.get<std::string>();
        });
    }

    std::vector<double> reals(const char* key) const
    {
        return guarded(key, [&](const json& v) {
            if (!v.is_array()) throw std::invalid_argument("expected a list of numbers");
            std::vector<double> out;
            for (const auto& e : v) {
                if (!e.is_number()) throw std::invalid_argument("expected a list of numbers");
                out.push_back(e.get<double>());
            }
            return out;
        });
    }

    template <class Enum>
    Enum enumeration(const char* key, Enum (*parse)(std::string_view)) const
    {
        const std::string s = text(key);
        try {
            return parse(s);
        } catch (const std::exception& e) {
            throw ConfigError(std::string(key) + ": " + e.what());
        }
    }
};

inline const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys{
        "preset", "kind", "frequency_convention", "j_z", "j_x", "b_z", "b_x", "omega_over_pi", "half_period",
        "delta_r", "n_sites", "w", "delta", "theta_bar", "s0_z", "realizations", "seed", "horizon_periods",
        "adaptive_horizon", "max_horizon_periods", "cadence", "threads", "d_threshold", "tau_mode", "fourier_window",
        "grid_spacing", "exclude_dc", "peak_halfwidth", "f_mode", "trivial_control", "alternation_floor",
        "omega_over_pi_grid", "delta_r_grid", "theta_bar_grid", "rescale_grid", "rescale_ratio", "effective_kinds",
        "dt", "effective_time", "sample_interval", "tau_c_threshold", "tau_c_window", "tau_c_mode",
        "save_realizations", "output_dir"};
    return keys;
}

}  // namespace detail

/// Builds a spec from a parsed JSON object. Keys absent from the document
/// keep the preset value (if "preset" is given) or the library default.
inline ParsedConfig spec_from_json(const nlohmann::json& doc, const ConfigOptions& options = {})
{
    using detail::KeyReader;
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object at top level");
    ParsedConfig out;
    const auto& keys = detail::known_keys();
    for (const auto& [key, value] : doc.items()) {
        if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
        if (options.strict) throw ConfigError(key + ": unknown key");
        out.warnings.push_back(key + ": unknown key ignored");
    }

    const KeyReader r{doc};
    ScenarioSpec& s = out.spec;
    if (r.has("preset")) {
        const std::string name = r.text("preset");
        try {
            s = preset(name);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("preset: ") + e.what());
        }
    }
    if (!r.has("frequency_convention")) {
        throw ConfigError("frequency_convention: required key missing (\"pi_over_T\" or \"two_pi_over_T\")");
    }
    s.frequency_convention = r.enumeration("frequency_convention", &parse_frequency_convention);
    if (r.has("kind")) s.kind = r.enumeration("kind", &parse_scenario_kind);

    if (r.has("j_z")) s.drive.j_z = r.real("j_z");
    if (r.has("j_x")) s.drive.j_x = r.real("j_x");
    if (r.has("b_z")) s.drive.b_z = r.real("b_z");
    if (r.has("b_x")) s.drive.b_x = r.real("b_x");
    if (r.has("delta_r")) s.drive.delta_r = r.real("delta_r");
    if (r.has("omega_over_pi") && r.has("half_period")) {
        throw ConfigError("half_period: give either omega_over_pi or half_period, not both");
    }
    if (r.has("omega_over_pi")) s.omega_over_pi = r.real("omega_over_pi");
    if (r.has("half_period")) {
        s.omega_over_pi.reset();
        s.drive.half_period = r.real("half_period");
    }

    if (r.has("n_sites")) s.n_sites = r.uint("n_sites");
    if (r.has("w")) s.w = r.real("w");
    if (r.has("delta")) s.delta = r.real("delta");
    if (r.has("theta_bar") && r.has("s0_z")) throw ConfigError("s0_z: give either theta_bar or s0_z, not both");
    if (r.has("theta_bar")) s.theta_bar = r.real("theta_bar");
    if (r.has("s0_z")) {
        const double z = r.real("s0_z");
        if (!(z >= -1.0 && z <= 1.0)) throw ConfigError("s0_z: expected a value in [-1, 1]");
        s.theta_bar = std::acos(z);
    }
    if (r.has("realizations")) s.realizations = r.uint("realizations");
    if (r.has("seed")) s.seed = r.uint("seed");

    if (r.has("horizon_periods")) s.horizon_periods = r.uint("horizon_periods");
    if (r.has("adaptive_horizon")) s.adaptive_horizon = r.boolean("adaptive_horizon");
    if (r.has("max_horizon_periods")) s.max_horizon_periods = r.uint("max_horizon_periods");
    if (r.has("cadence")) s.cadence = r.enumeration("cadence", &parse_cadence);
    if (r.has("threads")) s.threads = r.uint("threads");

    if (r.has("d_threshold")) s.d_threshold = r.real("d_threshold");
    if (r.has("tau_mode")) s.tau_mode = r.enumeration("tau_mode", &parse_aggregation_mode);
    if (r.has("fourier_window")) s.fourier_window = r.uint("fourier_window");
    if (r.has("grid_spacing")) s.grid_spacing = r.real("grid_spacing");
    if (r.has("exclude_dc")) s.exclude_dc = r.boolean("exclude_dc");
    if (r.has("peak_halfwidth")) s.peak_halfwidth = r.uint("peak_halfwidth");
    if (r.has("f_mode")) s.f_mode = r.enumeration("f_mode", &parse_aggregation_mode);
    if (r.has("trivial_control")) s.trivial_control = r.boolean("trivial_control");
    if (r.has("alternation_floor")) s.alternation_floor = r.real("alternation_floor");

    if (r.has("omega_over_pi_grid")) s.omega_over_pi_grid = r.reals("omega_over_pi_grid");
    if (r.has("delta_r_grid")) s.delta_r_grid = r.reals("delta_r_grid");
    if (r.has("theta_bar_grid")) s.theta_bar_grid = r.reals("theta_bar_grid");
    if (r.has("rescale_grid")) s.rescale_grid = r.reals("rescale_grid");
    if (r.has("rescale_ratio")) s.rescale_ratio = r.real("rescale_ratio");

    if (r.has("effective_kinds")) {
        s.effective_kinds = r.guarded("effective_kinds", [](const nlohmann::json& v) {
            if (!v.is_array()) throw std::invalid_argument("expected a list of \"D0\"/\"Dx\"");
            std::vector<EffectiveKind> kinds;
            for (const auto& e : v) {
                if (!e.is_string()) throw std::invalid_argument("expected a list of \"D0\"/\"Dx\"");
                kinds.push_back(parse_effective_kind(e.get<std::string>()));
            }
            return kinds;
        });
    }
    if (r.has("dt")) s.dt = r.real("dt");
    if (r.has("effective_time")) s.effective_time = r.real("effective_time");
    if (r.has("sample_interval")) s.sample_interval = r.real("sample_interval");
    if (r.has("tau_c_threshold")) s.tau_c_threshold = r.real("tau_c_threshold");
    if (r.has("tau_c_window")) s.tau_c_window = r.uint("tau_c_window");
    if (r.has("tau_c_mode")) s.tau_c_mode = r.enumeration("tau_c_mode", &parse_aggregation_mode);
    if (r.has("save_realizations")) s.save_realizations = r.boolean("save_realizations");
    if (r.has("output_dir")) s.output_dir = r.text("output_dir");

    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return out;
}

inline ParsedConfig parse_config_text(std::string_view text, const ConfigOptions& options = {})
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return spec_from_json(doc, options);
}

inline ParsedConfig parse_config(const std::string& path, const ConfigOptions& options = {})
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigIoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw ConfigIoError("cannot read config file " + path);
    return parse_config_text(buf.str(), options);
}

/// Every field, explicitly, so that the file is self-describing and
/// parse_config(emit_config(s)) == s.
inline nlohmann::json config_json(const ScenarioSpec& s)
{
    nlohmann::json j;
    j["kind"] = std::string(to_string(s.kind));
    j["frequency_convention"] = std::string(to_string(s.frequency_convention));
    j["j_z"] = s.drive.j_z;
    j["j_x"] = s.drive.j_x;
    j["b_z"] = s.drive.b_z;
    j["b_x"] = s.drive.b_x;
    j["delta_r"] = s.drive.delta_r;
    if (s.omega_over_pi) j["omega_over_pi"] = *s.omega_over_pi;
    else j["half_period"] = s.drive.half_period;
    j["n_sites"] = s.n_sites;
    j["w"] = s.w;
    j["delta"] = s.delta;
    j["theta_bar"] = s.theta_bar;
    j["realizations"] = s.realizations;
    j["seed"] = s.seed;
    j["horizon_periods"] = s.horizon_periods;
    j["adaptive_horizon"] = s.adaptive_horizon;
    j["max_horizon_periods"] = s.max_horizon_periods;
    j["cadence"] = std::string(to_string(s.cadence));
    j["threads"] = s.threads;
    j["d_threshold"] = s.d_threshold;
    j["tau_mode"] = std::string(to_string(s.tau_mode));
    j["fourier_window"] = s.fourier_window;
    j["grid_spacing"] = s.grid_spacing;
    j["exclude_dc"] = s.exclude_dc;
    j["peak_halfwidth"] = s.peak_halfwidth;
    j["f_mode"] = std::string(to_string(s.f_mode));
    j["trivial_control"] = s.trivial_control;
    j["alternation_floor"] = s.alternation_floor;
    j["omega_over_pi_grid"] = s.omega_over_pi_grid;
    j["delta_r_grid"] = s.delta_r_grid;
    j["theta_bar_grid"] = s.theta_bar_grid;
    j["rescale_grid"] = s.rescale_grid;
    j["rescale_ratio"] = s.rescale_ratio;
    auto kinds = nlohmann::json::array();
    for (auto k : s.effective_kinds) kinds.push_back(std::string(to_string(k)));
    j["effective_kinds"] = kinds;
    j["dt"] = s.dt;
    j["effective_time"] = s.effective_time;
    j["sample_interval"] = s.sample_interval;
    j["tau_c_threshold"] = s.tau_c_threshold;
    j["tau_c_window"] = s.tau_c_window;
    j["tau_c_mode"] = std::string(to_string(s.tau_c_mode));
    j["save_realizations"] = s.save_realizations;
    j["output_dir"] = s.output_dir;
    return j;
}

inline std::string emit_config(const ScenarioSpec& s) { return config_json(s).dump(2) + "\n"; }

}  // namespace cldtc
