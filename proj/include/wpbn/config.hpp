#pragma once

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wpbn/model.hpp"
#include "wpbn/solver.hpp"

namespace wpbn {

// Raised for malformed or invalid configuration text. Messages carry the
// offending key path; syntax errors keep the parser's line/byte anchor.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A parsed experiment configuration. `assumed` maps each config path that fell
// back to a documented default onto the value used; it rides along into every
// output so downstream artifacts carry their own provenance.
struct LoadedConfig {
    NetworkConfig network;
    SolverSettings solver;
    nlohmann::ordered_json assumed = nlohmann::ordered_json::object();
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] inline void config_fail(const std::string& path, const std::string& what) {
    throw config_error(path.empty() ? what : path + ": " + what);
}

inline void reject_unknown_keys(const ordered_json& obj, const std::string& path,
                                std::initializer_list<const char*> allowed) {
    const std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& item : obj.items())
        if (!known.contains(item.key()))
            config_fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
}

inline double require_number(const ordered_json& v, const std::string& path) {
    if (!v.is_number()) config_fail(path, "expected a number");
    return v.get<double>();
}

// Scalars with an optional unit tag: a bare number is taken in the base unit,
// an object must be {value, unit}.
inline double tagged_scalar(const ordered_json& v, const std::string& path,
                            const char* base_unit, const char* alt_unit,
                            double (*convert_alt)(double)) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_object()) config_fail(path, "expected a number or {value, unit}");
    reject_unknown_keys(v, path, {"value", "unit"});
    if (!v.contains("value") || !v.contains("unit"))
        config_fail(path, "expected both value and unit");
    const double value = require_number(v.at("value"), path + ".value");
    const std::string unit = v.at("unit").is_string() ? v.at("unit").get<std::string>() : "";
    if (unit == base_unit) return value;
    if (unit == alt_unit) return convert_alt(value);
    config_fail(path + ".unit", "unknown unit \"" + unit + "\" (accepted: \"" +
                                    base_unit + "\", \"" + alt_unit + "\")");
}

inline double power_watts(const ordered_json& v, const std::string& path) {
    return tagged_scalar(v, path, "W", "dBm", &dbm_to_watts);
}

inline double gain_linear(const ordered_json& v, const std::string& path) {
    return tagged_scalar(v, path, "linear", "dBi", &dbi_to_linear);
}

// Reads obj[key] through `parse`, or records the default under `path.key`.
template <class Parse>
double field_or_assumed(const ordered_json& obj, const std::string& path, const char* key,
                        double fallback, ordered_json& assumed, Parse parse) {
    if (obj.contains(key)) return parse(obj.at(key), path.empty() ? key : path + "." + key);
    assumed[path.empty() ? key : path + "." + key] = fallback;
    return fallback;
}

inline void check_range(double v, bool ok, const std::string& path, const char* what) {
    if (!ok) {
        std::ostringstream msg;
        msg << "value " << v << " " << what;
        config_fail(path, msg.str());
    }
}

inline SensorParams parse_sensor(const ordered_json& obj, const std::string& path,
                                 ordered_json& assumed) {
    if (!obj.is_object()) config_fail(path, "expected an object");
    reject_unknown_keys(obj, path,
                        {"link", "backscatter_efficiency", "backscatter_rate", "tx_efficiency",
                         "noise_channel_ratio", "gamma", "power_cap", "energy_floor"});
    SensorParams out = default_sensor();

    const std::string link_path = path + ".link";
    if (obj.contains("link")) {
        const ordered_json& link = obj.at("link");
        if (!link.is_object()) config_fail(link_path, "expected an object");
        reject_unknown_keys(link, link_path, {"harvest_efficiency", "rx_antenna_gain", "distance"});
        out.link.harvest_efficiency =
            field_or_assumed(link, link_path, "harvest_efficiency", out.link.harvest_efficiency,
                             assumed, &require_number);
        out.link.rx_antenna_gain = field_or_assumed(
            link, link_path, "rx_antenna_gain", out.link.rx_antenna_gain, assumed, &gain_linear);
        out.link.distance = field_or_assumed(link, link_path, "distance", out.link.distance,
                                             assumed, &require_number);
    } else {
        assumed[link_path + ".harvest_efficiency"] = out.link.harvest_efficiency;
        assumed[link_path + ".rx_antenna_gain"] = out.link.rx_antenna_gain;
        assumed[link_path + ".distance"] = out.link.distance;
    }
    check_range(out.link.harvest_efficiency,
                out.link.harvest_efficiency >= 0.0 && out.link.harvest_efficiency <= 1.0,
                link_path + ".harvest_efficiency", "outside [0, 1]");
    check_range(out.link.rx_antenna_gain, out.link.rx_antenna_gain > 0.0,
                link_path + ".rx_antenna_gain", "must be positive");
    check_range(out.link.distance, out.link.distance > 0.0, link_path + ".distance",
                "must be positive");

    out.backscatter_efficiency =
        field_or_assumed(obj, path, "backscatter_efficiency", out.backscatter_efficiency, assumed,
                         &require_number);
    out.backscatter_rate = field_or_assumed(obj, path, "backscatter_rate", out.backscatter_rate,
                                            assumed, &require_number);
    out.tx_efficiency =
        field_or_assumed(obj, path, "tx_efficiency", out.tx_efficiency, assumed, &require_number);
    out.power_cap = field_or_assumed(obj, path, "power_cap", out.power_cap, assumed, &power_watts);
    out.energy_floor =
        field_or_assumed(obj, path, "energy_floor", out.energy_floor, assumed, &require_number);

    // noise_channel_ratio and gamma are reciprocals of each other; exactly one
    // may be given. When neither is, the gamma default is the flagged one.
    if (obj.contains("noise_channel_ratio") && obj.contains("gamma"))
        config_fail(path, "give either noise_channel_ratio or gamma, not both");
    if (obj.contains("noise_channel_ratio")) {
        out.noise_channel_ratio =
            require_number(obj.at("noise_channel_ratio"), path + ".noise_channel_ratio");
    } else if (obj.contains("gamma")) {
        const double gamma = require_number(obj.at("gamma"), path + ".gamma");
        check_range(gamma, gamma > 0.0, path + ".gamma", "must be positive");
        out.noise_channel_ratio = 1.0 / gamma;
    } else {
        assumed[path + ".gamma"] = 1.0 / out.noise_channel_ratio;
    }

    check_range(out.backscatter_efficiency,
                out.backscatter_efficiency >= 0.0 && out.backscatter_efficiency <= 1.0,
                path + ".backscatter_efficiency", "outside [0, 1]");
    check_range(out.backscatter_rate, out.backscatter_rate >= 0.0, path + ".backscatter_rate",
                "must be nonnegative");
    check_range(out.tx_efficiency, out.tx_efficiency > 0.0 && out.tx_efficiency <= 1.0,
                path + ".tx_efficiency", "outside (0, 1]");
    check_range(out.noise_channel_ratio, out.noise_channel_ratio > 0.0,
                path + ".noise_channel_ratio", "must be positive");
    check_range(out.power_cap, out.power_cap > 0.0, path + ".power_cap", "must be positive");
    check_range(out.energy_floor, out.energy_floor >= 0.0, path + ".energy_floor",
                "must be nonnegative");
    return out;
}

inline void parse_solver(const ordered_json& obj, SolverSettings& settings) {
    reject_unknown_keys(obj, "solver",
                        {"mu_initial", "mu_shrink", "mu_min", "max_outer_rounds",
                         "max_newton_steps", "newton_tol", "kkt_tol", "snap_tolerance",
                         "feasibility_tol", "interior_margin"});
    auto num = [&](const char* key, double& into) {
        if (obj.contains(key)) into = require_number(obj.at(key), std::string("solver.") + key);
    };
    auto integer = [&](const char* key, int& into) {
        if (!obj.contains(key)) return;
        const std::string path = std::string("solver.") + key;
        const ordered_json& v = obj.at(key);
        if (!v.is_number_integer()) config_fail(path, "expected an integer");
        into = v.get<int>();
        check_range(into, into > 0, path, "must be positive");
    };
    num("mu_initial", settings.mu_initial);
    num("mu_shrink", settings.mu_shrink);
    num("mu_min", settings.mu_min);
    integer("max_outer_rounds", settings.max_outer_rounds);
    integer("max_newton_steps", settings.max_newton_steps);
    num("newton_tol", settings.newton_tol);
    num("kkt_tol", settings.kkt_tol);
    num("snap_tolerance", settings.snap_tolerance);
    num("feasibility_tol", settings.feasibility_tol);
    num("interior_margin", settings.interior_margin);
    check_range(settings.mu_initial, settings.mu_initial > 0.0, "solver.mu_initial",
                "must be positive");
    check_range(settings.mu_shrink, settings.mu_shrink > 0.0 && settings.mu_shrink < 1.0,
                "solver.mu_shrink", "outside (0, 1)");
    check_range(settings.mu_min, settings.mu_min > 0.0, "solver.mu_min", "must be positive");
}

}  // namespace detail

// Parses configuration text (see configs/ for the shape). Omitted fields take
// the documented defaults and are echoed in `assumed`.
inline LoadedConfig parse_config(const std::string& text) {
    using detail::config_fail;
    using detail::ordered_json;

    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) config_fail("", "top level must be an object");
    detail::reject_unknown_keys(root, "",
                                {"source", "bandwidth", "shared_harvest_slot_enabled",
                                 "sensor_count", "sensors", "solver"});

    LoadedConfig out;
    ordered_json& assumed = out.assumed;
    NetworkConfig& cfg = out.network;
    cfg.sensors.clear();

    const NetworkConfig defaults = default_network(1);

    if (root.contains("source")) {
        const ordered_json& src = root.at("source");
        if (!src.is_object()) config_fail("source", "expected an object");
        detail::reject_unknown_keys(src, "source",
                                    {"transmit_power", "antenna_gain", "frequency", "wavelength"});
        cfg.source.transmit_power =
            detail::field_or_assumed(src, "source", "transmit_power",
                                     defaults.source.transmit_power, assumed, &detail::power_watts);
        cfg.source.antenna_gain =
            detail::field_or_assumed(src, "source", "antenna_gain", defaults.source.antenna_gain,
                                     assumed, &detail::gain_linear);
        if (src.contains("frequency") && src.contains("wavelength"))
            config_fail("source", "give either frequency or wavelength, not both");
        if (src.contains("frequency")) {
            const double freq = detail::require_number(src.at("frequency"), "source.frequency");
            detail::check_range(freq, freq > 0.0, "source.frequency", "must be positive");
            cfg.wavelength = wavelength_from_frequency(freq);
        } else if (src.contains("wavelength")) {
            cfg.wavelength = detail::require_number(src.at("wavelength"), "source.wavelength");
        } else {
            cfg.wavelength = defaults.wavelength;
            assumed["source.frequency"] = speed_of_light / defaults.wavelength;
        }
    } else {
        cfg.source = defaults.source;
        cfg.wavelength = defaults.wavelength;
        assumed["source.transmit_power"] = defaults.source.transmit_power;
        assumed["source.antenna_gain"] = defaults.source.antenna_gain;
        assumed["source.frequency"] = speed_of_light / defaults.wavelength;
    }
    detail::check_range(cfg.source.transmit_power, cfg.source.transmit_power > 0.0,
                        "source.transmit_power", "must be positive");
    detail::check_range(cfg.source.antenna_gain, cfg.source.antenna_gain > 0.0,
                        "source.antenna_gain", "must be positive");
    detail::check_range(cfg.wavelength, cfg.wavelength > 0.0, "source.wavelength",
                        "must be positive");

    cfg.bandwidth = detail::field_or_assumed(root, "", "bandwidth", defaults.bandwidth, assumed,
                                             &detail::require_number);
    detail::check_range(cfg.bandwidth, cfg.bandwidth > 0.0, "bandwidth", "must be positive");

    if (root.contains("shared_harvest_slot_enabled")) {
        const ordered_json& flag = root.at("shared_harvest_slot_enabled");
        if (!flag.is_boolean()) config_fail("shared_harvest_slot_enabled", "expected a boolean");
        cfg.shared_harvest_slot = flag.get<bool>();
    } else {
        cfg.shared_harvest_slot = defaults.shared_harvest_slot;
        assumed["shared_harvest_slot_enabled"] = defaults.shared_harvest_slot;
    }

    std::size_t sensor_count = 0;
    if (root.contains("sensor_count")) {
        const ordered_json& v = root.at("sensor_count");
        if (!v.is_number_integer() || v.get<long long>() < 1)
            config_fail("sensor_count", "expected a positive integer");
        sensor_count = v.get<std::size_t>();
    }

    if (root.contains("sensors")) {
        const ordered_json& list = root.at("sensors");
        if (!list.is_array() || list.empty()) config_fail("sensors", "expected a non-empty array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            std::ostringstream path;
            path << "sensors[" << i << "]";
            cfg.sensors.push_back(detail::parse_sensor(list.at(i), path.str(), assumed));
        }
        // A lone sensor entry acts as a template when sensor_count asks for more.
        if (sensor_count > 0 && cfg.sensors.size() != sensor_count) {
            if (cfg.sensors.size() != 1)
                config_fail("sensor_count", "does not match the sensors array length");
            cfg.sensors.assign(sensor_count, cfg.sensors.front());
        }
    } else {
        if (sensor_count == 0) sensor_count = 1;
        cfg.sensors.assign(sensor_count,
                           detail::parse_sensor(ordered_json::object(), "sensors[]", assumed));
    }

    if (root.contains("solver")) {
        const ordered_json& solver = root.at("solver");
        if (!solver.is_object()) config_fail("solver", "expected an object");
        detail::parse_solver(solver, out.solver);
    }

    cfg.validate();
    return out;
}

inline LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str());
    } catch (const config_error& e) {
        throw config_error(path + ": " + e.what());
    }
}

}  // namespace wpbn
