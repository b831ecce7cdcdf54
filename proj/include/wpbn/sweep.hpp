#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wpbn/baselines.hpp"
#include "wpbn/config.hpp"
#include "wpbn/io.hpp"

namespace wpbn {

enum class SweepParam { backscatter_rate, sensor_count, source_power_dbm, harvest_efficiency };
enum class SweepPolicy { bm, hm, proposed };

inline const char* sweep_param_name(SweepParam p) {
    switch (p) {
        case SweepParam::backscatter_rate: return "backscatter_rate";
        case SweepParam::sensor_count: return "sensor_count";
        case SweepParam::source_power_dbm: return "source_power_dbm";
        case SweepParam::harvest_efficiency: return "harvest_efficiency";
    }
    return "?";
}

inline const char* sweep_policy_name(SweepPolicy p) {
    switch (p) {
        case SweepPolicy::bm: return "bm";
        case SweepPolicy::hm: return "hm";
        case SweepPolicy::proposed: return "proposed";
    }
    return "?";
}

struct SweepSpec {
    SweepParam parameter = SweepParam::backscatter_rate;
    double from = 0.0;
    double to = 0.0;
    int steps = 2;
    std::vector<SweepPolicy> policies;  // empty means all three

    void validate() const {
        if (steps < 2) throw std::invalid_argument("sweep needs at least 2 steps");
        if (!(from <= to)) throw std::invalid_argument("sweep range must have from <= to");
    }
};

struct SweepRow {
    std::string param;
    double value = 0.0;
    SweepPolicy policy = SweepPolicy::proposed;
    double objective = 0.0;
    double r_b = 0.0;
    double r_h = 0.0;
    std::string status;
};

namespace detail {

inline std::vector<double> sweep_values(const SweepSpec& spec) {
    std::vector<double> values(spec.steps);
    for (int k = 0; k < spec.steps; ++k)
        values[k] = spec.from + (spec.to - spec.from) * double(k) / double(spec.steps - 1);
    if (spec.parameter == SweepParam::sensor_count) {
        for (double& v : values) {
            const double r = std::round(v);
            if (std::fabs(v - r) > 1e-9 * std::max(1.0, std::fabs(v)) || r < 1.0)
                throw std::invalid_argument("sensor_count sweep values must be positive integers");
            v = r;
        }
    }
    return values;
}

inline void apply_sweep_value(NetworkConfig& cfg, SweepParam param, double value) {
    switch (param) {
        case SweepParam::backscatter_rate:
            for (SensorParams& s : cfg.sensors) s.backscatter_rate = value;
            break;
        case SweepParam::sensor_count:
            cfg.sensors.assign(static_cast<std::size_t>(value), cfg.sensors.front());
            break;
        case SweepParam::source_power_dbm:
            cfg.source.transmit_power = dbm_to_watts(value);
            break;
        case SweepParam::harvest_efficiency:
            for (SensorParams& s : cfg.sensors) s.link.harvest_efficiency = value;
            break;
    }
}

}  // namespace detail

// Solves every (value, policy) grid point. Rows come out ordered by value and
// then by policy name; per-point failures land in the status column instead
// of aborting the sweep. Unless cold_start is set, each policy chain reuses
// its previous optimum as the next starting point.
inline std::vector<SweepRow> run_sweep(const LoadedConfig& base, const SweepSpec& spec,
                                       bool cold_start = false, double frame_seconds = 1.0) {
    spec.validate();
    std::vector<SweepPolicy> policies = spec.policies;
    if (policies.empty())
        policies = {SweepPolicy::bm, SweepPolicy::hm, SweepPolicy::proposed};
    std::sort(policies.begin(), policies.end());
    policies.erase(std::unique(policies.begin(), policies.end()), policies.end());

    const std::vector<double> values = detail::sweep_values(spec);
    std::vector<SweepRow> rows;
    rows.reserve(values.size() * policies.size());

    std::optional<TimeAllocation> warm_hm, warm_proposed;
    for (double value : values) {
        NetworkConfig cfg = base.network;
        detail::apply_sweep_value(cfg, spec.parameter, value);
        for (SweepPolicy policy : policies) {
            SweepRow row;
            row.param = sweep_param_name(spec.parameter);
            row.value = value;
            row.policy = policy;
            try {
                Solution sol;
                if (policy == SweepPolicy::bm) {
                    sol = solve_bm(cfg);
                } else {
                    SolverSettings settings = base.solver;
                    std::optional<TimeAllocation>& warm =
                        policy == SweepPolicy::hm ? warm_hm : warm_proposed;
                    if (!cold_start && warm && warm->backscatter_times.size() == cfg.size())
                        settings.warm_start = warm;
                    sol = solve(cfg, policy == SweepPolicy::hm ? PolicyMode::hm
                                                               : PolicyMode::proposed,
                                settings);
                    if (sol.status == SolveStatus::optimal) warm = sol.allocation;
                }
                row.objective = sol.objective / frame_seconds;
                row.r_b = sol.breakdown.backscatter_total() / frame_seconds;
                row.r_h = sol.breakdown.htt_total() / frame_seconds;
                row.status = status_name(sol.status);
            } catch (const unsupported_error&) {
                row.status = "unsupported";
            }
            rows.push_back(row);
        }
    }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "param,value,policy,objective,r_b,r_h,status\n";
    for (const SweepRow& r : rows) {
        out += r.param + "," + format_double(r.value) + "," + sweep_policy_name(r.policy) + "," +
               format_double(r.objective) + "," + format_double(r.r_b) + "," +
               format_double(r.r_h) + "," + r.status + "\n";
    }
    return out;
}

}  // namespace wpbn
