#pragma once

#include <cstddef>

#include "wpbn/feasibility.hpp"
#include "wpbn/model.hpp"
#include "wpbn/solver.hpp"

namespace wpbn {

// Harvest-then-transmit only: backscatter stays off and the shared harvest
// slot is the sole energy source, whether or not the config frees it for the
// joint schedule.
inline Solution solve_hm(const NetworkConfig& cfg, const SolverSettings& settings = {}) {
    return solve(cfg, PolicyMode::hm, settings);
}

// Backscatter only: throughput is linear in the backscatter times, so the
// whole frame goes to the sensor with the best efficiency-rate product (ties
// to the lowest index). Sensors never store energy in this mode, so a config
// that demands a minimum harvest cannot be expressed.
inline Solution solve_bm(const NetworkConfig& cfg) {
    cfg.validate();
    for (std::size_t n = 0; n < cfg.size(); ++n)
        if (cfg.sensors[n].energy_floor > 0.0)
            throw unsupported_error(
                "backscatter-only baseline cannot meet a minimum-energy floor");

    std::size_t best = 0;
    double best_rate = -1.0;
    for (std::size_t n = 0; n < cfg.size(); ++n) {
        const double rate =
            cfg.sensors[n].backscatter_efficiency * cfg.sensors[n].backscatter_rate;
        if (rate > best_rate) {
            best_rate = rate;
            best = n;
        }
    }

    Solution sol;
    sol.status = SolveStatus::optimal;
    sol.allocation = zero_allocation(cfg.size());
    sol.allocation.backscatter_times[best] = 1.0;
    sol.objective = best_rate;
    sol.breakdown = rate_breakdown(sol.allocation, cfg);
    sol.kkt_residual = 0.0;
    return sol;
}

struct PolicyComparison {
    Solution bm;
    Solution hm;
    Solution proposed;
};

inline PolicyComparison compare_policies(const NetworkConfig& cfg,
                                         const SolverSettings& settings = {}) {
    PolicyComparison out;
    out.bm = solve_bm(cfg);
    out.hm = solve_hm(cfg, settings);
    out.proposed = solve(cfg, PolicyMode::proposed, settings);
    return out;
}

}  // namespace wpbn
