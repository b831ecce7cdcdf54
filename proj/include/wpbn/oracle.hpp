#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "wpbn/feasibility.hpp"
#include "wpbn/model.hpp"
#include "wpbn/program.hpp"

namespace wpbn {

struct OracleResult {
    bool feasible = false;
    double objective = 0.0;
    TimeAllocation allocation;
};

// Exhaustive maximum over the lattice with spacing 1/resolution (so doubling
// the resolution refines the lattice in place). Per-sensor transmission value
// tables are precomputed over (harvest steps, transmit steps) with cap
// violations poisoned to -inf; the transmit split is enumerated inside,
// exploiting that each table is nondecreasing in transmit time. Intended for
// cross-checks only; supports at most three sensors.
inline OracleResult grid_oracle(const NetworkConfig& cfg, PolicyMode mode, int resolution) {
    cfg.validate();
    const std::size_t sensors = cfg.size();
    if (sensors > 3) throw unsupported_error("grid_oracle: more than three sensors");
    if (resolution < 1) throw std::invalid_argument("grid_oracle: resolution must be >= 1");

    const int k = resolution;
    const double h = 1.0 / k;
    const double neg = -std::numeric_limits<double>::infinity();
    const double tol = 1e-9;

    // value[n][s * (k + 1) + t]; poisoned where cap row would be violated
    std::vector<std::vector<double>> value(sensors);
    std::vector<double> rate(sensors);  // backscatter bits per step
    for (std::size_t n = 0; n < sensors; ++n) {
        const double pr = cfg.received_power(n);
        const double psi = cfg.psi(n);
        const double gamma = cfg.gamma(n);
        const double cap = cfg.sensors[n].power_cap;
        rate[n] = cfg.sensors[n].backscatter_efficiency * cfg.sensors[n].backscatter_rate * h;
        value[n].assign(static_cast<std::size_t>(k + 1) * (k + 1), neg);
        for (int s = 0; s <= k; ++s) {
            const double energy = pr * s * h;
            for (int t = 0; t <= k; ++t) {
                const double budget = cap * t * h;
                const double row_scale = std::max({energy, budget, 1e-300});
                if ((budget - energy) / row_scale < -tol) continue;
                value[n][static_cast<std::size_t>(s) * (k + 1) + t] =
                    htt_bits_kernel<double>(psi, gamma, energy, t * h);
            }
        }
    }

    auto floor_ok = [&](std::size_t n, int s) {
        const double floor = cfg.sensors[n].energy_floor;
        if (floor <= 0.0) return true;
        const double energy = cfg.received_power(n) * s * h;
        return (energy - floor) / std::max(energy, floor) >= -tol;
    };

    const bool use_tb = mode == PolicyMode::proposed;
    const bool use_t0 = mode == PolicyMode::hm || cfg.shared_harvest_slot;

    OracleResult best;
    double best_value = neg;
    std::vector<int> tb(sensors, 0);
    std::vector<int> ta_arg(sensors, 0);

    // best transmit split of j steps given harvest steps fixed per sensor
    auto best_split = [&](const std::vector<int>& s, int j, std::vector<int>& arg) {
        if (sensors == 1) {
            arg[0] = j;
            return value[0][static_cast<std::size_t>(s[0]) * (k + 1) + j];
        }
        const double* v0 = &value[0][static_cast<std::size_t>(s[0]) * (k + 1)];
        const double* v1 = &value[1][static_cast<std::size_t>(s[1]) * (k + 1)];
        double out = neg;
        if (sensors == 2) {
            for (int t0 = 0; t0 <= j; ++t0) {
                const double v = v0[t0] + v1[j - t0];
                if (v > out) {
                    out = v;
                    arg[0] = t0;
                    arg[1] = j - t0;
                }
            }
            return out;
        }
        const double* v2 = &value[2][static_cast<std::size_t>(s[2]) * (k + 1)];
        for (int t0 = 0; t0 <= j; ++t0) {
            if (v0[t0] == neg) continue;
            for (int t1 = 0; t1 <= j - t0; ++t1) {
                const double v = v0[t0] + v1[t1] + v2[j - t0 - t1];
                if (v > out) {
                    out = v;
                    arg[0] = t0;
                    arg[1] = t1;
                    arg[2] = j - t0 - t1;
                }
            }
        }
        return out;
    };

    std::vector<int> harvest(sensors, 0);
    auto consider = [&](int used_tb, int t0_steps) {
        const int spread = used_tb + t0_steps;
        double base = 0.0;
        for (std::size_t n = 0; n < sensors; ++n) {
            harvest[n] = spread - tb[n];
            if (!floor_ok(n, harvest[n])) return;
            base += rate[n] * tb[n];
        }
        const double split = best_split(harvest, k - spread, ta_arg);
        if (split == neg) return;
        if (base + split > best_value) {
            best_value = base + split;
            best.allocation = zero_allocation(sensors);
            for (std::size_t n = 0; n < sensors; ++n) {
                best.allocation.backscatter_times[n] = tb[n] * h;
                best.allocation.transmit_times[n] = ta_arg[n] * h;
            }
            best.allocation.shared_harvest_time = t0_steps * h;
        }
    };

    // enumerate backscatter steps (all zero unless the mode frees them), then
    // the shared slot
    std::function<void(std::size_t, int)> recurse = [&](std::size_t n, int used) {
        if (n == sensors) {
            const int top = use_t0 ? k - used : 0;
            for (int t0 = 0; t0 <= top; ++t0) consider(used, t0);
            return;
        }
        const int top = use_tb ? k - used : 0;
        for (int v = 0; v <= top; ++v) {
            tb[n] = v;
            recurse(n + 1, used + v);
        }
    };
    recurse(0, 0);

    if (best_value != neg) {
        best.feasible = true;
        best.objective = network_throughput(best.allocation, cfg);
    }
    return best;
}

}  // namespace wpbn
