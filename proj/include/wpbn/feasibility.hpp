#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wpbn/model.hpp"

namespace wpbn {

// Requested operation is valid but outside what this build implements.
struct unsupported_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Constraint families: c0 is the unit time budget with nonnegativity, c1 the
// per-sensor average-power cap (harvested energy at most cap times transmit
// time), c2 the per-sensor minimum-energy floor. Cap and floor slacks are
// normalized by the larger side of their row, so tolerances are relative;
// vacuous floor rows report +infinity.
struct ConstraintReport {
    bool c0_ok = false;
    bool c1_ok = false;
    bool c2_ok = false;
    double budget_slack = 0.0;
    double min_coordinate = 0.0;
    std::vector<double> cap_slack;
    std::vector<double> floor_slack;
    double worst_violation = 0.0;

    bool feasible() const { return c0_ok && c1_ok && c2_ok; }
};

inline ConstraintReport check(const TimeAllocation& alloc, const NetworkConfig& cfg,
                              double tol = 1e-9) {
    const std::size_t n = cfg.size();
    if (alloc.backscatter_times.size() != n || alloc.transmit_times.size() != n)
        throw std::invalid_argument("check: allocation size mismatch");

    ConstraintReport report;
    report.budget_slack = 1.0 - alloc.total_time();
    report.min_coordinate = alloc.shared_harvest_time;
    for (double v : alloc.backscatter_times)
        report.min_coordinate = std::min(report.min_coordinate, v);
    for (double v : alloc.transmit_times)
        report.min_coordinate = std::min(report.min_coordinate, v);
    report.c0_ok = report.budget_slack >= -tol && report.min_coordinate >= -tol;

    report.c1_ok = true;
    report.c2_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double energy = harvested_energy(alloc, cfg, i);
        const double budget = cfg.sensors[i].power_cap * alloc.transmit_times[i];
        const double cap_scale = std::max(energy, budget);
        const double cap = cap_scale > 0.0 ? (budget - energy) / cap_scale : 0.0;
        report.cap_slack.push_back(cap);
        if (cap < -tol) report.c1_ok = false;

        const double floor = cfg.sensors[i].energy_floor;
        double floor_norm = std::numeric_limits<double>::infinity();
        if (floor > 0.0) {
            floor_norm = (energy - floor) / std::max(energy, floor);
            if (floor_norm < -tol) report.c2_ok = false;
        }
        report.floor_slack.push_back(floor_norm);
    }

    double worst = std::min({0.0, report.budget_slack, report.min_coordinate});
    for (double v : report.cap_slack) worst = std::min(worst, v);
    for (double v : report.floor_slack) worst = std::min(worst, v);
    report.worst_violation = -worst;
    return report;
}

// Largest harvested energy sensor n can see under the time budget alone:
// full received power when anything else can radiate for the whole frame,
// zero for a lone sensor with no shared slot.
inline double max_attainable_energy(const NetworkConfig& cfg, std::size_t n) {
    if (n >= cfg.size()) throw std::out_of_range("max_attainable_energy: bad index");
    if (!cfg.shared_harvest_slot && cfg.size() < 2) return 0.0;
    return cfg.received_power(n);
}

struct RegionSample {
    double t_b = 0.0;
    double t_a = 0.0;
    double t_0 = 0.0;
    bool feasible = false;
    bool c0_ok = false;
    bool c1_ok = false;
    bool c2_ok = false;
    double r_sum = 0.0;
};

// Lattice over the single-sensor time simplex with `resolution` points per
// axis (spacing 1/(resolution-1)); only budget-feasible points are emitted so
// c0_ok is true on every row. Innermost axis is the shared slot.
inline std::vector<RegionSample> sample_region(const NetworkConfig& cfg, int resolution,
                                               double tol = 1e-9) {
    if (cfg.size() != 1)
        throw unsupported_error("sample_region: only single-sensor networks are supported");
    if (resolution < 2) throw std::invalid_argument("sample_region: resolution must be >= 2");

    const int kmax = resolution - 1;
    std::vector<RegionSample> rows;
    TimeAllocation alloc = zero_allocation(1);
    for (int i = 0; i <= kmax; ++i) {
        for (int j = 0; j <= kmax - i; ++j) {
            const int top = cfg.shared_harvest_slot ? kmax - i - j : 0;
            for (int k = 0; k <= top; ++k) {
                RegionSample row;
                row.t_b = static_cast<double>(i) / kmax;
                row.t_a = static_cast<double>(j) / kmax;
                row.t_0 = static_cast<double>(k) / kmax;
                alloc.backscatter_times[0] = row.t_b;
                alloc.transmit_times[0] = row.t_a;
                alloc.shared_harvest_time = row.t_0;
                const ConstraintReport report = check(alloc, cfg, tol);
                row.c0_ok = report.c0_ok;
                row.c1_ok = report.c1_ok;
                row.c2_ok = report.c2_ok;
                row.feasible = report.feasible();
                row.r_sum = network_throughput(alloc, cfg);
                rows.push_back(row);
            }
        }
    }
    return rows;
}

}  // namespace wpbn
