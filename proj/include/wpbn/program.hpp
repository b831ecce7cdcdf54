#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "wpbn/feasibility.hpp"
#include "wpbn/model.hpp"

namespace wpbn {

// proposed: joint backscatter plus harvest-then-transmit schedule.
// hm: harvest-then-transmit only; backscatter times pinned to zero and the
// shared harvest slot is always a variable since it is the only energy source.
enum class PolicyMode { proposed, hm };

inline const char* policy_name(PolicyMode mode) {
    return mode == PolicyMode::proposed ? "proposed" : "hm";
}

// Layout of the reduced optimization vector:
//   [t_b 0..N) when backscatter is free][t_a 0..N)][t_0 when the slot is free]
// Pinned coordinates are identically zero.
struct VariableMap {
    std::size_t sensors = 0;
    bool free_backscatter = true;
    bool free_shared = false;

    static VariableMap make(const NetworkConfig& cfg, PolicyMode mode) {
        VariableMap map;
        map.sensors = cfg.size();
        map.free_backscatter = mode == PolicyMode::proposed;
        map.free_shared = mode == PolicyMode::hm || cfg.shared_harvest_slot;
        return map;
    }

    std::size_t dim() const {
        return (free_backscatter ? sensors : 0) + sensors + (free_shared ? 1 : 0);
    }
    std::size_t tb_index(std::size_t n) const { return n; }
    std::size_t ta_index(std::size_t n) const {
        return (free_backscatter ? sensors : 0) + n;
    }
    std::size_t t0_index() const { return dim() - 1; }

    TimeAllocation to_allocation(const Eigen::VectorXd& x) const {
        TimeAllocation alloc = zero_allocation(sensors);
        for (std::size_t n = 0; n < sensors; ++n) {
            if (free_backscatter) alloc.backscatter_times[n] = x[tb_index(n)];
            alloc.transmit_times[n] = x[ta_index(n)];
        }
        if (free_shared) alloc.shared_harvest_time = x[t0_index()];
        return alloc;
    }

    Eigen::VectorXd from_allocation(const TimeAllocation& alloc) const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(dim());
        for (std::size_t n = 0; n < sensors; ++n) {
            if (free_backscatter) x[tb_index(n)] = alloc.backscatter_times[n];
            x[ta_index(n)] = alloc.transmit_times[n];
        }
        if (free_shared) x[t0_index()] = alloc.shared_harvest_time;
        return x;
    }
};

enum class RowKind { budget, nonneg, power_cap, energy_floor };

// Affine inequality r(x) = b - a.x >= 0. scale normalizes slacks so relative
// tolerances compare rows with wildly different units (times vs joules).
struct Row {
    Eigen::VectorXd a;
    double b = 0.0;
    double scale = 1.0;
    RowKind kind = RowKind::budget;
    std::size_t sensor = 0;

    double slack(const Eigen::VectorXd& x) const { return b - a.dot(x); }
};

struct ConstraintSet {
    std::vector<Row> rows;
    bool trivially_infeasible = false;
    std::string witness;

    double min_scaled_slack(const Eigen::VectorXd& x) const {
        double worst = std::numeric_limits<double>::infinity();
        for (const Row& row : rows) worst = std::min(worst, row.slack(x) / row.scale);
        return worst;
    }
};

// Builds the budget, nonnegativity, power-cap, and energy-floor rows over the
// reduced coordinates. Rows with no free coefficients are resolved at build
// time: a violated one becomes an infeasibility witness, a satisfied one is
// dropped.
inline ConstraintSet build_constraints(const NetworkConfig& cfg, const VariableMap& map) {
    const std::size_t dim = map.dim();
    ConstraintSet out;

    auto finish = [&](Row row) {
        double mag = std::fabs(row.b);
        for (Eigen::Index j = 0; j < row.a.size(); ++j)
            mag = std::max(mag, std::fabs(row.a[j]));
        row.scale = std::max(mag, 1e-300);
        if (row.a.isZero(0.0)) {
            if (row.b < 0.0) {
                out.trivially_infeasible = true;
                out.witness = "sensor " + std::to_string(row.sensor) +
                              " needs harvested energy but no other device can radiate";
            }
            return;
        }
        out.rows.push_back(std::move(row));
    };

    Row budget;
    budget.a = Eigen::VectorXd::Ones(dim);
    budget.b = 1.0;
    budget.kind = RowKind::budget;
    finish(std::move(budget));

    for (std::size_t j = 0; j < dim; ++j) {
        Row row;
        row.a = Eigen::VectorXd::Zero(dim);
        row.a[j] = -1.0;
        row.b = 0.0;
        row.kind = RowKind::nonneg;
        row.sensor = j;
        finish(std::move(row));
    }

    for (std::size_t n = 0; n < map.sensors; ++n) {
        const double pr = cfg.received_power(n);

        Row cap;
        cap.a = Eigen::VectorXd::Zero(dim);
        cap.a[map.ta_index(n)] = -cfg.sensors[n].power_cap;
        if (map.free_backscatter)
            for (std::size_t m = 0; m < map.sensors; ++m)
                if (m != n) cap.a[map.tb_index(m)] = pr;
        if (map.free_shared) cap.a[map.t0_index()] = pr;
        cap.b = 0.0;
        cap.kind = RowKind::power_cap;
        cap.sensor = n;
        finish(std::move(cap));

        const double floor = cfg.sensors[n].energy_floor;
        if (floor > 0.0) {
            Row req;
            req.a = Eigen::VectorXd::Zero(dim);
            if (map.free_backscatter)
                for (std::size_t m = 0; m < map.sensors; ++m)
                    if (m != n) req.a[map.tb_index(m)] = -pr;
            if (map.free_shared) req.a[map.t0_index()] = -pr;
            req.b = -floor;
            req.kind = RowKind::energy_floor;
            req.sensor = n;
            finish(std::move(req));
        }
    }
    return out;
}

}  // namespace wpbn
