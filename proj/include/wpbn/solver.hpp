#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wpbn/kkt.hpp"
#include "wpbn/model.hpp"
#include "wpbn/program.hpp"

namespace wpbn {

struct SolverSettings {
    double mu_initial = 1.0;
    double mu_shrink = 0.2;
    double mu_min = 1e-13;
    int max_outer_rounds = 60;
    int max_newton_steps = 50;
    double newton_tol = 1e-10;
    double kkt_tol = 1e-6;
    // covers centered boundary coordinates, which sit near mu_min divided by
    // the (normalized) gradient gap and so can reach ~1e-9 for weak gaps
    double snap_tolerance = 1e-8;
    double feasibility_tol = 1e-9;
    // minimum scaled slack a start point must clear before the barrier runs
    double interior_margin = 1e-9;
    std::optional<TimeAllocation> warm_start;
};

enum class SolveStatus { optimal, infeasible, non_convergence };

inline const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        default: return "non_convergence";
    }
}

struct Solution {
    SolveStatus status = SolveStatus::non_convergence;
    TimeAllocation allocation;
    double objective = 0.0;
    RateBreakdown breakdown;
    double kkt_residual = std::numeric_limits<double>::infinity();
    int newton_iterations = 0;
    int outer_rounds = 0;
    std::vector<double> outer_objectives;
    std::string infeasibility_witness;
};

namespace detail {

// Throughput divided by the network's objective scale, over reduced coords.
class NormalizedThroughput {
  public:
    NormalizedThroughput(const NetworkConfig& cfg, const VariableMap& map)
        : cfg_(cfg), map_(map), scale_(cfg.objective_scale()) {}

    double scale() const { return scale_; }

    double value(const Eigen::VectorXd& x) const {
        return network_throughput(map_.to_allocation(x), cfg_) / scale_;
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
        const TimeAllocation alloc = map_.to_allocation(x);
        const std::vector<double> full = throughput_gradient(alloc, cfg_);
        const std::size_t n = map_.sensors;
        Eigen::VectorXd g = Eigen::VectorXd::Zero(map_.dim());
        for (std::size_t i = 0; i < n; ++i) {
            if (map_.free_backscatter) g[map_.tb_index(i)] = full[i] / scale_;
            g[map_.ta_index(i)] = full[n + i] / scale_;
        }
        if (map_.free_shared) g[map_.t0_index()] = full[2 * n] / scale_;
        return g;
    }

    // Sum of per-sensor rank-one curvature terms, restricted to free coords.
    Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const {
        constexpr double ln2 = 0.6931471805599453;
        const std::size_t dim = map_.dim();
        const TimeAllocation alloc = map_.to_allocation(x);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::VectorXd dir(dim);
        for (std::size_t n = 0; n < map_.sensors; ++n) {
            const double c = cfg_.gamma(n) * cfg_.received_power(n);
            if (c <= 0.0) continue;
            const double t = std::max(alloc.transmit_times[n], transmit_time_floor);
            const double w = cfg_.gamma(n) * harvested_energy(alloc, cfg_, n) / t;
            const double kappa =
                cfg_.psi(n) / (t * (1.0 + w) * (1.0 + w) * ln2) / scale_;
            dir.setZero();
            if (map_.free_backscatter)
                for (std::size_t m = 0; m < map_.sensors; ++m)
                    if (m != n) dir[map_.tb_index(m)] = c;
            if (map_.free_shared) dir[map_.t0_index()] = c;
            dir[map_.ta_index(n)] = -w;
            h.noalias() -= kappa * (dir * dir.transpose());
        }
        return h;
    }

  private:
    const NetworkConfig& cfg_;
    VariableMap map_;
    double scale_;
};

// Phase-one objective: the last coordinate (the shared scaled slack).
struct LastCoordinate {
    double value(const Eigen::VectorXd& x) const { return x[x.size() - 1]; }
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
        g[x.size() - 1] = 1.0;
        return g;
    }
    Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const {
        return Eigen::MatrixXd::Zero(x.size(), x.size());
    }
};

struct BarrierOutcome {
    int newton_steps = 0;
    int outer_rounds = 0;
    bool stalled = false;  // a Newton solve or line search failed outright
};

// Maximizes obj plus mu times the log of every row slack, shrinking mu on a
// fixed schedule. x must enter strictly interior; every accepted iterate
// stays strictly interior. after_round can stop the schedule early.
template <class Obj>
BarrierOutcome maximize_with_barrier(
    const ConstraintSet& constraints, const Obj& obj, Eigen::VectorXd& x,
    const SolverSettings& settings, std::vector<double>* trace = nullptr,
    const std::function<bool(const Eigen::VectorXd&)>& after_round = {}) {
    const std::vector<Row>& rows = constraints.rows;
    const Eigen::Index dim = x.size();
    BarrierOutcome outcome;

    auto merit = [&](const Eigen::VectorXd& p, double mu) {
        double value = obj.value(p);
        for (const Row& row : rows) {
            const double r = row.slack(p);
            if (!(r > 0.0)) return -std::numeric_limits<double>::infinity();
            value += mu * std::log(r);
        }
        return value;
    };

    double mu = settings.mu_initial;
    for (int round = 0; round < settings.max_outer_rounds; ++round) {
        for (int it = 0; it < settings.max_newton_steps; ++it) {
            Eigen::VectorXd g = obj.gradient(x);
            Eigen::MatrixXd neg_h = -obj.hessian(x);
            for (const Row& row : rows) {
                const double r = row.slack(x);
                g.noalias() -= (mu / r) * row.a;
                neg_h.noalias() += (mu / (r * r)) * (row.a * row.a.transpose());
            }

            Eigen::LLT<Eigen::MatrixXd> llt(neg_h);
            double ridge = 1e-12;
            while (llt.info() != Eigen::Success && ridge < 1.0) {
                llt.compute(neg_h + ridge * Eigen::MatrixXd::Identity(dim, dim));
                ridge *= 100.0;
            }
            if (llt.info() != Eigen::Success) {
                outcome.stalled = true;
                break;
            }
            const Eigen::VectorXd step = llt.solve(g);
            const double decrement = g.dot(step);
            ++outcome.newton_steps;
            if (!std::isfinite(decrement)) {
                outcome.stalled = true;
                break;
            }
            // threshold shrinks with mu: near the end of the schedule the
            // whole barrier landscape scales by mu, and a fixed cutoff would
            // declare victory while still centered for a larger mu; the 1e-18
            // floor stops line searches running on merit values below double
            // resolution
            if (decrement / 2.0 <
                std::max(settings.newton_tol * std::min(1.0, mu), 1e-18))
                break;

            double alpha = 1.0;
            for (const Row& row : rows) {
                const double along = row.a.dot(step);
                if (along > 0.0) alpha = std::min(alpha, 0.995 * row.slack(x) / along);
            }
            const double base = merit(x, mu);
            bool moved = false;
            while (alpha > 1e-18) {
                if (merit(x + alpha * step, mu) >= base + 1e-4 * alpha * decrement) {
                    x += alpha * step;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
        }

        ++outcome.outer_rounds;
        if (trace) trace->push_back(obj.value(x));
        if (after_round && after_round(x)) break;
        if (mu <= settings.mu_min) break;
        mu = std::max(mu * settings.mu_shrink, settings.mu_min);
    }
    return outcome;
}

struct StartPoint {
    bool ok = false;
    Eigen::VectorXd x;
    std::string witness;
    int newton_steps = 0;
};

// Strictly interior start: uniform split if that already clears the margin,
// otherwise maximize the worst scaled slack (bounded by 1) with the same
// barrier and accept as soon as the margin is cleared.
inline StartPoint find_interior_point(const ConstraintSet& constraints, std::size_t dim,
                                      const SolverSettings& settings) {
    StartPoint start;
    Eigen::VectorXd uniform =
        Eigen::VectorXd::Constant(dim, 1.0 / (static_cast<double>(dim) + 1.0));
    if (constraints.min_scaled_slack(uniform) >= settings.interior_margin) {
        start.ok = true;
        start.x = uniform;
        return start;
    }

    ConstraintSet lifted;
    for (const Row& row : constraints.rows) {
        Row r2;
        r2.a = Eigen::VectorXd::Zero(dim + 1);
        r2.a.head(dim) = row.a / row.scale;
        r2.a[dim] = 1.0;
        r2.b = row.b / row.scale;
        r2.scale = 1.0;
        r2.kind = row.kind;
        r2.sensor = row.sensor;
        lifted.rows.push_back(std::move(r2));
    }
    Row top;
    top.a = Eigen::VectorXd::Zero(dim + 1);
    top.a[dim] = 1.0;
    top.b = 1.0;
    top.scale = 1.0;
    top.kind = RowKind::budget;
    lifted.rows.push_back(std::move(top));

    Eigen::VectorXd y(dim + 1);
    y.head(dim) = uniform;
    y[dim] = constraints.min_scaled_slack(uniform) - 1.0;

    const auto good = [&](const Eigen::VectorXd& p) {
        return constraints.min_scaled_slack(p.head(dim)) >= settings.interior_margin;
    };
    SolverSettings phase = settings;
    phase.mu_min = 1e-10;
    const BarrierOutcome outcome = maximize_with_barrier(
        lifted, LastCoordinate{}, y, phase, nullptr, good);
    start.newton_steps = outcome.newton_steps;

    if (good(y)) {
        start.ok = true;
        start.x = y.head(dim);
        return start;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "no strictly interior allocation; best scaled constraint slack %.3e",
                  constraints.min_scaled_slack(y.head(dim)));
    start.witness = buf;
    return start;
}

}  // namespace detail

// Rounds near-zero coordinates down to exact zeros when that keeps the point
// feasible and costs (in normalized objective) essentially nothing.
inline TimeAllocation purify(const Eigen::VectorXd& x, const NetworkConfig& cfg,
                             const VariableMap& map, const ConstraintSet& constraints,
                             const SolverSettings& settings) {
    Eigen::VectorXd snapped = x;
    bool any = false;
    for (Eigen::Index j = 0; j < snapped.size(); ++j)
        if (snapped[j] != 0.0 && snapped[j] < settings.snap_tolerance) {
            snapped[j] = 0.0;
            any = true;
        }
    if (!any) return map.to_allocation(x);

    if (constraints.min_scaled_slack(snapped) < -settings.feasibility_tol)
        return map.to_allocation(x);
    const double scale = cfg.objective_scale();
    const double before = network_throughput(map.to_allocation(x), cfg) / scale;
    const double after = network_throughput(map.to_allocation(snapped), cfg) / scale;
    if (before - after > 1e-9) return map.to_allocation(x);
    return map.to_allocation(snapped);
}

inline Solution solve(const NetworkConfig& cfg, PolicyMode mode,
                      const SolverSettings& settings = {}) {
    cfg.validate();
    const VariableMap map = VariableMap::make(cfg, mode);
    const ConstraintSet constraints = build_constraints(cfg, map);

    Solution out;
    out.allocation = zero_allocation(cfg.size());
    if (constraints.trivially_infeasible) {
        out.status = SolveStatus::infeasible;
        out.infeasibility_witness = constraints.witness;
        return out;
    }

    Eigen::VectorXd x;
    bool started = false;
    if (settings.warm_start) {
        const TimeAllocation& warm = *settings.warm_start;
        if (warm.backscatter_times.size() == cfg.size() &&
            warm.transmit_times.size() == cfg.size()) {
            Eigen::VectorXd candidate = map.from_allocation(warm);
            if (constraints.min_scaled_slack(candidate) >= settings.interior_margin) {
                x = candidate;
                started = true;
            }
        }
    }
    if (!started) {
        detail::StartPoint start =
            detail::find_interior_point(constraints, map.dim(), settings);
        out.newton_iterations += start.newton_steps;
        if (!start.ok) {
            out.status = SolveStatus::infeasible;
            out.infeasibility_witness = start.witness;
            return out;
        }
        x = start.x;
    }

    const detail::NormalizedThroughput objective(cfg, map);
    std::vector<double> trace;
    const detail::BarrierOutcome outcome =
        detail::maximize_with_barrier(constraints, objective, x, settings, &trace);
    out.newton_iterations += outcome.newton_steps;
    out.outer_rounds = outcome.outer_rounds;
    for (double v : trace) out.outer_objectives.push_back(v * objective.scale());

    out.allocation = purify(x, cfg, map, constraints, settings);
    out.objective = network_throughput(out.allocation, cfg);
    out.breakdown = rate_breakdown(out.allocation, cfg);

    const KktReport kkt = verify_kkt(cfg, mode, out.allocation);
    out.kkt_residual = kkt.residual;
    out.status = kkt.residual <= settings.kkt_tol ? SolveStatus::optimal
                                                  : SolveStatus::non_convergence;
    return out;
}

}  // namespace wpbn
