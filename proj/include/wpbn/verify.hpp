#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "wpbn/kkt.hpp"
#include "wpbn/model.hpp"
#include "wpbn/oracle.hpp"
#include "wpbn/rf_link.hpp"
#include "wpbn/solver.hpp"

namespace wpbn {
namespace detail {

// splitmix64; good enough spread for sampling checks, stable across platforms
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t raw() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform(double lo, double hi) {
        const double u = std::ldexp(static_cast<double>(raw() >> 11), -53);
        return lo + (hi - lo) * u;
    }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

  private:
    std::uint64_t state_;
};

// Parameter ranges for randomized model checks. Within these ranges active
// transmission at the power cap outvalues backscatter, which the policy
// dominance checks rely on.
inline NetworkConfig random_network(Rng& rng, std::size_t sensors, bool shared_slot) {
    NetworkConfig cfg;
    cfg.source = SourceParams{dbm_to_watts(rng.uniform(10.0, 30.0)),
                              dbi_to_linear(rng.uniform(0.0, 9.0))};
    cfg.wavelength = wavelength_from_frequency(2.4e9);
    cfg.bandwidth = 1e7;
    cfg.shared_harvest_slot = shared_slot;
    for (std::size_t n = 0; n < sensors; ++n) {
        SensorParams s;
        s.link.distance = rng.uniform(5.0, 20.0);
        s.link.rx_antenna_gain = dbi_to_linear(rng.uniform(0.0, 9.0));
        s.link.harvest_efficiency = rng.uniform(0.3, 0.9);
        s.backscatter_efficiency = rng.uniform(0.5, 1.0);
        s.backscatter_rate = rng.log_uniform(1e3, 1e5);
        s.tx_efficiency = rng.uniform(0.3, 0.9);
        s.noise_channel_ratio = rng.log_uniform(1e-7, 1e-4);
        s.power_cap = rng.log_uniform(1e-6, 1e-4);
        s.energy_floor = 0.0;
        cfg.sensors.push_back(s);
    }
    return cfg;
}

inline TimeAllocation random_interior_allocation(Rng& rng, const NetworkConfig& cfg) {
    const std::size_t n = cfg.size();
    const std::size_t dims = 2 * n + (cfg.shared_harvest_slot ? 1 : 0);
    std::vector<double> raw(dims);
    double sum = 0.0;
    for (double& v : raw) {
        v = rng.uniform(0.6, 1.4);
        sum += v;
    }
    const double total = rng.uniform(0.4, 0.9);
    TimeAllocation alloc = zero_allocation(n);
    for (std::size_t i = 0; i < n; ++i) alloc.backscatter_times[i] = raw[i] / sum * total;
    for (std::size_t i = 0; i < n; ++i) alloc.transmit_times[i] = raw[n + i] / sum * total;
    if (cfg.shared_harvest_slot) alloc.shared_harvest_time = raw[2 * n] / sum * total;
    return alloc;
}

inline long double throughput_ld(const NetworkConfig& cfg, const std::vector<long double>& tb,
                                 const std::vector<long double>& ta, long double t0) {
    return network_throughput_t<long double>(cfg, tb, ta, t0);
}

}  // namespace detail

struct VerifyOptions {
    int trials = 200;
    std::uint64_t seed = 1;
    std::size_t sensors = 3;
    bool shared_slot = true;
};

struct ModelVerifyOutcome {
    int trials = 0;
    int gradient_failures = 0;
    int concavity_failures = 0;
    int curvature_failures = 0;
    int eigenvalue_failures = 0;
    double worst_gradient_rel = 0.0;
    double worst_concavity_slack = 0.0;  // most negative normalized midpoint slack
    double worst_curvature_rel = 0.0;
    double max_hessian_eigenvalue = -std::numeric_limits<double>::infinity();

    bool ok() const {
        return trials > 0 && gradient_failures == 0 && concavity_failures == 0 &&
               curvature_failures == 0 && eigenvalue_failures == 0;
    }
};

// Randomized consistency checks of the throughput surface: analytic gradient
// against long double central differences, midpoint concavity, the rank-one
// curvature form against second differences, and the extrapolated
// finite-difference Hessian staying negative semidefinite.
inline ModelVerifyOutcome verify_model(const VerifyOptions& options = {}) {
    detail::Rng rng(options.seed);
    ModelVerifyOutcome out;

    for (int trial = 0; trial < options.trials; ++trial) {
        const NetworkConfig cfg =
            detail::random_network(rng, options.sensors, options.shared_slot);
        const TimeAllocation alloc = detail::random_interior_allocation(rng, cfg);
        const double scale = cfg.objective_scale();
        const std::size_t n = cfg.size();
        const std::size_t dims = 2 * n + 1;
        ++out.trials;

        std::vector<long double> tb(alloc.backscatter_times.begin(),
                                    alloc.backscatter_times.end());
        std::vector<long double> ta(alloc.transmit_times.begin(),
                                    alloc.transmit_times.end());
        long double t0 = alloc.shared_harvest_time;
        auto slot = [&](std::size_t i) -> long double& {
            if (i < n) return tb[i];
            if (i < 2 * n) return ta[i - n];
            return t0;
        };
        auto eval = [&]() { return detail::throughput_ld(cfg, tb, ta, t0); };

        // gradient vs central differences
        const std::vector<double> grad = throughput_gradient(alloc, cfg);
        bool grad_bad = false;
        for (std::size_t i = 0; i < dims; ++i) {
            const long double h = 1e-7L;
            long double& x = slot(i);
            const long double keep = x;
            x = keep + h;
            const long double up = eval();
            x = keep - h;
            const long double dn = eval();
            x = keep;
            const double fd = static_cast<double>((up - dn) / (2.0L * h));
            if (std::fabs(grad[i]) / scale <= 1e-8) continue;
            const double rel = std::fabs(fd - grad[i]) / std::fabs(grad[i]);
            out.worst_gradient_rel = std::max(out.worst_gradient_rel, rel);
            if (rel > 1e-5) grad_bad = true;
        }
        if (grad_bad) ++out.gradient_failures;

        // midpoint concavity against a second interior point
        const TimeAllocation other = detail::random_interior_allocation(rng, cfg);
        TimeAllocation mid = zero_allocation(n);
        for (std::size_t i = 0; i < n; ++i) {
            mid.backscatter_times[i] =
                0.5 * (alloc.backscatter_times[i] + other.backscatter_times[i]);
            mid.transmit_times[i] =
                0.5 * (alloc.transmit_times[i] + other.transmit_times[i]);
        }
        mid.shared_harvest_time =
            0.5 * (alloc.shared_harvest_time + other.shared_harvest_time);
        const double slack =
            (network_throughput(mid, cfg) - 0.5 * network_throughput(alloc, cfg) -
             0.5 * network_throughput(other, cfg)) /
            scale;
        out.worst_concavity_slack = std::min(out.worst_concavity_slack, slack);
        if (slack < -1e-9) ++out.concavity_failures;

        // curvature form vs directional second difference
        {
            const std::size_t pick = rng.raw() % n;
            const double v_s = rng.uniform(-1.0, 1.0);
            const double v_t = rng.uniform(-1.0, 1.0);
            const double q = quadratic_form(alloc, cfg, pick, v_s, v_t);
            const long double s = harvest_time(alloc, pick);
            const long double t = alloc.transmit_times[pick];
            const long double h = 1e-5L;
            auto slice = [&](long double step) {
                return htt_bits_kernel<long double>(
                    cfg.psi(pick), cfg.gamma(pick),
                    (s + step * v_s) * static_cast<long double>(cfg.received_power(pick)),
                    t + step * v_t);
            };
            const double fd = static_cast<double>(
                (slice(h) - 2.0L * slice(0.0L) + slice(-h)) / (h * h));
            const double floor = 1e-6 * cfg.psi(pick);
            const double denom = std::max({std::fabs(q), std::fabs(fd), floor});
            const double rel = std::fabs(q - fd) / denom;
            out.worst_curvature_rel = std::max(out.worst_curvature_rel, rel);
            if (rel > 1e-4) ++out.curvature_failures;
        }

        // full FD Hessian of the normalized throughput, Richardson
        // extrapolated, must have no meaningfully positive eigenvalue
        {
            auto hess_at = [&](long double h) {
                Eigen::MatrixXd m(dims, dims);
                const long double mid = eval();
                for (std::size_t i = 0; i < dims; ++i) {
                    // slot(i) aliases slot(j) on the diagonal, so the cross
                    // stencil degenerates there; use the 1-d stencil instead
                    long double& xi = slot(i);
                    const long double ki = xi;
                    xi = ki + 2.0L * h;
                    const long double up = eval();
                    xi = ki - 2.0L * h;
                    const long double dn = eval();
                    xi = ki;
                    m(i, i) = static_cast<double>(
                        (up - 2.0L * mid + dn) / (4.0L * h * h) / scale);
                    for (std::size_t j = i + 1; j < dims; ++j) {
                        long double& xj = slot(j);
                        const long double kj = xj;
                        long double pp, pm, mp, mm;
                        xi = ki + h; xj = kj + h; pp = eval();
                        xi = ki + h; xj = kj - h; pm = eval();
                        xi = ki - h; xj = kj + h; mp = eval();
                        xi = ki - h; xj = kj - h; mm = eval();
                        xi = ki; xj = kj;
                        const double v = static_cast<double>(
                            (pp - pm - mp + mm) / (4.0L * h * h) / scale);
                        m(i, j) = v;
                        m(j, i) = v;
                    }
                }
                return m;
            };
            const Eigen::MatrixXd coarse = hess_at(2e-5L);
            const Eigen::MatrixXd fine = hess_at(1e-5L);
            const Eigen::MatrixXd extrapolated = (4.0 * fine - coarse) / 3.0;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(extrapolated);
            const double top = eig.eigenvalues().maxCoeff();
            out.max_hessian_eigenvalue = std::max(out.max_hessian_eigenvalue, top);
            if (top > 1e-6) ++out.eigenvalue_failures;
        }
    }
    return out;
}

struct SolverVerifyOutcome {
    int trials = 0;
    int failures = 0;
    double worst_kkt_residual = 0.0;
    double worst_lattice_gap = 0.0;  // (solver - lattice)/scale, should stay small
    double worst_regression = 0.0;   // (lattice - solver)/scale, should be ~0
    bool ok() const { return trials > 0 && failures == 0; }
};

// Randomized end-to-end check: the barrier solution must carry a first-order
// certificate and sandwich the exhaustive lattice value.
inline SolverVerifyOutcome verify_solver(const VerifyOptions& options = {}) {
    detail::Rng rng(options.seed);
    SolverVerifyOutcome out;
    const std::size_t sensors = std::min<std::size_t>(options.sensors, 2);
    for (int trial = 0; trial < options.trials; ++trial) {
        const NetworkConfig cfg = detail::random_network(rng, sensors, options.shared_slot);
        const double scale = cfg.objective_scale();
        ++out.trials;

        const Solution sol = solve(cfg, PolicyMode::proposed);
        if (sol.status != SolveStatus::optimal) {
            ++out.failures;
            continue;
        }
        out.worst_kkt_residual = std::max(out.worst_kkt_residual, sol.kkt_residual);

        const OracleResult grid =
            grid_oracle(cfg, PolicyMode::proposed, sensors == 1 ? 128 : 48);
        if (!grid.feasible) {
            ++out.failures;
            continue;
        }
        const double regression = (grid.objective - sol.objective) / scale;
        const double gap = (sol.objective - grid.objective) / scale;
        out.worst_regression = std::max(out.worst_regression, regression);
        out.worst_lattice_gap = std::max(out.worst_lattice_gap, gap);
        if (regression > 1e-9 || gap > 0.05) ++out.failures;
    }
    return out;
}

}  // namespace wpbn
