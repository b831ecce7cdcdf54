#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "wpbn/rf_link.hpp"

namespace wpbn {

// Clamp applied to the transmit time when evaluating gradient components at
// the t_a = 0 boundary (right limit of the smooth interior expression).
inline constexpr double transmit_time_floor = 1e-12;

// Per-sensor parameters. noise_channel_ratio is N0/g in watts for the
// sensor->gateway uplink; its reciprocal multiplies the transmit power inside
// the log. power_cap bounds the average transmit power; energy_floor is the
// minimum energy the sensor must harvest per unit frame.
struct SensorParams {
    LinkParams link;
    double backscatter_efficiency = 1.0;  // in [0, 1]
    double backscatter_rate = 4000.0;     // bits per unit frame
    double tx_efficiency = 0.6;           // in (0, 1]
    double noise_channel_ratio = 1e-6;    // watts, > 0
    double power_cap = 1e-5;              // watts, > 0
    double energy_floor = 0.0;            // joules per unit frame, >= 0
};

struct NetworkConfig {
    SourceParams source;
    double wavelength = speed_of_light / 2.4e9;  // meters
    double bandwidth = 1e7;                      // Hz
    bool shared_harvest_slot = false;
    std::vector<SensorParams> sensors;

    std::size_t size() const { return sensors.size(); }

    double received_power(std::size_t n) const {
        return wpbn::received_power(source, sensors.at(n).link, wavelength);
    }

    double psi(std::size_t n) const { return sensors.at(n).tx_efficiency * bandwidth; }

    double gamma(std::size_t n) const { return 1.0 / sensors.at(n).noise_channel_ratio; }

    // Magnitude used to normalize objectives for tolerances and conditioning.
    double objective_scale() const {
        double scale = 1.0;
        for (std::size_t n = 0; n < size(); ++n) {
            const SensorParams& s = sensors[n];
            const double rate =
                s.backscatter_efficiency * s.backscatter_rate +
                psi(n) * std::log1p(gamma(n) * received_power(n)) / std::numbers::ln2;
            scale = std::max(scale, rate);
        }
        return scale;
    }

    void validate() const {
        if (sensors.empty()) throw std::invalid_argument("network has no sensors");
        if (!(source.transmit_power > 0.0))
            throw std::invalid_argument("source transmit power must be positive");
        if (source.antenna_gain < 0.0)
            throw std::invalid_argument("source antenna gain must be nonnegative");
        if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
        if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
        for (const SensorParams& s : sensors) {
            if (!(s.link.distance > 0.0))
                throw std::invalid_argument("sensor distance must be positive");
            if (s.link.rx_antenna_gain < 0.0)
                throw std::invalid_argument("sensor antenna gain must be nonnegative");
            if (s.link.harvest_efficiency < 0.0 || s.link.harvest_efficiency > 1.0)
                throw std::invalid_argument("harvest efficiency outside [0, 1]");
            if (s.backscatter_efficiency < 0.0 || s.backscatter_efficiency > 1.0)
                throw std::invalid_argument("backscatter efficiency outside [0, 1]");
            if (s.backscatter_rate < 0.0)
                throw std::invalid_argument("backscatter rate must be nonnegative");
            if (!(s.tx_efficiency > 0.0) || s.tx_efficiency > 1.0)
                throw std::invalid_argument("tx efficiency outside (0, 1]");
            if (!(s.noise_channel_ratio > 0.0))
                throw std::invalid_argument("noise-to-channel ratio must be positive");
            if (!(s.power_cap > 0.0)) throw std::invalid_argument("power cap must be positive");
            if (s.energy_floor < 0.0)
                throw std::invalid_argument("energy floor must be nonnegative");
        }
    }
};

// Reference network: 2.4 GHz source at 20 dBm with 6 dBi antennas, sensors at
// 10 m, rectifier and transmit efficiency 0.6, 10 MHz bandwidth, 4 kb/s
// backscatter rate, -20 dBm power cap, no energy floor, uplink
// noise-to-channel ratio 1e-6 W (an assumption surfaced in harness outputs).
inline SensorParams default_sensor() {
    SensorParams s;
    s.link = LinkParams{10.0, dbi_to_linear(6.0), 0.6};
    s.backscatter_efficiency = 1.0;
    s.backscatter_rate = 4000.0;
    s.tx_efficiency = 0.6;
    s.noise_channel_ratio = 1e-6;
    s.power_cap = dbm_to_watts(-20.0);
    s.energy_floor = 0.0;
    return s;
}

inline NetworkConfig default_network(std::size_t sensor_count) {
    NetworkConfig cfg;
    cfg.source = SourceParams{dbm_to_watts(20.0), dbi_to_linear(6.0)};
    cfg.wavelength = wavelength_from_frequency(2.4e9);
    cfg.bandwidth = 1e7;
    cfg.shared_harvest_slot = false;
    cfg.sensors.assign(sensor_count, default_sensor());
    return cfg;
}

// Frame split: per-sensor backscatter and active-transmission times plus the
// optional shared harvest-only slot (fixed 0 when that extension is off).
struct TimeAllocation {
    std::vector<double> backscatter_times;
    std::vector<double> transmit_times;
    double shared_harvest_time = 0.0;

    double total_time() const {
        double sum = shared_harvest_time;
        for (double v : backscatter_times) sum += v;
        for (double v : transmit_times) sum += v;
        return sum;
    }
};

inline TimeAllocation zero_allocation(std::size_t sensor_count) {
    TimeAllocation alloc;
    alloc.backscatter_times.assign(sensor_count, 0.0);
    alloc.transmit_times.assign(sensor_count, 0.0);
    alloc.shared_harvest_time = 0.0;
    return alloc;
}

// Time sensor n spends harvesting: the shared slot plus every other sensor's
// backscatter time (a sensor cannot harvest its own reflection).
inline double harvest_time(const TimeAllocation& alloc, std::size_t n) {
    if (n >= alloc.backscatter_times.size())
        throw std::out_of_range("harvest_time: sensor index out of range");
    double sum = alloc.shared_harvest_time;
    for (std::size_t m = 0; m < alloc.backscatter_times.size(); ++m)
        if (m != n) sum += alloc.backscatter_times[m];
    return sum;
}

inline double harvested_energy(const TimeAllocation& alloc, const NetworkConfig& cfg,
                               std::size_t n) {
    return harvest_time(alloc, n) * cfg.received_power(n);
}

inline double backscatter_bits(const TimeAllocation& alloc, const NetworkConfig& cfg,
                               std::size_t n) {
    const SensorParams& s = cfg.sensors.at(n);
    return s.backscatter_efficiency * alloc.backscatter_times.at(n) * s.backscatter_rate;
}

// Shannon-style bits for one sensor discharging `energy` joules over time t.
// Continuous extension: 0 whenever t or the energy is 0. log1p keeps full
// relative accuracy when the per-slot energy budget is tiny.
template <class Real>
Real htt_bits_kernel(Real psi, Real gamma, Real energy, Real t) {
    if (!(t > Real(0)) || !(energy > Real(0))) return Real(0);
    return psi * t * std::log1p(gamma * energy / t) / std::numbers::ln2_v<Real>;
}

inline double htt_bits(const TimeAllocation& alloc, const NetworkConfig& cfg, std::size_t n) {
    return htt_bits_kernel<double>(cfg.psi(n), cfg.gamma(n), harvested_energy(alloc, cfg, n),
                                   alloc.transmit_times.at(n));
}

// Total throughput over generic scalars; long double instantiations back the
// finite-difference checks.
template <class Real>
Real network_throughput_t(const NetworkConfig& cfg, const std::vector<Real>& backscatter,
                          const std::vector<Real>& transmit, Real shared_harvest) {
    const std::size_t n = cfg.size();
    if (backscatter.size() != n || transmit.size() != n)
        throw std::invalid_argument("network_throughput: allocation size mismatch");
    Real total_b = shared_harvest;
    for (const Real& v : backscatter) total_b += v;
    Real sum = Real(0);
    for (std::size_t i = 0; i < n; ++i) {
        const SensorParams& s = cfg.sensors[i];
        sum += Real(s.backscatter_efficiency) * backscatter[i] * Real(s.backscatter_rate);
        const Real harvest = total_b - backscatter[i];
        const Real energy = harvest * Real(cfg.received_power(i));
        sum += htt_bits_kernel<Real>(Real(cfg.psi(i)), Real(cfg.gamma(i)), energy, transmit[i]);
    }
    return sum;
}

inline double network_throughput(const TimeAllocation& alloc, const NetworkConfig& cfg) {
    return network_throughput_t<double>(cfg, alloc.backscatter_times, alloc.transmit_times,
                                        alloc.shared_harvest_time);
}

struct RateBreakdown {
    std::vector<double> backscatter_bits;
    std::vector<double> htt_bits;

    double backscatter_total() const {
        double s = 0.0;
        for (double v : backscatter_bits) s += v;
        return s;
    }
    double htt_total() const {
        double s = 0.0;
        for (double v : htt_bits) s += v;
        return s;
    }
};

inline RateBreakdown rate_breakdown(const TimeAllocation& alloc, const NetworkConfig& cfg) {
    RateBreakdown out;
    for (std::size_t n = 0; n < cfg.size(); ++n) {
        out.backscatter_bits.push_back(backscatter_bits(alloc, cfg, n));
        out.htt_bits.push_back(htt_bits(alloc, cfg, n));
    }
    return out;
}

// Gradient of the throughput in (t_b[0..N), t_a[0..N), t_0) order; always
// length 2N+1, with the shared-slot component last even when that slot is
// frozen. Transmit components at t_a = 0 use the clamped right limit.
inline std::vector<double> throughput_gradient(const TimeAllocation& alloc,
                                               const NetworkConfig& cfg) {
    const std::size_t n = cfg.size();
    if (alloc.backscatter_times.size() != n || alloc.transmit_times.size() != n)
        throw std::invalid_argument("throughput_gradient: allocation size mismatch");
    constexpr double ln2 = 0.6931471805599453;

    std::vector<double> grad(2 * n + 1, 0.0);
    double energy_value_sum = 0.0;  // sum over sensors of d(htt)/d(harvest time)
    std::vector<double> energy_value(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = cfg.gamma(i) * cfg.received_power(i);
        const double t = std::max(alloc.transmit_times[i], transmit_time_floor);
        const double w = cfg.gamma(i) * harvested_energy(alloc, cfg, i) / t;
        energy_value[i] = cfg.psi(i) * c / ((1.0 + w) * ln2);
        energy_value_sum += energy_value[i];
        grad[n + i] = cfg.psi(i) * (std::log1p(w) - w / (1.0 + w)) / ln2;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const SensorParams& s = cfg.sensors[i];
        grad[i] = s.backscatter_efficiency * s.backscatter_rate +
                  (energy_value_sum - energy_value[i]);
    }
    grad[2 * n] = energy_value_sum;
    return grad;
}

// Curvature of sensor n's rate along a direction that changes its harvest
// time at rate v_s and its transmit time at rate v_t. Rank-one and never
// positive; requires t_a[n] > 0.
inline double quadratic_form(const TimeAllocation& alloc, const NetworkConfig& cfg,
                             std::size_t n, double v_s, double v_t) {
    const double t = alloc.transmit_times.at(n);
    if (!(t > 0.0))
        throw std::domain_error("quadratic_form: transmit time must be positive");
    constexpr double ln2 = 0.6931471805599453;
    const double c = cfg.gamma(n) * cfg.received_power(n);
    const double w = cfg.gamma(n) * harvested_energy(alloc, cfg, n) / t;
    const double dir = v_s * c - v_t * w;
    const double denom = t * (1.0 + w) * (1.0 + w) * ln2;
    return -cfg.psi(n) * dir * dir / denom;
}

}  // namespace wpbn
