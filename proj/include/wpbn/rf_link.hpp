#pragma once

#include <cmath>
#include <stdexcept>

namespace wpbn {

// Propagation speed used for every frequency/wavelength conversion. The
// truncated 2.998e8 m/s value is the project-wide convention; keep it in sync
// with the documented link-budget figures.
inline constexpr double speed_of_light = 2.998e8;  // m/s

inline double dbm_to_watts(double level_dbm) {
    return std::pow(10.0, (level_dbm - 30.0) / 10.0);
}

inline double watts_to_dbm(double watts) {
    if (!(watts > 0.0)) throw std::domain_error("watts_to_dbm: power must be positive");
    return 10.0 * std::log10(watts) + 30.0;
}

inline double dbi_to_linear(double gain_dbi) {
    return std::pow(10.0, gain_dbi / 10.0);
}

inline double linear_to_dbi(double gain_linear) {
    if (!(gain_linear > 0.0)) throw std::domain_error("linear_to_dbi: gain must be positive");
    return 10.0 * std::log10(gain_linear);
}

inline double wavelength_from_frequency(double frequency_hz) {
    if (!(frequency_hz > 0.0))
        throw std::domain_error("wavelength_from_frequency: frequency must be positive");
    return speed_of_light / frequency_hz;
}

// RF energy source (the gateway's downlink side).
struct SourceParams {
    double transmit_power = 0.0;  // watts
    double antenna_gain = 1.0;    // linear
};

// One gateway->sensor path. harvest_efficiency is the rectifier efficiency
// applied to the incident power.
struct LinkParams {
    double distance = 1.0;           // meters, > 0
    double rx_antenna_gain = 1.0;    // linear
    double harvest_efficiency = 1.0; // in [0, 1]
};

// Free-space received (harvestable) power at the sensor, in watts.
inline double received_power(const SourceParams& source, const LinkParams& link,
                             double wavelength) {
    if (!(link.distance > 0.0))
        throw std::domain_error("received_power: distance must be positive");
    if (!(wavelength > 0.0))
        throw std::domain_error("received_power: wavelength must be positive");
    if (link.harvest_efficiency < 0.0 || link.harvest_efficiency > 1.0)
        throw std::domain_error("received_power: harvest efficiency outside [0, 1]");
    if (source.transmit_power < 0.0)
        throw std::domain_error("received_power: transmit power must be nonnegative");
    if (source.antenna_gain < 0.0 || link.rx_antenna_gain < 0.0)
        throw std::domain_error("received_power: antenna gains must be nonnegative");

    const double denom = 4.0 * M_PI * link.distance;
    const double path = (wavelength / denom) * (wavelength / denom);
    return link.harvest_efficiency * source.transmit_power * source.antenna_gain *
           link.rx_antenna_gain * path;
}

}  // namespace wpbn
