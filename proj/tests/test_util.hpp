#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Shared helpers for the test suites. Uniform draws are built from raw
// mt19937_64 output so sequences depend only on the seed, not on the
// standard library's distribution implementation.
namespace testutil {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        const double u = std::ldexp(static_cast<double>(gen_() >> 11), -53);
        return lo + (hi - lo) * u;
    }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

inline bool close_rel(double a, double b, double tol) {
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= tol * scale;
}

}  // namespace testutil
