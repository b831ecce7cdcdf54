#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpbn/feasibility.hpp"
#include "wpbn/solver.hpp"

namespace wpbn {

// Shortest text that round-trips the double; integers drop the decimal point.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline nlohmann::ordered_json allocation_to_json(const TimeAllocation& alloc) {
    nlohmann::ordered_json out;
    out["t_b"] = alloc.backscatter_times;
    out["t_a"] = alloc.transmit_times;
    out["t_0"] = alloc.shared_harvest_time;
    return out;
}

// Solution object in the output schema. Rates are divided by frame_seconds so
// a physical frame length turns per-frame bits into bits per second; time
// fractions stay normalized.
inline nlohmann::ordered_json solution_to_json(const Solution& sol, double frame_seconds) {
    nlohmann::ordered_json out;
    out["status"] = status_name(sol.status);
    out["objective"] = sol.objective / frame_seconds;
    out["allocation"] = allocation_to_json(sol.allocation);
    std::vector<double> r_b = sol.breakdown.backscatter_bits;
    std::vector<double> r_a = sol.breakdown.htt_bits;
    for (double& v : r_b) v /= frame_seconds;
    for (double& v : r_a) v /= frame_seconds;
    out["breakdown"]["r_b"] = r_b;
    out["breakdown"]["r_a"] = r_a;
    out["kkt_residual"] = sol.kkt_residual;
    out["iterations"] = sol.newton_iterations;
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string region_csv(const std::vector<RegionSample>& samples) {
    std::string out = "t_b,t_a,t_0,feasible,c0_ok,c1_ok,c2_ok,r_sum\n";
    for (const RegionSample& s : samples) {
        out += format_double(s.t_b) + "," + format_double(s.t_a) + "," + format_double(s.t_0) +
               "," + (s.feasible ? "1" : "0") + "," + (s.c0_ok ? "1" : "0") + "," +
               (s.c1_ok ? "1" : "0") + "," + (s.c2_ok ? "1" : "0") + "," +
               format_double(s.r_sum) + "\n";
    }
    return out;
}

}  // namespace wpbn
