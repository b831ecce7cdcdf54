// Command-line front end: solve one network, sweep a parameter, scan the
// single-sensor feasible region, compare policies, run the lattice oracle, or
// self-check the model and solver.
//
// Exit codes: 0 success, 1 I/O or config error, 2 infeasible, 3 solver
// non-convergence, 4 unsupported request, 5 verification failure.
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpbn/baselines.hpp"
#include "wpbn/config.hpp"
#include "wpbn/io.hpp"
#include "wpbn/oracle.hpp"
#include "wpbn/sweep.hpp"
#include "wpbn/verify.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_io = 1;
constexpr int exit_infeasible = 2;
constexpr int exit_nonconvergence = 3;
constexpr int exit_unsupported = 4;
constexpr int exit_verify_failed = 5;

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string item;
    for (char c : csv) {
        if (c == ',') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item += c;
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::string extension;  // "", "on", "off"
    double frame_seconds = 1.0;
    std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file")->required();
    cmd->add_option("--out", args.out_path, "output file (stdout when omitted)");
    cmd->add_option("--extension", args.extension,
                    "override the shared harvest slot switch")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--frame-seconds", args.frame_seconds,
                    "frame length in seconds; reported rates become bits/s")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args.seed, "seed for randomized verification suites");
}

wpbn::LoadedConfig load(const CommonArgs& args) {
    wpbn::LoadedConfig loaded = wpbn::load_config(args.config_path);
    if (!args.extension.empty()) {
        loaded.network.shared_harvest_slot = args.extension == "on";
        loaded.assumed.erase("shared_harvest_slot_enabled");
    }
    return loaded;
}

void emit(const CommonArgs& args, const std::string& content) {
    if (args.out_path.empty())
        std::cout << content;
    else
        wpbn::write_text_file(args.out_path, content);
}

int status_exit_code(wpbn::SolveStatus status) {
    switch (status) {
        case wpbn::SolveStatus::optimal: return exit_ok;
        case wpbn::SolveStatus::infeasible: return exit_infeasible;
        case wpbn::SolveStatus::non_convergence: return exit_nonconvergence;
    }
    return exit_io;
}

int cmd_solve(const CommonArgs& args) {
    const wpbn::LoadedConfig loaded = load(args);
    const wpbn::Solution sol =
        wpbn::solve(loaded.network, wpbn::PolicyMode::proposed, loaded.solver);
    nlohmann::ordered_json out = wpbn::solution_to_json(sol, args.frame_seconds);
    out["assumed"] = loaded.assumed;
    emit(args, out.dump(2) + "\n");
    if (sol.status != wpbn::SolveStatus::optimal && !sol.infeasibility_witness.empty())
        std::cerr << sol.infeasibility_witness << "\n";
    return status_exit_code(sol.status);
}

int cmd_compare(const CommonArgs& args) {
    const wpbn::LoadedConfig loaded = load(args);
    nlohmann::ordered_json out;
    try {
        out["bm"] = wpbn::solution_to_json(wpbn::solve_bm(loaded.network), args.frame_seconds);
    } catch (const wpbn::unsupported_error& e) {
        out["bm"] = {{"status", "unsupported"}, {"reason", e.what()}};
    }
    out["hm"] = wpbn::solution_to_json(
        wpbn::solve(loaded.network, wpbn::PolicyMode::hm, loaded.solver), args.frame_seconds);
    const wpbn::Solution proposed =
        wpbn::solve(loaded.network, wpbn::PolicyMode::proposed, loaded.solver);
    out["proposed"] = wpbn::solution_to_json(proposed, args.frame_seconds);
    out["assumed"] = loaded.assumed;
    emit(args, out.dump(2) + "\n");
    return status_exit_code(proposed.status);
}

int cmd_sweep(const CommonArgs& args, const std::string& param, double from, double to,
              int steps, const std::string& policies, bool cold_start) {
    const wpbn::LoadedConfig loaded = load(args);
    wpbn::SweepSpec spec;
    const std::map<std::string, wpbn::SweepParam> params = {
        {"backscatter_rate", wpbn::SweepParam::backscatter_rate},
        {"sensor_count", wpbn::SweepParam::sensor_count},
        {"source_power_dbm", wpbn::SweepParam::source_power_dbm},
        {"harvest_efficiency", wpbn::SweepParam::harvest_efficiency},
    };
    spec.parameter = params.at(param);
    spec.from = from;
    spec.to = to;
    spec.steps = steps;
    for (const std::string& name : split_list(policies)) {
        if (name == "bm")
            spec.policies.push_back(wpbn::SweepPolicy::bm);
        else if (name == "hm")
            spec.policies.push_back(wpbn::SweepPolicy::hm);
        else if (name == "proposed")
            spec.policies.push_back(wpbn::SweepPolicy::proposed);
        else
            throw wpbn::config_error("unknown policy \"" + name + "\"");
    }
    const std::vector<wpbn::SweepRow> rows =
        wpbn::run_sweep(loaded, spec, cold_start, args.frame_seconds);
    emit(args, wpbn::sweep_csv(rows));
    return exit_ok;
}

int cmd_region(const CommonArgs& args, int grid) {
    const wpbn::LoadedConfig loaded = load(args);
    const std::vector<wpbn::RegionSample> samples = wpbn::sample_region(loaded.network, grid);
    emit(args, wpbn::region_csv(samples));
    return exit_ok;
}

int cmd_oracle(const CommonArgs& args, int resolution, const std::string& policy) {
    const wpbn::LoadedConfig loaded = load(args);
    const wpbn::PolicyMode mode =
        policy == "hm" ? wpbn::PolicyMode::hm : wpbn::PolicyMode::proposed;
    const wpbn::OracleResult result = wpbn::grid_oracle(loaded.network, mode, resolution);
    nlohmann::ordered_json out;
    out["feasible"] = result.feasible;
    out["objective"] = result.objective;
    out["allocation"] = wpbn::allocation_to_json(result.allocation);
    out["assumed"] = loaded.assumed;
    emit(args, out.dump(2) + "\n");
    return result.feasible ? exit_ok : exit_infeasible;
}

int cmd_verify(const CommonArgs& args, int trials) {
    const wpbn::LoadedConfig loaded = load(args);
    const wpbn::NetworkConfig& cfg = loaded.network;
    std::string report;
    std::vector<std::string> failed;
    char line[256];

    wpbn::VerifyOptions options;
    options.trials = trials;
    options.seed = args.seed;
    options.sensors = cfg.size();
    options.shared_slot = cfg.shared_harvest_slot;
    const wpbn::ModelVerifyOutcome model = wpbn::verify_model(options);
    auto check = [&](const char* name, bool ok, double detail) {
        std::snprintf(line, sizeof line, "%-24s %s (%.3e)\n", name, ok ? "pass" : "FAIL", detail);
        report += line;
        if (!ok) failed.push_back(name);
    };
    check("gradient", model.gradient_failures == 0, model.worst_gradient_rel);
    check("concavity", model.concavity_failures == 0, model.worst_concavity_slack);
    check("curvature", model.curvature_failures == 0, model.worst_curvature_rel);
    check("hessian eigenvalues", model.eigenvalue_failures == 0, model.max_hessian_eigenvalue);

    wpbn::VerifyOptions solver_options = options;
    solver_options.trials = std::max(1, trials / 10);
    const wpbn::SolverVerifyOutcome solver = wpbn::verify_solver(solver_options);
    check("solver certificates", solver.failures == 0,
          std::max(solver.worst_lattice_gap, solver.worst_kkt_residual));

    if (cfg.size() <= 2) {
        const wpbn::Solution sol = wpbn::solve(cfg, wpbn::PolicyMode::proposed, loaded.solver);
        const wpbn::OracleResult oracle =
            wpbn::grid_oracle(cfg, wpbn::PolicyMode::proposed, 128);
        const double scale = std::max(1.0, std::fabs(sol.objective));
        const double gap = (oracle.feasible ? oracle.objective - sol.objective : 0.0) / scale;
        check("config lattice gap", sol.status == wpbn::SolveStatus::optimal && gap <= 1e-3,
              gap);
    }

    report += failed.empty() ? "all checks passed\n" : "failed: " + failed.front() + "\n";
    emit(args, report);
    return failed.empty() ? exit_ok : exit_verify_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time scheduling toolkit for wireless-powered backscatter networks"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string sweep_param = "backscatter_rate";
    double sweep_from = 0.0, sweep_to = 0.0;
    int sweep_steps = 2;
    std::string sweep_policies = "bm,hm,proposed";
    bool cold_start = false;
    int region_grid = 101;
    int oracle_resolution = 128;
    std::string oracle_policy = "proposed";
    int verify_trials = 200;

    CLI::App* solve = app.add_subcommand("solve", "optimal schedule for one network");
    add_common(solve, args);

    CLI::App* sweep = app.add_subcommand("sweep", "sweep one parameter across policies");
    add_common(sweep, args);
    sweep->add_option("--param", sweep_param, "parameter to sweep")
        ->check(CLI::IsMember({"backscatter_rate", "sensor_count", "source_power_dbm",
                               "harvest_efficiency"}))
        ->required();
    sweep->add_option("--from", sweep_from, "first parameter value")->required();
    sweep->add_option("--to", sweep_to, "last parameter value")->required();
    sweep->add_option("--steps", sweep_steps, "number of grid points")->required();
    sweep->add_option("--policies", sweep_policies, "comma list from bm,hm,proposed");
    sweep->add_flag("--cold-start", cold_start, "disable warm starting between points");

    CLI::App* region = app.add_subcommand("region", "feasible-region scan (single sensor)");
    add_common(region, args);
    region->add_option("--grid", region_grid, "points per axis")->check(CLI::Range(2, 4096));

    CLI::App* compare = app.add_subcommand("compare", "solve all three policies");
    add_common(compare, args);

    CLI::App* oracle = app.add_subcommand("oracle", "exhaustive lattice search (small N)");
    add_common(oracle, args);
    oracle->add_option("--resolution", oracle_resolution, "lattice steps per unit time")
        ->check(CLI::Range(1, 100000));
    oracle->add_option("--policy", oracle_policy, "policy to search")
        ->check(CLI::IsMember({"proposed", "hm"}));

    CLI::App* verify = app.add_subcommand("verify", "model and solver self-checks");
    add_common(verify, args);
    verify->add_option("--trials", verify_trials, "randomized trials per suite")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(args);
        if (sweep->parsed())
            return cmd_sweep(args, sweep_param, sweep_from, sweep_to, sweep_steps,
                             sweep_policies, cold_start);
        if (region->parsed()) return cmd_region(args, region_grid);
        if (compare->parsed()) return cmd_compare(args);
        if (oracle->parsed()) return cmd_oracle(args, oracle_resolution, oracle_policy);
        if (verify->parsed()) return cmd_verify(args, verify_trials);
    } catch (const wpbn::unsupported_error& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return exit_unsupported;
    } catch (const wpbn::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid request: " << e.what() << "\n";
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    }
    return exit_io;
}
