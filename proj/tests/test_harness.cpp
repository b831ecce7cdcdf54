#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "test_util.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

// Runs the CLI under test; the binary path arrives through the WPBN_CLI
// environment variable set by the build.
RunResult run_cli(const std::string& cli_args) {
    const char* bin = std::getenv("WPBN_CLI");
    REQUIRE(bin != nullptr);
    const std::string cmd = std::string(bin) + " " + cli_args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/" + name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

const std::string kOneSensor = R"({"sensor_count": 1, "shared_harvest_slot_enabled": true})";

}  // namespace

TEST_CASE("solve emits schema-complete JSON and succeeds", "[harness]") {
    const std::string cfg = write_temp("harness_one.json", kOneSensor);
    const RunResult r = run_cli("solve --config " + cfg);
    REQUIRE(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j.at("status") == "optimal");
    CHECK(j.at("objective").get<double>() > 0.0);
    CHECK(j.at("allocation").at("t_b").size() == 1);
    CHECK(j.at("allocation").at("t_0").get<double>() > 0.0);
    CHECK(j.at("breakdown").at("r_a").size() == 1);
    CHECK(j.at("kkt_residual").get<double>() <= 1e-6);
    CHECK(j.at("iterations").get<int>() > 0);
    CHECK(j.at("assumed").contains("sensors[].gamma"));
}

TEST_CASE("repeated solves are byte-identical", "[harness]") {
    const std::string cfg = write_temp("harness_repeat.json", kOneSensor);
    const RunResult a = run_cli("solve --config " + cfg);
    const RunResult b = run_cli("solve --config " + cfg);
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(a.out == b.out);

    const std::string out_path = "/tmp/harness_solution.json";
    const RunResult c = run_cli("solve --config " + cfg + " --out " + out_path);
    REQUIRE(c.exit_code == 0);
    std::ifstream written(out_path, std::ios::binary);
    std::ostringstream content;
    content << written.rdbuf();
    CHECK(content.str() == a.out);
    std::remove(out_path.c_str());
}

TEST_CASE("exit codes separate config, feasibility, and support errors", "[harness]") {
    CHECK(run_cli("solve --config /tmp/harness_missing_file.json").exit_code == 1);

    const std::string bad = write_temp("harness_bad.json", R"({"sensor_cnt": 1})");
    CHECK(run_cli("solve --config " + bad).exit_code == 1);

    // a lone sensor cannot harvest without the shared slot, so a floor is unmeetable
    const std::string floored = write_temp(
        "harness_floored.json",
        R"({"sensors": [{"energy_floor": 1e-3}], "shared_harvest_slot_enabled": false})");
    const RunResult infeasible = run_cli("solve --config " + floored);
    CHECK(infeasible.exit_code == 2);
    CHECK(nlohmann::json::parse(infeasible.out).at("status") == "infeasible");

    const std::string two = write_temp("harness_two.json", R"({"sensor_count": 2})");
    CHECK(run_cli("region --config " + two).exit_code == 4);
    const std::string many = write_temp("harness_many.json", R"({"sensor_count": 4})");
    CHECK(run_cli("oracle --config " + many).exit_code == 4);
}

TEST_CASE("region emits the exact grid with feasibility flags", "[harness]") {
    const std::string cfg = write_temp("harness_region.json", kOneSensor);
    const RunResult coarse = run_cli("region --config " + cfg + " --grid 2 --extension off");
    REQUIRE(coarse.exit_code == 0);
    const std::vector<std::string> rows = lines_of(coarse.out);
    REQUIRE(rows.size() == 4);  // header plus the three vertices
    CHECK(rows[0] == "t_b,t_a,t_0,feasible,c0_ok,c1_ok,c2_ok,r_sum");
    CHECK(split_csv(rows[3])[0] == "1");

    // best feasible grid cell never beats the solver
    const RunResult fine = run_cli("region --config " + cfg + " --grid 41");
    REQUIRE(fine.exit_code == 0);
    const RunResult solved = run_cli("solve --config " + cfg);
    const double optimum = nlohmann::json::parse(solved.out).at("objective").get<double>();
    double best = 0.0;
    const std::vector<std::string> fine_rows = lines_of(fine.out);
    for (std::size_t i = 1; i < fine_rows.size(); ++i) {
        const std::vector<std::string> fields = split_csv(fine_rows[i]);
        REQUIRE(fields.size() == 8);
        if (fields[3] == "1") best = std::max(best, std::stod(fields[7]));
    }
    CHECK(best > 0.0);
    CHECK(best <= optimum * (1.0 + 1e-9));
}

TEST_CASE("sweep rows are complete and statuses clean", "[harness]") {
    const std::string cfg = write_temp("harness_sweep.json", R"({"sensor_count": 2})");
    const RunResult r = run_cli("sweep --config " + cfg +
                                " --param backscatter_rate --from 1000 --to 5000 --steps 3"
                                " --policies hm,proposed");
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> rows = lines_of(r.out);
    REQUIRE(rows.size() == 7);
    CHECK(rows[0] == "param,value,policy,objective,r_b,r_h,status");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::vector<std::string> fields = split_csv(rows[i]);
        REQUIRE(fields.size() == 7);
        CHECK(fields[0] == "backscatter_rate");
        CHECK(fields[6] == "optimal");
        CHECK_THAT(std::stod(fields[4]) + std::stod(fields[5]),
                   Catch::Matchers::WithinRel(std::stod(fields[3]), 1e-9));
    }
    CHECK(split_csv(rows[1])[2] == "hm");
    CHECK(split_csv(rows[2])[2] == "proposed");

    // warm starting is a speed device only; answers must match a cold run
    const std::string flags = " --param source_power_dbm --from 10 --to 30 --steps 3"
                              " --policies proposed";
    const RunResult warm = run_cli("sweep --config " + cfg + flags);
    const RunResult cold = run_cli("sweep --config " + cfg + flags + " --cold-start");
    REQUIRE(warm.exit_code == 0);
    REQUIRE(cold.exit_code == 0);
    const std::vector<std::string> warm_rows = lines_of(warm.out);
    const std::vector<std::string> cold_rows = lines_of(cold.out);
    REQUIRE(warm_rows.size() == cold_rows.size());
    for (std::size_t i = 1; i < warm_rows.size(); ++i) {
        const double a = std::stod(split_csv(warm_rows[i])[3]);
        const double b = std::stod(split_csv(cold_rows[i])[3]);
        CHECK(testutil::close_rel(a, b, 1e-9));
    }
}

TEST_CASE("oracle and solver agree through the CLI", "[harness]") {
    const std::string cfg = write_temp("harness_oracle.json", kOneSensor);
    const RunResult solved = run_cli("solve --config " + cfg);
    const RunResult oracle = run_cli("oracle --config " + cfg + " --resolution 200");
    REQUIRE(solved.exit_code == 0);
    REQUIRE(oracle.exit_code == 0);
    const double solver_objective =
        nlohmann::json::parse(solved.out).at("objective").get<double>();
    const nlohmann::json o = nlohmann::json::parse(oracle.out);
    CHECK(o.at("feasible") == true);
    const double oracle_objective = o.at("objective").get<double>();
    CHECK(testutil::close_rel(solver_objective, oracle_objective, 1e-3));
    CHECK(oracle_objective <= solver_objective * (1.0 + 1e-9));
}

TEST_CASE("frame seconds rescale reported rates only", "[harness]") {
    const std::string cfg = write_temp("harness_frame.json", kOneSensor);
    const RunResult unit = run_cli("solve --config " + cfg);
    const RunResult scaled = run_cli("solve --config " + cfg + " --frame-seconds 2");
    REQUIRE(unit.exit_code == 0);
    REQUIRE(scaled.exit_code == 0);
    const nlohmann::json a = nlohmann::json::parse(unit.out);
    const nlohmann::json b = nlohmann::json::parse(scaled.out);
    CHECK_THAT(b.at("objective").get<double>(),
               Catch::Matchers::WithinRel(a.at("objective").get<double>() / 2.0, 1e-12));
    CHECK(a.at("allocation") == b.at("allocation"));
}

TEST_CASE("verify subcommand reports a clean bill", "[harness]") {
    const std::string cfg = write_temp("harness_verify.json", kOneSensor);
    const RunResult r = run_cli("verify --config " + cfg + " --trials 40 --seed 5");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("all checks passed") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);

    const std::string bad = write_temp("harness_verify_bad.json",
                                       R"({"sensors": [{"gamma": -5}]})");
    CHECK(run_cli("verify --config " + bad).exit_code == 1);
}
