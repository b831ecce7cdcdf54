#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "wpbn/feasibility.hpp"

using namespace wpbn;
using Catch::Matchers::WithinRel;

TEST_CASE("interior allocation satisfies every constraint", "[feasibility]") {
    NetworkConfig cfg = default_network(2);
    cfg.shared_harvest_slot = true;
    TimeAllocation alloc = zero_allocation(2);
    alloc.backscatter_times = {0.2, 0.2};
    alloc.transmit_times = {0.2, 0.2};
    alloc.shared_harvest_time = 0.1;

    const ConstraintReport report = check(alloc, cfg);
    CHECK(report.c0_ok);
    CHECK(report.c1_ok);
    CHECK(report.c2_ok);
    CHECK(report.feasible());
    CHECK(report.worst_violation == 0.0);
    CHECK_THAT(report.budget_slack, WithinRel(0.1, 1e-9));
}

TEST_CASE("budget and sign violations flip the time constraint", "[feasibility]") {
    NetworkConfig cfg = default_network(2);
    TimeAllocation alloc = zero_allocation(2);
    alloc.backscatter_times = {0.6, 0.6};
    CHECK_FALSE(check(alloc, cfg).c0_ok);

    alloc.backscatter_times = {0.2, -0.01};
    const ConstraintReport report = check(alloc, cfg);
    CHECK_FALSE(report.c0_ok);
    CHECK(report.min_coordinate == -0.01);
    CHECK(report.worst_violation > 0.0);

    // exact boundary and sub-tolerance overshoot both count as satisfied
    alloc.backscatter_times = {0.5, 0.5};
    CHECK(check(alloc, cfg).c0_ok);
    alloc.backscatter_times = {0.5, 0.5 + 1e-12};
    CHECK(check(alloc, cfg).c0_ok);
    alloc.backscatter_times = {0.5, 0.5 + 1e-6};
    CHECK_FALSE(check(alloc, cfg).c0_ok);
}

TEST_CASE("average-power cap compares harvested energy to cap times time", "[feasibility]") {
    NetworkConfig cfg = default_network(2);
    TimeAllocation alloc = zero_allocation(2);
    alloc.backscatter_times = {0.0, 0.5};
    alloc.transmit_times = {0.2, 0.0};

    // sensor 0 harvests ~4.7e-7 J; cap slack is 1e-5 * 0.2
    REQUIRE(harvested_energy(alloc, cfg, 0) <
            cfg.sensors[0].power_cap * alloc.transmit_times[0]);
    CHECK(check(alloc, cfg).c1_ok);

    alloc.transmit_times[0] = 1e-3;  // cap budget 1e-8 < harvested 4.7e-7
    CHECK_FALSE(check(alloc, cfg).c1_ok);

    // at zero transmit time the row demands zero harvested energy
    alloc.transmit_times[0] = 0.0;
    CHECK_FALSE(check(alloc, cfg).c1_ok);
    alloc.backscatter_times[1] = 0.0;
    CHECK(check(alloc, cfg).c1_ok);
}

TEST_CASE("energy floor rows apply only when the floor is positive", "[feasibility]") {
    NetworkConfig cfg = default_network(2);
    TimeAllocation alloc = zero_allocation(2);
    alloc.backscatter_times = {0.0, 0.5};
    alloc.transmit_times = {0.2, 0.0};
    const double harvested = harvested_energy(alloc, cfg, 0);
    REQUIRE(harvested > 0.0);

    cfg.sensors[0].energy_floor = 0.5 * harvested;
    CHECK(check(alloc, cfg).c2_ok);

    cfg.sensors[0].energy_floor = 2.0 * harvested;
    const ConstraintReport report = check(alloc, cfg);
    CHECK_FALSE(report.c2_ok);
    CHECK_FALSE(report.feasible());
    CHECK(report.c1_ok);

    // zero floor is vacuous even with zero harvested energy
    cfg.sensors[0].energy_floor = 0.0;
    const TimeAllocation idle = zero_allocation(2);
    CHECK(check(idle, cfg).c2_ok);
    CHECK(std::isinf(check(idle, cfg).floor_slack[0]));
}

TEST_CASE("attainable energy bound reflects who can radiate", "[feasibility]") {
    NetworkConfig solo = default_network(1);
    CHECK(max_attainable_energy(solo, 0) == 0.0);

    solo.shared_harvest_slot = true;
    CHECK_THAT(max_attainable_energy(solo, 0), WithinRel(solo.received_power(0), 1e-12));

    NetworkConfig pair = default_network(2);
    CHECK_THAT(max_attainable_energy(pair, 0), WithinRel(pair.received_power(0), 1e-12));
    pair.shared_harvest_slot = true;
    CHECK_THAT(max_attainable_energy(pair, 1), WithinRel(pair.received_power(1), 1e-12));
}

TEST_CASE("region sampling enumerates the single-sensor simplex", "[feasibility]") {
    NetworkConfig cfg = default_network(1);
    cfg.shared_harvest_slot = true;

    CHECK_THROWS_AS(sample_region(default_network(2), 5), unsupported_error);
    CHECK_THROWS_AS(sample_region(cfg, 1), std::invalid_argument);

    // two points per axis: origin plus the three simplex vertices
    const std::vector<RegionSample> coarse = sample_region(cfg, 2);
    REQUIRE(coarse.size() == 4);
    CHECK(coarse[0].t_b == 0.0);
    CHECK(coarse[0].t_a == 0.0);
    CHECK(coarse[0].t_0 == 0.0);
    CHECK(coarse[1].t_0 == 1.0);  // innermost axis advances first
    CHECK(coarse[2].t_a == 1.0);
    CHECK(coarse[3].t_b == 1.0);

    for (const RegionSample& row : coarse) CHECK(row.c0_ok);

    // all-backscatter and all-transmit vertices harvest nothing and are fine;
    // the harvest-only vertex violates the cap row (energy with zero time)
    CHECK(coarse[3].feasible);
    CHECK(coarse[2].feasible);
    CHECK_FALSE(coarse[1].feasible);
    CHECK_FALSE(coarse[1].c1_ok);

    const std::vector<RegionSample> fine = sample_region(cfg, 5);
    CHECK(fine.size() == 35);
    for (const RegionSample& row : fine) {
        TimeAllocation alloc = zero_allocation(1);
        alloc.backscatter_times[0] = row.t_b;
        alloc.transmit_times[0] = row.t_a;
        alloc.shared_harvest_time = row.t_0;
        CHECK_THAT(row.r_sum, WithinRel(network_throughput(alloc, cfg), 1e-12));
        const ConstraintReport report = check(alloc, cfg);
        CHECK(row.feasible == report.feasible());
        CHECK(row.c1_ok == report.c1_ok);
        CHECK(row.c2_ok == report.c2_ok);
    }
}

TEST_CASE("region sampling without the shared slot stays on its face", "[feasibility]") {
    NetworkConfig cfg = default_network(1);
    cfg.shared_harvest_slot = false;
    const std::vector<RegionSample> rows = sample_region(cfg, 5);
    CHECK(rows.size() == 15);
    for (const RegionSample& row : rows) CHECK(row.t_0 == 0.0);

    // with no one to harvest from, a positive floor kills every sample
    cfg.sensors[0].energy_floor = 1e-9;
    for (const RegionSample& row : sample_region(cfg, 5)) CHECK_FALSE(row.feasible);
}
