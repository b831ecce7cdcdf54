#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"
#include "wpbn/baselines.hpp"

using namespace wpbn;
using Catch::Matchers::WithinRel;

TEST_CASE("backscatter-only baseline picks the best efficiency-rate product",
          "[baselines]") {
    NetworkConfig cfg = default_network(3);
    const Solution even = solve_bm(cfg);
    REQUIRE(even.status == SolveStatus::optimal);
    CHECK_THAT(even.objective, WithinRel(4000.0, 1e-12));
    CHECK(even.allocation.backscatter_times[0] == 1.0);  // tie goes to the lowest index
    CHECK(even.allocation.backscatter_times[1] == 0.0);
    CHECK(even.allocation.transmit_times[0] == 0.0);
    CHECK(even.allocation.shared_harvest_time == 0.0);

    cfg.sensors[0].backscatter_rate = 2000.0;
    cfg.sensors[1].backscatter_rate = 4000.0;
    cfg.sensors[2].backscatter_rate = 9000.0;
    cfg.sensors[2].backscatter_efficiency = 0.4;  // product 3600 loses to 4000
    const Solution skewed = solve_bm(cfg);
    CHECK(skewed.allocation.backscatter_times[1] == 1.0);
    CHECK_THAT(skewed.objective, WithinRel(4000.0, 1e-12));
    CHECK_THAT(skewed.breakdown.backscatter_total(), WithinRel(4000.0, 1e-12));
    CHECK(skewed.breakdown.htt_total() == 0.0);
}

TEST_CASE("backscatter-only baseline rejects energy floors", "[baselines]") {
    NetworkConfig cfg = default_network(2);
    cfg.sensors[1].energy_floor = 1e-9;
    CHECK_THROWS_AS(solve_bm(cfg), unsupported_error);
}

TEST_CASE("policy comparison wires the three solvers together", "[baselines]") {
    NetworkConfig cfg = default_network(2);
    cfg.shared_harvest_slot = true;
    const PolicyComparison cmp = compare_policies(cfg);
    REQUIRE(cmp.proposed.status == SolveStatus::optimal);
    REQUIRE(cmp.hm.status == SolveStatus::optimal);
    REQUIRE(cmp.bm.status == SolveStatus::optimal);
    CHECK(cmp.bm.objective == solve_bm(cfg).objective);
    CHECK(cmp.hm.objective == solve_hm(cfg).objective);
}

TEST_CASE("joint schedule dominates both baselines", "[baselines]") {
    for (std::size_t n : {1u, 2u, 5u}) {
        NetworkConfig cfg = default_network(n);
        cfg.shared_harvest_slot = true;
        const PolicyComparison cmp = compare_policies(cfg);
        REQUIRE(cmp.proposed.status == SolveStatus::optimal);
        const double scale = cfg.objective_scale();
        CHECK(cmp.proposed.objective >= cmp.bm.objective * (1.0 - 1e-9));
        CHECK(cmp.proposed.objective >= cmp.hm.objective - 1e-6 * scale);
    }
}

TEST_CASE("baseline ordering flips with the backscatter rate", "[baselines]") {
    // cheap backscatter: the joint schedule collapses onto harvest-then-transmit
    NetworkConfig slow = default_network(2);
    slow.shared_harvest_slot = true;
    const PolicyComparison a = compare_policies(slow);
    CHECK(std::fabs(a.proposed.objective - a.hm.objective) <=
          1e-6 * slow.objective_scale());
    CHECK(a.hm.objective > a.bm.objective);

    // backscatter rate high enough to swamp the active link; the joint
    // schedule keeps most of that value but pays for the power cap, since
    // involuntarily harvested energy must be sent back out within the frame
    NetworkConfig fast = slow;
    for (auto& s : fast.sensors) s.backscatter_rate = 1e8;
    const PolicyComparison b = compare_policies(fast);
    CHECK(b.proposed.objective > 10.0 * b.hm.objective);
    CHECK(b.proposed.objective < b.bm.objective);
    CHECK(b.proposed.objective > 0.85 * b.bm.objective);
}
