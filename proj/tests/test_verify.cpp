#include <catch2/catch_amalgamated.hpp>

#include "wpbn/verify.hpp"

using namespace wpbn;

TEST_CASE("randomized model checks pass across sensor counts", "[verify]") {
    for (std::size_t sensors : {1u, 3u}) {
        VerifyOptions options;
        options.trials = 60;
        options.seed = 42 + sensors;
        options.sensors = sensors;
        options.shared_slot = true;
        const ModelVerifyOutcome outcome = verify_model(options);
        INFO("sensors=" << sensors << " worst gradient rel " << outcome.worst_gradient_rel
                        << " worst concavity " << outcome.worst_concavity_slack
                        << " max eig " << outcome.max_hessian_eigenvalue);
        CHECK(outcome.trials == 60);
        CHECK(outcome.gradient_failures == 0);
        CHECK(outcome.concavity_failures == 0);
        CHECK(outcome.curvature_failures == 0);
        CHECK(outcome.eigenvalue_failures == 0);
        CHECK(outcome.ok());
    }
}

TEST_CASE("model checks also hold without the shared slot", "[verify]") {
    VerifyOptions options;
    options.trials = 40;
    options.seed = 7;
    options.sensors = 2;
    options.shared_slot = false;
    CHECK(verify_model(options).ok());
}

TEST_CASE("randomized solver checks certify and sandwich the lattice", "[verify]") {
    VerifyOptions options;
    options.trials = 12;
    options.seed = 11;
    options.sensors = 2;
    options.shared_slot = true;
    const SolverVerifyOutcome outcome = verify_solver(options);
    INFO("worst kkt " << outcome.worst_kkt_residual << " worst gap "
                      << outcome.worst_lattice_gap << " worst regression "
                      << outcome.worst_regression);
    CHECK(outcome.trials == 12);
    CHECK(outcome.failures == 0);
    CHECK(outcome.worst_kkt_residual <= 1e-6);
    CHECK(outcome.worst_regression <= 1e-9);
}

TEST_CASE("verification outcome reports the failure it sees", "[verify]") {
    VerifyOptions options;
    options.trials = 0;
    CHECK_FALSE(verify_model(options).ok());
    CHECK_FALSE(verify_solver(options).ok());
}
