#include <doctest.h>

#include <cmath>
#include <vector>

#include "lrbridge/calibration.hpp"
#include "lrbridge/errors.hpp"
#include "lrbridge/formulas.hpp"
#include "lrbridge/rng.hpp"

using namespace lrbridge;

TEST_CASE("implied elasticity: degenerate and hand-computed cases") {
    // LR * M = 1 leaves eta = 1/2 regardless of model quality
    DeploymentRecord r{"base", 1.0 / 1.4, 1.4, 0.63, 2.2};
    CHECK(implied_elasticity(r) == 0.5);

    // hand-computed: sigma2(0.5, 2.0) = ln(1.0625/0.3125), eta = 1/2 + ln(1.2)/sigma2
    DeploymentRecord h{"hand", 0.75, 1.6, 0.5, 2.0};
    CHECK(implied_elasticity(h) == doctest::Approx(0.648982854274405).epsilon(1e-12));
    // plugging back reproduces the observation
    CHECK(expected_loss_ratio(0.5, 2.0, implied_elasticity(h), 1.6) ==
          doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("implied elasticity round-trips the forward formula") {
    const double lr = expected_loss_ratio(0.7, 2.0, 1.2, 1.5);
    DeploymentRecord r{"rt", lr, 1.5, 0.7, 2.0};
    CHECK(std::abs(implied_elasticity(r) - 1.2) < 1e-9);

    RandomStream rng(0xabcdULL);
    for (int i = 0; i < 1000; ++i) {
        const double rho = 0.05 + 0.90 * rng.next_unit();
        const double cv = 0.5 + 4.5 * rng.next_unit();
        const double eta = 0.1 + 2.9 * rng.next_unit();
        const double margin = 1.0 + rng.next_unit();
        DeploymentRecord rec{"sweep", expected_loss_ratio(rho, cv, eta, margin), margin, rho, cv};
        CHECK(std::abs(implied_elasticity(rec) - eta) < 1e-9);
    }
}

TEST_CASE("bisection fallback agrees with the closed form") {
    RandomStream rng(0x777ULL);
    for (int i = 0; i < 200; ++i) {
        const double rho = 0.05 + 0.90 * rng.next_unit();
        const double cv = 0.5 + 4.5 * rng.next_unit();
        const double eta = 0.1 + 2.9 * rng.next_unit();
        const double margin = 1.0 + rng.next_unit();
        DeploymentRecord rec{"bis", expected_loss_ratio(rho, cv, eta, margin), margin, rho, cv};
        CHECK(std::abs(implied_elasticity_bisect(rec) - implied_elasticity(rec)) < 1e-9);
    }
}

TEST_CASE("degenerate inversion is rejected with the record label") {
    DeploymentRecord r{"gen3-home", 0.8, 1.2, 1.0, 2.0};
    try {
        implied_elasticity(r);
        FAIL("expected domain_error");
    } catch (const domain_error& e) {
        CHECK(std::string(e.what()).find("gen3-home") != std::string::npos);
    }
    DeploymentRecord bad{"neg", -0.5, 1.2, 0.7, 2.0};
    CHECK_THROWS_AS(implied_elasticity(bad), domain_error);
}

TEST_CASE("aggregate elasticity over consistent records") {
    std::vector<DeploymentRecord> records;
    for (double rho : {0.45, 0.6, 0.72}) {
        records.push_back(
            {"gen", expected_loss_ratio(rho, 2.0, 1.4, 1.5), 1.5, rho, 2.0});
    }
    const auto est = aggregate_elasticity(records);
    CHECK(est.eta_hat == doctest::Approx(1.4).epsilon(1e-9));
    CHECK(est.ci_high - est.ci_low < 1e-8);
    CHECK(est.n_deployments == 3);
    CHECK_FALSE(est.degenerate_ci);
    CHECK(est.per_deployment_etas.size() == 3);

    // single record: point estimate with flagged degenerate CI
    const auto single = aggregate_elasticity({records[0]});
    CHECK(single.degenerate_ci);
    CHECK(single.ci_low == single.eta_hat);
    CHECK(single.ci_high == single.eta_hat);

    CHECK_THROWS_AS(aggregate_elasticity({}), domain_error);
    CHECK_THROWS_AS(aggregate_elasticity(records, 1.5), domain_error);
}

TEST_CASE("forecast improvement: identities and ordering") {
    std::vector<DeploymentRecord> records;
    for (double rho : {0.5, 0.65}) {
        records.push_back({"g", expected_loss_ratio(rho, 2.0, 1.2, 1.5), 1.5, rho, 2.0});
    }
    const auto est = aggregate_elasticity(records);
    const PopulationMoments pop(1.0, 2.0);

    // no change in rho: ratio 1, degenerate interval
    const auto same = forecast_improvement(est, pop, 1.5, 0.6, 0.6);
    CHECK(same.ratio == 1.0);
    CHECK(same.ratio_ci_low == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(same.ratio_ci_high == doctest::Approx(1.0).epsilon(1e-12));

    // forecast ratio equals the improvement_ratio closed form
    const auto fc = forecast_improvement(est, pop, 1.5, 0.2, 0.3);
    CHECK(std::abs(fc.ratio - improvement_ratio(0.2, 0.3, 2.0, est.eta_hat)) <= 1e-12 * fc.ratio);

    // diminishing returns: low-correlation improvement buys more
    const auto fc_hi = forecast_improvement(est, pop, 1.5, 0.7, 0.8);
    CHECK(fc.ratio < fc_hi.ratio);

    // endpoint evaluation brackets the point forecast
    CHECK(fc.ratio_ci_low <= fc.ratio);
    CHECK(fc.ratio >= fc.ratio_ci_low);
    CHECK(fc.ratio <= fc.ratio_ci_high);
}
