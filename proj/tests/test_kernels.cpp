#include <doctest.h>

#include <cmath>
#include <vector>

#include "lrbridge/errors.hpp"
#include "lrbridge/kernels.hpp"
#include "lrbridge/rng.hpp"

using namespace lrbridge;
using kernels::Exec;

TEST_CASE("parallel kernels match the serial reference bit for bit") {
    const std::size_t n = 100'000;
    std::vector<double> s(n), p(n);

    kernels::fill_true_losses(s, 2.0, 99, Exec::Serial);
    kernels::fill_true_losses(p, 2.0, 99, Exec::Parallel);
    CHECK(s == p);

    std::vector<double> es(n), ep(n);
    kernels::fill_predictions_normal(s, es, 0.6, 99, Exec::Serial);
    kernels::fill_predictions_normal(p, ep, 0.6, 99, Exec::Parallel);
    CHECK(es == ep);

    std::vector<double> cs(n), cp(n);
    kernels::fill_conversion_probabilities(es, cs, 1.2, Exec::Serial);
    kernels::fill_conversion_probabilities(ep, cp, 1.2, Exec::Parallel);
    CHECK(cs == cp);

    std::vector<double> xs(n), xp(n);
    const long ns = kernels::fill_conversions(cs, xs, 99, Exec::Serial);
    const long np = kernels::fill_conversions(cp, xp, 99, Exec::Parallel);
    CHECK(ns == np);
    CHECK(xs == xp);

    CHECK(kernels::block_sum(s, Exec::Serial) == kernels::block_sum(p, Exec::Parallel));
    CHECK(kernels::block_min(s, Exec::Serial) == kernels::block_min(p, Exec::Parallel));
    CHECK(kernels::pearson_blocked(s, es, Exec::Serial) ==
          kernels::pearson_blocked(p, ep, Exec::Parallel));
}

TEST_CASE("blocked sum agrees with naive accumulation") {
    const std::size_t n = 123'457;  // not a block multiple
    std::vector<double> xs(n);
    RandomStream rng(5, 1, 0);
    for (auto& x : xs) x = rng.next_unit() - 0.3;
    const double naive = kernels::naive_sum(xs);
    const double blocked = kernels::block_sum(xs, Exec::Parallel);
    CHECK(std::abs(naive - blocked) <= 1e-12 * std::max(1.0, std::abs(naive)));
}

TEST_CASE("conversion probabilities: anchoring and monotonicity") {
    std::vector<double> prices = {1.0, 2.0, 4.0};
    std::vector<double> probs(3);
    kernels::fill_conversion_probabilities(prices, probs, 1.0, Exec::Serial);
    CHECK(probs[0] == 1.0);
    CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(probs[2] == doctest::Approx(0.25).epsilon(1e-15));

    kernels::fill_conversion_probabilities(prices, probs, 2.0, Exec::Serial);
    CHECK(probs[0] == 1.0);
    CHECK(probs[1] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(probs[2] == doctest::Approx(0.0625).epsilon(1e-15));

    // uniform prices convert with probability 1
    std::vector<double> flat = {3.0, 3.0, 3.0};
    kernels::fill_conversion_probabilities(flat, probs, 1.7, Exec::Serial);
    for (double c : probs) CHECK(c == 1.0);

    // the maximum is exactly 1 and higher price never converts more
    const std::size_t n = 50'000;
    std::vector<double> pool(n), cpool(n);
    kernels::fill_true_losses(pool, 2.5, 3, Exec::Parallel);
    kernels::fill_conversion_probabilities(pool, cpool, 1.3, Exec::Parallel);
    double maxc = 0.0;
    for (double c : cpool) maxc = std::max(maxc, c);
    CHECK(maxc == 1.0);
    for (std::size_t i = 1; i < n; ++i) {
        if (pool[i] > pool[i - 1]) {
            CHECK(cpool[i] <= cpool[i - 1]);
        }
    }

    std::vector<double> empty, out;
    CHECK_THROWS_AS(kernels::fill_conversion_probabilities(empty, out, 1.0, Exec::Serial),
                    domain_error);
}

TEST_CASE("per-index streams are independent of everything around them") {
    // The draw for index i depends only on (seed, channel, i): growing the
    // array must not change earlier entries.
    std::vector<double> small(100), big(1000);
    kernels::fill_true_losses(small, 2.0, 42, Exec::Serial);
    kernels::fill_true_losses(big, 2.0, 42, Exec::Parallel);
    for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i] == big[i]);
}

TEST_CASE("sampler moments: normal and uniform basics") {
    const std::size_t n = 400'000;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream rng(2024, 9, i);
        const double z = rng.next_normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.01);
}
