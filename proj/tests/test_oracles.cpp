#include <doctest.h>

#include <cmath>

#include "amerop/errors.hpp"
#include "amerop/oracles.hpp"
#include "amerop/sde_sim.hpp"

using namespace amerop;

namespace {
const MarketParams kMarket{0.1, 0.2};
}

TEST_CASE("normal_cdf") {
    CHECK(normal_cdf(0.0) == 0.5);
    for (double z : {0.1, 0.7, 1.3, 2.9, 5.0}) CHECK(std::abs(normal_cdf(z) + normal_cdf(-z) - 1.0) < 1e-14);
    CHECK(std::abs(normal_cdf(1.959963985) - 0.975) < 1e-9);
}

TEST_CASE("bs_put at expiry is the payoff") {
    CHECK(bs_put({100, 100, 0.1, 0.2, 0.0}) == 0.0);
    CHECK(bs_put({90, 100, 0.1, 0.2, 0.0}) == 10.0);
    CHECK(bs_call({110, 100, 0.1, 0.2, 0.0}) == 10.0);
}

TEST_CASE("put-call parity over a 10x10 quote grid") {
    for (int a = 0; a < 10; ++a) {
        for (int b = 0; b < 10; ++b) {
            const BsQuote q{60.0 + 10 * a, 80.0 + 5 * b, 0.1, 0.2, 1.0};
            CHECK(std::abs(bs_call(q) - bs_put(q) - (q.spot - q.strike * std::exp(-q.rate * q.tau))) < 1e-12);
        }
    }
}

TEST_CASE("bs_put monotonicity") {
    for (int a = 0; a < 10; ++a) {
        for (int b = 0; b < 10; ++b) {
            const BsQuote q{60.0 + 10 * a, 80.0 + 5 * b, 0.1, 0.2, 1.0};
            CHECK(bs_put({q.spot + 0.5, q.strike, q.rate, q.volatility, q.tau}) < bs_put(q));
            CHECK(bs_put({q.spot, q.strike + 0.5, q.rate, q.volatility, q.tau}) > bs_put(q));
            CHECK(bs_put({q.spot, q.strike, q.rate, q.volatility + 0.01, q.tau}) > bs_put(q));
        }
    }
}

TEST_CASE("bs_put against an antithetic Monte Carlo estimate") {
    const PathBatch batch = simulate_gbm(100, kMarket, 1.0, 1, 1000000, 20240611, true);
    const McEstimate mc = mc_european_put(batch, PutPayoff(100), 0.1);
    CHECK(std::abs(mc.price - bs_put({100, 100, 0.1, 0.2, 1.0})) < 3.0 * mc.std_error);
}

TEST_CASE("crr single step by hand") {
    const double u = std::exp(0.2);
    const double d = 1.0 / u;
    const double p = (std::exp(0.1) - d) / (u - d);
    const double cont = std::exp(-0.1) * (p * std::max(100 - 100 * u, 0.0) + (1 - p) * std::max(100 - 100 * d, 0.0));
    CHECK(crr_american_put(100, 100, kMarket, 1.0, 1) == doctest::Approx(std::max(0.0, cont)).epsilon(1e-14));
}

TEST_CASE("crr american put dominates the european put") {
    for (double s : {70.0, 85.0, 100.0, 115.0, 140.0}) {
        for (double k : {90.0, 100.0, 120.0}) {
            CHECK(crr_american_put(s, k, kMarket, 1.0, 500) >= bs_put({s, k, 0.1, 0.2, 1.0}));
        }
    }
}

TEST_CASE("crr self-convergence") {
    CHECK(std::abs(crr_american_put(100, 100, kMarket, 1.0, 5000) - crr_american_put(100, 100, kMarket, 1.0, 2500)) <
          0.01);
    double prev = 1e300;
    for (int n : {250, 500, 1000, 2500}) {
        const double gap =
            std::abs(crr_american_put(100, 100, kMarket, 1.0, 2 * n) - crr_american_put(100, 100, kMarket, 1.0, n));
        CHECK(gap < prev);
        prev = gap;
    }
}

TEST_CASE("crr rejects arbitrage parameters") {
    CHECK_THROWS_AS(crr_american_put(100, 100, MarketParams{5.0, 0.01}, 1.0, 2), DomainError);
    CHECK_THROWS_AS(crr_american_put(100, 100, kMarket, 1.0, 0), DomainError);
}
