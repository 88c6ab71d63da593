#include <doctest.h>

#include <cmath>

#include "amerop/errors.hpp"
#include "amerop/sde_sim.hpp"

using namespace amerop;

namespace {

const MarketParams kMarket{0.1, 0.2};

double terminal_std_error(const PathBatch& b) {
    const Eigen::VectorXd xt = b.values.col(b.n_steps);
    const double mean = xt.mean();
    const double var = (xt.array() - mean).square().sum() / (b.n_paths - 1);
    return std::sqrt(var / b.n_paths);
}

}  // namespace

TEST_CASE("zero volatility paths are deterministic growth") {
    const PathBatch b = simulate_gbm(100, MarketParams{0.1, 0.0}, 1.0, 10, 5, 1);
    for (int i = 0; i < 5; ++i) {
        for (int n = 0; n <= 10; ++n) {
            CHECK(b.values(i, n) == 100 * std::exp(0.1 * (n * b.dt)));
        }
    }
}

TEST_CASE("terminal mean matches forward price") {
    const PathBatch b = simulate_gbm(100, kMarket, 1.0, 50, 100000, 99);
    const double mean = b.values.col(50).mean();
    CHECK(std::abs(mean - 100 * std::exp(0.1)) < 3.0 * terminal_std_error(b));
}

TEST_CASE("same seed gives identical batches") {
    const PathBatch a = simulate_gbm(100, kMarket, 1.0, 20, 3000, 5);
    const PathBatch b = simulate_gbm(100, kMarket, 1.0, 20, 3000, 5);
    const PathBatch c = simulate_gbm(100, kMarket, 1.0, 20, 3000, 6);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("block seeding makes prefixes stable") {
    const PathBatch small = simulate_gbm(100, kMarket, 1.0, 5, kPathBlock, 8);
    const PathBatch large = simulate_gbm(100, kMarket, 1.0, 5, 3 * kPathBlock + 17, 8);
    CHECK(small.values == large.values.topRows(kPathBlock));
}

TEST_CASE("antithetic pairs mirror the driving noise") {
    const PathBatch b = simulate_gbm(100, kMarket, 1.0, 4, 8, 3, true);
    const double mu = 0.1 - 0.02;
    for (int i = 0; i < 8; i += 2) {
        const double sum = std::log(b.values(i, 4) / 100) + std::log(b.values(i + 1, 4) / 100);
        CHECK(sum == doctest::Approx(2 * mu).epsilon(1e-12));
    }
    CHECK_THROWS_AS(simulate_gbm(100, kMarket, 1.0, 4, 7, 3, true), DomainError);
}

TEST_CASE("euler-maruyama") {
    const auto drift = [](double, double x) { return 0.1 * x; };
    SUBCASE("deterministic limit") {
        const PathBatch b = simulate_euler_maruyama(100, drift, [](double, double) { return 0.0; }, 1.0, 10, 3, 1);
        CHECK(b.values(2, 10) == doctest::Approx(100 * std::pow(1.01, 10)).epsilon(1e-13));
    }
    SUBCASE("gbm coefficients reproduce the forward") {
        const PathBatch b =
            simulate_euler_maruyama(100, drift, [](double, double x) { return 0.2 * x; }, 1.0, 200, 50000, 2);
        CHECK(std::abs(b.values.col(200).mean() - 100 * std::pow(1.0 + 0.1 / 200, 200)) < 3.0 * terminal_std_error(b));
    }
}

TEST_CASE("mc european put") {
    SUBCASE("all paths out of the money") {
        const PathBatch b = simulate_gbm(100, kMarket, 1.0, 1, 1000, 4);
        const double k = b.values.col(1).minCoeff();
        const McEstimate mc = mc_european_put(b, PutPayoff(k), 0.1);
        CHECK(mc.price == 0.0);
        CHECK(mc.std_error == 0.0);
    }
    SUBCASE("standard error follows the square-root law") {
        const McEstimate a = mc_european_put(simulate_gbm(100, kMarket, 1.0, 1, 100000, 10), PutPayoff(100), 0.1);
        const McEstimate b = mc_european_put(simulate_gbm(100, kMarket, 1.0, 1, 200000, 11), PutPayoff(100), 0.1);
        const double ratio = b.std_error / a.std_error;
        CHECK(ratio >= 0.65);
        CHECK(ratio <= 0.75);
    }
}

TEST_CASE("sup moments") {
    const PathBatch flat = simulate_gbm(3.0, MarketParams{0.0, 0.0}, 1.0, 10, 10, 1);
    CHECK(empirical_sup_moment(flat, 2.0) == 9.0);

    const PathBatch b = simulate_gbm(100, kMarket, 1.0, 50, 100000, 12);
    const double m1 = empirical_sup_moment(b, 1.0);
    CHECK(std::isfinite(m1));
    CHECK(m1 < 100 * std::exp(0.1) * std::exp(0.04) * 3);

    const PathBatch unit = simulate_gbm(1.0, kMarket, 1.0, 50, 100000, 13);
    const double m2 = empirical_sup_moment(unit, 2.0);
    CHECK(empirical_sup_moment(unit, 4.0) >= m2 * m2 * (1 - 1e-12));
    CHECK_THROWS_AS(empirical_sup_moment(b, 0.0), DomainError);
}

TEST_CASE("tail probabilities") {
    const PathBatch b = simulate_gbm(100, kMarket, 1.0, 50, 100000, 14);
    CHECK(empirical_tail_prob(b, 1e-12) == 1.0);
    CHECK(empirical_tail_prob(b, 1000.0) == 0.0);
    double prev = 1.0;
    for (double r = 5; r <= 150; r += 5) {
        const double p = empirical_tail_prob(b, r);
        CHECK(p <= prev);
        prev = p;
    }
    const std::vector<double> radii{20, 40, 60};
    std::vector<double> probs;
    for (double r : radii) probs.push_back(empirical_tail_prob(b, r));
    CHECK(std::log(probs[1]) < std::log(probs[0]));
    CHECK(std::log(probs[2]) < std::log(probs[1]));
    const TailFit fit = fit_tail_exponent(radii, probs);
    CHECK(fit.points_used == 3);
    CHECK(fit.slope < 0.0);
}

TEST_CASE("tail fit on exact gaussian tails recovers the slope") {
    const std::vector<double> radii{1, 2, 3, 4};
    std::vector<double> probs;
    for (double r : radii) probs.push_back(0.5 * std::exp(-0.3 * r * r));
    const TailFit fit = fit_tail_exponent(radii, probs);
    CHECK(fit.slope == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("lipschitz gap check") {
    const GridSpec grid = build_grid(45, 180, 300, 1.0, 50);
    const PathBatch b = simulate_gbm(100, kMarket, 1.0, 50, 10000, 15);
    SUBCASE("identical payoffs") {
        const LipschitzPair p = lipschitz_gap_check(kMarket, grid, PutPayoff(100), PutPayoff(100), b);
        CHECK(p.lhs == 0.0);
        CHECK(p.rhs == 0.0);
    }
    SUBCASE("neighbouring strikes") {
        const LipschitzPair p = lipschitz_gap_check(kMarket, grid, PutPayoff(100), PutPayoff(101), b);
        CHECK(p.lhs > 0.0);
        CHECK(p.lhs <= p.rhs * 1.05);
        CHECK(p.rhs <= 4 * std::exp(0.2) * 1.0 * (1 + 1e-12));
        CHECK(p.exit_fraction < 0.01);
    }
    SUBCASE("batch horizon must match the surface maturity") {
        const PathBatch longer = simulate_gbm(100, kMarket, 2.0, 7, 100, 15);
        CHECK_THROWS_AS(lipschitz_gap_check(kMarket, grid, PutPayoff(100), PutPayoff(101), longer), ShapeError);
    }
}
