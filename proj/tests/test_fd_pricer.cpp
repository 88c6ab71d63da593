#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>

#include "amerop/errors.hpp"
#include "amerop/fd_pricer.hpp"
#include "amerop/oracles.hpp"
#include "amerop/tridiagonal.hpp"
#include "lcp_oracle.hpp"

using namespace amerop;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing::brute_force_lcp;
using testing::dense;
using testing::random_m_matrix;

namespace {

const MarketParams kMarket{0.1, 0.2};

GridSpec paper_grid(int n_time = 50) { return build_grid(45.0, 180.0, 300, 1.0, n_time); }

}  // namespace

TEST_CASE("build_grid on the standard lattice") {
    const GridSpec g = paper_grid();
    CHECK(g.y_nodes[0] == doctest::Approx(std::log(45.0)).epsilon(1e-15));
    CHECK(g.y_nodes[299] == doctest::Approx(std::log(180.0)).epsilon(1e-15));
    CHECK(g.dt == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(g.dy == doctest::Approx((std::log(180.0) - std::log(45.0)) / 299).epsilon(1e-15));
}

TEST_CASE("build_grid two-node log grid") {
    const GridSpec g = build_grid(1.0, std::exp(1.0), 2, 1.0, 1);
    CHECK(g.y_nodes[0] == 0.0);
    CHECK(g.y_nodes[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.dy == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("build_grid rejects bad input") {
    CHECK_THROWS_AS(build_grid(0.0, 10, 10, 1, 1), DomainError);
    CHECK_THROWS_AS(build_grid(10, 5, 10, 1, 1), DomainError);
    CHECK_THROWS_AS(build_grid(1, 5, 1, 1, 1), DomainError);
    CHECK_THROWS_AS(build_grid(1, 5, 10, 0, 1), DomainError);
    CHECK_THROWS_AS(build_grid(1, 5, 10, 1, 0), DomainError);
}

TEST_CASE("implicit system coefficients") {
    const GridSpec g = paper_grid();
    CHECK(kMarket.drift_mu() == doctest::Approx(0.08).epsilon(1e-14));
    const auto s = assemble_implicit_system(kMarket, g);
    REQUIRE(s.size() == 298);
    const double dy2 = g.dy * g.dy;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        CHECK(s.diag[i] == doctest::Approx(1.0 + g.dt * (0.04 / dy2 + 0.1)).epsilon(1e-14));
        CHECK(s.lower[i] == doctest::Approx(-g.dt * (0.02 / dy2 - 0.08 / (2 * g.dy))).epsilon(1e-14));
        CHECK(s.upper[i] == doctest::Approx(-g.dt * (0.02 / dy2 + 0.08 / (2 * g.dy))).epsilon(1e-14));
    }
}

TEST_CASE("implicit system in the vanishing-diffusion limit is pure discounting") {
    const double sigma = 1e-7;
    const MarketParams m{0.5 * sigma * sigma, sigma};
    const GridSpec g = paper_grid();
    const auto s = assemble_implicit_system(m, g);
    CHECK(s.lower.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(s.upper.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(s.diag[10] == doctest::Approx(1.0 + m.rate * g.dt + g.dt * sigma * sigma / (g.dy * g.dy)).epsilon(1e-15));
}

TEST_CASE("thomas_solve") {
    SUBCASE("identity") {
        TridiagonalSystem<double> s{VectorXd::Zero(3), VectorXd::Ones(3), VectorXd::Zero(3)};
        VectorXd rhs(3);
        rhs << 1, 2, 3;
        CHECK((thomas_solve(s, rhs) - rhs).norm() == 0.0);
    }
    SUBCASE("3x3 against dense elimination") {
        TridiagonalSystem<double> s{VectorXd(3), VectorXd(3), VectorXd(3)};
        s.lower << 0, -1, -1;
        s.diag << 2, 2, 2;
        s.upper << -1, -1, 0;
        const VectorXd rhs = VectorXd::Ones(3);
        const VectorXd expect = dense(s).fullPivLu().solve(rhs);
        CHECK((thomas_solve(s, rhs) - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("random diagonally dominant 50x50") {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> nd;
        TridiagonalSystem<double> s{VectorXd(50), VectorXd(50), VectorXd(50)};
        VectorXd rhs(50);
        for (int i = 0; i < 50; ++i) {
            s.lower[i] = nd(rng);
            s.upper[i] = nd(rng);
            s.diag[i] = std::abs(s.lower[i]) + std::abs(s.upper[i]) + 1.0;
            rhs[i] = nd(rng);
        }
        const VectorXd x = thomas_solve(s, rhs);
        CHECK((s.apply(x) - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("singular pivot") {
        TridiagonalSystem<double> s{VectorXd::Zero(2), VectorXd::Zero(2), VectorXd::Zero(2)};
        CHECK_THROWS_AS(thomas_solve(s, VectorXd(VectorXd::Ones(2))), SingularSystem);
    }
    SUBCASE("shape mismatch") {
        TridiagonalSystem<double> s{VectorXd::Zero(2), VectorXd::Ones(3), VectorXd::Zero(3)};
        CHECK_THROWS_AS(thomas_solve(s, VectorXd(VectorXd::Ones(3))), ShapeError);
    }
}

TEST_CASE("thomas_solve is generic in the scalar type") {
    TridiagonalSystem<float> s{Vec<float>::Zero(3), Vec<float>::Constant(3, 2.0f), Vec<float>::Zero(3)};
    const Vec<float> x = thomas_solve(s, Vec<float>(Vec<float>::Ones(3)));
    CHECK(x[1] == doctest::Approx(0.5f));
}

TEST_CASE("psor unconstrained limit agrees with thomas") {
    std::mt19937_64 rng(3);
    const auto s = random_m_matrix(rng, 20);
    VectorXd rhs = VectorXd::LinSpaced(20, -1.0, 2.0);
    const VectorXd obstacle = VectorXd::Constant(20, -1e18);
    const VectorXd x = psor_solve(s, rhs, obstacle, 1.2, 1e-12, 100000);
    CHECK((x - thomas_solve(s, rhs)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("psor fully binding obstacle returns the obstacle") {
    std::mt19937_64 rng(4);
    const auto s = random_m_matrix(rng, 10);
    const VectorXd rhs = VectorXd::Ones(10);
    const VectorXd free_solution = thomas_solve(s, rhs);
    const VectorXd obstacle = free_solution.array() + 1.0;
    const VectorXd x = psor_solve(s, rhs, obstacle, 1.2, 1e-12, 10000);
    CHECK((x - obstacle).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("psor matches brute-force active-set enumeration for n <= 8") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n) {
        for (int trial = 0; trial < 40; ++trial) {
            const auto s = random_m_matrix(rng, n);
            VectorXd rhs(n);
            VectorXd obstacle(n);
            for (int i = 0; i < n; ++i) {
                rhs[i] = nd(rng);
                obstacle[i] = 0.5 * nd(rng);
            }
            const VectorXd expect = brute_force_lcp(s, rhs, obstacle);
            const VectorXd got = psor_solve(s, rhs, obstacle, 1.2, 1e-12, 100000);
            worst = std::max(worst, (got - expect).cwiseAbs().maxCoeff());
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("psor argument checks and convergence failure") {
    std::mt19937_64 rng(6);
    const auto s = random_m_matrix(rng, 5);
    const VectorXd v = VectorXd::Ones(5);
    CHECK_THROWS_AS(psor_solve(s, v, v, 2.0, 1e-8, 10), DomainError);
    CHECK_THROWS_AS(psor_solve(s, v, v, 1.0, 0.0, 10), DomainError);
    CHECK_THROWS_AS(psor_solve(s, v, v, 1.0, 1e-8, 0), DomainError);
    CHECK_THROWS_AS(psor_solve(s, VectorXd(VectorXd::LinSpaced(5, 0, 100)), VectorXd(VectorXd::Constant(5, -1e18)), 1.0, 1e-300, 2),
                    ConvergenceFailure);
}

TEST_CASE("european surface against the closed form") {
    const GridSpec g = paper_grid();
    const auto s = price_european(kMarket, g, PutPayoff(100));
    CHECK(s.style == ExerciseStyle::European);
    double worst = 0.0;
    for (int j = 0; j < g.n_space; ++j) {
        const double x = g.price(j);
        if (x < 70 || x > 160) continue;
        worst = std::max(worst, std::abs(s.values(0, j) - bs_put({x, 100, 0.1, 0.2, 1.0})));
    }
    CHECK(worst < 0.15);
    CHECK(std::abs(surface_at(s, 0.0, 100.0) - bs_put({100, 100, 0.1, 0.2, 1.0})) < 0.15);
}

TEST_CASE("european time refinement is first order") {
    std::vector<double> errors;
    for (int nt : {50, 100, 200}) {
        const GridSpec g = paper_grid(nt);
        const auto s = price_european(kMarket, g, PutPayoff(100));
        int j = 0;
        for (int k = 1; k < g.n_space; ++k) {
            if (std::abs(g.price(k) - 100) < std::abs(g.price(j) - 100)) j = k;
        }
        errors.push_back(std::abs(s.values(0, j) - bs_put({g.price(j), 100, 0.1, 0.2, 1.0})));
    }
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double ratio = errors[i - 1] / errors[i];
        CHECK(ratio >= 1.6);
        CHECK(ratio <= 2.4);
    }
}

TEST_CASE("worthless put prices to zero") {
    const auto s = price_european(kMarket, paper_grid(), PutPayoff(45.0));
    CHECK(s.values.cwiseAbs().maxCoeff() == 0.0);
    const auto a = price_american(kMarket, paper_grid(), PutPayoff(40.0));
    CHECK(a.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("american surface properties") {
    const GridSpec g = paper_grid();
    const PutPayoff put(100);
    const auto am = price_american(kMarket, g, put);
    const auto eu = price_european(kMarket, g, put);
    CHECK(am.style == ExerciseStyle::American);
    const VectorXd payoff = put(g.prices());

    CHECK(std::abs(surface_at(am, 0.0, 100) - crr_american_put(100, 100, kMarket, 1.0, 5000)) < 0.10);
    for (int n = 0; n <= g.n_time; ++n) {
        CHECK(am.values(n, 0) == doctest::Approx(55.0).epsilon(1e-15));
        for (int j = 0; j < g.n_space; ++j) {
            REQUIRE(am.values(n, j) >= payoff[j] - 1e-12);
            REQUIRE(am.values(n, j) >= eu.values(n, j) - 1e-8);
            REQUIRE(am.values(n, j) <= 100.0);
            REQUIRE(eu.values(n, j) <= 100.0);
        }
    }
    for (int j = 0; j < g.n_space; ++j) {
        CHECK(am.values(g.n_time, j) == payoff[j]);
        CHECK(eu.values(g.n_time, j) == payoff[j]);
    }
}

TEST_CASE("american surfaces are monotone in strike") {
    const GridSpec g = paper_grid();
    PriceSurface prev = price_american(kMarket, g, PutPayoff(90));
    for (double k : {95.0, 100.0, 110.0, 120.0}) {
        const auto next = price_american(kMarket, g, PutPayoff(k));
        CHECK((prev.values.array() <= next.values.array() + 1e-10).all());
        prev = next;
    }
}

TEST_CASE("projected direct variant stays close to psor") {
    const GridSpec g = paper_grid();
    const auto psor = price_american(kMarket, g, PutPayoff(100), ObstacleMethod::psor());
    const auto proj = price_american(kMarket, g, PutPayoff(100), ObstacleMethod::projected_direct());
    CHECK((psor.values - proj.values).cwiseAbs().maxCoeff() < 0.2);
    CHECK((proj.values.array() >= PutPayoff(100)(g.prices()).transpose().replicate(g.n_time + 1, 1).array() - 1e-12)
              .all());
}

TEST_CASE("obstacle method validation") {
    CHECK_THROWS_AS(ObstacleMethod::psor(0.0).validate(), DomainError);
    CHECK_THROWS_AS(ObstacleMethod::psor(1.2, -1).validate(), DomainError);
    CHECK_NOTHROW(ObstacleMethod::projected_direct().validate());
    CHECK_THROWS_AS(price_american(kMarket, paper_grid(), PutPayoff(100), ObstacleMethod::psor(1.2, 1e-14, 1)),
                    ConvergenceFailure);
}

TEST_CASE("market and payoff validation") {
    CHECK_THROWS_AS(PutPayoff(0.0), DomainError);
    CHECK_THROWS_AS((MarketParams{0.1, 0.0}.validate()), DomainError);
    CHECK_THROWS_AS((MarketParams{-0.1, 0.2}.validate()), DomainError);
}
