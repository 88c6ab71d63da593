#pragma once

#include <Eigen/Core>

#include <cmath>

#include "amerop/tridiagonal.hpp"

namespace amerop {

/// Risk-neutral GBM coefficients (no dividends).
struct MarketParams {
    double rate = 0.1;
    double volatility = 0.2;

    /// Log-price drift r - sigma^2/2.
    [[nodiscard]] double drift_mu() const { return rate - 0.5 * volatility * volatility; }

    void validate() const;
};

/// Space-time lattice, uniform in log price.
struct GridSpec {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_space = 0;
    double maturity = 0.0;
    int n_time = 0;
    Eigen::VectorXd y_nodes;
    double dt = 0.0;
    double dy = 0.0;

    [[nodiscard]] double time(int n) const { return n * dt; }
    /// Node prices; the end nodes return x_min and x_max exactly.
    [[nodiscard]] double price(int j) const {
        if (j == 0) return x_min;
        if (j == n_space - 1) return x_max;
        return std::exp(y_nodes[j]);
    }
    [[nodiscard]] Eigen::VectorXd prices() const {
        Eigen::VectorXd p = y_nodes.array().exp();
        p[0] = x_min;
        p[n_space - 1] = x_max;
        return p;
    }

    /// Same construction parameters (the derived nodes then agree bitwise).
    [[nodiscard]] bool same_lattice(const GridSpec& other) const {
        return x_min == other.x_min && x_max == other.x_max && n_space == other.n_space &&
               maturity == other.maturity && n_time == other.n_time;
    }
};

GridSpec build_grid(double x_min, double x_max, int n_space, double maturity, int n_time);

struct PutPayoff {
    double strike;

    explicit PutPayoff(double k);

    [[nodiscard]] double operator()(double x) const { return std::max(strike - x, 0.0); }
    [[nodiscard]] Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
        return (strike - x.array()).max(0.0).matrix();
    }
};

enum class ExerciseStyle { European, American };

/// values(n, j) = u(t_n, x_j); row 0 is the valuation date, row n_time is maturity.
struct PriceSurface {
    GridSpec grid;
    Eigen::MatrixXd values;
    ExerciseStyle style = ExerciseStyle::European;
};

struct ObstacleMethod {
    enum class Variant { ProjectedDirect, Psor };

    Variant variant = Variant::Psor;
    double omega = 1.2;
    double tol = 1e-8;
    int max_iter = 10000;

    void validate() const;

    static ObstacleMethod psor(double omega = 1.2, double tol = 1e-8, int max_iter = 10000) {
        return {Variant::Psor, omega, tol, max_iter};
    }
    static ObstacleMethod projected_direct() { return {Variant::ProjectedDirect, 1.2, 1e-8, 1}; }
};

/// Backward-Euler operator on the interior nodes j = 1..n_space-2:
///   lower = -dt (sigma^2/(2 dy^2) - mu/(2 dy))
///   diag  =  1 + dt (sigma^2/dy^2 + r)
///   upper = -dt (sigma^2/(2 dy^2) + mu/(2 dy))
TridiagonalSystem<double> assemble_implicit_system(const MarketParams& market, const GridSpec& grid);

PriceSurface price_european(const MarketParams& market, const GridSpec& grid, const PutPayoff& payoff);

PriceSurface price_american(const MarketParams& market, const GridSpec& grid, const PutPayoff& payoff,
                            const ObstacleMethod& method = ObstacleMethod{});

/// Bilinear interpolation of a surface (linear in t between rows, linear in
/// price between nodes). Arguments are clamped to the lattice.
double surface_at(const PriceSurface& surface, double t, double x);

}  // namespace amerop
