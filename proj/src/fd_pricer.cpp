#include "amerop/fd_pricer.hpp"

#include <algorithm>
#include <cmath>

#include "amerop/errors.hpp"

namespace amerop {

void MarketParams::validate() const {
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw DomainError("market: rate must be >= 0");
    if (!(volatility > 0.0) || !std::isfinite(volatility)) throw DomainError("market: volatility must be > 0");
}

GridSpec build_grid(double x_min, double x_max, int n_space, double maturity, int n_time) {
    if (!(x_min > 0.0)) throw DomainError("grid: x_min must be positive");
    if (!(x_max > x_min)) throw DomainError("grid: x_max must exceed x_min");
    if (n_space < 2) throw DomainError("grid: n_space must be at least 2");
    if (!(maturity > 0.0)) throw DomainError("grid: maturity must be positive");
    if (n_time < 1) throw DomainError("grid: n_time must be at least 1");

    GridSpec g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.n_space = n_space;
    g.maturity = maturity;
    g.n_time = n_time;
    const double y_lo = std::log(x_min);
    const double y_hi = std::log(x_max);
    g.dy = (y_hi - y_lo) / (n_space - 1);
    g.dt = maturity / n_time;
    g.y_nodes.resize(n_space);
    for (int j = 0; j < n_space; ++j) g.y_nodes[j] = y_lo + j * g.dy;
    return g;
}

PutPayoff::PutPayoff(double k) : strike(k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("payoff: strike must be positive");
}

void ObstacleMethod::validate() const {
    if (variant != Variant::Psor) return;
    if (!(omega > 0.0 && omega < 2.0)) throw DomainError("psor: omega must lie in (0,2)");
    if (!(tol > 0.0)) throw DomainError("psor: tol must be positive");
    if (max_iter < 1) throw DomainError("psor: max_iter must be >= 1");
}

TridiagonalSystem<double> assemble_implicit_system(const MarketParams& market, const GridSpec& grid) {
    market.validate();
    if (grid.n_space < 3) throw DomainError("implicit system: need at least one interior node");
    const Eigen::Index n = grid.n_space - 2;
    const double s2 = market.volatility * market.volatility;
    const double mu = market.drift_mu();
    const double diffusion = s2 / (2.0 * grid.dy * grid.dy);
    const double convection = mu / (2.0 * grid.dy);

    TridiagonalSystem<double> sys;
    sys.lower = Eigen::VectorXd::Constant(n, -grid.dt * (diffusion - convection));
    sys.diag = Eigen::VectorXd::Constant(n, 1.0 + grid.dt * (s2 / (grid.dy * grid.dy) + market.rate));
    sys.upper = Eigen::VectorXd::Constant(n, -grid.dt * (diffusion + convection));
    return sys;
}

namespace {

void check_inputs(const MarketParams& market, const GridSpec& grid) {
    market.validate();
    if (grid.n_space < 3 || grid.n_time < 1 || grid.y_nodes.size() != grid.n_space) {
        throw DomainError("pricer: grid is not valid (use build_grid)");
    }
}

Eigen::MatrixXd terminal_rows(const GridSpec& grid, const PutPayoff& payoff) {
    Eigen::MatrixXd values(grid.n_time + 1, grid.n_space);
    values.row(grid.n_time) = payoff(grid.prices()).transpose();
    return values;
}

}  // namespace

PriceSurface price_european(const MarketParams& market, const GridSpec& grid, const PutPayoff& payoff) {
    check_inputs(market, grid);
    const auto sys = assemble_implicit_system(market, grid);
    const Eigen::Index interior = grid.n_space - 2;
    const double x_lo = grid.price(0);

    PriceSurface surface{grid, terminal_rows(grid, payoff), ExerciseStyle::European};
    Eigen::VectorXd rhs(interior);
    for (int n = grid.n_time - 1; n >= 0; --n) {
        const double tau = grid.maturity - grid.time(n);
        const double v_lo = std::max(payoff.strike * std::exp(-market.rate * tau) - x_lo, 0.0);
        const double v_hi = 0.0;
        rhs = surface.values.row(n + 1).segment(1, interior).transpose();
        rhs[0] -= sys.lower[0] * v_lo;
        rhs[interior - 1] -= sys.upper[interior - 1] * v_hi;
        const Eigen::VectorXd v = thomas_solve(sys, rhs);
        surface.values(n, 0) = v_lo;
        surface.values.row(n).segment(1, interior) = v.transpose();
        surface.values(n, grid.n_space - 1) = v_hi;
    }
    return surface;
}

PriceSurface price_american(const MarketParams& market, const GridSpec& grid, const PutPayoff& payoff,
                            const ObstacleMethod& method) {
    check_inputs(market, grid);
    method.validate();
    const auto sys = assemble_implicit_system(market, grid);
    const Eigen::Index interior = grid.n_space - 2;
    const Eigen::VectorXd obstacle_full = payoff(grid.prices());
    const Eigen::VectorXd obstacle = obstacle_full.segment(1, interior);
    const double v_lo = obstacle_full[0];
    const double v_hi = 0.0;

    PriceSurface surface{grid, terminal_rows(grid, payoff), ExerciseStyle::American};
    Eigen::VectorXd rhs(interior);
    Eigen::VectorXd v(interior);
    for (int n = grid.n_time - 1; n >= 0; --n) {
        const Eigen::VectorXd previous = surface.values.row(n + 1).segment(1, interior).transpose();
        rhs = previous;
        rhs[0] -= sys.lower[0] * v_lo;
        rhs[interior - 1] -= sys.upper[interior - 1] * v_hi;
        if (method.variant == ObstacleMethod::Variant::Psor) {
            v = psor_solve(sys, rhs, obstacle, method.omega, method.tol, method.max_iter, &previous);
        } else {
            v = thomas_solve(sys, rhs).cwiseMax(obstacle);
        }
        surface.values(n, 0) = v_lo;
        surface.values.row(n).segment(1, interior) = v.transpose();
        surface.values(n, grid.n_space - 1) = v_hi;
    }
    return surface;
}

double surface_at(const PriceSurface& surface, double t, double x) {
    const GridSpec& g = surface.grid;
    const double t_pos = std::clamp(t / g.dt, 0.0, static_cast<double>(g.n_time));
    const int n0 = std::min(static_cast<int>(t_pos), g.n_time - 1);
    const double wt = t_pos - n0;

    const double y = std::log(std::clamp(x, g.price(0), g.price(g.n_space - 1)));
    const double y_pos = std::clamp((y - g.y_nodes[0]) / g.dy, 0.0, static_cast<double>(g.n_space - 1));
    const int j0 = std::min(static_cast<int>(y_pos), g.n_space - 2);
    const double x0 = g.price(j0);
    const double x1 = g.price(j0 + 1);
    const double wx = std::clamp((std::exp(y) - x0) / (x1 - x0), 0.0, 1.0);

    const auto& v = surface.values;
    const double lo = (1.0 - wx) * v(n0, j0) + wx * v(n0, j0 + 1);
    const double hi = (1.0 - wx) * v(n0 + 1, j0) + wx * v(n0 + 1, j0 + 1);
    return (1.0 - wt) * lo + wt * hi;
}

}  // namespace amerop
