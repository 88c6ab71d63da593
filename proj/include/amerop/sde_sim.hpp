#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

#include "amerop/fd_pricer.hpp"

namespace amerop {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// values(i, n) = X_{t_n} on path i; column 0 is x0.
struct PathBatch {
    int n_paths = 0;
    int n_steps = 0;
    double dt = 0.0;
    double x0 = 0.0;
    bool antithetic = false;  ///< paths (2i, 2i+1) share |Z| with opposite signs
    RowMatrix values;

    [[nodiscard]] double maturity() const { return n_steps * dt; }
};

/// Paths are generated in blocks of this many; block b draws from
/// derive_seed(seed, "paths", b), so results do not depend on thread count.
inline constexpr int kPathBlock = 1024;

/// Exact log-normal stepping of dX = X (r dt + sigma dB).
PathBatch simulate_gbm(double x0, const MarketParams& market, double maturity, int n_steps, int n_paths,
                       std::uint64_t seed, bool antithetic = false);

using Coefficient = std::function<double(double t, double x)>;

/// Euler-Maruyama for dX = a(t,X) dt + b(t,X) dB.
PathBatch simulate_euler_maruyama(double x0, const Coefficient& drift, const Coefficient& diffusion,
                                  double maturity, int n_steps, int n_paths, std::uint64_t seed);

struct McEstimate {
    double price;
    double std_error;
};

McEstimate mc_european_put(const PathBatch& batch, const PutPayoff& payoff, double rate);

/// Sample mean of (max_t |X_t|)^p.
double empirical_sup_moment(const PathBatch& batch, double p);

/// Fraction of paths with max_t |X_t - x0| >= radius.
double empirical_tail_prob(const PathBatch& batch, double radius);

struct TailFit {
    double slope;      ///< d log P / d radius^2 (least squares over nonzero estimates)
    double intercept;
    int points_used;
};

TailFit fit_tail_exponent(const std::vector<double>& radii, const std::vector<double>& probs);

struct LipschitzPair {
    double lhs;            ///< E[max_t |u1 - u2|^2] along paths
    double rhs;            ///< 4 e^{2rT} E[max_t |g1 - g2|^2]
    double exit_fraction;  ///< share of (path, time) samples clamped to the grid
};

/// Mean-square path comparison of two European pricing-operator outputs
/// against their payoffs. Surfaces come from the FD pricer on `grid`.
LipschitzPair lipschitz_gap_check(const MarketParams& market, const GridSpec& grid, const PutPayoff& k1,
                                  const PutPayoff& k2, const PathBatch& batch);

/// Variant taking precomputed European surfaces.
LipschitzPair lipschitz_gap_check(const PriceSurface& u1, const PriceSurface& u2, const PutPayoff& k1,
                                  const PutPayoff& k2, double rate, const PathBatch& batch);

}  // namespace amerop
