#include "amerop/sde_sim.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "amerop/errors.hpp"
#include "amerop/seeding.hpp"

namespace amerop {

namespace {

void check_sizes(int n_steps, int n_paths, double maturity) {
    if (n_steps < 1) throw DomainError("simulation: n_steps must be >= 1");
    if (n_paths < 1) throw DomainError("simulation: n_paths must be >= 1");
    if (!(maturity > 0.0)) throw DomainError("simulation: maturity must be positive");
}

// Runs fill(block) for every block; blocks are disjoint so scheduling does
// not affect the output.
template <typename Fill>
void for_each_block(int n_blocks, Fill&& fill) {
    const int workers = std::max(1, std::min<int>(n_blocks, static_cast<int>(std::thread::hardware_concurrency())));
    if (workers == 1) {
        for (int b = 0; b < n_blocks; ++b) fill(b);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int b = w; b < n_blocks; b += workers) fill(b);
        });
    }
}

}  // namespace

PathBatch simulate_gbm(double x0, const MarketParams& market, double maturity, int n_steps, int n_paths,
                       std::uint64_t seed, bool antithetic) {
    if (!std::isfinite(market.rate) || !(market.volatility >= 0.0) || !std::isfinite(market.volatility)) {
        throw DomainError("simulate_gbm: rate must be finite and volatility >= 0");
    }
    if (!(x0 > 0.0)) throw DomainError("simulate_gbm: x0 must be positive");
    check_sizes(n_steps, n_paths, maturity);
    if (antithetic && n_paths % 2 != 0) throw DomainError("simulate_gbm: antithetic batches need an even path count");

    PathBatch batch;
    batch.n_paths = n_paths;
    batch.n_steps = n_steps;
    batch.dt = maturity / n_steps;
    batch.x0 = x0;
    batch.antithetic = antithetic;
    batch.values.resize(n_paths, n_steps + 1);

    const double mu = market.drift_mu();
    const double vol = market.volatility;
    const double sqrt_dt = std::sqrt(batch.dt);
    const int n_blocks = (n_paths + kPathBlock - 1) / kPathBlock;

    for_each_block(n_blocks, [&](int b) {
        std::mt19937_64 rng(derive_seed(seed, "paths", static_cast<std::uint64_t>(b)));
        std::normal_distribution<double> normal;
        const int first = b * kPathBlock;
        const int last = std::min(n_paths, first + kPathBlock);
        const int stride = antithetic ? 2 : 1;
        for (int i = first; i < last; i += stride) {
            double w_plus = 0.0;
            double w_minus = 0.0;
            batch.values(i, 0) = x0;
            if (antithetic) batch.values(i + 1, 0) = x0;
            for (int n = 1; n <= n_steps; ++n) {
                const double z = normal(rng) * sqrt_dt;
                w_plus += z;
                w_minus -= z;
                const double drift = mu * (n * batch.dt);
                batch.values(i, n) = x0 * std::exp(drift + vol * w_plus);
                if (antithetic) batch.values(i + 1, n) = x0 * std::exp(drift + vol * w_minus);
            }
        }
    });
    return batch;
}

PathBatch simulate_euler_maruyama(double x0, const Coefficient& drift, const Coefficient& diffusion,
                                  double maturity, int n_steps, int n_paths, std::uint64_t seed) {
    check_sizes(n_steps, n_paths, maturity);
    PathBatch batch;
    batch.n_paths = n_paths;
    batch.n_steps = n_steps;
    batch.dt = maturity / n_steps;
    batch.x0 = x0;
    batch.values.resize(n_paths, n_steps + 1);
    const double sqrt_dt = std::sqrt(batch.dt);
    const int n_blocks = (n_paths + kPathBlock - 1) / kPathBlock;

    for_each_block(n_blocks, [&](int b) {
        std::mt19937_64 rng(derive_seed(seed, "paths-em", static_cast<std::uint64_t>(b)));
        std::normal_distribution<double> normal;
        const int first = b * kPathBlock;
        const int last = std::min(n_paths, first + kPathBlock);
        for (int i = first; i < last; ++i) {
            double x = x0;
            batch.values(i, 0) = x;
            for (int n = 1; n <= n_steps; ++n) {
                const double t = (n - 1) * batch.dt;
                x += drift(t, x) * batch.dt + diffusion(t, x) * sqrt_dt * normal(rng);
                batch.values(i, n) = x;
            }
        }
    });
    return batch;
}

McEstimate mc_european_put(const PathBatch& batch, const PutPayoff& payoff, double rate) {
    if (batch.n_paths < 1) throw DomainError("mc_european_put: empty batch");
    const double disc = std::exp(-rate * batch.maturity());
    const auto terminal = batch.values.col(batch.n_steps);

    // Antithetic pairs are averaged first so the error bar reflects the
    // pair-level variance.
    const int stride = batch.antithetic ? 2 : 1;
    const int samples = batch.n_paths / stride;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int s = 0; s < samples; ++s) {
        double v = 0.0;
        for (int k = 0; k < stride; ++k) v += payoff(terminal[s * stride + k]);
        v = disc * v / stride;
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / samples;
    if (samples < 2) return {mean, 0.0};
    const double var = std::max(0.0, (sum_sq - samples * mean * mean) / (samples - 1));
    return {mean, std::sqrt(var / samples)};
}

double empirical_sup_moment(const PathBatch& batch, double p) {
    if (!(p > 0.0)) throw DomainError("empirical_sup_moment: p must be positive");
    double acc = 0.0;
    for (int i = 0; i < batch.n_paths; ++i) {
        acc += std::pow(batch.values.row(i).cwiseAbs().maxCoeff(), p);
    }
    return acc / batch.n_paths;
}

double empirical_tail_prob(const PathBatch& batch, double radius) {
    if (!(radius > 0.0)) throw DomainError("empirical_tail_prob: radius must be positive");
    int hits = 0;
    for (int i = 0; i < batch.n_paths; ++i) {
        const double excursion = (batch.values.row(i).array() - batch.x0).abs().maxCoeff();
        if (excursion >= radius) ++hits;
    }
    return static_cast<double>(hits) / batch.n_paths;
}

TailFit fit_tail_exponent(const std::vector<double>& radii, const std::vector<double>& probs) {
    if (radii.size() != probs.size()) throw ShapeError("fit_tail_exponent: length mismatch");
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (probs[i] > 0.0) {
            xs.push_back(radii[i] * radii[i]);
            ys.push_back(std::log(probs[i]));
        }
    }
    const int n = static_cast<int>(xs.size());
    if (n < 2) return {0.0, n == 1 ? ys[0] : 0.0, n};
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd target(n);
    for (int i = 0; i < n; ++i) {
        design(i, 0) = xs[i];
        design(i, 1) = 1.0;
        target[i] = ys[i];
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(target);
    return {coef[0], coef[1], n};
}

LipschitzPair lipschitz_gap_check(const PriceSurface& u1, const PriceSurface& u2, const PutPayoff& k1,
                                  const PutPayoff& k2, double rate, const PathBatch& batch) {
    if (!u1.grid.same_lattice(u2.grid)) throw ShapeError("lipschitz_gap_check: surfaces on different grids");
    const GridSpec& g = u1.grid;
    const double lo = g.price(0);
    const double hi = g.price(g.n_space - 1);
    const double horizon = batch.maturity();
    if (std::abs(horizon - g.maturity) > 1e-9 * g.maturity) {
        throw ShapeError("lipschitz_gap_check: batch horizon differs from the surface maturity");
    }

    double lhs = 0.0;
    double payoff_gap = 0.0;
    long clamped = 0;
    for (int i = 0; i < batch.n_paths; ++i) {
        double worst_u = 0.0;
        double worst_g = 0.0;
        for (int n = 0; n <= batch.n_steps; ++n) {
            const double x = batch.values(i, n);
            if (x < lo || x > hi) ++clamped;
            const double t = n * batch.dt;
            worst_u = std::max(worst_u, std::abs(surface_at(u1, t, x) - surface_at(u2, t, x)));
            worst_g = std::max(worst_g, std::abs(k1(x) - k2(x)));
        }
        lhs += worst_u * worst_u;
        payoff_gap += worst_g * worst_g;
    }
    lhs /= batch.n_paths;
    payoff_gap /= batch.n_paths;
    const double constant = 4.0 * std::exp(2.0 * rate * horizon);
    const double samples = static_cast<double>(batch.n_paths) * (batch.n_steps + 1);
    return {lhs, constant * payoff_gap, clamped / samples};
}

LipschitzPair lipschitz_gap_check(const MarketParams& market, const GridSpec& grid, const PutPayoff& k1,
                                  const PutPayoff& k2, const PathBatch& batch) {
    const auto u1 = price_european(market, grid, k1);
    const auto u2 = price_european(market, grid, k2);
    return lipschitz_gap_check(u1, u2, k1, k2, market.rate, batch);
}

}  // namespace amerop
