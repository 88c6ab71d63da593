#include "amerop/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "amerop/errors.hpp"

namespace amerop {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace {

struct D12 {
    double d1;
    double d2;
};

void check_quote(const BsQuote& q) {
    if (!(q.spot > 0.0) || !(q.strike > 0.0)) throw DomainError("bs: spot and strike must be positive");
    if (!(q.tau >= 0.0)) throw DomainError("bs: tau must be nonnegative");
    if (q.tau > 0.0 && !(q.volatility > 0.0)) throw DomainError("bs: volatility must be positive");
}

D12 d_terms(const BsQuote& q) {
    const double vol_sqrt = q.volatility * std::sqrt(q.tau);
    const double d1 = (std::log(q.spot / q.strike) + (q.rate + 0.5 * q.volatility * q.volatility) * q.tau) / vol_sqrt;
    return {d1, d1 - vol_sqrt};
}

}  // namespace

double bs_put(const BsQuote& q) {
    check_quote(q);
    if (q.tau == 0.0) return std::max(q.strike - q.spot, 0.0);
    const auto [d1, d2] = d_terms(q);
    return q.strike * std::exp(-q.rate * q.tau) * normal_cdf(-d2) - q.spot * normal_cdf(-d1);
}

double bs_call(const BsQuote& q) {
    check_quote(q);
    if (q.tau == 0.0) return std::max(q.spot - q.strike, 0.0);
    const auto [d1, d2] = d_terms(q);
    return q.spot * normal_cdf(d1) - q.strike * std::exp(-q.rate * q.tau) * normal_cdf(d2);
}

double crr_american_put(double spot, double strike, const MarketParams& market, double maturity, int steps) {
    market.validate();
    if (steps < 1) throw DomainError("crr: steps must be >= 1");
    if (!(spot > 0.0) || !(strike > 0.0) || !(maturity > 0.0)) {
        throw DomainError("crr: spot, strike and maturity must be positive");
    }
    const double dt = maturity / steps;
    const double up = std::exp(market.volatility * std::sqrt(dt));
    const double down = 1.0 / up;
    const double growth = std::exp(market.rate * dt);
    const double p = (growth - down) / (up - down);
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("crr: risk-neutral probability outside [0,1]");
    const double disc = 1.0 / growth;

    // Node (n, i) has i up-moves out of n; price spot * up^(2i - n).
    std::vector<double> value(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        value[i] = std::max(strike - spot * std::pow(up, 2 * i - steps), 0.0);
    }
    for (int n = steps - 1; n >= 0; --n) {
        for (int i = 0; i <= n; ++i) {
            const double continuation = disc * (p * value[i + 1] + (1.0 - p) * value[i]);
            const double exercise = strike - spot * std::pow(up, 2 * i - n);
            value[i] = std::max(continuation, exercise);
        }
    }
    return value[0];
}

}  // namespace amerop
