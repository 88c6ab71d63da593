#pragma once

#include "amerop/fd_pricer.hpp"

namespace amerop {

struct BsQuote {
    double spot;
    double strike;
    double rate;
    double volatility;
    double tau;  ///< time to maturity
};

/// Standard normal CDF via erfc, accurate in both tails.
double normal_cdf(double z);

/// Black-Scholes European put (no dividends). Returns the payoff at tau = 0.
double bs_put(const BsQuote& q);
double bs_call(const BsQuote& q);

/// Cox-Ross-Rubinstein recombining tree for the American put.
double crr_american_put(double spot, double strike, const MarketParams& market, double maturity, int steps);

}  // namespace amerop
