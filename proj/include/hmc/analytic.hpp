// Closed-form prices used to validate the hedged Monte Carlo engine.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hmc/core.hpp"

namespace hmc::analytic {

struct AnalyticQuote {
    double price = 0.0;
    std::vector<double> deltas;
};

/// Standard normal CDF via the complementary error function,
/// Phi(x) = erfc(-x / sqrt 2) / 2, which keeps full relative accuracy in the
/// lower tail.
[[nodiscard]] inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

/// European call on a non-dividend asset.
[[nodiscard]] inline AnalyticQuote black_scholes_call(double spot, double strike, double r, double sigma, double T) {
    if (!(spot > 0.0) || !(strike > 0.0)) throw DomainError("black_scholes_call: spot and strike must be > 0");
    if (sigma < 0.0 || T < 0.0) throw DomainError("black_scholes_call: sigma and T must be >= 0");
    if (T == 0.0) return {std::max(spot - strike, 0.0), {spot > strike ? 1.0 : 0.0}};
    const double disc = std::exp(-r * T);
    if (sigma == 0.0) {
        const double fwd = spot * std::exp(r * T);
        return {disc * std::max(fwd - strike, 0.0), {fwd > strike ? 1.0 : 0.0}};
    }
    const double vol = sigma * std::sqrt(T);
    const double d1 = (std::log(spot / strike) + (r + 0.5 * sigma * sigma) * T) / vol;
    const double d2 = d1 - vol;
    return {spot * norm_cdf(d1) - strike * disc * norm_cdf(d2), {norm_cdf(d1)}};
}

/// Option to exchange asset 2 for asset 1, payoff (X1_T - X2_T)^+.
[[nodiscard]] inline AnalyticQuote margrabe(double spot1, double spot2, double sigma1, double sigma2,
                                            double correlation, double T) {
    if (!(spot1 > 0.0) || !(spot2 > 0.0)) throw DomainError("margrabe: spots must be > 0");
    if (sigma1 < 0.0 || sigma2 < 0.0 || T < 0.0) throw DomainError("margrabe: sigma and T must be >= 0");
    if (correlation < -1.0 || correlation > 1.0) throw DomainError("margrabe: correlation outside [-1, 1]");
    const double var = std::max(0.0, sigma1 * sigma1 + sigma2 * sigma2 - 2.0 * correlation * sigma1 * sigma2);
    if (T == 0.0 || var == 0.0) {
        const bool itm = spot1 > spot2;
        return {std::max(spot1 - spot2, 0.0), {itm ? 1.0 : 0.0, itm ? -1.0 : 0.0}};
    }
    const double vol = std::sqrt(var * T);
    const double d1 = (std::log(spot1 / spot2) + 0.5 * var * T) / vol;
    const double d2 = d1 - vol;
    return {spot1 * norm_cdf(d1) - spot2 * norm_cdf(d2), {norm_cdf(d1), -norm_cdf(d2)}};
}

}  // namespace hmc::analytic
