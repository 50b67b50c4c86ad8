// Prices a 3-month call under simulated historical-measure GBM paths and
// compares with Black-Scholes across spots.

#include <cstdio>

#include "hmc/hmc.hpp"

int main() {
    using namespace hmc;
    const double strike = 100.0, sigma = 0.3, rate = 0.05, horizon = 0.25;
    const TimeGrid grid(65, horizon / 65, rate);

    std::printf("%6s %10s %8s %10s %8s %8s\n", "spot", "hmc", "se", "bs", "delta", "bs_delta");
    for (double spot : {80.0, 90.0, 100.0, 110.0, 120.0}) {
        const auto params = scenarios::GbmParams::independent({0.15}, {sigma}, {spot});
        const PathSet paths = scenarios::simulate_gbm(params, grid, 5000, 7);
        const BasisSpec basis = BasisSpec::monomial(2, 1).with_auto_scaling(paths);
        const auto res = price_european(paths, ClaimSpec::european(call_payoff(strike)), basis);

        Eigen::VectorXd x0(1);
        x0 << spot;
        const double delta = hedge_ratio(res.stage(0), basis, x0)(0);
        const auto bs = analytic::black_scholes_call(spot, strike, rate, sigma, horizon);
        std::printf("%6.1f %10.4f %8.4f %10.4f %8.4f %8.4f\n", spot, res.price(), res.std_error(), bs.price, delta,
                    bs.deltas[0]);
    }
}
