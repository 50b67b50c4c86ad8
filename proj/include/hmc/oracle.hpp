// Cash-flow oracles: a black box mapping simulated states to per-scenario
// project cash flows. The clipped-spread oracle is
//     c_t = clip(a X_1,t - b X_2,t - I + eps_t),  eps_t ~ N(0, noise_std^2),
// with eps white noise independent of the price shocks.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hmc/core.hpp"
#include "hmc/csv.hpp"
#include "hmc/parallel.hpp"
#include "hmc/random.hpp"

namespace hmc::oracle {

enum class OracleKind { clipped_spread, external_csv };

struct OracleSpec {
    OracleKind kind = OracleKind::clipped_spread;
    double a = 0.0;
    double b_coef = 0.0;
    double running_cost = 0.0;
    double noise_std = 0.0;
    std::uint64_t noise_seed = 0;
    std::filesystem::path csv_file;  // external_csv
};

/// 0 below zero, identity on (0,1), saturates at 1.
[[nodiscard]] constexpr double clip(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x;
}

[[nodiscard]] inline CashFlowSet generate_cashflows(const OracleSpec& spec, const PathSet& paths) {
    if (spec.kind == OracleKind::external_csv) {
        auto is = csv::open_input(spec.csv_file);
        CashFlowSet flows = csv::read_flows(is, paths.grid().dt(), paths.grid().rate());
        validate_aligned(paths, flows);
        return flows;
    }
    if (paths.n_assets() < 2)
        throw DimensionError("assets", "clipped_spread oracle needs at least two assets, got " +
                                           std::to_string(paths.n_assets()));
    if (!(spec.noise_std >= 0.0)) throw DomainError("clipped_spread oracle: noise_std must be >= 0");

    CashFlowSet flows(paths.n_paths(), paths.grid());
    parallel_for(paths.n_paths(), [&](std::size_t i) {
        const rng::CounterRng noise(spec.noise_seed, rng::Domain::oracle_noise, i);
        for (std::size_t t = 0; t < paths.n_times(); ++t) {
            const double eps = spec.noise_std > 0.0 ? spec.noise_std * noise.normal(t) : 0.0;
            flows(i, t) = clip(spec.a * paths(i, t, 0) - spec.b_coef * paths(i, t, 1) - spec.running_cost + eps);
        }
    });
    return flows;
}

}  // namespace hmc::oracle
