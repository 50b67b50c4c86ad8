// Multi-asset scenarios from per-asset GARCH(1,1) volatility driven by
// cross-correlated innovations described by a PCA model.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmc/core.hpp"
#include "hmc/parallel.hpp"
#include "hmc/random.hpp"
#include "hmc/scenarios/garch.hpp"
#include "hmc/scenarios/ingest.hpp"
#include "hmc/scenarios/pca.hpp"

namespace hmc::scenarios {

/// Per-asset GARCH fits plus the PCA of the standardized residuals.
struct GarchPcaModel {
    std::vector<GarchFit> fits;
    PcaModel pca;
    std::vector<double> last_prices;

    [[nodiscard]] std::vector<GarchParams> params() const {
        std::vector<GarchParams> out;
        for (const auto& f : fits) out.push_back(f.params);
        return out;
    }
};

/// Calibrates every asset's log returns separately, then fits the PCA to the
/// standardized residuals eps_t / sigma_t stacked across assets.
[[nodiscard]] inline GarchPcaModel calibrate_garch_pca(const AlignedPrices& data,
                                                       const GarchCalibrationOptions& opts = {}) {
    const Eigen::MatrixXd returns = data.log_returns();
    GarchPcaModel model;
    Eigen::MatrixXd z(returns.rows(), returns.cols());
    for (Eigen::Index k = 0; k < returns.cols(); ++k) {
        std::vector<double> series(returns.col(k).data(), returns.col(k).data() + returns.rows());
        GarchFit fit = calibrate_garch(series, opts);
        GarchParams from_start = fit.params;
        double var = 0.0, m = 0.0;
        for (double r : series) m += r;
        m /= static_cast<double>(series.size());
        for (double r : series) var += (r - m) * (r - m);
        from_start.initial_variance = var / static_cast<double>(series.size() - 1);
        const GarchFilter filt = garch_filter(from_start, series);
        for (Eigen::Index t = 0; t < returns.rows(); ++t) z(t, k) = filt.standardized[static_cast<std::size_t>(t)];
        model.fits.push_back(fit);
    }
    model.pca = fit_pca(z);
    const Eigen::Index last = data.prices.rows() - 1;
    for (Eigen::Index k = 0; k < data.prices.cols(); ++k) model.last_prices.push_back(data.prices(last, k));
    return model;
}

/// Simulates n_paths scenarios on `grid`, running `substeps` GARCH periods
/// per grid step. Per period: scores s_j ~ N(0, variance_j), innovations
/// z = mean + components s, eps_k = sigma_k z_k, log X_k += mu_k + eps_k,
/// then the variance recursion.
[[nodiscard]] inline PathSet simulate_garch_pca(const std::vector<GarchParams>& garch, const PcaModel& pca,
                                                const TimeGrid& grid, std::size_t n_paths,
                                                const std::vector<double>& initial_prices, std::uint64_t seed,
                                                int substeps = 1) {
    const auto d = garch.size();
    if (d == 0 || pca.dim() != d || initial_prices.size() != d ||
        static_cast<std::size_t>(pca.components.rows()) != d || static_cast<std::size_t>(pca.variances.size()) != d)
        throw DimensionError("assets", "simulate_garch_pca: GARCH, PCA and initial price dimensions differ");
    if (substeps < 1) throw DomainError("simulate_garch_pca: substeps must be >= 1");
    for (const auto& g : garch) g.validate();
    for (double x : initial_prices)
        if (!(x > 0.0)) throw DomainError("simulate_garch_pca: initial prices must be > 0");
    for (Eigen::Index j = 0; j < pca.variances.size(); ++j)
        if (!(pca.variances(j) >= 0.0)) throw DomainError("simulate_garch_pca: PCA variances must be >= 0");

    const Eigen::VectorXd score_sd = pca.variances.cwiseSqrt();
    PathSet out(n_paths, d, grid);
    parallel_for(n_paths, [&](std::size_t i) {
        const rng::CounterRng gen(seed, rng::Domain::prices, i);
        std::vector<double> log_growth(d, 0.0), var(d);
        Eigen::VectorXd s(static_cast<Eigen::Index>(d));
        for (std::size_t k = 0; k < d; ++k) {
            var[k] = garch[k].initial_variance;
            out(i, 0, k) = initial_prices[k];
        }
        std::uint64_t draw = 0;
        for (std::size_t t = 1; t < grid.n_times(); ++t) {
            for (int sub = 0; sub < substeps; ++sub) {
                for (std::size_t j = 0; j < d; ++j)
                    s(static_cast<Eigen::Index>(j)) = score_sd(static_cast<Eigen::Index>(j)) * gen.normal(draw++);
                const Eigen::VectorXd z = pca.mean + pca.components * s;
                for (std::size_t k = 0; k < d; ++k) {
                    const double eps = std::sqrt(var[k]) * z(static_cast<Eigen::Index>(k));
                    log_growth[k] += garch[k].mean + eps;
                    var[k] = garch[k].omega + garch[k].alpha * eps * eps + garch[k].beta * var[k];
                }
            }
            for (std::size_t k = 0; k < d; ++k) out(i, t, k) = initial_prices[k] * std::exp(log_growth[k]);
        }
    });
    return out;
}

}  // namespace hmc::scenarios
