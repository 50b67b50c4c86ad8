// Correlated geometric Brownian motion under the historical measure.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmc/core.hpp"
#include "hmc/parallel.hpp"
#include "hmc/random.hpp"

namespace hmc::scenarios {

struct GbmParams {
    std::vector<double> drift;       // mu, annual
    std::vector<double> volatility;  // sigma, annual
    Eigen::MatrixXd correlation;     // d x d
    std::vector<double> initial;     // X_0

    /// Independent assets.
    static GbmParams independent(std::vector<double> drift, std::vector<double> vol, std::vector<double> x0) {
        const auto d = static_cast<Eigen::Index>(vol.size());
        return {std::move(drift), std::move(vol), Eigen::MatrixXd::Identity(d, d), std::move(x0)};
    }

    [[nodiscard]] std::size_t n_assets() const { return volatility.size(); }
};

/// Returns L with L L^T = correlation. Accepts positive semidefinite input
/// (through a symmetric eigen-decomposition); throws on anything else.
[[nodiscard]] inline Eigen::MatrixXd correlation_factor(const Eigen::MatrixXd& corr) {
    const Eigen::Index d = corr.rows();
    if (corr.cols() != d) throw DimensionError("assets", "correlation matrix must be square");
    for (Eigen::Index i = 0; i < d; ++i) {
        if (std::abs(corr(i, i) - 1.0) > 1e-12) throw DomainError("correlation matrix needs a unit diagonal");
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::abs(corr(i, j) - corr(j, i)) > 1e-12) throw DomainError("correlation matrix is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    const Eigen::VectorXd lambda = eig.eigenvalues();
    if (lambda.minCoeff() < -1e-10) throw DomainError("correlation matrix is not positive semidefinite");
    return eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

inline void validate(const GbmParams& p) {
    const auto d = p.n_assets();
    if (d == 0) throw DimensionError("assets", "GbmParams: no assets");
    if (p.drift.size() != d || p.initial.size() != d || static_cast<std::size_t>(p.correlation.rows()) != d)
        throw DimensionError("assets", "GbmParams: drift, volatility, correlation and initial sizes differ");
    for (std::size_t k = 0; k < d; ++k) {
        if (!(p.volatility[k] >= 0.0)) throw DomainError("GbmParams: volatility must be >= 0");
        if (!(p.initial[k] > 0.0)) throw DomainError("GbmParams: initial price must be > 0");
        if (!std::isfinite(p.drift[k])) throw DomainError("GbmParams: drift must be finite");
    }
}

/// Exact log-normal scheme: log X_{t+1} - log X_t ~ N((mu - sigma^2/2) dt, sigma^2 dt)
/// with correlated shocks. Shock j of path i at step t is normal draw
/// t d + j of stream (seed, i), so changing only the drift keeps the shocks.
[[nodiscard]] inline PathSet simulate_gbm(const GbmParams& params, const TimeGrid& grid, std::size_t n_paths,
                                          std::uint64_t seed) {
    validate(params);
    const auto d = params.n_assets();
    const Eigen::MatrixXd factor = correlation_factor(params.correlation);
    const double dt = grid.dt(), sqdt = std::sqrt(dt);
    std::vector<double> step_drift(d), step_vol(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double s = params.volatility[k];
        step_drift[k] = (params.drift[k] - 0.5 * s * s) * dt;
        step_vol[k] = s * sqdt;
    }
    PathSet out(n_paths, d, grid);
    parallel_for(n_paths, [&](std::size_t i) {
        const rng::CounterRng gen(seed, rng::Domain::prices, i);
        Eigen::VectorXd z(static_cast<Eigen::Index>(d));
        std::vector<double> log_growth(d, 0.0);
        for (std::size_t k = 0; k < d; ++k) out(i, 0, k) = params.initial[k];
        for (std::size_t t = 1; t < grid.n_times(); ++t) {
            for (std::size_t j = 0; j < d; ++j)
                z(static_cast<Eigen::Index>(j)) = gen.normal((t - 1) * d + j);
            const Eigen::VectorXd w = factor * z;
            for (std::size_t k = 0; k < d; ++k) {
                log_growth[k] += step_drift[k] + step_vol[k] * w(static_cast<Eigen::Index>(k));
                out(i, t, k) = params.initial[k] * std::exp(log_growth[k]);
            }
        }
    });
    return out;
}

}  // namespace hmc::scenarios
