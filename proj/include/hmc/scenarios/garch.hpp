// GARCH(1,1) with Gaussian innovations:
//     r_t = mu + eps_t,   eps_t = sigma_t z_t,
//     sigma_{t+1}^2 = omega + alpha eps_t^2 + beta sigma_t^2.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmc/core.hpp"
#include "hmc/random.hpp"
#include "hmc/scenarios/nelder_mead.hpp"

namespace hmc::scenarios {

class ConvergenceError : public Error {
public:
    using Error::Error;
};

struct GarchParams {
    double mean = 0.0;  // per-period mean log return
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double initial_variance = 0.0;

    [[nodiscard]] double persistence() const { return alpha + beta; }
    [[nodiscard]] double unconditional_variance() const { return omega / (1.0 - alpha - beta); }

    void validate() const {
        if (!(omega > 0.0)) throw DomainError("GarchParams: omega must be > 0");
        if (!(alpha >= 0.0) || !(beta >= 0.0)) throw DomainError("GarchParams: alpha and beta must be >= 0");
        if (!(alpha + beta < 1.0)) throw DomainError("GarchParams: alpha + beta must be < 1");
        if (!(initial_variance >= 0.0)) throw DomainError("GarchParams: initial variance must be >= 0");
        if (!std::isfinite(mean)) throw DomainError("GarchParams: mean must be finite");
    }
};

/// sigma_t^2 for t = 0..n given shocks eps_0..eps_{n-1}; entry 0 is initial.
[[nodiscard]] inline std::vector<double> conditional_variance_path(const GarchParams& p, std::span<const double> shocks,
                                                                   double initial_variance) {
    std::vector<double> var(shocks.size() + 1);
    var[0] = initial_variance;
    for (std::size_t t = 0; t < shocks.size(); ++t)
        var[t + 1] = p.omega + p.alpha * shocks[t] * shocks[t] + p.beta * var[t];
    return var;
}

struct GarchFilter {
    std::vector<double> variances;       // sigma_t^2 of each observation
    std::vector<double> standardized;    // eps_t / sigma_t
    double log_likelihood = 0.0;
    double next_variance = 0.0;          // one step past the sample
};

/// Runs the variance recursion over a return series from p.initial_variance.
[[nodiscard]] inline GarchFilter garch_filter(const GarchParams& p, std::span<const double> returns) {
    GarchFilter out;
    out.variances.resize(returns.size());
    out.standardized.resize(returns.size());
    double var = p.initial_variance;
    constexpr double log_2pi = 1.8378770664093453;
    for (std::size_t t = 0; t < returns.size(); ++t) {
        const double eps = returns[t] - p.mean;
        out.variances[t] = var;
        out.standardized[t] = eps / std::sqrt(var);
        out.log_likelihood += -0.5 * (log_2pi + std::log(var) + eps * eps / var);
        var = p.omega + p.alpha * eps * eps + p.beta * var;
    }
    out.next_variance = var;
    return out;
}

struct GarchFit {
    GarchParams params;  // initial_variance = next-step forecast after the sample
    double log_likelihood = 0.0;
    int iterations = 0;
    int restarts = 0;
};

struct GarchCalibrationOptions {
    int max_iterations = 2000;  // per simplex run
    int max_restarts = 3;
};

/// Gaussian quasi-maximum likelihood. The simplex searches the unconstrained
/// coordinates ((mu - m)/s, log(omega/s^2), logit(alpha+beta),
/// logit(alpha/(alpha+beta))) with m, s the sample mean and std, starting
/// from alpha = 0.05, beta = 0.90, omega = 0.05 s^2, mu = m. The recursion
/// starts from the sample variance.
[[nodiscard]] inline GarchFit calibrate_garch(std::span<const double> returns, const GarchCalibrationOptions& opts = {}) {
    if (returns.size() < 100) throw DomainError("calibrate_garch: need at least 100 returns");
    double m = 0.0;
    for (double r : returns) {
        if (!std::isfinite(r)) throw DomainError("calibrate_garch: non-finite return");
        m += r;
    }
    m /= static_cast<double>(returns.size());
    double var = 0.0;
    for (double r : returns) var += (r - m) * (r - m);
    var /= static_cast<double>(returns.size() - 1);
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * std::max(std::abs(m), 1e-300)) || var < 1e-300)
        throw DomainError("calibrate_garch: degenerate series (zero variance)");

    auto logistic = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    auto logit = [](double p) { return std::log(p / (1.0 - p)); };
    auto decode = [&](const Eigen::VectorXd& th) {
        GarchParams p;
        p.mean = m + sd * th(0);
        p.omega = var * std::exp(th(1));
        const double pers = logistic(th(2)), share = logistic(th(3));
        p.alpha = pers * share;
        p.beta = pers * (1.0 - share);
        p.initial_variance = var;
        return p;
    };
    auto objective = [&](const Eigen::VectorXd& th) {
        const GarchParams p = decode(th);
        if (!(p.alpha + p.beta < 1.0) || !(p.omega > 0.0)) return std::numeric_limits<double>::infinity();
        return -garch_filter(p, returns).log_likelihood;
    };

    Eigen::VectorXd theta(4);
    theta << 0.0, std::log(0.05), logit(0.95), logit(0.05 / 0.95);
    Eigen::VectorXd steps(4);
    steps << 0.1, 0.5, 0.5, 0.5;
    NelderMeadOptions nm;
    nm.max_iterations = opts.max_iterations;

    GarchFit fit;
    NelderMeadResult run = nelder_mead(objective, theta, steps, nm);
    fit.iterations = run.iterations;
    for (int r = 0; r < opts.max_restarts; ++r) {
        const NelderMeadResult again = nelder_mead(objective, run.x, steps * 0.25, nm);
        fit.iterations += again.iterations;
        ++fit.restarts;
        const double gain = run.value - again.value;
        if (again.value <= run.value) run = again;
        else run.converged = run.converged || again.converged;
        if (gain <= 1e-9 * std::abs(run.value)) break;
    }
    if (!run.converged)
        throw ConvergenceError("calibrate_garch: simplex did not converge within " +
                               std::to_string(opts.max_iterations) + " iterations");
    fit.params = decode(run.x);
    const GarchFilter filt = garch_filter(fit.params, returns);
    fit.log_likelihood = filt.log_likelihood;
    fit.params.initial_variance = filt.next_variance;
    return fit;
}

/// One synthetic return series of length n, starting from the unconditional
/// variance unless p.initial_variance > 0.
[[nodiscard]] inline std::vector<double> simulate_garch_series(const GarchParams& p, std::size_t n, std::uint64_t seed,
                                                               std::uint64_t stream = 0) {
    p.validate();
    const rng::CounterRng gen(seed, rng::Domain::garch_series, stream);
    std::vector<double> out(n);
    double var = p.initial_variance > 0.0 ? p.initial_variance : p.unconditional_variance();
    for (std::size_t t = 0; t < n; ++t) {
        const double eps = std::sqrt(var) * gen.normal(t);
        out[t] = p.mean + eps;
        var = p.omega + p.alpha * eps * eps + p.beta * var;
    }
    return out;
}

}  // namespace hmc::scenarios
