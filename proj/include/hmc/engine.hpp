// Backward-induction valuation by local risk minimization on historical
// paths: European claims, conditional values of cash-flow streams, and
// Bermudan real options with exercise-region statistics.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmc/basis.hpp"
#include "hmc/core.hpp"
#include "hmc/parallel.hpp"
#include "hmc/regress.hpp"

namespace hmc {

// ============================================================================
// Claims
// ============================================================================

enum class ClaimKind { european_payoff, stream_value, real_option };

using Payoff = std::function<double(std::span<const double>)>;

/// (x_asset - strike)^+
[[nodiscard]] inline Payoff call_payoff(double strike, std::size_t asset = 0) {
    return [strike, asset](std::span<const double> x) { return std::max(x[asset] - strike, 0.0); };
}

/// (x_1 - x_2)^+
[[nodiscard]] inline Payoff exchange_payoff() {
    return [](std::span<const double> x) { return std::max(x[0] - x[1], 0.0); };
}

struct ClaimSpec {
    ClaimKind kind = ClaimKind::european_payoff;
    Payoff payoff;           // european_payoff
    double strike = 0.0;     // real_option investment cost K
    int window_first = 0;    // T0, step index relative to the grid start
    int window_last = -1;    // T; -1 means the grid end
    /// Step at which values are reported; defaults to window_first. Setting it
    /// below window_first rolls back without exercise before the window opens.
    std::optional<int> valuation_step;

    static ClaimSpec european(Payoff payoff) {
        ClaimSpec c;
        c.kind = ClaimKind::european_payoff;
        c.payoff = std::move(payoff);
        c.window_first = 0;
        return c;
    }

    static ClaimSpec real_option(double strike, int first, int last) {
        ClaimSpec c;
        c.kind = ClaimKind::real_option;
        c.strike = strike;
        c.window_first = first;
        c.window_last = last;
        return c;
    }
};

// ============================================================================
// Results
// ============================================================================

/// Remark-1 style statistics for one exercise date.
struct ExerciseStats {
    int t = 0;
    std::vector<std::size_t> exercise_set;  // I_t
    std::optional<double> trigger;          // nu_t
    std::optional<double> probability;      // Pr_t
};

struct ValuationResult {
    explicit ValuationResult(BasisSpec b) : basis(std::move(b)) {}

    BasisSpec basis;
    double rho = 1.0;
    int valuation_step = 0;
    int last_step = 0;
    Eigen::VectorXd value_t0;                   // V^_{T0}(X^i)
    std::vector<StageRegression> stages;        // t = valuation_step .. last_step-1, ascending
    Eigen::MatrixXd values;                     // N x times, V^_t (NaN outside [valuation_step, last_step])
    Eigen::MatrixXd continuation;               // fitted gamma.K(X_t) (real options)
    Eigen::MatrixXd project_values;             // N x times stream value (real options)
    std::vector<ExerciseStats> exercise;        // one per window date, ascending

    [[nodiscard]] double price() const { return value_t0.mean(); }

    /// Standard error of the price: std of the total discounted hedging cost,
    /// whose per-stage increments are the orthogonal regression residuals.
    [[nodiscard]] double std_error() const {
        double var = 0.0;
        std::size_t n = static_cast<std::size_t>(value_t0.size());
        for (const auto& s : stages)
            var += std::pow(rho, -2.0 * (s.t - valuation_step)) * s.local_risk;
        return std::sqrt(var / static_cast<double>(n));
    }

    [[nodiscard]] double total_local_risk() const {
        double sum = 0.0;
        for (const auto& s : stages) sum += s.local_risk;
        return sum;
    }

    [[nodiscard]] const StageRegression& stage(int t) const {
        for (const auto& s : stages)
            if (s.t == t) return s;
        throw Error("ValuationResult: no stage regression at t = " + std::to_string(t));
    }
};

struct EngineOptions {
    StageOptions stage;
};

namespace detail {

inline Eigen::MatrixXd nan_matrix(std::size_t rows, std::size_t cols) {
    return Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols),
                                     std::numeric_limits<double>::quiet_NaN());
}

inline Eigen::VectorXd fitted_values(const PathSet& paths, std::size_t t, const BasisSpec& basis,
                                     const Eigen::VectorXd& gamma) {
    const Eigen::MatrixXd x = paths.slice(t);
    Eigen::VectorXd out(x.rows());
    parallel_for(static_cast<std::size_t>(x.rows()), [&](std::size_t i) {
        const Eigen::VectorXd xi = x.row(static_cast<Eigen::Index>(i)).transpose();
        out(static_cast<Eigen::Index>(i)) = gamma.dot(eval_value_basis(basis, xi));
    });
    return out;
}

inline StageRegression run_stage(const PathSet& paths, int t, const Eigen::VectorXd& v_next,
                                 const BasisSpec& basis, double rho, const StageOptions& opts) {
    return fs_stage_regression(paths.slice(static_cast<std::size_t>(t)),
                               paths.slice(static_cast<std::size_t>(t + 1)), v_next, basis, rho, opts, t);
}

inline void check_basis(const PathSet& paths, const BasisSpec& basis, bool hedge) {
    if (basis.n_assets() != paths.n_assets())
        throw DimensionError("assets", "engine: basis built for " + std::to_string(basis.n_assets()) +
                                           " assets, paths have " + std::to_string(paths.n_assets()));
    const std::size_t need = min_paths_for(basis, hedge);
    if (paths.n_paths() < need)
        throw DimensionError("paths", "engine: insufficient paths (" + std::to_string(paths.n_paths()) +
                                          " < " + std::to_string(need) + ")");
}

}  // namespace detail

// ============================================================================
// European claims
// ============================================================================

/// V^_T = payoff(X_T); for t = T-1..0 regress V^_{t+1} and set
/// V^_t = gamma_t . K(X_t).
[[nodiscard]] inline ValuationResult price_european(const PathSet& paths, const ClaimSpec& claim,
                                                    const BasisSpec& basis, const EngineOptions& opts = {}) {
    if (claim.kind != ClaimKind::european_payoff || !claim.payoff)
        throw DomainError("price_european: claim must be a european_payoff with a payoff function");
    detail::check_basis(paths, basis, opts.stage.hedge);
    const auto n = paths.n_paths();
    const int last = paths.grid().n_steps();

    ValuationResult res(basis);
    res.rho = discount_factor(paths.grid());
    res.valuation_step = 0;
    res.last_step = last;
    res.values = detail::nan_matrix(n, paths.n_times());

    std::vector<double> state(paths.n_assets());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < paths.n_assets(); ++k) state[k] = paths(i, static_cast<std::size_t>(last), k);
        res.values(static_cast<Eigen::Index>(i), last) = claim.payoff(state);
    }
    for (int t = last - 1; t >= 0; --t) {
        StageRegression st = detail::run_stage(paths, t, res.values.col(t + 1), basis, res.rho, opts.stage);
        res.values.col(t) = detail::fitted_values(paths, static_cast<std::size_t>(t), basis, st.gamma);
        res.stages.push_back(std::move(st));
    }
    std::reverse(res.stages.begin(), res.stages.end());
    res.value_t0 = res.values.col(0);
    return res;
}

// ============================================================================
// Cash-flow streams
// ============================================================================

/// Conditional value of the remaining stream, V_t = c_t + gamma_t . K(X_t)
/// with gamma_t from the hedged regression of V_{t+1}; V_{T_F} = c_{T_F}.
[[nodiscard]] inline Eigen::MatrixXd project_value_stream(const PathSet& paths, const CashFlowSet& flows,
                                                          const BasisSpec& basis, const EngineOptions& opts = {}) {
    validate_aligned(paths, flows);
    detail::check_basis(paths, basis, opts.stage.hedge);
    const double rho = discount_factor(paths.grid());
    const int last = paths.grid().n_steps();
    Eigen::MatrixXd v(static_cast<Eigen::Index>(paths.n_paths()), static_cast<Eigen::Index>(paths.n_times()));
    v.col(last) = flows.matrix().col(last);
    for (int t = last - 1; t >= 0; --t) {
        const StageRegression st = detail::run_stage(paths, t, v.col(t + 1), basis, rho, opts.stage);
        v.col(t) = flows.matrix().col(t) + detail::fitted_values(paths, static_cast<std::size_t>(t), basis, st.gamma);
    }
    return v;
}

// ============================================================================
// Exercise statistics
// ============================================================================

/// Exercise set, trigger level and trigger probability at one date.
///
/// A path is in the exercise set when its continuation value does not exceed
/// the positive part of its intrinsic value and that intrinsic value is
/// strictly positive. The trigger is the smallest intrinsic value in the set;
/// the probability is the fraction of paths whose positive intrinsic value
/// lies at or below the trigger. Both are absent for an empty set.
[[nodiscard]] inline ExerciseStats exercise_statistics(const Eigen::VectorXd& intrinsic, const Eigen::VectorXd& value,
                                                       const Eigen::VectorXd& continuation, int t = 0) {
    if (intrinsic.size() != value.size() || intrinsic.size() != continuation.size())
        throw DimensionError("paths", "exercise_statistics: vectors differ in length");
    ExerciseStats st;
    st.t = t;
    for (Eigen::Index i = 0; i < intrinsic.size(); ++i) {
        const double iv = intrinsic(i);
        if (iv > 0.0 && continuation(i) <= iv) st.exercise_set.push_back(static_cast<std::size_t>(i));
    }
    if (st.exercise_set.empty()) return st;
    double nu = std::numeric_limits<double>::infinity();
    for (auto i : st.exercise_set) nu = std::min(nu, intrinsic(static_cast<Eigen::Index>(i)));
    st.trigger = nu;
    std::size_t below = 0;
    for (Eigen::Index i = 0; i < intrinsic.size(); ++i)
        if (std::max(intrinsic(i), 0.0) <= nu) ++below;
    st.probability = static_cast<double>(below) / static_cast<double>(intrinsic.size());
    return st;
}

// ============================================================================
// Real options
// ============================================================================

/// Option to invest K once at any step of [T0, T] and receive the stream
/// value V_t. Values propagate as max{(V_t - K)^+, gamma_t . K(X_t)} inside
/// the window; statistics are stored for every window date.
[[nodiscard]] inline ValuationResult price_real_option(const PathSet& paths, const CashFlowSet& flows,
                                                       const ClaimSpec& claim, const BasisSpec& basis,
                                                       const EngineOptions& opts = {}) {
    if (claim.kind != ClaimKind::real_option) throw DomainError("price_real_option: claim must be a real_option");
    if (claim.strike < 0.0) throw DomainError("price_real_option: strike must be >= 0");
    const int horizon = paths.grid().n_steps();
    const int last = claim.window_last < 0 ? horizon : claim.window_last;
    const int first = claim.window_first;
    const int start = claim.valuation_step.value_or(first);
    if (first > last) throw DomainError("price_real_option: exercise window start after its end");
    if (first < 0 || last > horizon) throw DomainError("price_real_option: exercise window outside the grid");
    if (start < 0 || start > first) throw DomainError("price_real_option: valuation step must lie in [0, T0]");

    const Eigen::MatrixXd stream = project_value_stream(paths, flows, basis, opts);
    const auto n = paths.n_paths();
    const double k = claim.strike;

    ValuationResult res(basis);
    res.rho = discount_factor(paths.grid());
    res.valuation_step = start;
    res.last_step = last;
    res.project_values = stream;
    res.values = detail::nan_matrix(n, paths.n_times());
    res.continuation = detail::nan_matrix(n, paths.n_times());

    const Eigen::VectorXd intrinsic_last = stream.col(last).array() - k;
    res.values.col(last) = intrinsic_last.cwiseMax(0.0);
    res.continuation.col(last).setZero();
    res.exercise.push_back(exercise_statistics(intrinsic_last, res.values.col(last), res.continuation.col(last), last));

    for (int t = last - 1; t >= start; --t) {
        StageRegression st = detail::run_stage(paths, t, res.values.col(t + 1), basis, res.rho, opts.stage);
        const Eigen::VectorXd cont = detail::fitted_values(paths, static_cast<std::size_t>(t), basis, st.gamma);
        res.continuation.col(t) = cont;
        if (t >= first) {
            const Eigen::VectorXd intrinsic = stream.col(t).array() - k;
            res.values.col(t) = intrinsic.cwiseMax(0.0).cwiseMax(cont);
            res.exercise.push_back(exercise_statistics(intrinsic, res.values.col(t), cont, t));
        } else {
            res.values.col(t) = cont;
        }
        res.stages.push_back(std::move(st));
    }
    std::reverse(res.stages.begin(), res.stages.end());
    std::reverse(res.exercise.begin(), res.exercise.end());
    res.value_t0 = res.values.col(start);
    return res;
}

// ============================================================================
// Hedge account
// ============================================================================

/// Per-path trading account of the local-risk-minimizing strategy, all
/// amounts in time-0 money (divided by rho^t). hedge[k](i, t) is the
/// position in asset k held from t to t+1 (zero at the last step), and
/// cash = value - hedge . X at every step.
struct HedgeAccount {
    Eigen::MatrixXd value;       // V_t
    Eigen::MatrixXd gain;        // G_t
    Eigen::MatrixXd cost;        // C_t = V_t - G_t
    Eigen::MatrixXd orthogonal;  // L_t = C_t - C_0
    Eigen::MatrixXd cash;        // numeraire position
    std::vector<Eigen::MatrixXd> hedge;
    Eigen::VectorXd initial_cost;  // c^ = C_0 per path
};

[[nodiscard]] inline HedgeAccount reconstruct_hedge_account(const ValuationResult& result, const PathSet& paths) {
    if (result.valuation_step != 0) throw Error("reconstruct_hedge_account: result must start at t = 0");
    const int last = result.last_step;
    for (int t = 0; t < last; ++t) (void)result.stage(t);  // throws on a missing stage
    const auto n = static_cast<Eigen::Index>(paths.n_paths());
    const auto d = paths.n_assets();
    if (result.values.rows() != n) throw DimensionError("paths", "reconstruct_hedge_account: path count differs");
    const auto times = static_cast<Eigen::Index>(last + 1);
    const double rho = result.rho;

    HedgeAccount acc;
    acc.value.resize(n, times);
    acc.gain = Eigen::MatrixXd::Zero(n, times);
    acc.cash.resize(n, times);
    acc.hedge.assign(d, Eigen::MatrixXd::Zero(n, times));

    Eigen::VectorXd x(static_cast<Eigen::Index>(d));
    for (Eigen::Index t = 0; t < times; ++t) {
        const double df = std::pow(rho, -static_cast<double>(t));
        for (Eigen::Index i = 0; i < n; ++i) {
            acc.value(i, t) = df * result.values(i, t);
            for (std::size_t k = 0; k < d; ++k)
                x(static_cast<Eigen::Index>(k)) = paths(static_cast<std::size_t>(i), static_cast<std::size_t>(t), k);
            double held_value = 0.0;
            if (t < last) {
                const Eigen::VectorXd xi = hedge_ratio(result.stage(static_cast<int>(t)), result.basis, x);
                double step_gain = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    const auto kk = static_cast<Eigen::Index>(k);
                    acc.hedge[k](i, t) = xi(kk);
                    held_value += xi(kk) * df * x(kk);
                    const double next = paths(static_cast<std::size_t>(i), static_cast<std::size_t>(t + 1), k);
                    step_gain += xi(kk) * df * (next / rho - x(kk));
                }
                acc.gain(i, t + 1) = acc.gain(i, t) + step_gain;
            }
            acc.cash(i, t) = acc.value(i, t) - held_value;
        }
    }
    acc.cost = acc.value - acc.gain;
    acc.initial_cost = acc.cost.col(0);
    acc.orthogonal = acc.cost.colwise() - acc.initial_cost;
    return acc;
}

// ============================================================================
// Quantile fans
// ============================================================================

struct QuantileTable {
    std::vector<double> probs;
    Eigen::MatrixXd quantiles;  // times x probs
    Eigen::VectorXd mean;       // per time
};

/// Empirical quantile with linear interpolation between order statistics
/// (h = (n-1) p), on an already sorted sample.
[[nodiscard]] inline double sorted_quantile(std::span<const double> sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Per-column quantiles and mean of an N x time matrix.
[[nodiscard]] inline QuantileTable quantile_fan(const Eigen::MatrixXd& matrix, std::vector<double> probs) {
    if (matrix.rows() == 0 || matrix.cols() == 0) throw DimensionError("matrix", "quantile_fan: empty matrix");
    for (double p : probs)
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile_fan: quantile level outside [0, 1]");
    QuantileTable tab;
    tab.probs = std::move(probs);
    tab.quantiles.resize(matrix.cols(), static_cast<Eigen::Index>(tab.probs.size()));
    tab.mean = matrix.colwise().mean().transpose();
    std::vector<double> col(static_cast<std::size_t>(matrix.rows()));
    for (Eigen::Index t = 0; t < matrix.cols(); ++t) {
        for (Eigen::Index i = 0; i < matrix.rows(); ++i) col[static_cast<std::size_t>(i)] = matrix(i, t);
        std::sort(col.begin(), col.end());
        for (std::size_t q = 0; q < tab.probs.size(); ++q)
            tab.quantiles(t, static_cast<Eigen::Index>(q)) = sorted_quantile(col, tab.probs[q]);
    }
    return tab;
}

}  // namespace hmc
