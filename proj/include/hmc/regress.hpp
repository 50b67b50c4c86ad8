// Least squares by Householder QR with column pivoting, and the per-step
// joint value/hedge regression of the hedged Monte Carlo backward induction.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmc/basis.hpp"
#include "hmc/core.hpp"

namespace hmc {

struct LeastSquaresSolution {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    std::size_t rank = 0;
    double residual_sum_squares = 0.0;
    /// Columns that were dropped as numerically dependent.
    std::vector<std::size_t> dropped;
};

/// Columns whose pivoted diagonal falls below this fraction of the largest
/// accepted diagonal are treated as dependent.
inline constexpr double default_rank_tolerance = 1e-10;

/// Pivoted QR where pivoting is restricted to one column group at a time:
/// every column of group 0 is considered before any column of group 1, and
/// so on. Dependent columns get coefficient zero (basic solution).
[[nodiscard]] inline LeastSquaresSolution solve_least_squares_grouped(const Eigen::MatrixXd& design,
                                                                      const Eigen::VectorXd& target,
                                                                      std::span<const int> groups,
                                                                      double rank_tolerance = default_rank_tolerance) {
    const Eigen::Index n = design.rows(), p = design.cols();
    if (n < 1 || p < 1) throw DimensionError("system", "solve_least_squares: empty system");
    if (target.size() != n)
        throw DimensionError("rows", "solve_least_squares: target has " + std::to_string(target.size()) +
                                         " rows, design has " + std::to_string(n));
    if (groups.size() != static_cast<std::size_t>(p))
        throw DimensionError("columns", "solve_least_squares: one group id per column required");
    if (!design.allFinite() || !target.allFinite())
        throw DomainError("solve_least_squares: non-finite input");

    Eigen::MatrixXd a = design;
    Eigen::VectorXd qty = target;
    std::vector<char> used(static_cast<std::size_t>(p), 0);
    std::vector<Eigen::Index> pivots;
    std::vector<double> diag;
    LeastSquaresSolution sol;

    const int max_group = *std::max_element(groups.begin(), groups.end());
    double largest = 0.0;
    Eigen::Index row = 0;
    for (int g = 0; g <= max_group; ++g) {
        while (row < n) {
            Eigen::Index best = -1;
            double best_norm = -1.0;
            for (Eigen::Index c = 0; c < p; ++c) {
                if (used[static_cast<std::size_t>(c)] || groups[static_cast<std::size_t>(c)] != g) continue;
                const double nrm = a.col(c).segment(row, n - row).norm();
                if (nrm > best_norm) {
                    best_norm = nrm;
                    best = c;
                }
            }
            if (best < 0) break;
            const double ref = std::max(largest, best_norm);
            if (best_norm == 0.0 || best_norm <= rank_tolerance * ref) break;

            // Householder reflector zeroing a(row+1:, best)
            Eigen::VectorXd v = a.col(best).segment(row, n - row);
            const double alpha = v(0) >= 0.0 ? -best_norm : best_norm;
            v(0) -= alpha;
            const double vv = v.squaredNorm();
            if (vv > 0.0) {
                for (Eigen::Index c = 0; c < p; ++c) {
                    if (used[static_cast<std::size_t>(c)] || c == best) continue;
                    auto col = a.col(c).segment(row, n - row);
                    col -= v * (2.0 * v.dot(col) / vv);
                }
                auto tail = qty.segment(row, n - row);
                tail -= v * (2.0 * v.dot(tail) / vv);
            }
            a.col(best).segment(row, n - row).setZero();
            a(row, best) = alpha;

            used[static_cast<std::size_t>(best)] = 1;
            pivots.push_back(best);
            diag.push_back(alpha);
            largest = std::max(largest, best_norm);
            ++row;
        }
    }

    const auto r = static_cast<Eigen::Index>(pivots.size());
    Eigen::VectorXd z = Eigen::VectorXd::Zero(r);
    for (Eigen::Index l = r - 1; l >= 0; --l) {
        double s = qty(l);
        for (Eigen::Index m = l + 1; m < r; ++m) s -= a(l, pivots[static_cast<std::size_t>(m)]) * z(m);
        z(l) = s / diag[static_cast<std::size_t>(l)];
    }

    sol.coefficients = Eigen::VectorXd::Zero(p);
    for (Eigen::Index l = 0; l < r; ++l) sol.coefficients(pivots[static_cast<std::size_t>(l)]) = z(l);
    for (Eigen::Index c = 0; c < p; ++c)
        if (!used[static_cast<std::size_t>(c)]) sol.dropped.push_back(static_cast<std::size_t>(c));
    sol.rank = static_cast<std::size_t>(r);
    sol.residuals = target - design * sol.coefficients;
    sol.residual_sum_squares = sol.residuals.squaredNorm();
    return sol;
}

/// Minimizes |design * beta - target|_2 with global column pivoting.
[[nodiscard]] inline LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& design,
                                                              const Eigen::VectorXd& target,
                                                              double rank_tolerance = default_rank_tolerance) {
    std::vector<int> groups(static_cast<std::size_t>(std::max<Eigen::Index>(design.cols(), 0)), 0);
    return solve_least_squares_grouped(design, target, groups, rank_tolerance);
}

// ============================================================================
// Stage regression
// ============================================================================

struct StageRegression {
    int t = 0;
    Eigen::VectorXd gamma;    // b value coefficients
    Eigen::MatrixXd psi;      // b x d hedge coefficients
    double local_risk = 0.0;  // rss / N
    std::size_t n_paths_used = 0;
    std::size_t rank = 0;
    Eigen::VectorXd residuals;
};

struct StageOptions {
    /// When false the hedge columns are omitted (psi = 0): a plain
    /// regression of the discounted successor value on K(X_t).
    bool hedge = true;
    double rank_tolerance = default_rank_tolerance;
};

/// Minimum number of paths for one stage: b(d+1) with hedging, b without.
[[nodiscard]] inline std::size_t min_paths_for(const BasisSpec& basis, bool hedge = true) {
    return basis.size() * (hedge ? basis.n_assets() + 1 : 1);
}

/// Builds the N x (b + b d) design
///   [ K_a(X_t^i) | H_{a,k}(X_t^i) (X_{t+1,k}^i / rho - X_{t,k}^i) ]
/// (hedge column of element a and asset k at b + a d + k) against the target
/// V_{t+1}^i / rho, and solves it with value columns pivoted first.
[[nodiscard]] inline StageRegression fs_stage_regression(const Eigen::MatrixXd& x_t, const Eigen::MatrixXd& x_next,
                                                         const Eigen::VectorXd& v_next, const BasisSpec& basis,
                                                         double rho, const StageOptions& opts = {}, int t = 0) {
    const Eigen::Index n = x_t.rows();
    const auto d = static_cast<Eigen::Index>(basis.n_assets());
    const auto b = static_cast<Eigen::Index>(basis.size());
    if (x_t.cols() != d || x_next.cols() != d)
        throw DimensionError("assets", "fs_stage_regression: state width differs from basis asset count");
    if (x_next.rows() != n || v_next.size() != n)
        throw DimensionError("paths", "fs_stage_regression: path counts differ between inputs");
    if (!(rho > 0.0)) throw DomainError("fs_stage_regression: discount factor must be > 0");
    const std::size_t need = min_paths_for(basis, opts.hedge);
    if (static_cast<std::size_t>(n) < need)
        throw DimensionError("paths", "fs_stage_regression: insufficient paths (" + std::to_string(n) +
                                          " < " + std::to_string(need) + ")");

    const Eigen::Index p = opts.hedge ? b * (d + 1) : b;
    Eigen::MatrixXd design(n, p);
    Eigen::VectorXd state(d);
    const double inv_rho = 1.0 / rho;
    for (Eigen::Index i = 0; i < n; ++i) {
        state = x_t.row(i).transpose();
        design.row(i).head(b) = eval_value_basis(basis, state).transpose();
        if (!opts.hedge) continue;
        const Eigen::MatrixXd h = eval_hedge_basis(basis, state);
        for (Eigen::Index a = 0; a < b; ++a)
            for (Eigen::Index k = 0; k < d; ++k)
                design(i, b + a * d + k) = h(a, k) * (inv_rho * x_next(i, k) - x_t(i, k));
    }
    std::vector<int> groups(static_cast<std::size_t>(p), 1);
    std::fill_n(groups.begin(), b, 0);

    const LeastSquaresSolution sol =
        solve_least_squares_grouped(design, inv_rho * v_next, groups, opts.rank_tolerance);

    StageRegression out;
    out.t = t;
    out.gamma = sol.coefficients.head(b);
    out.psi = Eigen::MatrixXd::Zero(b, d);
    if (opts.hedge)
        for (Eigen::Index a = 0; a < b; ++a)
            for (Eigen::Index k = 0; k < d; ++k) out.psi(a, k) = sol.coefficients(b + a * d + k);
    out.local_risk = sol.residual_sum_squares / static_cast<double>(n);
    out.n_paths_used = static_cast<std::size_t>(n);
    out.rank = sol.rank;
    out.residuals = sol.residuals;
    return out;
}

/// Fitted value gamma . K(x).
[[nodiscard]] inline double fitted_value(const StageRegression& stage, const BasisSpec& basis,
                                         const Eigen::VectorXd& x) {
    return stage.gamma.dot(eval_value_basis(basis, x));
}

/// Hedge ratio per asset: xi_k(x) = sum_a psi(a,k) H_{a,k}(x).
[[nodiscard]] inline Eigen::VectorXd hedge_ratio(const StageRegression& stage, const BasisSpec& basis,
                                                 const Eigen::VectorXd& x) {
    const Eigen::MatrixXd h = eval_hedge_basis(basis, x);
    return h.cwiseProduct(stage.psi).colwise().sum().transpose();
}

}  // namespace hmc
