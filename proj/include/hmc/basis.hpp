// Value-function basis K_a and the induced hedge basis H_a = grad K_a.
//
// Monomials in the scaled state x~ = x / scale. Tensor mode enumerates
// exponent multi-indices (e_1, ..., e_d) in lexicographic order with e_1 the
// most significant digit, so degree 1 in two assets gives
// (1, x2, x1, x1 x2). Additive mode gives 1 followed by x_k^1..x_k^deg for
// each asset k in turn.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmc/core.hpp"

namespace hmc {

enum class BasisFamily { monomial };

[[nodiscard]] inline std::optional<BasisFamily> parse_basis_family(const std::string& name) {
    if (name == "monomial") return BasisFamily::monomial;
    return std::nullopt;
}

class BasisSpec {
public:
    BasisSpec(BasisFamily family, int degree, std::size_t n_assets, bool tensor,
              std::vector<double> scaling = {})
        : family_(family), degree_(degree), n_assets_(n_assets), tensor_(tensor),
          scaling_(std::move(scaling)) {
        if (degree < 0) throw DomainError("BasisSpec: degree must be >= 0");
        if (n_assets == 0) throw DomainError("BasisSpec: need at least one asset");
        if (scaling_.empty()) scaling_.assign(n_assets, 1.0);
        if (scaling_.size() != n_assets)
            throw DimensionError("assets", "BasisSpec: scaling has " + std::to_string(scaling_.size()) +
                                               " entries for " + std::to_string(n_assets) + " assets");
        for (double s : scaling_)
            if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("BasisSpec: scaling factors must be > 0");
        build_exponents();
    }

    /// Monomial basis of the given degree with unit scaling.
    static BasisSpec monomial(int degree, std::size_t n_assets = 1, bool tensor = true) {
        return {BasisFamily::monomial, degree, n_assets, tensor};
    }

    [[nodiscard]] BasisSpec with_scaling(std::vector<double> scaling) const {
        return {family_, degree_, n_assets_, tensor_, std::move(scaling)};
    }

    /// Scale each asset by its cross-sectional mean price at t = 0.
    [[nodiscard]] BasisSpec with_auto_scaling(const PathSet& paths) const {
        if (paths.n_assets() != n_assets_)
            throw DimensionError("assets", "BasisSpec: path set asset count differs from basis");
        std::vector<double> s(n_assets_, 0.0);
        for (std::size_t i = 0; i < paths.n_paths(); ++i)
            for (std::size_t k = 0; k < n_assets_; ++k) s[k] += paths(i, 0, k);
        for (double& v : s) v /= static_cast<double>(paths.n_paths());
        return with_scaling(std::move(s));
    }

    [[nodiscard]] BasisFamily family() const { return family_; }
    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] std::size_t n_assets() const { return n_assets_; }
    [[nodiscard]] bool tensor() const { return tensor_; }
    [[nodiscard]] const std::vector<double>& scaling() const { return scaling_; }
    /// Number of value-basis elements b.
    [[nodiscard]] std::size_t size() const { return exponents_.size(); }
    [[nodiscard]] const std::vector<std::vector<int>>& exponents() const { return exponents_; }

    /// Index of the constant element (always 0 for monomials).
    [[nodiscard]] static constexpr std::size_t constant_index() { return 0; }

private:
    void build_exponents() {
        const auto d = n_assets_;
        const auto base = static_cast<std::size_t>(degree_) + 1;
        exponents_.clear();
        if (tensor_) {
            std::size_t count = 1;
            for (std::size_t k = 0; k < d; ++k) count *= base;
            exponents_.reserve(count);
            for (std::size_t a = 0; a < count; ++a) {
                std::vector<int> e(d);
                std::size_t rest = a;
                for (std::size_t k = d; k-- > 0;) {
                    e[k] = static_cast<int>(rest % base);
                    rest /= base;
                }
                exponents_.push_back(std::move(e));
            }
        } else {
            exponents_.emplace_back(d, 0);
            for (std::size_t k = 0; k < d; ++k)
                for (int p = 1; p <= degree_; ++p) {
                    std::vector<int> e(d, 0);
                    e[k] = p;
                    exponents_.push_back(std::move(e));
                }
        }
    }

    BasisFamily family_;
    int degree_;
    std::size_t n_assets_;
    bool tensor_;
    std::vector<double> scaling_;
    std::vector<std::vector<int>> exponents_;
};

namespace detail {

inline void check_state(const BasisSpec& spec, std::size_t n) {
    if (n != spec.n_assets())
        throw DimensionError("assets", "basis: state has " + std::to_string(n) + " components, basis expects " +
                                           std::to_string(spec.n_assets()));
}

// powers(k, e) = (x_k / scale_k)^e for e = 0..degree
inline Eigen::MatrixXd scaled_powers(const BasisSpec& spec, std::span<const double> x) {
    const auto d = static_cast<Eigen::Index>(spec.n_assets());
    Eigen::MatrixXd pw(d, spec.degree() + 1);
    for (Eigen::Index k = 0; k < d; ++k) {
        const double xs = x[static_cast<std::size_t>(k)] / spec.scaling()[static_cast<std::size_t>(k)];
        pw(k, 0) = 1.0;
        for (int e = 1; e <= spec.degree(); ++e) pw(k, e) = pw(k, e - 1) * xs;
    }
    return pw;
}

}  // namespace detail

/// [K_1(x~), ..., K_b(x~)].
[[nodiscard]] inline Eigen::VectorXd eval_value_basis(const BasisSpec& spec, std::span<const double> x) {
    detail::check_state(spec, x.size());
    const Eigen::MatrixXd pw = detail::scaled_powers(spec, x);
    Eigen::VectorXd out(static_cast<Eigen::Index>(spec.size()));
    for (std::size_t a = 0; a < spec.size(); ++a) {
        double v = 1.0;
        const auto& e = spec.exponents()[a];
        for (std::size_t k = 0; k < e.size(); ++k) v *= pw(static_cast<Eigen::Index>(k), e[k]);
        out(static_cast<Eigen::Index>(a)) = v;
    }
    return out;
}

/// b x d matrix of dK_a/dx_k in currency-of-claim per currency-of-asset-k,
/// i.e. with the chain-rule factor 1/scale_k.
[[nodiscard]] inline Eigen::MatrixXd eval_hedge_basis(const BasisSpec& spec, std::span<const double> x) {
    detail::check_state(spec, x.size());
    const Eigen::MatrixXd pw = detail::scaled_powers(spec, x);
    const auto d = spec.n_assets();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(spec.size()), static_cast<Eigen::Index>(d));
    for (std::size_t a = 0; a < spec.size(); ++a) {
        const auto& e = spec.exponents()[a];
        for (std::size_t k = 0; k < d; ++k) {
            if (e[k] == 0) continue;
            double v = e[k] * pw(static_cast<Eigen::Index>(k), e[k] - 1) / spec.scaling()[k];
            for (std::size_t j = 0; j < d; ++j)
                if (j != k) v *= pw(static_cast<Eigen::Index>(j), e[j]);
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k)) = v;
        }
    }
    return out;
}

inline Eigen::VectorXd eval_value_basis(const BasisSpec& spec, const Eigen::VectorXd& x) {
    return eval_value_basis(spec, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

inline Eigen::MatrixXd eval_hedge_basis(const BasisSpec& spec, const Eigen::VectorXd& x) {
    return eval_hedge_basis(spec, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

/// Rows K(X_i) for every row X_i of an N x d state matrix.
[[nodiscard]] inline Eigen::MatrixXd value_basis_rows(const BasisSpec& spec, const Eigen::MatrixXd& states) {
    Eigen::MatrixXd out(states.rows(), static_cast<Eigen::Index>(spec.size()));
    Eigen::VectorXd row(states.cols());
    for (Eigen::Index i = 0; i < states.rows(); ++i) {
        row = states.row(i).transpose();
        out.row(i) = eval_value_basis(spec, row).transpose();
    }
    return out;
}

}  // namespace hmc
