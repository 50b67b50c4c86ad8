// Core containers shared by every module: time grids, simulated price paths,
// oracle cash flows, and the error types thrown across the library.
#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hmc {

// ============================================================================
// Errors
// ============================================================================

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    DimensionError(std::string axis, const std::string& what)
        : Error(what), axis_(std::move(axis)) {}
    [[nodiscard]] const std::string& axis() const { return axis_; }

private:
    std::string axis_;
};

class NonFiniteError : public Error {
public:
    NonFiniteError(std::size_t path, std::size_t t, std::size_t asset, const std::string& what)
        : Error(what), path_(path), t_(t), asset_(asset) {}
    [[nodiscard]] std::size_t path() const { return path_; }
    [[nodiscard]] std::size_t time() const { return t_; }
    [[nodiscard]] std::size_t asset() const { return asset_; }

private:
    std::size_t path_, t_, asset_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(what), line_(line) {}
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// ============================================================================
// TimeGrid
// ============================================================================

/// Uniform step grid t0, t0+1, ..., t0+n_steps with step length dt (years)
/// and a constant continuously compounded rate r.
class TimeGrid {
public:
    TimeGrid(int t0, int n_steps, double dt, double r)
        : t0_(t0), n_steps_(n_steps), dt_(dt), r_(r) {
        if (n_steps < 1) throw DomainError("TimeGrid: n_steps must be >= 1");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("TimeGrid: dt must be > 0");
        if (!std::isfinite(r)) throw DomainError("TimeGrid: rate must be finite");
    }
    TimeGrid(int n_steps, double dt, double r) : TimeGrid(0, n_steps, dt, r) {}

    [[nodiscard]] int t0() const { return t0_; }
    [[nodiscard]] int n_steps() const { return n_steps_; }
    [[nodiscard]] std::size_t n_times() const { return static_cast<std::size_t>(n_steps_) + 1; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] double rate() const { return r_; }
    [[nodiscard]] double horizon() const { return dt_ * n_steps_; }

    [[nodiscard]] TimeGrid with_rate(double r) const { return {t0_, n_steps_, dt_, r}; }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    int t0_;
    int n_steps_;
    double dt_;
    double r_;
};

/// One-step growth factor rho = exp(r dt).
[[nodiscard]] inline double discount_factor(const TimeGrid& grid) {
    return std::exp(grid.rate() * grid.dt());
}

// ============================================================================
// PathSet
// ============================================================================

/// N scenarios x (n_steps+1) times x d assets, path-major storage.
/// Prices are undiscounted currency amounts.
class PathSet {
public:
    PathSet(std::size_t n_paths, std::size_t n_assets, TimeGrid grid)
        : n_paths_(n_paths), n_assets_(n_assets), grid_(grid),
          prices_(n_paths * grid.n_times() * n_assets, 0.0) {
        if (n_paths == 0) throw DimensionError("paths", "PathSet: need at least one path");
        if (n_assets == 0) throw DimensionError("assets", "PathSet: need at least one asset");
    }

    [[nodiscard]] std::size_t n_paths() const { return n_paths_; }
    [[nodiscard]] std::size_t n_assets() const { return n_assets_; }
    [[nodiscard]] std::size_t n_times() const { return grid_.n_times(); }
    [[nodiscard]] const TimeGrid& grid() const { return grid_; }

    [[nodiscard]] double operator()(std::size_t i, std::size_t t, std::size_t k) const {
        return prices_[index(i, t, k)];
    }
    double& operator()(std::size_t i, std::size_t t, std::size_t k) {
        return prices_[index(i, t, k)];
    }

    /// Prices of all paths at time t as an N x d matrix.
    [[nodiscard]] Eigen::MatrixXd slice(std::size_t t) const {
        Eigen::MatrixXd out(n_paths_, n_assets_);
        for (std::size_t i = 0; i < n_paths_; ++i)
            for (std::size_t k = 0; k < n_assets_; ++k) out(i, k) = (*this)(i, t, k);
        return out;
    }

    /// All times of asset k as an N x (T+1) matrix.
    [[nodiscard]] Eigen::MatrixXd asset_matrix(std::size_t k) const {
        Eigen::MatrixXd out(n_paths_, n_times());
        for (std::size_t i = 0; i < n_paths_; ++i)
            for (std::size_t t = 0; t < n_times(); ++t) out(i, t) = (*this)(i, t, k);
        return out;
    }

    [[nodiscard]] const std::vector<double>& raw() const { return prices_; }

    /// Throws NonFiniteError at the first non-finite entry, DomainError at
    /// the first nonpositive one when require_positive is set.
    void check(bool require_positive = true) const {
        for (std::size_t i = 0; i < n_paths_; ++i)
            for (std::size_t t = 0; t < n_times(); ++t)
                for (std::size_t k = 0; k < n_assets_; ++k) {
                    double x = (*this)(i, t, k);
                    if (!std::isfinite(x))
                        throw NonFiniteError(i, t, k, "PathSet: non-finite price at (path " +
                                                          std::to_string(i) + ", t " + std::to_string(t) +
                                                          ", asset " + std::to_string(k) + ")");
                    if (require_positive && !(x > 0.0))
                        throw DomainError("PathSet: nonpositive price at (path " + std::to_string(i) +
                                          ", t " + std::to_string(t) + ", asset " + std::to_string(k) + ")");
                }
    }

private:
    [[nodiscard]] std::size_t index(std::size_t i, std::size_t t, std::size_t k) const {
        return (i * grid_.n_times() + t) * n_assets_ + k;
    }

    std::size_t n_paths_;
    std::size_t n_assets_;
    TimeGrid grid_;
    std::vector<double> prices_;
};

// ============================================================================
// CashFlowSet
// ============================================================================

class CashFlowSet {
public:
    CashFlowSet(std::size_t n_paths, TimeGrid grid)
        : grid_(grid), flows_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_paths),
                                                    static_cast<Eigen::Index>(grid.n_times()))) {}
    CashFlowSet(Eigen::MatrixXd flows, TimeGrid grid) : grid_(grid), flows_(std::move(flows)) {
        if (flows_.cols() != static_cast<Eigen::Index>(grid_.n_times()))
            throw DimensionError("time", "CashFlowSet: column count must equal grid times");
    }

    [[nodiscard]] std::size_t n_paths() const { return static_cast<std::size_t>(flows_.rows()); }
    [[nodiscard]] std::size_t n_times() const { return grid_.n_times(); }
    [[nodiscard]] const TimeGrid& grid() const { return grid_; }

    [[nodiscard]] double operator()(std::size_t i, std::size_t t) const {
        return flows_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
    }
    double& operator()(std::size_t i, std::size_t t) {
        return flows_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
    }
    [[nodiscard]] const Eigen::MatrixXd& matrix() const { return flows_; }

private:
    TimeGrid grid_;
    Eigen::MatrixXd flows_;
};

/// Checks that paths and flows describe the same scenarios on the same grid.
/// Returns the pair unchanged; throws on the first mismatch.
inline std::pair<const PathSet&, const CashFlowSet&> validate_aligned(const PathSet& paths,
                                                                      const CashFlowSet& flows) {
    if (paths.n_paths() != flows.n_paths())
        throw DimensionError("paths", "validate_aligned: path count mismatch (" +
                                          std::to_string(paths.n_paths()) + " paths vs " +
                                          std::to_string(flows.n_paths()) + " flows)");
    if (paths.grid() != flows.grid())
        throw DimensionError("time", "validate_aligned: time grids differ");
    for (std::size_t i = 0; i < flows.n_paths(); ++i)
        for (std::size_t t = 0; t < flows.n_times(); ++t)
            if (!std::isfinite(flows(i, t)))
                throw NonFiniteError(i, t, 0, "validate_aligned: non-finite cash flow at (" +
                                                  std::to_string(i) + ", " + std::to_string(t) + ")");
    for (std::size_t i = 0; i < paths.n_paths(); ++i)
        for (std::size_t t = 0; t < paths.n_times(); ++t)
            for (std::size_t k = 0; k < paths.n_assets(); ++k)
                if (!std::isfinite(paths(i, t, k)))
                    throw NonFiniteError(i, t, k, "validate_aligned: non-finite price at (" +
                                                      std::to_string(i) + ", " + std::to_string(t) +
                                                      ", " + std::to_string(k) + ")");
    return {paths, flows};
}

}  // namespace hmc
