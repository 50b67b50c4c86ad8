// Principal components of a multivariate innovation series.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "hmc/core.hpp"

namespace hmc::scenarios {

struct PcaModel {
    Eigen::VectorXd mean;        // d
    Eigen::MatrixXd components;  // d x d, column j is component j
    Eigen::VectorXd variances;   // descending

    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
};

/// Eigen-decomposition of the sample covariance (divisor T-1). Each
/// component's largest-magnitude entry is made positive.
[[nodiscard]] inline PcaModel fit_pca(const Eigen::MatrixXd& innovations) {
    const Eigen::Index n = innovations.rows(), d = innovations.cols();
    if (d < 1 || n <= d)
        throw DimensionError("observations", "fit_pca: need more observations than dimensions");
    if (!innovations.allFinite()) throw DomainError("fit_pca: non-finite innovation");
    PcaModel model;
    model.mean = innovations.colwise().mean().transpose();
    const Eigen::MatrixXd centered = innovations.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return eig.eigenvalues()(a) > eig.eigenvalues()(b); });
    model.components.resize(d, d);
    model.variances.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        Eigen::VectorXd v = eig.eigenvectors().col(order[static_cast<std::size_t>(j)]);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        model.components.col(j) = v;
        model.variances(j) = std::max(0.0, eig.eigenvalues()(order[static_cast<std::size_t>(j)]));
    }
    return model;
}

}  // namespace hmc::scenarios
