// Derivative-free Nelder-Mead simplex minimizer.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace hmc::scenarios {

struct NelderMeadOptions {
    int max_iterations = 2000;
    double f_tolerance = 1e-10;  // relative spread of objective values
    double x_tolerance = 1e-8;   // simplex diameter
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Standard coefficients: reflection 1, expansion 2, contraction 1/2, shrink 1/2.
/// `steps` gives the initial simplex edge along each coordinate.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& start, const Eigen::VectorXd& steps,
                                    const NelderMeadOptions& opts = {}) {
    const Eigen::Index n = start.size();
    auto eval = [&](const Eigen::VectorXd& x) {
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };

    std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), start);
    std::vector<double> vals(static_cast<std::size_t>(n + 1));
    for (Eigen::Index j = 0; j < n; ++j) pts[static_cast<std::size_t>(j + 1)](j) += steps(j);
    for (std::size_t j = 0; j < pts.size(); ++j) vals[j] = eval(pts[j]);

    std::vector<std::size_t> order(pts.size());
    NelderMeadResult res;
    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

        double diameter = 0.0;
        for (const auto& p : pts) diameter = std::max(diameter, (p - pts[best]).lpNorm<Eigen::Infinity>());
        const double spread = std::abs(vals[worst] - vals[best]);
        if (spread <= opts.f_tolerance * (std::abs(vals[best]) + 1e-30) && diameter <= opts.x_tolerance) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (j != worst) centroid += pts[j];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
        const double fr = eval(reflected);
        if (fr < vals[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = eval(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = reflected;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const Eigen::VectorXd contracted =
            outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                    : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
        const double fc = eval(contracted);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = contracted;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j == best) continue;
            pts[j] = pts[best] + 0.5 * (pts[j] - pts[best]);
            vals[j] = eval(pts[j]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    res.x = pts[best];
    res.value = vals[best];
    return res;
}

}  // namespace hmc::scenarios
