#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "hmc/analytic.hpp"
#include "hmc/engine.hpp"
#include "hmc/scenarios/gbm.hpp"

using namespace hmc;

namespace {

/// Every path identical, growing at rate mu per year.
PathSet deterministic_paths(std::size_t n, const TimeGrid& grid, double x0, double mu) {
    PathSet p(n, 1, grid);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < p.n_times(); ++t) p(i, t, 0) = x0 * std::exp(mu * grid.dt() * static_cast<double>(t));
    return p;
}

PathSet gbm(double x0, double mu, double sigma, const TimeGrid& g, std::size_t n, std::uint64_t seed) {
    return scenarios::simulate_gbm(scenarios::GbmParams::independent({mu}, {sigma}, {x0}), g, n, seed);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

}  // namespace

// ============================================================================
// price_european
// ============================================================================

TEST(PriceEuropean, DeterministicWorldIsDiscountedIntrinsic) {
    const TimeGrid g(20, 0.05, 0.04);
    const PathSet p = deterministic_paths(12, g, 100.0, 0.10);
    const auto basis = BasisSpec::monomial(2, 1).with_auto_scaling(p);
    const auto res = price_european(p, ClaimSpec::european(call_payoff(95.0)), basis);
    const double rho = discount_factor(g);
    const double expected = std::pow(rho, -20) * std::max(p(0, 20, 0) - 95.0, 0.0);
    for (Eigen::Index i = 0; i < res.value_t0.size(); ++i) EXPECT_NEAR(res.value_t0(i), expected, 1e-10);
    for (const auto& st : res.stages) EXPECT_NEAR(st.local_risk, 0.0, 1e-20);
}

TEST(PriceEuropean, BlackScholesAtTheMoney) {
    const TimeGrid g(65, 0.25 / 65, 0.05);
    const PathSet p = gbm(100, 0.0, 0.3, g, 5000, 1);
    const auto basis = BasisSpec::monomial(2, 1).with_auto_scaling(p);
    const auto res = price_european(p, ClaimSpec::european(call_payoff(100.0)), basis);
    const double bs = analytic::black_scholes_call(100, 100, 0.05, 0.3, 0.25).price;
    EXPECT_NEAR(res.price(), bs, std::max(0.25, 3 * res.std_error()));
    EXPECT_EQ(res.stages.size(), 65u);
    EXPECT_EQ(res.stages.front().t, 0);
}

TEST(PriceEuropean, RejectsWrongClaimAndTooFewPaths) {
    const TimeGrid g(4, 0.25, 0.0);
    const PathSet p = gbm(100, 0.0, 0.2, g, 5, 2);
    const auto basis = BasisSpec::monomial(2, 1);
    EXPECT_THROW((void)price_european(p, ClaimSpec::real_option(1.0, 0, 4), basis), DomainError);
    EXPECT_THROW((void)price_european(p, ClaimSpec::european(call_payoff(100)), basis), DimensionError);
}

// Drift insensitivity: common shocks, mu = 0 vs 0.15.
TEST(PriceEuropean, DriftInsensitive) {
    const TimeGrid g(40, 0.25 / 40, 0.05);
    const PathSet p0 = gbm(100, 0.0, 0.3, g, 4000, 3);
    const PathSet p1 = gbm(100, 0.15, 0.3, g, 4000, 3);
    const auto basis = BasisSpec::monomial(2, 1).with_scaling({100.0});
    const auto r0 = price_european(p0, ClaimSpec::european(call_payoff(100)), basis);
    const auto r1 = price_european(p1, ClaimSpec::european(call_payoff(100)), basis);
    const double se = std::hypot(r0.std_error(), r1.std_error());
    EXPECT_LE(std::abs(r0.price() - r1.price()), 3 * se);
}

TEST(PriceEuropean, CostResidualsHaveZeroMean) {
    const TimeGrid g(20, 0.25 / 20, 0.05);
    const PathSet p = gbm(100, 0.1, 0.3, g, 3000, 4);
    const auto basis = BasisSpec::monomial(2, 1).with_auto_scaling(p);
    const auto res = price_european(p, ClaimSpec::european(call_payoff(100)), basis);
    for (const auto& st : res.stages) {
        const double n = static_cast<double>(st.residuals.size());
        const double mean = st.residuals.mean();
        const double sd = std::sqrt((st.residuals.array() - mean).square().sum() / (n - 1));
        EXPECT_LE(std::abs(mean), 3 * sd / std::sqrt(n) + 1e-12) << "stage " << st.t;
    }
}

// ============================================================================
// project_value_stream
// ============================================================================

TEST(ProjectValueStream, ZeroFlowsGiveZero) {
    const TimeGrid g(12, 1.0 / 12, 0.08);
    const PathSet p = gbm(100, 0.0, 0.3, g, 50, 5);
    const CashFlowSet flows(50, g);
    const auto v = project_value_stream(p, flows, BasisSpec::monomial(1, 1).with_auto_scaling(p));
    EXPECT_TRUE(v.isZero(0.0));
}

TEST(ProjectValueStream, ConstantFlowZeroRate) {
    const TimeGrid g(10, 1.0, 0.0);
    const PathSet p = gbm(100, 0.0, 0.3, g, 30, 6);
    CashFlowSet flows(30, g);
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t t = 0; t <= 10; ++t) flows(i, t) = 2.5;
    const auto v = project_value_stream(p, flows, BasisSpec::monomial(0, 1));
    for (Eigen::Index t = 0; t <= 10; ++t)
        for (Eigen::Index i = 0; i < 30; ++i) EXPECT_NEAR(v(i, t), 2.5 * static_cast<double>(10 - t + 1), 1e-12);
}

TEST(ProjectValueStream, ConstantFlowGeometricSeries) {
    const TimeGrid g(36, 1.0 / 12, 0.08);
    const PathSet p = gbm(100, 0.05, 0.2, g, 40, 7);
    CashFlowSet flows(40, g);
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t t = 0; t <= 36; ++t) flows(i, t) = 0.7;
    const auto v = project_value_stream(p, flows, BasisSpec::monomial(2, 1).with_auto_scaling(p));
    const double rho = discount_factor(g);
    for (int t = 0; t <= 36; ++t) {
        // independent evaluation: sum the discounted terms one by one
        double expected = 0.0;
        for (int s = t; s <= 36; ++s) expected += 0.7 * std::pow(rho, -(s - t));
        const double closed = 0.7 * (1 - std::pow(rho, -(36 - t + 1))) / (1 - 1 / rho);
        EXPECT_NEAR(expected, closed, 1e-12);
        for (Eigen::Index i = 0; i < 40; ++i) EXPECT_NEAR(v(i, t), expected, 1e-9);
    }
}

// ============================================================================
// exercise_statistics
// ============================================================================

TEST(ExerciseStatistics, NoExerciseStage) {
    const auto st = exercise_statistics(vec({1, 2, -3}), vec({5, 5, 5}), vec({5, 5, 5}));
    EXPECT_TRUE(st.exercise_set.empty());
    EXPECT_FALSE(st.trigger.has_value());
    EXPECT_FALSE(st.probability.has_value());
}

TEST(ExerciseStatistics, ThreePathEnumeration) {
    const Eigen::VectorXd intrinsic = vec({5, -1, 3}), cont = vec({4, 2, 3});
    const Eigen::VectorXd value = intrinsic.cwiseMax(0.0).cwiseMax(cont);
    const auto st = exercise_statistics(intrinsic, value, cont);
    EXPECT_EQ(st.exercise_set, (std::vector<std::size_t>{0, 2}));
    ASSERT_TRUE(st.trigger.has_value());
    EXPECT_EQ(*st.trigger, 3.0);
    ASSERT_TRUE(st.probability.has_value());
    EXPECT_DOUBLE_EQ(*st.probability, 2.0 / 3.0);
}

TEST(ExerciseStatistics, UniformExercise) {
    const auto st = exercise_statistics(vec({2, 2, 2, 2}), vec({2, 2, 2, 2}), vec({1, 0, -1, 2}));
    EXPECT_EQ(st.exercise_set.size(), 4u);
    EXPECT_EQ(*st.trigger, 2.0);
    EXPECT_EQ(*st.probability, 1.0);
}

// ============================================================================
// price_real_option
// ============================================================================

namespace {

CashFlowSet constant_flows(std::size_t n, const TimeGrid& g, double c) {
    CashFlowSet f(n, g);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < g.n_times(); ++t) f(i, t) = c;
    return f;
}

}  // namespace

TEST(PriceRealOption, SingleDateDeterministicStream) {
    const TimeGrid g(6, 1.0, 0.0);
    const PathSet p = gbm(100, 0.0, 0.2, g, 20, 8);
    const CashFlowSet flows = constant_flows(20, g, 1.0);  // V_t = 7 - t
    const auto basis = BasisSpec::monomial(0, 1);
    {
        const auto res = price_real_option(p, flows, ClaimSpec::real_option(0.5, 6, 6), basis);
        for (Eigen::Index i = 0; i < 20; ++i) EXPECT_NEAR(res.value_t0(i), 0.5, 1e-12);
        ASSERT_EQ(res.exercise.size(), 1u);
        EXPECT_EQ(res.exercise[0].exercise_set.size(), 20u);
    }
    {
        const auto res = price_real_option(p, flows, ClaimSpec::real_option(1.0, 6, 6), basis);
        EXPECT_TRUE(res.value_t0.isZero(0.0));
        EXPECT_TRUE(res.exercise[0].exercise_set.empty());
        EXPECT_FALSE(res.exercise[0].trigger.has_value());
    }
}

TEST(PriceRealOption, ZeroStrikeFloor) {
    const TimeGrid g(12, 1.0 / 12, 0.08);
    const PathSet p = scenarios::simulate_gbm(
        scenarios::GbmParams::independent({0.05, 0.0}, {0.3, 0.2}, {100, 50}), g, 400, 9);
    CashFlowSet flows(400, g);
    for (std::size_t i = 0; i < 400; ++i)
        for (std::size_t t = 0; t < g.n_times(); ++t) flows(i, t) = std::max(0.0, 0.01 * (p(i, t, 0) - p(i, t, 1)));
    const auto basis = BasisSpec::monomial(1, 2).with_auto_scaling(p);
    const auto res = price_real_option(p, flows, ClaimSpec::real_option(0.0, 0, 12), basis);
    for (int t = 0; t <= 12; ++t)
        for (Eigen::Index i = 0; i < 400; ++i) {
            EXPECT_GE(res.values(i, t), res.project_values(i, t));
            EXPECT_EQ(res.values(i, t), std::max({res.project_values(i, t), 0.0, res.continuation(i, t)}));
        }
    EXPECT_GE(res.value_t0.minCoeff(), 0.0);
}

TEST(PriceRealOption, BermudanDominatesSingleDate) {
    const TimeGrid g(24, 1.0 / 12, 0.08);
    const PathSet p = gbm(100, 0.1, 0.35, g, 2000, 10);
    CashFlowSet flows(2000, g);
    for (std::size_t i = 0; i < 2000; ++i)
        for (std::size_t t = 0; t < g.n_times(); ++t) flows(i, t) = 0.002 * p(i, t, 0);
    const auto basis = BasisSpec::monomial(2, 1).with_auto_scaling(p);
    const double k = 4.0;
    const auto berm = price_real_option(p, flows, ClaimSpec::real_option(k, 3, 18), basis);
    ClaimSpec single = ClaimSpec::real_option(k, 18, 18);
    single.valuation_step = 3;
    const auto euro = price_real_option(p, flows, single, basis);
    EXPECT_GE(berm.price(), euro.price() - 1e-9);
    for (int t = 3; t <= 18; ++t)
        for (Eigen::Index i = 0; i < 2000; ++i)
            EXPECT_GE(berm.values(i, t), std::max(berm.project_values(i, t) - k, 0.0));
}

TEST(PriceRealOption, StatisticsPerWindowDate) {
    const TimeGrid g(12, 1.0 / 12, 0.08);
    const PathSet p = gbm(100, 0.1, 0.35, g, 500, 11);
    CashFlowSet flows(500, g);
    for (std::size_t i = 0; i < 500; ++i)
        for (std::size_t t = 0; t < g.n_times(); ++t) flows(i, t) = 0.01 * p(i, t, 0);
    const auto res = price_real_option(p, flows, ClaimSpec::real_option(10.0, 2, 10),
                                       BasisSpec::monomial(2, 1).with_auto_scaling(p));
    ASSERT_EQ(res.exercise.size(), 9u);
    for (std::size_t j = 0; j < res.exercise.size(); ++j) {
        const auto& st = res.exercise[j];
        EXPECT_EQ(st.t, 2 + static_cast<int>(j));
        EXPECT_EQ(st.trigger.has_value(), !st.exercise_set.empty());
        if (st.probability) {
            EXPECT_GE(*st.probability, 0.0);
            EXPECT_LE(*st.probability, 1.0);
        }
    }
    EXPECT_EQ(res.stages.size(), 8u);
}

TEST(PriceRealOption, WindowErrors) {
    const TimeGrid g(6, 1.0, 0.0);
    const PathSet p = gbm(100, 0.0, 0.2, g, 20, 8);
    const CashFlowSet flows = constant_flows(20, g, 1.0);
    const auto basis = BasisSpec::monomial(0, 1);
    EXPECT_THROW((void)price_real_option(p, flows, ClaimSpec::real_option(1.0, 5, 3), basis), DomainError);
    EXPECT_THROW((void)price_real_option(p, flows, ClaimSpec::real_option(1.0, 0, 7), basis), DomainError);
    EXPECT_THROW((void)price_real_option(p, flows, ClaimSpec::real_option(-1.0, 0, 6), basis), DomainError);
}

// ============================================================================
// reconstruct_hedge_account
// ============================================================================

TEST(HedgeAccount, NullClaim) {
    const TimeGrid g(10, 0.1, 0.05);
    const PathSet p = gbm(100, 0.0, 0.3, g, 100, 12);
    const auto basis = BasisSpec::monomial(2, 1).with_auto_scaling(p);
    const auto res = price_european(p, ClaimSpec::european([](std::span<const double>) { return 0.0; }), basis);
    const auto acc = reconstruct_hedge_account(res, p);
    EXPECT_TRUE(acc.value.isZero(0.0));
    EXPECT_TRUE(acc.hedge[0].isZero(0.0));
    EXPECT_TRUE(acc.cost.isZero(0.0));
    EXPECT_TRUE(acc.orthogonal.isZero(0.0));
}

TEST(HedgeAccount, DeterministicWorldHasConstantCost) {
    const TimeGrid g(15, 0.1, 0.03);
    const PathSet p = deterministic_paths(10, g, 100.0, 0.08);
    const auto basis = BasisSpec::monomial(2, 1).with_auto_scaling(p);
    const auto res = price_european(p, ClaimSpec::european(call_payoff(100)), basis);
    const auto acc = reconstruct_hedge_account(res, p);
    EXPECT_LT(acc.orthogonal.cwiseAbs().maxCoeff(), 1e-10);
    for (Eigen::Index t = 0; t < acc.cost.cols(); ++t) EXPECT_NEAR(acc.cost(0, t), acc.initial_cost(0), 1e-10);
}

TEST(HedgeAccount, BinomialReplicationCostIsFlat) {
    const TimeGrid g(1, 1.0, 0.0);
    PathSet p(4, 1, g);
    const double up[] = {110, 90, 110, 90};
    for (std::size_t i = 0; i < 4; ++i) {
        p(i, 0, 0) = 100;
        p(i, 1, 0) = up[i];
    }
    const auto basis = BasisSpec::monomial(1, 1).with_scaling({100.0});
    const auto res = price_european(p, ClaimSpec::european([](std::span<const double> x) { return x[0]; }), basis);
    const auto acc = reconstruct_hedge_account(res, p);
    for (Eigen::Index i = 0; i < 4; ++i) {
        EXPECT_NEAR(acc.cost(i, 1), acc.cost(i, 0), 1e-10);
        EXPECT_NEAR(acc.hedge[0](i, 0), 1.0, 1e-12);
    }
}

TEST(HedgeAccount, IdentitiesHold) {
    const TimeGrid g(12, 1.0 / 12, 0.05);
    const PathSet p = gbm(100, 0.1, 0.3, g, 500, 13);
    const auto basis = BasisSpec::monomial(2, 1).with_auto_scaling(p);
    const auto res = price_european(p, ClaimSpec::european(call_payoff(100)), basis);
    const auto acc = reconstruct_hedge_account(res, p);
    EXPECT_LT((acc.cost - (acc.value - acc.gain)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(acc.orthogonal.col(0).isZero(0.0));
    const double rho = discount_factor(g);
    for (Eigen::Index t = 0; t <= 12; ++t)
        for (Eigen::Index i = 0; i < 500; i += 37) {
            const double x_disc = p(static_cast<std::size_t>(i), static_cast<std::size_t>(t), 0) * std::pow(rho, -static_cast<double>(t));
            EXPECT_NEAR(acc.cash(i, t), acc.value(i, t) - acc.hedge[0](i, t) * x_disc, 1e-10);
        }
    // cost increments are the discounted stage residuals
    for (int t = 0; t < 12; ++t) {
        const Eigen::VectorXd inc = acc.cost.col(t + 1) - acc.cost.col(t);
        const Eigen::VectorXd expect = res.stage(t).residuals * std::pow(rho, -static_cast<double>(t));
        EXPECT_LT((inc - expect).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(HedgeAccount, MissingStage) {
    const TimeGrid g(6, 1.0, 0.0);
    const PathSet p = gbm(100, 0.0, 0.2, g, 20, 8);
    const auto res = price_real_option(p, constant_flows(20, g, 1.0), ClaimSpec::real_option(1.0, 2, 6),
                                       BasisSpec::monomial(0, 1));
    EXPECT_THROW((void)reconstruct_hedge_account(res, p), Error);
}

// ============================================================================
// quantile_fan
// ============================================================================

TEST(QuantileFan, ConstantMatrix) {
    const auto tab = quantile_fan(Eigen::MatrixXd::Constant(50, 4, 7.0), {0.05, 0.5, 0.95});
    EXPECT_TRUE((tab.quantiles.array() == 7.0).all());
    EXPECT_TRUE((tab.mean.array() == 7.0).all());
}

TEST(QuantileFan, OneToHundred) {
    Eigen::MatrixXd m(100, 1);
    for (int i = 0; i < 100; ++i) m(99 - i, 0) = i + 1;
    const auto tab = quantile_fan(m, {0.05, 0.95});
    EXPECT_NEAR(tab.quantiles(0, 0), 5.95, 1e-12);
    EXPECT_NEAR(tab.quantiles(0, 1), 95.05, 1e-12);
    EXPECT_NEAR(tab.mean(0), 50.5, 1e-12);
}

TEST(QuantileFan, MonotoneInLevel) {
    const TimeGrid g(10, 0.1, 0.0);
    const PathSet p = gbm(100, 0.0, 0.5, g, 300, 14);
    const auto tab = quantile_fan(p.asset_matrix(0), {0.05, 0.25, 0.5, 0.75, 0.95});
    for (Eigen::Index t = 0; t < tab.quantiles.rows(); ++t)
        for (Eigen::Index q = 1; q < tab.quantiles.cols(); ++q) EXPECT_LE(tab.quantiles(t, q - 1), tab.quantiles(t, q));
}

TEST(QuantileFan, Errors) {
    EXPECT_THROW((void)quantile_fan(Eigen::MatrixXd(0, 3), {0.5}), DimensionError);
    EXPECT_THROW((void)quantile_fan(Eigen::MatrixXd::Ones(3, 3), {1.5}), DomainError);
}
