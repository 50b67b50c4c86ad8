#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hmc/basis.hpp"
#include "hmc/random.hpp"

using namespace hmc;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}
}  // namespace

TEST(ValueBasis, QuadraticPowers) {
    const auto spec = BasisSpec::monomial(2, 1);
    EXPECT_EQ(eval_value_basis(spec, vec({2.0})), vec({1, 2, 4}));
}

TEST(ValueBasis, TensorOrdering) {
    const auto spec = BasisSpec::monomial(1, 2, true);
    // (1, x2, x1, x1 x2)
    EXPECT_EQ(eval_value_basis(spec, vec({2.0, 3.0})), vec({1, 3, 2, 6}));
}

TEST(ValueBasis, ScalingNormalizesState) {
    const auto spec = BasisSpec::monomial(2, 1).with_scaling({100.0});
    EXPECT_EQ(eval_value_basis(spec, vec({100.0})), vec({1, 1, 1}));
}

TEST(ValueBasis, AdditiveLayout) {
    const auto spec = BasisSpec::monomial(2, 2, false);
    EXPECT_EQ(eval_value_basis(spec, vec({2.0, 3.0})), vec({1, 2, 4, 3, 9}));
}

TEST(ValueBasis, DimensionMismatch) {
    const auto spec = BasisSpec::monomial(2, 2);
    EXPECT_THROW((void)eval_value_basis(spec, vec({1.0})), DimensionError);
    EXPECT_THROW((void)eval_hedge_basis(spec, vec({1.0, 2.0, 3.0})), DimensionError);
}

TEST(HedgeBasis, DerivativeOfQuadratic) {
    const auto spec = BasisSpec::monomial(2, 1);
    const Eigen::MatrixXd h = eval_hedge_basis(spec, vec({2.0}));
    ASSERT_EQ(h.rows(), 3);
    ASSERT_EQ(h.cols(), 1);
    EXPECT_EQ(Eigen::VectorXd(h.col(0)), vec({0, 1, 4}));
}

TEST(HedgeBasis, ConstantBasisHasZeroGradient) {
    for (std::size_t d = 1; d <= 3; ++d) {
        const auto spec = BasisSpec::monomial(0, d);
        Eigen::VectorXd x = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), 3.0);
        EXPECT_TRUE(eval_hedge_basis(spec, x).isZero(0.0));
    }
}

TEST(HedgeBasis, TensorProductRule) {
    const auto spec = BasisSpec::monomial(1, 2, true);
    const Eigen::MatrixXd h = eval_hedge_basis(spec, vec({2.0, 3.0}));
    EXPECT_EQ(Eigen::VectorXd(h.col(0)), vec({0, 0, 1, 3}));
    EXPECT_EQ(Eigen::VectorXd(h.col(1)), vec({0, 1, 0, 2}));
}

TEST(HedgeBasis, ChainRuleScaling) {
    const auto spec = BasisSpec::monomial(2, 1).with_scaling({50.0});
    const Eigen::MatrixXd h = eval_hedge_basis(spec, vec({100.0}));
    EXPECT_DOUBLE_EQ(h(1, 0), 1.0 / 50.0);
    EXPECT_DOUBLE_EQ(h(2, 0), 2.0 * 2.0 / 50.0);
}

TEST(BasisSpec, CountFormula) {
    for (int deg = 0; deg <= 4; ++deg)
        for (std::size_t d = 1; d <= 3; ++d) {
            std::size_t tensor = 1;
            for (std::size_t k = 0; k < d; ++k) tensor *= static_cast<std::size_t>(deg + 1);
            EXPECT_EQ(BasisSpec::monomial(deg, d, true).size(), tensor);
            EXPECT_EQ(BasisSpec::monomial(deg, d, false).size(), d * static_cast<std::size_t>(deg) + 1);
        }
}

TEST(BasisSpec, RejectsBadSpecs) {
    EXPECT_THROW(BasisSpec(BasisFamily::monomial, -1, 1, true), DomainError);
    EXPECT_THROW(BasisSpec(BasisFamily::monomial, 2, 1, true, {0.0}), DomainError);
    EXPECT_THROW(BasisSpec(BasisFamily::monomial, 2, 2, true, {1.0}), DimensionError);
    EXPECT_FALSE(parse_basis_family("laguerre").has_value());
}

// Property: central differences of the value basis match the hedge basis.
TEST(HedgeBasis, FiniteDifferenceProperty) {
    rng::CounterRng gen(11, rng::Domain::test, 0);
    std::uint64_t c = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t d = 1 + static_cast<std::size_t>(trial % 3);
        const int deg = trial % 5;
        const bool tensor = (trial / 3) % 2 == 0;
        std::vector<double> scale(d);
        Eigen::VectorXd x(static_cast<Eigen::Index>(d));
        for (std::size_t k = 0; k < d; ++k) {
            scale[k] = 50.0 + 100.0 * gen.uniform_pair(c++)[0];
            x(static_cast<Eigen::Index>(k)) = scale[k] * (0.5 + gen.uniform_pair(c++)[0]);
        }
        const auto spec = BasisSpec::monomial(deg, d, tensor).with_scaling(scale);
        const Eigen::MatrixXd h = eval_hedge_basis(spec, x);
        for (std::size_t k = 0; k < d; ++k) {
            const double step = 1e-6 * scale[k];
            Eigen::VectorXd up = x, dn = x;
            up(static_cast<Eigen::Index>(k)) += step;
            dn(static_cast<Eigen::Index>(k)) -= step;
            const Eigen::VectorXd fd = (eval_value_basis(spec, up) - eval_value_basis(spec, dn)) / (2.0 * step);
            for (Eigen::Index a = 0; a < fd.size(); ++a) {
                const double exact = h(a, static_cast<Eigen::Index>(k));
                // absolute floor for entries that are zero analytically
                EXPECT_NEAR(fd(a), exact, 1e-6 * std::max(std::abs(exact), 1.0 / scale[k]))
                    << "trial " << trial << " element " << a << " asset " << k;
            }
        }
    }
}

TEST(ValueBasis, PureEvaluation) {
    const auto spec = BasisSpec::monomial(3, 2).with_scaling({97.0, 13.0});
    const Eigen::VectorXd x = vec({101.3, 12.7});
    EXPECT_EQ(eval_value_basis(spec, x), eval_value_basis(spec, x));
    EXPECT_EQ(eval_hedge_basis(spec, x), eval_hedge_basis(spec, x));
}
