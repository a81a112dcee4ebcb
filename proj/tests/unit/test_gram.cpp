#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mlplr/gram.hpp"

using namespace mlplr;

namespace {

// E[f(Z)], Z ~ N(0, 1), by adaptive Gauss-Kronrod over the real line.
template <class F>
double normal_expectation(F f) {
  auto integrand = [&](double z) { return f(z) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 15,
      1e-13);
}

double sig(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

TEST(GaussHermite, ReproducesNormalMoments) {
  Eigen::VectorXd x, w;
  gauss_hermite_rule(40, x, w);
  EXPECT_NEAR(w.sum(), 1.0, 1e-13);
  auto moment = [&](int p) { return (w.array() * x.array().pow(p)).sum(); };
  EXPECT_NEAR(moment(1), 0.0, 1e-13);
  EXPECT_NEAR(moment(2), 1.0, 1e-12);
  EXPECT_NEAR(moment(4), 3.0, 1e-11);
  EXPECT_NEAR(moment(6), 15.0, 1e-10);
  EXPECT_NEAR(moment(8), 105.0, 1e-9);
}

TEST(GramMatrix, QuadratureMatchesIndependentIntegration) {
  const auto spec = default_desk_spec();
  const auto g = gram_matrix_gauss_hermite(spec);
  // x_gram(phi, phi) and x_gram(1, xt_1 phi') against adaptive integration
  const double e11 = normal_expectation([](double z) { return sig(0.5 + z) * sig(0.5 + z); });
  const double e03 = normal_expectation([](double z) {
    const double p = sig(0.5 + z);
    return z * p * (1.0 - p);
  });
  EXPECT_NEAR(g.x_gram(1, 1), e11, 1e-11);
  EXPECT_NEAR(g.x_gram(0, 3), e03, 1e-11);
  EXPECT_NEAR(g.x_gram(0, 0), 1.0, 1e-14);
  EXPECT_EQ(g.mode, GramMatrix::Mode::gauss_hermite);
}

TEST(GramMatrix, SigmaIsScaledInputGram) {
  auto spec = default_desk_spec();
  spec.sigma2 = 2.5;
  const auto g = gram_matrix(spec, 8192, 3);
  EXPECT_EQ(g.x_gram(0, 0), 1.0);
  EXPECT_TRUE(g.sigma.isApprox(g.x_gram / 2.5, 1e-14));
  EXPECT_TRUE(g.x_gram.isApprox(g.x_gram.transpose(), 0.0));
}

TEST(GramMatrix, SeedsAgreeWithinStandardErrors) {
  const auto spec = default_desk_spec();
  const auto a = gram_matrix(spec, 200000, 1);
  const auto b = gram_matrix(spec, 200000, 2);
  for (Eigen::Index i = 0; i < a.x_gram.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.x_gram.cols(); ++j) {
      const double se = std::hypot(a.x_gram_se(i, j), b.x_gram_se(i, j));
      EXPECT_LE(std::abs(a.x_gram(i, j) - b.x_gram(i, j)), 4.0 * se + 1e-15) << i << "," << j;
    }
  }
}

TEST(GramMatrix, MonteCarloMatchesQuadrature) {
  const auto spec = default_desk_spec();
  const auto mc = gram_matrix(spec, 200000, 5);
  const auto gh = gram_matrix_gauss_hermite(spec);
  for (Eigen::Index i = 0; i < mc.x_gram.rows(); ++i) {
    for (Eigen::Index j = 0; j < mc.x_gram.cols(); ++j) {
      EXPECT_LE(std::abs(mc.x_gram(i, j) - gh.x_gram(i, j)), 4.0 * mc.x_gram_se(i, j) + 1e-15);
    }
  }
}

TEST(GramMatrix, PositiveSemidefinite) {
  const auto g = gram_matrix(default_desk_spec(), 20000, 7);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.x_gram);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
}

TEST(GramMatrix, IndependentOfThreadCount) {
  const auto spec = default_desk_spec();
  const auto basis = ScoreBasis::from_spec(spec);
  const auto a = gram_matrix(spec, 50000, 9, basis, 1);
  const auto b = gram_matrix(spec, 50000, 9, basis, 4);
  EXPECT_EQ(a.x_gram, b.x_gram);
  EXPECT_EQ(a.x_gram_se, b.x_gram_se);
}

TEST(GramMatrix, ExtendedColumnsAppended) {
  const auto spec = default_desk_spec();
  const auto basis = ScoreBasis::from_spec(spec, {{0.0, 2.0}});
  const auto g = gram_matrix_gauss_hermite(spec, basis);
  ASSERT_EQ(g.basis_dim(), 8u);
  const double e = normal_expectation([](double z) { return sig(2.0 * z) * sig(0.5 + z); });
  EXPECT_NEAR(g.x_gram(7, 1), e, 1e-11);
}

TEST(GramMatrix, QuadratureRejectsUnsupportedSpecs) {
  RegressionSpec spec;
  spec.input_dim = 2;
  spec.theta0.units = {{1.0, {0.0, 1.0, 1.0}}};
  EXPECT_THROW(gram_matrix_gauss_hermite(spec), std::invalid_argument);
}

TEST(CheckH4, DuplicateColumnFails) {
  Eigen::MatrixXd b(3, 3);
  b << 1.0, 0.5, 0.5, 0.5, 1.0, 1.0, 0.5, 1.0, 1.0;  // columns 2 and 3 coincide
  const auto r = check_h4(b);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.min_eigenvalue, 0.0, 1e-12);
}

TEST(CheckH4, IdentityPasses) {
  const auto r = check_h4(Eigen::MatrixXd::Identity(5, 5));
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.min_eigenvalue, 1.0, 1e-14);
  EXPECT_NEAR(r.min_correlation_eigenvalue, 1.0, 1e-14);
}

TEST(CheckH4, ToleranceIsTheThreshold) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
  m(1, 1) = 5e-9;
  EXPECT_FALSE(check_h4(m, 1e-8).pass);
  EXPECT_TRUE(check_h4(m, 1e-9).pass);
}

TEST(CheckH4, DefaultSpecSmallestEigenvalue) {
  // The 7 x 7 block is nearly singular; both estimators must agree on its scale.
  const auto spec = default_desk_spec();
  const auto gh = check_h4(gram_matrix_gauss_hermite(spec), 1e-12);
  EXPECT_GT(gh.min_eigenvalue, 0.0);
  EXPECT_LT(gh.min_eigenvalue, 1e-6);
  EXPECT_GT(gh.min_correlation_eigenvalue, gh.min_eigenvalue);
}
