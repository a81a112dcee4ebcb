#include <gtest/gtest.h>

#include <cmath>

#include "mlplr/likelihood.hpp"
#include "mlplr/reparam.hpp"
#include "mlplr/rng.hpp"

using namespace mlplr;

namespace {

struct Z {
  std::vector<double> x;
  double y;
};

Z draw_z(const RegressionSpec& spec, Rng& rng) {
  Z z;
  z.x.resize(spec.input_dim);
  spec.input_law.sample(rng, z.x);
  z.y = mlp_forward(spec.theta0, z.x) + std::sqrt(spec.sigma2) * rng.normal();
  return z;
}

RegressionSpec two_unit_spec() {
  RegressionSpec s;
  s.input_dim = 2;
  s.sigma2 = 0.5;
  s.theta0.beta = -0.3;
  s.theta0.units = {{1.2, {0.2, 1.0, -0.5}}, {0.7, {-0.4, 0.3, 0.9}}};
  return s;
}

// Independent evaluation of the first-order term from its closed form.
double first_order_oracle(const Reparameterization& rep, const RegressionSpec& spec, const Z& z) {
  const double e = (z.y - mlp_forward(spec.theta0, z.x)) / spec.sigma2;
  double L = rep.beta - spec.theta0.beta;
  const auto& p = rep.partition;
  for (std::size_t i = 0; i < p.true_width(); ++i) {
    const auto& u0 = spec.theta0.units[i];
    const double t = augmented_dot(u0.w, z.x);
    const double phi = 1.0 / (1.0 + std::exp(-t));
    const double dphi = phi * (1.0 - phi);
    L += rep.s[i] * phi;
    for (std::size_t j = p.group_begin(i); j < p.group_end(i); ++j) {
      double proj = rep.w[j][0] - u0.w[0];
      for (std::size_t l = 0; l < z.x.size(); ++l) proj += (rep.w[j][l + 1] - u0.w[l + 1]) * z.x[l];
      L += rep.q[j] * proj * u0.a * dphi;
    }
  }
  for (const auto& fu : rep.extra) L += fu.a / (1.0 + std::exp(-augmented_dot(fu.w, z.x)));
  return e * L;
}

Reparameterization displaced(const Reparameterization& base, const std::vector<double>& dir, double h) {
  auto rep = base;
  auto phi = rep.phi();
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] += h * dir[j];
  rep.set_phi(phi);
  return rep;
}

}  // namespace

TEST(Reparam, RoundTripThroughParams) {
  const auto spec = two_unit_spec();
  Rng rng(3);
  for (int rep_i = 0; rep_i < 20; ++rep_i) {
    auto rep = random_base_point(spec, 4, rng);
    auto theta = rep.to_params(spec);
    const auto back = Reparameterization::from_params(theta, spec, rep.partition);
    for (std::size_t j = 0; j < rep.q.size(); ++j) EXPECT_NEAR(back.q[j], rep.q[j], 1e-12);
    for (double s : back.s) EXPECT_NEAR(s, 0.0, 1e-12);
  }
}

TEST(Reparam, BaseReplicatesTrueWeights) {
  const auto spec = two_unit_spec();
  const Partition t{{0, 2, 3}};
  const auto rep = Reparameterization::base_point(spec, t, {0.3, 0.7, 1.0});
  EXPECT_EQ(rep.w[0], spec.theta0.units[0].w);
  EXPECT_EQ(rep.w[1], spec.theta0.units[0].w);
  EXPECT_EQ(rep.w[2], spec.theta0.units[1].w);
  for (double s : rep.s) EXPECT_EQ(s, 0.0);
  // same regression function as theta0
  const std::vector<double> x{0.4, -1.1};
  EXPECT_NEAR(mlp_forward(rep.to_params(spec), x), mlp_forward(spec.theta0, x), 1e-14);
}

TEST(Reparam, ZeroGroupSumGivesZeroWeights) {
  const auto spec = default_desk_spec();
  MlpParams theta;
  theta.beta = 0.5;
  theta.units = {{1.0, {0.5, 1.0}}, {-1.0, {0.1, 2.0}}};
  const auto rep = Reparameterization::from_params(theta, spec, Partition{{0, 2}});
  EXPECT_EQ(rep.q[0], 0.0);
  EXPECT_EQ(rep.q[1], 0.0);
  EXPECT_NEAR(rep.s[0], -1.0, 1e-15);
}

TEST(TaylorTerms, ZeroDisplacement) {
  const auto spec = two_unit_spec();
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    const auto rep = random_base_point(spec, 3, rng);
    const auto z = draw_z(spec, rng);
    const auto t = taylor_terms(rep, spec, z.x, z.y);
    EXPECT_EQ(t.first_order, 0.0);
    EXPECT_EQ(t.second_order, 0.0);
  }
}

TEST(TaylorTerms, BetaOnlyDisplacement) {
  const auto spec = default_desk_spec();  // sigma2 = 1
  Rng rng(2);
  const double h = 0.03;
  for (int i = 0; i < 10; ++i) {
    auto rep = random_base_point(spec, 2, rng);
    rep.beta += h;
    const auto z = draw_z(spec, rng);
    const double e = residual_score(spec, z.x, z.y);
    const auto t = taylor_terms(rep, spec, z.x, z.y);
    EXPECT_NEAR(t.first_order, e * h, 1e-14);
    EXPECT_NEAR(t.second_order, (e * e - 1.0) * h * h, 1e-14);
  }
}

TEST(TaylorTerms, BetaOnlyGeneralVariance) {
  auto spec = default_desk_spec();
  spec.sigma2 = 2.5;
  Rng rng(12);
  const double h = 0.02;
  auto rep = random_base_point(spec, 1, rng);
  rep.beta += h;
  const auto z = draw_z(spec, rng);
  const double e = residual_score(spec, z.x, z.y);
  const auto t = taylor_terms(rep, spec, z.x, z.y);
  EXPECT_NEAR(t.second_order, (e * e - 1.0 / spec.sigma2) * h * h, 1e-14);
}

TEST(TaylorTerms, FirstOrderMatchesClosedForm) {
  const auto spec = two_unit_spec();
  Rng rng(21);
  for (int i = 0; i < 30; ++i) {
    auto rep = random_base_point(spec, 4, rng);
    std::vector<double> dir(rep.phi_dim());
    for (double& v : dir) v = rng.normal();
    const auto moved = displaced(rep, dir, 0.05);
    const auto z = draw_z(spec, rng);
    EXPECT_NEAR(taylor_terms(moved, spec, z.x, z.y).first_order, first_order_oracle(moved, spec, z), 1e-12);
  }
}

TEST(TaylorTerms, FirstOrderIsLinear) {
  const auto spec = two_unit_spec();
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    auto rep = random_base_point(spec, 3, rng);
    std::vector<double> dir(rep.phi_dim());
    for (double& v : dir) v = rng.normal();
    const auto z = draw_z(spec, rng);
    const double f1 = taylor_terms(displaced(rep, dir, 0.01), spec, z.x, z.y).first_order;
    const double f2 = taylor_terms(displaced(rep, dir, 0.02), spec, z.x, z.y).first_order;
    EXPECT_NEAR(f2, 2.0 * f1, 1e-12 * std::max(1.0, std::abs(f2)));
  }
}

TEST(TaylorTerms, ExpansionMatchesRatio) {
  const auto spec = default_desk_spec();
  Rng rng(31);
  auto rep = random_base_point(spec, 2, rng);
  std::vector<double> dir(rep.phi_dim());
  for (double& v : dir) v = rng.normal();
  const auto z = draw_z(spec, rng);
  const auto moved = displaced(rep, dir, 1e-3);
  const auto t = taylor_terms(moved, spec, z.x, z.y);
  const double direct = likelihood_ratio(moved, spec, z.x, z.y);
  EXPECT_NEAR(direct, 1.0 + t.first_order + 0.5 * t.second_order, 1e-7);
  EXPECT_NEAR(taylor_remainder(moved, spec, z.x, z.y),
              direct - 1.0 - t.first_order - 0.5 * t.second_order, 1e-13);
  EXPECT_GT(t.remainder_norm, 0.0);
}

TEST(TaylorTerms, RemainderDecaysCubically) {
  const auto spec = default_desk_spec();
  Rng rng(44);
  std::vector<double> avg;
  std::vector<Reparameterization> bases;
  std::vector<std::vector<double>> dirs;
  std::vector<Z> zs;
  for (int i = 0; i < 200; ++i) {
    bases.push_back(random_base_point(spec, 2, rng));
    std::vector<double> dir(bases.back().phi_dim());
    for (double& v : dir) v = rng.normal();
    dirs.push_back(dir);
    zs.push_back(draw_z(spec, rng));
  }
  for (double h : {1e-2, 5e-3, 2.5e-3}) {
    double s = 0.0;
    for (std::size_t i = 0; i < bases.size(); ++i) {
      s += std::abs(taylor_remainder(displaced(bases[i], dirs[i], h), spec, zs[i].x, zs[i].y));
    }
    avg.push_back(s / bases.size());
  }
  for (std::size_t i = 0; i + 1 < avg.size(); ++i) {
    const double ratio = avg[i] / avg[i + 1];
    EXPECT_GE(ratio, 6.0);
    EXPECT_LE(ratio, 10.0);
  }
}

TEST(Catalog, FirstDerivativeFormulas) {
  auto spec = two_unit_spec();
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const auto rep = random_base_point(spec, 3, rng);
    const auto z = draw_z(spec, rng);
    const auto g = catalog_gradient(rep, spec, z.x, z.y);
    const double e = residual_score(spec, z.x, z.y);
    EXPECT_NEAR(g[0], e, 1e-14);
    const auto labels = rep.phi_labels();
    for (std::size_t i0 = 0; i0 < spec.true_width(); ++i0) {
      const auto pos = std::find(labels.begin(), labels.end(), "s" + std::to_string(i0 + 1)) - labels.begin();
      const double phi = 1.0 / (1.0 + std::exp(-augmented_dot(spec.theta0.units[i0].w, z.x)));
      EXPECT_NEAR(g[pos], e * phi, 1e-14);
    }
  }
}

TEST(Catalog, MixedBetaWeightEntry) {
  const auto spec = default_desk_spec();
  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    const auto rep = random_base_point(spec, 3, rng);
    const auto z = draw_z(spec, rng);
    const auto H = catalog_hessian(rep, spec, z.x, z.y);
    const double e = residual_score(spec, z.x, z.y);
    const auto& u0 = spec.theta0.units[0];
    const double phi = 1.0 / (1.0 + std::exp(-augmented_dot(u0.w, z.x)));
    const double dphi = phi * (1.0 - phi);
    for (std::size_t j = 0; j < rep.partition.grouped(); ++j) {
      for (std::size_t l = 0; l <= spec.input_dim; ++l) {
        const double xl = l == 0 ? 1.0 : z.x[l - 1];
        const double expect = (e * e - 1.0) * u0.a * rep.q[j] * dphi * xl;
        EXPECT_NEAR(H(0, 1 + j * (spec.input_dim + 1) + l), expect, 1e-13);
      }
    }
  }
}

TEST(Catalog, FiniteDifferenceSweep) {
  for (const auto& spec : {default_desk_spec(), two_unit_spec()}) {
    const auto r = gradcheck_sweep(spec, spec.true_width() + 2, 100, 5);
    EXPECT_LE(r.max_first_error, 1e-5);
    EXPECT_LE(r.max_second_error, 1e-5);
  }
}

TEST(Catalog, BetaDerivativeAtStep) {
  const auto spec = default_desk_spec();
  Rng rng(1);
  const auto rep = random_base_point(spec, 2, rng);
  const auto z = draw_z(spec, rng);
  const auto report = fd_check_derivatives(rep, spec, z.x, z.y, 1e-5, 1e-4);
  EXPECT_LE(report.first_errors[0], 1e-6);
  EXPECT_EQ(report.labels[0], "beta");
}
