#include "mlplr/reparam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mlplr/likelihood.hpp"

namespace mlplr {

namespace {

double dot_aug(const std::vector<double>& w, std::span<const double> x) {
  return augmented_dot(w, x);
}

// Per-true-unit transfer values at w_i^0.
struct TrueUnitTerms {
  std::vector<TransferDerivatives> phi;
};

TrueUnitTerms true_unit_terms(const RegressionSpec& spec, std::span<const double> x) {
  TrueUnitTerms out;
  for (const auto& u : spec.theta0.units) out.phi.push_back(transfer_all(dot_aug(u.w, x)));
  return out;
}

// Regression function of the reparameterized model.
double reparam_forward(const Reparameterization& rep, const RegressionSpec& spec,
                       std::span<const double> x) {
  double f = rep.beta;
  const auto& p = rep.partition;
  for (std::size_t i = 0; i < p.true_width(); ++i) {
    double inner = 0.0;
    for (std::size_t j = p.group_begin(i); j < p.group_end(i); ++j) {
      inner += rep.q[j] * sigmoid(dot_aug(rep.w[j], x));
    }
    f += (rep.s[i] + spec.theta0.units[i].a) * inner;
  }
  for (const auto& fu : rep.extra) f += fu.a * sigmoid(dot_aug(fu.w, x));
  return f;
}

// Layout of the flat Phi_t vector.
struct PhiLayout {
  std::size_t grouped;
  std::size_t k0;
  std::size_t d;
  std::size_t n_extra;
  std::size_t beta() const { return 0; }
  std::size_t w(std::size_t j, std::size_t l) const { return 1 + j * (d + 1) + l; }
  std::size_t s(std::size_t i) const { return 1 + grouped * (d + 1) + i; }
  std::size_t a(std::size_t j) const { return 1 + grouped * (d + 1) + k0 + j; }
  std::size_t size() const { return 1 + grouped * (d + 1) + k0 + n_extra; }
};

PhiLayout layout_of(const Reparameterization& rep) {
  return {rep.partition.grouped(), rep.partition.true_width(), rep.input_dim(), rep.extra.size()};
}

}  // namespace

Reparameterization Reparameterization::base_point(const RegressionSpec& spec,
                                                  const Partition& partition,
                                                  std::vector<double> q,
                                                  std::vector<std::vector<double>> extra_w) {
  Reparameterization rep;
  rep.partition = partition;
  rep.beta = spec.theta0.beta;
  rep.q = std::move(q);
  rep.s.assign(partition.true_width(), 0.0);
  rep.w.resize(partition.grouped());
  for (std::size_t j = 0; j < partition.grouped(); ++j) {
    rep.w[j] = spec.theta0.units.at(partition.owner(j)).w;
  }
  for (auto& ew : extra_w) rep.extra.push_back(FreeUnit{0.0, std::move(ew)});
  rep.validate(spec);
  return rep;
}

Reparameterization Reparameterization::from_params(const MlpParams& theta,
                                                   const RegressionSpec& spec,
                                                   const Partition& partition) {
  theta.validate();
  partition.validate(theta.hidden());
  if (partition.true_width() != spec.true_width()) {
    throw std::invalid_argument("Reparameterization: partition does not match k0");
  }
  Reparameterization rep;
  rep.partition = partition;
  rep.beta = theta.beta;
  rep.s.resize(partition.true_width());
  rep.q.resize(partition.grouped());
  rep.w.resize(partition.grouped());
  for (std::size_t i = 0; i < partition.true_width(); ++i) {
    double sum = 0.0;
    for (std::size_t j = partition.group_begin(i); j < partition.group_end(i); ++j) {
      sum += theta.units[j].a;
    }
    rep.s[i] = sum - spec.theta0.units[i].a;
    for (std::size_t j = partition.group_begin(i); j < partition.group_end(i); ++j) {
      rep.q[j] = (sum != 0.0) ? theta.units[j].a / sum : 0.0;
      rep.w[j] = theta.units[j].w;
    }
  }
  for (std::size_t j = partition.grouped(); j < theta.hidden(); ++j) {
    rep.extra.push_back(FreeUnit{theta.units[j].a, theta.units[j].w});
  }
  return rep;
}

MlpParams Reparameterization::to_params(const RegressionSpec& spec) const {
  MlpParams theta;
  theta.beta = beta;
  for (std::size_t i = 0; i < partition.true_width(); ++i) {
    const double total = s[i] + spec.theta0.units[i].a;
    for (std::size_t j = partition.group_begin(i); j < partition.group_end(i); ++j) {
      theta.units.push_back(HiddenUnit{total * q[j], w[j]});
    }
  }
  for (const auto& fu : extra) theta.units.push_back(HiddenUnit{fu.a, fu.w});
  return theta;
}

Reparameterization Reparameterization::at_base(const RegressionSpec& spec) const {
  std::vector<std::vector<double>> ew;
  for (const auto& fu : extra) ew.push_back(fu.w);
  return base_point(spec, partition, q, std::move(ew));
}

std::size_t Reparameterization::input_dim() const {
  if (!w.empty()) return w.front().size() - 1;
  if (!extra.empty()) return extra.front().w.size() - 1;
  throw std::invalid_argument("Reparameterization: empty");
}

std::size_t Reparameterization::phi_dim() const { return layout_of(*this).size(); }

std::vector<double> Reparameterization::phi() const {
  const auto lay = layout_of(*this);
  std::vector<double> out(lay.size());
  out[lay.beta()] = beta;
  for (std::size_t j = 0; j < lay.grouped; ++j) {
    for (std::size_t l = 0; l <= lay.d; ++l) out[lay.w(j, l)] = w[j][l];
  }
  for (std::size_t i = 0; i < lay.k0; ++i) out[lay.s(i)] = s[i];
  for (std::size_t j = 0; j < lay.n_extra; ++j) out[lay.a(j)] = extra[j].a;
  return out;
}

void Reparameterization::set_phi(std::span<const double> values) {
  const auto lay = layout_of(*this);
  if (values.size() != lay.size()) throw std::invalid_argument("set_phi: wrong size");
  beta = values[lay.beta()];
  for (std::size_t j = 0; j < lay.grouped; ++j) {
    for (std::size_t l = 0; l <= lay.d; ++l) w[j][l] = values[lay.w(j, l)];
  }
  for (std::size_t i = 0; i < lay.k0; ++i) s[i] = values[lay.s(i)];
  for (std::size_t j = 0; j < lay.n_extra; ++j) extra[j].a = values[lay.a(j)];
}

std::vector<std::string> Reparameterization::phi_labels() const {
  const auto lay = layout_of(*this);
  std::vector<std::string> out(lay.size());
  out[lay.beta()] = "beta";
  for (std::size_t j = 0; j < lay.grouped; ++j) {
    for (std::size_t l = 0; l <= lay.d; ++l) {
      out[lay.w(j, l)] = "w" + std::to_string(j + 1) + "_" + std::to_string(l);
    }
  }
  for (std::size_t i = 0; i < lay.k0; ++i) out[lay.s(i)] = "s" + std::to_string(i + 1);
  for (std::size_t j = 0; j < lay.n_extra; ++j) {
    out[lay.a(j)] = "a" + std::to_string(lay.grouped + j + 1);
  }
  return out;
}

void Reparameterization::validate(const RegressionSpec& spec) const {
  const std::size_t k = partition.grouped() + extra.size();
  partition.validate(k);
  if (partition.true_width() != spec.true_width()) {
    throw std::invalid_argument("Reparameterization: partition does not match k0");
  }
  if (s.size() != partition.true_width() || q.size() != partition.grouped() ||
      w.size() != partition.grouped()) {
    throw std::invalid_argument("Reparameterization: block sizes do not match the partition");
  }
  const std::size_t len = spec.input_dim + 1;
  for (const auto& v : w) {
    if (v.size() != len) throw std::invalid_argument("Reparameterization: bad weight length");
  }
  for (const auto& fu : extra) {
    if (fu.w.size() != len) throw std::invalid_argument("Reparameterization: bad weight length");
  }
}

double likelihood_ratio(const Reparameterization& rep, const RegressionSpec& spec,
                        std::span<const double> x, double y) {
  const double f0 = mlp_forward(spec.theta0, x);
  const double f = reparam_forward(rep, spec, x);
  const double r = y - f;
  const double r0 = y - f0;
  return std::exp(-(r * r - r0 * r0) / (2.0 * spec.sigma2));
}

namespace {

// L and Q of the expansion at one x; see taylor_terms.
struct ExpansionPieces {
  double linear = 0.0;
  double quadratic = 0.0;
};

ExpansionPieces expansion_pieces(const Reparameterization& rep, const RegressionSpec& spec,
                                 std::span<const double> x) {
  const auto tu = true_unit_terms(spec, x);
  const auto& p = rep.partition;
  ExpansionPieces out;
  out.linear = rep.beta - spec.theta0.beta;
  for (std::size_t i = 0; i < p.true_width(); ++i) {
    const double a0 = spec.theta0.units[i].a;
    const auto& w0 = spec.theta0.units[i].w;
    out.linear += rep.s[i] * tu.phi[i].value;
    double cross = 0.0;
    for (std::size_t j = p.group_begin(i); j < p.group_end(i); ++j) {
      double proj = rep.w[j][0] - w0[0];
      for (std::size_t l = 0; l < x.size(); ++l) proj += (rep.w[j][l + 1] - w0[l + 1]) * x[l];
      out.linear += rep.q[j] * proj * a0 * tu.phi[i].d1;
      out.quadratic += rep.q[j] * proj * proj * a0 * tu.phi[i].d2;
      cross += rep.q[j] * proj;
    }
    out.quadratic += 2.0 * rep.s[i] * cross * tu.phi[i].d1;
  }
  for (const auto& fu : rep.extra) out.linear += fu.a * sigmoid(dot_aug(fu.w, x));
  return out;
}

}  // namespace

double expansion_scale(const Reparameterization& rep, const RegressionSpec& spec,
                       const TaylorOptions& opt) {
  Rng rng(opt.norm_seed);
  std::vector<double> x(spec.input_dim);
  double acc = 0.0;
  for (std::size_t m = 0; m < opt.norm_draws; ++m) {
    spec.input_law.sample(rng, x);
    const double delta = reparam_forward(rep, spec, x) - mlp_forward(spec.theta0, x);
    acc += std::expm1(delta * delta / spec.sigma2);
  }
  return std::sqrt(acc / static_cast<double>(std::max<std::size_t>(opt.norm_draws, 1)));
}

TaylorTerms taylor_terms(const Reparameterization& rep, const RegressionSpec& spec,
                         std::span<const double> x, double y, const TaylorOptions& opt) {
  rep.validate(spec);
  const double e = residual_score(spec, x, y);
  const auto pieces = expansion_pieces(rep, spec, x);
  TaylorTerms out;
  out.first_order = e * pieces.linear;
  out.second_order = (e * e - 1.0 / spec.sigma2) * pieces.linear * pieces.linear +
                     e * pieces.quadratic;
  out.remainder_norm = expansion_scale(rep, spec, opt);
  return out;
}

double taylor_remainder(const Reparameterization& rep, const RegressionSpec& spec,
                        std::span<const double> x, double y) {
  const double e = residual_score(spec, x, y);
  const auto pieces = expansion_pieces(rep, spec, x);
  const double first = e * pieces.linear;
  const double second = (e * e - 1.0 / spec.sigma2) * pieces.linear * pieces.linear +
                        e * pieces.quadratic;
  const double f0 = mlp_forward(spec.theta0, x);
  const double f = reparam_forward(rep, spec, x);
  const double r = y - f;
  const double r0 = y - f0;
  const double ratio_minus_one = std::expm1(-(r * r - r0 * r0) / (2.0 * spec.sigma2));
  return ratio_minus_one - first - 0.5 * second;
}

Eigen::VectorXd catalog_gradient(const Reparameterization& rep, const RegressionSpec& spec,
                                 std::span<const double> x, double y) {
  rep.validate(spec);
  const auto lay = layout_of(rep);
  const auto& p = rep.partition;
  const auto tu = true_unit_terms(spec, x);
  const double e = residual_score(spec, x, y);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lay.size()));
  auto at = [&](std::size_t idx) -> double& { return g(static_cast<Eigen::Index>(idx)); };

  // d/dbeta = e(z)
  at(lay.beta()) = e;
  for (std::size_t i = 0; i < lay.k0; ++i) {
    // d/ds_i = e(z) phi(w_i0^T x)
    at(lay.s(i)) = e * tu.phi[i].value;
    // d/dw_j = e(z) a_i0 q_j phi'(w_i0^T x) x, j in group i
    const double a0 = spec.theta0.units[i].a;
    for (std::size_t j = p.group_begin(i); j < p.group_end(i); ++j) {
      const double c = e * a0 * rep.q[j] * tu.phi[i].d1;
      at(lay.w(j, 0)) = c;
      for (std::size_t l = 0; l < lay.d; ++l) at(lay.w(j, l + 1)) = c * x[l];
    }
  }
  // d/da_j = e(z) phi(w_j^T x), free units
  for (std::size_t j = 0; j < lay.n_extra; ++j) {
    at(lay.a(j)) = e * sigmoid(dot_aug(rep.extra[j].w, x));
  }
  return g;
}

Eigen::MatrixXd catalog_hessian(const Reparameterization& rep, const RegressionSpec& spec,
                                std::span<const double> x, double y) {
  rep.validate(spec);
  const auto lay = layout_of(rep);
  const auto& p = rep.partition;
  const auto tu = true_unit_terms(spec, x);
  const double e = residual_score(spec, x, y);
  // The unit-variance formulas read e^2 - 1; with general sigma2 the constant
  // is 1/sigma2.
  const double e2m = e * e - 1.0 / spec.sigma2;
  const auto n = static_cast<Eigen::Index>(lay.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  auto set = [&](std::size_t r, std::size_t c, double v) {
    h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    h(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
  };
  std::vector<double> xt(lay.d + 1);
  xt[0] = 1.0;
  for (std::size_t l = 0; l < lay.d; ++l) xt[l + 1] = x[l];
  std::vector<double> free_phi(lay.n_extra);
  for (std::size_t j = 0; j < lay.n_extra; ++j) free_phi[j] = sigmoid(dot_aug(rep.extra[j].w, x));

  // Scalar a_i0 q_j phi'_i for grouped unit j.
  auto wscale = [&](std::size_t j) {
    const std::size_t i = p.owner(j);
    return spec.theta0.units[i].a * rep.q[j] * tu.phi[i].d1;
  };

  // beta, beta
  set(lay.beta(), lay.beta(), e2m);
  for (std::size_t i = 0; i < lay.k0; ++i) {
    // beta, s_i
    set(lay.beta(), lay.s(i), e2m * tu.phi[i].value);
    // s_i, s_i'
    for (std::size_t i2 = 0; i2 < lay.k0; ++i2) {
      set(lay.s(i), lay.s(i2), e2m * tu.phi[i].value * tu.phi[i2].value);
    }
    // s_i, a_j (free)
    for (std::size_t j = 0; j < lay.n_extra; ++j) {
      set(lay.s(i), lay.a(j), e2m * tu.phi[i].value * free_phi[j]);
    }
  }
  for (std::size_t j = 0; j < lay.grouped; ++j) {
    const std::size_t i = p.owner(j);
    const double cj = wscale(j);
    for (std::size_t l = 0; l <= lay.d; ++l) {
      // beta, w_j
      set(lay.beta(), lay.w(j, l), e2m * cj * xt[l]);
      for (std::size_t i2 = 0; i2 < lay.k0; ++i2) {
        // s_i2, w_j: the same-group block carries the extra e(z) q_j phi'_i x term.
        double v = e2m * tu.phi[i2].value * cj * xt[l];
        if (i2 == i) v += e * rep.q[j] * tu.phi[i].d1 * xt[l];
        set(lay.s(i2), lay.w(j, l), v);
      }
      // w_j, a_l (free)
      for (std::size_t m = 0; m < lay.n_extra; ++m) {
        set(lay.w(j, l), lay.a(m), e2m * cj * free_phi[m] * xt[l]);
      }
    }
    for (std::size_t j2 = 0; j2 < lay.grouped; ++j2) {
      const double cj2 = wscale(j2);
      for (std::size_t l = 0; l <= lay.d; ++l) {
        for (std::size_t l2 = 0; l2 <= lay.d; ++l2) {
          double v = e2m * cj * cj2 * xt[l] * xt[l2];
          // w_j, w_j: additional e(z) a_i0 q_j phi''_i x x^T
          if (j2 == j) {
            v += e * spec.theta0.units[i].a * rep.q[j] * tu.phi[i].d2 * xt[l] * xt[l2];
          }
          set(lay.w(j, l), lay.w(j2, l2), v);
        }
      }
    }
  }
  for (std::size_t j = 0; j < lay.n_extra; ++j) {
    // beta, a_j and a_j, a_l
    set(lay.beta(), lay.a(j), e2m * free_phi[j]);
    for (std::size_t m = 0; m < lay.n_extra; ++m) {
      set(lay.a(j), lay.a(m), e2m * free_phi[j] * free_phi[m]);
    }
  }
  return h;
}

DerivativeCheckReport fd_check_derivatives(const Reparameterization& rep,
                                           const RegressionSpec& spec, std::span<const double> x,
                                           double y, double step_first, double step_second) {
  if (!(step_first > 0.0) || !(step_second > 0.0)) {
    throw std::invalid_argument("fd_check_derivatives: steps must be > 0");
  }
  const Reparameterization base = rep.at_base(spec);
  const auto phi0 = base.phi();
  const std::size_t n = phi0.size();
  Reparameterization work = base;
  auto ratio_at = [&](const std::vector<double>& phi) {
    work.set_phi(phi);
    return likelihood_ratio(work, spec, x, y);
  };

  const Eigen::VectorXd g = catalog_gradient(base, spec, x, y);
  const Eigen::MatrixXd h = catalog_hessian(base, spec, x, y);
  auto rel = [](double analytic, double fd) {
    return std::abs(analytic - fd) / std::max(1.0, std::abs(analytic));
  };

  DerivativeCheckReport rpt;
  rpt.labels = base.phi_labels();
  rpt.first_errors.resize(static_cast<Eigen::Index>(n));
  rpt.second_errors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  std::vector<double> pt = phi0;
  for (std::size_t a = 0; a < n; ++a) {
    const auto ia = static_cast<Eigen::Index>(a);
    pt = phi0;
    pt[a] += step_first;
    const double fp = ratio_at(pt);
    pt[a] = phi0[a] - step_first;
    const double fm = ratio_at(pt);
    rpt.first_errors(ia) = rel(g(ia), (fp - fm) / (2.0 * step_first));
  }

  const double f0 = ratio_at(phi0);
  const double hh = step_second;
  for (std::size_t a = 0; a < n; ++a) {
    const auto ia = static_cast<Eigen::Index>(a);
    pt = phi0;
    pt[a] += hh;
    const double fp = ratio_at(pt);
    pt[a] = phi0[a] - hh;
    const double fm = ratio_at(pt);
    rpt.second_errors(ia, ia) = rel(h(ia, ia), (fp - 2.0 * f0 + fm) / (hh * hh));
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto ib = static_cast<Eigen::Index>(b);
      auto eval = [&](double sa, double sb) {
        pt = phi0;
        pt[a] += sa * hh;
        pt[b] += sb * hh;
        return ratio_at(pt);
      };
      const double fd = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * hh * hh);
      const double err = rel(h(ia, ib), fd);
      rpt.second_errors(ia, ib) = err;
      rpt.second_errors(ib, ia) = err;
    }
  }
  rpt.max_first_error = n ? rpt.first_errors.maxCoeff() : 0.0;
  rpt.max_second_error = n ? rpt.second_errors.maxCoeff() : 0.0;
  return rpt;
}

Reparameterization random_base_point(const RegressionSpec& spec, std::size_t k, Rng& rng) {
  const auto parts = enumerate_partitions(k, spec.true_width());
  const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(parts.size()));
  const Partition& part = parts[std::min(pick, parts.size() - 1)];
  std::vector<double> q(part.grouped());
  for (std::size_t i = 0; i < part.true_width(); ++i) {
    double sum = 0.0;
    for (std::size_t j = part.group_begin(i); j < part.group_end(i); ++j) {
      q[j] = rng.exponential();
      sum += q[j];
    }
    for (std::size_t j = part.group_begin(i); j < part.group_end(i); ++j) q[j] /= sum;
  }
  std::vector<std::vector<double>> extra_w(k - part.grouped());
  for (auto& w : extra_w) {
    w.resize(spec.input_dim + 1);
    for (double& v : w) v = rng.normal();
  }
  return Reparameterization::base_point(spec, part, std::move(q), std::move(extra_w));
}

GradcheckSummary gradcheck_sweep(const RegressionSpec& spec, std::size_t k, std::size_t draws,
                                 std::uint64_t seed, double step_first, double step_second) {
  GradcheckSummary out;
  out.draws = draws;
  std::vector<double> x(spec.input_dim);
  for (std::size_t j = 0; j < draws; ++j) {
    Rng rng(seed, j);
    spec.input_law.sample(rng, x);
    const double y = mlp_forward(spec.theta0, x) + std::sqrt(spec.sigma2) * rng.normal();
    const auto rep = random_base_point(spec, k, rng);
    const auto r = fd_check_derivatives(rep, spec, x, y, step_first, step_second);
    out.max_first_error = std::max(out.max_first_error, r.max_first_error);
    out.max_second_error = std::max(out.max_second_error, r.max_second_error);
  }
  return out;
}

}  // namespace mlplr
