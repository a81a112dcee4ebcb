#include "mlplr/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mlplr {

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index n = A.cols();
  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(n);
  if (n == 0) return out;
  if (n == 1) {
    const double aa = A.col(0).squaredNorm();
    const double ab = A.col(0).dot(b);
    if (aa > 0.0 && ab > 0.0) {
      out.x[0] = ab / aa;
      out.value = ab * ab / aa;
    }
    out.iterations = 1;
    return out;
  }

  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * std::max<Eigen::Index>(n, A.rows()) *
                     std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max(1.0, b.cwiseAbs().maxCoeff());
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd& x = out.x;
  const std::size_t max_iter = 3 * static_cast<std::size_t>(n) + 10;

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t t = 0; t < idx.size(); ++t) Ap.col(static_cast<Eigen::Index>(t)) = A.col(idx[t]);
    const Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (std::size_t t = 0; t < idx.size(); ++t) z[idx[t]] = zp[static_cast<Eigen::Index>(t)];
    return z;
  };

  while (out.iterations < max_iter) {
    ++out.iterations;
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    Eigen::Index best = -1;
    double wmax = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > wmax) {
        wmax = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    for (std::size_t inner = 0; inner < max_iter; ++inner) {
      Eigen::VectorXd z = solve_passive();
      bool all_pos = true;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          all_pos = false;
          const double denom = x[j] - z[j];
          if (denom > 0.0) alpha = std::min(alpha, x[j] / denom);
        }
      }
      if (all_pos) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
  }
  out.value = (A * x).squaredNorm();
  return out;
}

Eigen::MatrixXd whitening_factor(const Eigen::MatrixXd& sigma) {
  const Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("whitening_factor: eigensolve failed");
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return root.asDiagonal() * es.eigenvectors().transpose();
}

struct ConeSolver::Linear {
  Eigen::MatrixXd A;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  Eigen::MatrixXd Q;
  Eigen::VectorXd y_perp;
  double base = 0.0;
  std::vector<Eigen::MatrixXd> Dq;
};

namespace {

// (2 - [l == m]) u_l u_m in quad-block order.
Eigen::VectorXd quad_weights(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd s(n * (n + 1) / 2);
  Eigen::Index t = 0;
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index m = l; m < n; ++m) s[t++] = (l == m ? 1.0 : 2.0) * u[l] * u[m];
  return s;
}

Eigen::VectorXd unit_angle(double theta) {
  Eigen::VectorXd u(2);
  u << std::cos(theta), std::sin(theta);
  return u;
}

std::uint64_t key_stream(const ConeKey& key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  for (auto r : key.ranks) mix(r);
  mix(0xffULL);
  mix(key.free);
  return h;
}

}  // namespace

ConeSolver::ConeSolver(const ScoreBasis& basis, const Eigen::MatrixXd& R, Eigen::VectorXd y,
                       const ConeSearchOptions& opt, std::uint64_t seed)
    : basis_(basis), R_(R), y_(std::move(y)), opt_(opt), seed_(seed) {
  const auto p = static_cast<Eigen::Index>(basis_.dim());
  if (R_.rows() != p || R_.cols() != p || y_.size() != p) {
    throw std::invalid_argument("ConeSolver: dimensions disagree with the basis");
  }
}

ConeSolver::Linear ConeSolver::build_linear(const std::vector<std::size_t>& extras) const {
  const auto p = R_.rows();
  const auto nl = static_cast<Eigen::Index>(basis_.linear_dim());
  Linear lin;
  lin.A.resize(p, nl + static_cast<Eigen::Index>(extras.size()));
  lin.A.leftCols(nl) = R_.leftCols(nl);
  for (std::size_t t = 0; t < extras.size(); ++t) {
    lin.A.col(nl + static_cast<Eigen::Index>(t)) = R_.col(static_cast<Eigen::Index>(basis_.extra(extras[t])));
  }
  lin.qr.compute(lin.A);
  const auto rank = lin.qr.rank();
  lin.Q = lin.qr.householderQ() * Eigen::MatrixXd::Identity(p, rank);
  const Eigen::VectorXd qy = lin.Q.transpose() * y_;
  lin.base = qy.squaredNorm();
  lin.y_perp = y_ - lin.Q * qy;
  const auto nq = static_cast<Eigen::Index>(basis_.quad_block());
  for (std::size_t i = 0; i < basis_.k0; ++i) {
    const auto first = static_cast<Eigen::Index>(basis_.quad(i, 0, 0));
    Eigen::MatrixXd rq = R_.middleCols(first, nq);
    rq -= lin.Q * (lin.Q.transpose() * rq);
    lin.Dq.push_back(std::move(rq));
  }
  return lin;
}

Eigen::VectorXd ConeSolver::quad_column(const Linear& lin, const QuadDirection& q) const {
  return basis_.sign(q.block) * (lin.Dq[q.block] * quad_weights(q.u));
}

ConeSolver::Eval ConeSolver::evaluate(const Linear& lin, const std::vector<QuadDirection>& dirs) const {
  Eval e;
  if (dirs.empty()) {
    e.value = lin.base;
    e.resid = lin.y_perp;
    return e;
  }
  Eigen::MatrixXd Aq(lin.y_perp.size(), static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t r = 0; r < dirs.size(); ++r) Aq.col(static_cast<Eigen::Index>(r)) = quad_column(lin, dirs[r]);
  auto fit = nnls(Aq, lin.y_perp);
  e.value = lin.base + fit.value;
  e.resid = lin.y_perp - Aq * fit.x;
  e.c = std::move(fit.x);
  return e;
}

Eigen::MatrixXd ConeSolver::quad_form(const Linear& lin, std::size_t block,
                                      const Eigen::VectorXd& resid) const {
  const Eigen::VectorXd v = lin.Dq[block].transpose() * resid;
  const auto n = static_cast<Eigen::Index>(basis_.d + 1);
  Eigen::MatrixXd S(n, n);
  Eigen::Index t = 0;
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index m = l; m < n; ++m) S(l, m) = S(m, l) = v[t++];
  return basis_.sign(block) * S;
}

bool ConeSolver::optimize_direction(ConeSolution& s, std::size_t idx, bool fresh, Rng& rng) {
  const Linear lin = build_linear(s.extras);
  auto dirs = s.directions;
  const double old = fresh ? -std::numeric_limits<double>::infinity() : s.value;
  double best_val = old;
  Eigen::VectorXd best_u = dirs[idx].u;
  auto f = [&](const Eigen::VectorXd& u) {
    dirs[idx].u = u;
    return evaluate(lin, dirs).value;
  };
  auto consider = [&](const Eigen::VectorXd& u, double v) {
    if (v > best_val) {
      best_val = v;
      best_u = u;
    }
  };

  if (basis_.d == 1) {
    const double h = std::numbers::pi / static_cast<double>(opt_.grid);
    double best_theta = 0.0;
    double grid_best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < opt_.grid; ++j) {
      const double th = h * static_cast<double>(j);
      const double v = f(unit_angle(th));
      if (v > grid_best) {
        grid_best = v;
        best_theta = th;
      }
    }
    consider(unit_angle(best_theta), grid_best);
    // golden-section refinement on the bracketing cell pair
    constexpr double kInvPhi = 0.6180339887498949;
    double a = best_theta - h, b = best_theta + h;
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    double fc = f(unit_angle(c)), fd = f(unit_angle(d));
    for (std::size_t it = 0; it < opt_.golden_iters; ++it) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = f(unit_angle(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = f(unit_angle(d));
      }
    }
    consider(unit_angle(c), fc);
    consider(unit_angle(d), fd);
  } else {
    const auto n = static_cast<Eigen::Index>(basis_.d + 1);
    std::vector<Eigen::VectorXd> starts;
    if (!fresh) starts.push_back(dirs[idx].u);
    {
      auto others = s.directions;
      others.erase(others.begin() + static_cast<std::ptrdiff_t>(idx));
      const Eval e0 = evaluate(lin, others);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(quad_form(lin, dirs[idx].block, e0.resid));
      starts.push_back(es.eigenvectors().col(n - 1));
    }
    for (std::size_t r = 0; r < opt_.restarts; ++r) {
      Eigen::VectorXd u(n);
      for (Eigen::Index l = 0; l < n; ++l) u[l] = rng.normal();
      if (u.norm() == 0.0) u[0] = 1.0;
      starts.push_back(u.normalized());
      ++restarts_used_;
    }
    for (Eigen::VectorXd u : starts) {
      double val = f(u);
      for (int it = 0; it < 200; ++it) {
        dirs[idx].u = u;
        const Eval e = evaluate(lin, dirs);
        const double c = e.c[static_cast<Eigen::Index>(idx)];
        const Eigen::MatrixXd S = quad_form(lin, dirs[idx].block, e.resid);
        Eigen::VectorXd g = (c > 0.0 ? 4.0 * c : 2.0) * (S * u);
        g -= u.dot(g) * u;
        const double gn = g.norm();
        if (gn < 1e-12) break;
        double step = 0.5 / gn;
        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt, step *= 0.5) {
          const Eigen::VectorXd cand = (u + step * g).normalized();
          const double v = f(cand);
          if (v > val) {
            const double gain = v - val;
            u = cand;
            val = v;
            accepted = gain > opt_.tol * (1.0 + std::abs(val));
            break;
          }
        }
        if (!accepted) break;
      }
      consider(u, val);
    }
  }

  if (best_val > old) {
    s.directions[idx].u = best_u;
    s.value = best_val;
  }
  return best_val > old + opt_.tol * (1.0 + std::abs(old));
}

void ConeSolver::add_direction(ConeSolution& s, std::size_t block, Rng& rng) {
  const double before = s.value;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_.d + 1));
  u[0] = 1.0;
  s.directions.push_back(QuadDirection{block, u});
  optimize_direction(s, s.directions.size() - 1, true, rng);
  s.value = std::max(s.value, before);
}

bool ConeSolver::optimize_extra(ConeSolution& s, std::size_t idx) {
  const double old = s.value;
  std::size_t best_g = s.extras[idx];
  double best_val = old;
  auto extras = s.extras;
  for (std::size_t g = 0; g < basis_.extra_weights.size(); ++g) {
    if (std::find(s.extras.begin(), s.extras.end(), g) != s.extras.end()) continue;
    extras[idx] = g;
    const double v = evaluate(build_linear(extras), s.directions).value;
    if (v > best_val) {
      best_val = v;
      best_g = g;
    }
  }
  s.extras[idx] = best_g;
  s.value = best_val;
  return best_val > old + opt_.tol * (1.0 + std::abs(old));
}

void ConeSolver::add_extra(ConeSolution& s) {
  const std::size_t n_grid = basis_.extra_weights.size();
  if (s.extras.size() >= n_grid) return;
  std::size_t first_unused = 0;
  while (std::find(s.extras.begin(), s.extras.end(), first_unused) != s.extras.end()) ++first_unused;
  s.extras.push_back(first_unused);
  const double before = s.value;
  s.value = evaluate(build_linear(s.extras), s.directions).value;
  optimize_extra(s, s.extras.size() - 1);
  s.value = std::max(s.value, before);
}

void ConeSolver::finalize(ConeSolution& s) const {
  const Linear lin = build_linear(s.extras);
  const auto p = R_.rows();
  Eigen::MatrixXd Aq(p, static_cast<Eigen::Index>(s.directions.size()));
  Eigen::MatrixXd Rq(p, Aq.cols());
  for (std::size_t r = 0; r < s.directions.size(); ++r) {
    const auto& q = s.directions[r];
    Aq.col(static_cast<Eigen::Index>(r)) = quad_column(lin, q);
    const auto first = static_cast<Eigen::Index>(basis_.quad(q.block, 0, 0));
    Rq.col(static_cast<Eigen::Index>(r)) =
        basis_.sign(q.block) * (R_.middleCols(first, static_cast<Eigen::Index>(basis_.quad_block())) * quad_weights(q.u));
  }
  const auto fit = nnls(Aq, lin.y_perp);
  const Eigen::VectorXd xl = lin.qr.solve(Eigen::VectorXd(y_ - Rq * fit.x));

  s.coef = Eigen::VectorXd::Zero(p);
  const auto nl = static_cast<Eigen::Index>(basis_.linear_dim());
  s.coef.head(nl) = xl.head(nl);
  for (std::size_t t = 0; t < s.extras.size(); ++t) {
    s.coef[static_cast<Eigen::Index>(basis_.extra(s.extras[t]))] += xl[nl + static_cast<Eigen::Index>(t)];
  }
  for (std::size_t r = 0; r < s.directions.size(); ++r) {
    const auto& q = s.directions[r];
    const auto first = static_cast<Eigen::Index>(basis_.quad(q.block, 0, 0));
    s.coef.segment(first, static_cast<Eigen::Index>(basis_.quad_block())) +=
        fit.x[static_cast<Eigen::Index>(r)] * basis_.sign(q.block) * quad_weights(q.u);
  }
}

const ConeSolution& ConeSolver::solve(const ConeKey& key) {
  if (key.ranks.size() != basis_.k0) throw std::invalid_argument("ConeSolver: key has wrong length");
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  Rng rng(seed_, key_stream(key));
  ConeSolution best;
  bool have = false;
  auto offer = [&](ConeSolution cand) {
    if (!have || cand.value > best.value) {
      best = std::move(cand);
      have = true;
    }
  };

  for (std::size_t i = 0; i < key.ranks.size(); ++i) {
    if (key.ranks[i] == 0) continue;
    ConeKey prev = key;
    --prev.ranks[i];
    ConeSolution cand = solve(prev);
    add_direction(cand, i, rng);
    offer(std::move(cand));
  }
  if (key.free > 0) {
    ConeKey prev = key;
    --prev.free;
    ConeSolution cand = solve(prev);
    add_extra(cand);
    offer(std::move(cand));
  }

  if (!have) {
    best.value = build_linear({}).base;
    best.converged = true;
  } else {
    best.converged = false;
    for (std::size_t sweep = 0; sweep < opt_.max_sweeps; ++sweep) {
      const double old = best.value;
      for (std::size_t r = 0; r < best.directions.size(); ++r) optimize_direction(best, r, false, rng);
      for (std::size_t t = 0; t < best.extras.size(); ++t) optimize_extra(best, t);
      if (best.value - old <= opt_.tol * (1.0 + std::abs(old))) {
        best.converged = true;
        break;
      }
    }
  }
  finalize(best);
  return memo_.emplace(key, std::move(best)).first->second;
}

}  // namespace mlplr
