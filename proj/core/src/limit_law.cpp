#include "mlplr/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlplr/parallel.hpp"
#include "mlplr/rng.hpp"

namespace mlplr {

namespace {

// Phase one of the simplex method with Bland's rule: is {s >= 0, A s = b}
// non-empty?
bool phase_one_feasible(Eigen::MatrixXd A, Eigen::VectorXd b, double tol) {
  const Eigen::Index m = A.rows(), n = A.cols();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (b[i] < 0.0) {
      A.row(i) *= -1.0;
      b[i] = -b[i];
    }
  }
  // tableau columns: n originals, m artificials, rhs
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  T.col(n + m).head(m) = b;
  std::vector<Eigen::Index> basic(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basic[static_cast<std::size_t>(i)] = n + i;
  // objective row: minimize sum of artificials, expressed in non-basic terms
  for (Eigen::Index i = 0; i < m; ++i) T.row(m) -= T.row(i);
  T.block(m, n, 1, m).setZero();

  for (int iter = 0; iter < 10000; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (T(m, j) < -tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (T(i, enter) > tol) {
        const double ratio = T(i, n + m) / T(i, enter);
        if (ratio < best_ratio - tol ||
            (std::abs(ratio - best_ratio) <= tol && leave >= 0 &&
             basic[static_cast<std::size_t>(i)] < basic[static_cast<std::size_t>(leave)])) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) break;  // unbounded direction cannot occur in phase one
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    basic[static_cast<std::size_t>(leave)] = enter;
  }
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  return -T(m, n + m) <= tol * scale * static_cast<double>(m + 1);
}

}  // namespace

bool delta_feasible(const std::vector<std::vector<double>>& nus, double tol) {
  if (nus.empty()) throw std::invalid_argument("delta_feasible: empty list");
  const std::size_t rows = nus.front().size();
  for (const auto& v : nus) {
    if (v.size() != rows) throw std::invalid_argument("delta_feasible: vectors differ in length");
  }
  Eigen::MatrixXd N(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(nus.size()));
  for (std::size_t j = 0; j < nus.size(); ++j)
    for (std::size_t l = 0; l < rows; ++l)
      N(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = nus[j][l];
  const double scale = N.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  N /= scale;
  // c = 1 + s with s >= 0:  N s = -N 1
  const Eigen::VectorXd b = -(N * Eigen::VectorXd::Ones(N.cols()));
  return phase_one_feasible(N, b, tol);
}

std::vector<std::vector<double>> realize_quadratic_block(const Eigen::MatrixXd& A, std::size_t m,
                                                         double tol) {
  if (A.rows() != A.cols() || A.rows() == 0) throw std::invalid_argument("realize: A must be square");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > tol * std::max(1.0, A.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("realize: A must be symmetric");
  }
  if (m == 0) throw std::invalid_argument("realize: m must be >= 1");
  const Eigen::Index n = A.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
  const double thresh = tol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -thresh) throw std::invalid_argument("realize: A must be PSD");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < n; ++j)
    if (es.eigenvalues()[j] > thresh) keep.push_back(j);
  const auto r = static_cast<Eigen::Index>(keep.size());
  if (static_cast<std::size_t>(r) + 1 > m && r > 0) {
    throw std::invalid_argument("realize: rank(A) must be <= m - 1");
  }
  // V V^T = A
  Eigen::MatrixXd V(n, r);
  for (Eigen::Index t = 0; t < r; ++t) {
    V.col(t) = std::sqrt(es.eigenvalues()[keep[static_cast<std::size_t>(t)]]) *
               es.eigenvectors().col(keep[static_cast<std::size_t>(t)]);
  }
  // U: m x r orthonormal columns orthogonal to the ones vector (Helmert basis)
  const auto mm = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(mm, r);
  for (Eigen::Index t = 0; t < r; ++t) {
    const double len = static_cast<double>(t + 1);
    const double norm = std::sqrt(len * (len + 1.0));
    for (Eigen::Index j = 0; j <= t; ++j) U(j, t) = 1.0 / norm;
    U(t + 1, t) = -len / norm;
  }
  const Eigen::MatrixXd N = V * U.transpose();  // n x m
  std::vector<std::vector<double>> out(m, std::vector<double>(static_cast<std::size_t>(n)));
  for (std::size_t j = 0; j < m; ++j)
    for (Eigen::Index l = 0; l < n; ++l) out[j][static_cast<std::size_t>(l)] = N(l, static_cast<Eigen::Index>(j));
  return out;
}

ConeKey cone_key(const Partition& t, std::size_t k, std::size_t d, bool extended) {
  t.validate(k);
  ConeKey key;
  for (std::size_t i = 0; i < t.true_width(); ++i) key.ranks.push_back(admissible_rank(t.group_size(i), d));
  key.free = extended ? k - t.grouped() : 0;
  return key;
}

Eigen::VectorXd normalize_score(const Eigen::VectorXd& c, const GramMatrix& gram) {
  if (c.size() != gram.sigma.rows()) throw std::invalid_argument("normalize_score: size mismatch");
  const double q = c.dot(gram.sigma * c);
  if (!(q > 0.0)) throw std::invalid_argument("normalize_score: zero norm");
  return c / std::sqrt(q);
}

double rayleigh_value(const Eigen::VectorXd& c, const Eigen::VectorXd& g, const GramMatrix& gram) {
  if (c.size() != gram.sigma.rows() || g.size() != c.size()) {
    throw std::invalid_argument("rayleigh_value: size mismatch");
  }
  const double q = c.dot(gram.sigma * c);
  if (!(q > 0.0)) throw std::invalid_argument("rayleigh_value: zero norm");
  const double w = std::max(c.dot(g), 0.0);
  return w * w / q;
}

Eigen::VectorXd limit_draw(std::size_t dim, std::uint64_t seed, std::size_t draw) {
  Rng rng(seed, draw);
  Eigen::VectorXd y(static_cast<Eigen::Index>(dim));
  for (Eigen::Index l = 0; l < y.size(); ++l) y[l] = rng.normal();
  return y;
}

LimitSample simulate_limit(const RegressionSpec& spec, std::size_t k, const GramMatrix& gram,
                           std::size_t n_draws, std::uint64_t seed, const LimitOptions& opt) {
  spec.validate();
  const std::size_t k0 = spec.true_width();
  if (k < k0) throw std::invalid_argument("simulate_limit: k must be >= k0");
  if (gram.basis.k0 != k0 || gram.basis.d != spec.input_dim) {
    throw std::invalid_argument("simulate_limit: gram was built for a different spec");
  }
  if (opt.extended && gram.basis.extra_weights.empty()) {
    throw std::invalid_argument("simulate_limit: extended index set needs an extended gram");
  }
  if (!check_h4(gram, opt.h4_tolerance).pass) throw LimitSimulationError("simulate_limit: gram fails the H-4 check");

  // Extra columns stay in the draw even when unused, so extended and plain
  // runs on the same gram share their Gaussian draws.
  const ScoreBasis& basis = gram.basis;
  const Eigen::MatrixXd Rb = whitening_factor(gram.sigma);
  const std::size_t p_used = basis.dim();

  LimitSample out;
  out.k = k;
  out.k0 = k0;
  out.d = spec.input_dim;
  out.seed = seed;
  out.partitions = enumerate_partitions(k, k0);
  std::vector<ConeKey> keys;
  for (const auto& t : out.partitions) keys.push_back(cone_key(t, k, spec.input_dim, opt.extended));

  out.values.assign(n_draws, 0.0);
  out.best_partition.assign(n_draws, 0);
  out.restarts.assign(n_draws, 0);
  std::vector<char> conv(n_draws, 0);

  parallel_for(n_draws, opt.threads, [&](std::size_t j) {
    const Eigen::VectorXd y = limit_draw(p_used, seed, j);
    ConeSearchOptions search = opt.search;
    for (std::size_t attempt = 0; attempt <= opt.retries; ++attempt) {
      ConeSolver solver(basis, Rb, y, search, derive_seed(seed ^ 0xc0e5ULL, j) + attempt);
      double best = -1.0;
      std::size_t arg = 0;
      bool all_conv = true;
      for (std::size_t t = 0; t < keys.size(); ++t) {
        const auto& s = solver.solve(keys[t]);
        all_conv = all_conv && s.converged;
        if (s.value > best) {
          best = s.value;
          arg = t;
        }
      }
      if (!std::isfinite(best)) throw LimitSimulationError("simulate_limit: non-finite draw");
      out.values[j] = std::max(best, 0.0);
      out.best_partition[j] = arg;
      out.restarts[j] += solver.restarts_used();
      conv[j] = all_conv ? 1 : 0;
      if (all_conv) break;
      search.max_sweeps *= 4;
      search.restarts = 2 * search.restarts + 1;
    }
  });
  out.converged.assign(conv.begin(), conv.end());
  return out;
}

}  // namespace mlplr
