#include "mlplr/gram.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mlplr/parallel.hpp"
#include "mlplr/rng.hpp"

namespace mlplr {

namespace {

constexpr std::size_t kChunk = 4096;

struct ChunkSums {
  Eigen::MatrixXd s1;
  Eigen::MatrixXd s2;
};

void finish(GramMatrix& g, const Eigen::MatrixXd& mean) {
  g.x_gram = 0.5 * (mean + mean.transpose());
  g.sigma = g.x_gram / g.sigma2;
}

}  // namespace

GramMatrix gram_matrix(const RegressionSpec& spec, std::size_t mc_draws, std::uint64_t seed,
                       const ScoreBasis& basis, std::size_t threads) {
  spec.validate();
  if (mc_draws == 0) throw std::invalid_argument("gram_matrix: mc_draws must be >= 1");
  if (!(spec.sigma2 > 0.0)) throw std::invalid_argument("gram_matrix: sigma2 must be > 0");
  const std::size_t p = basis.dim();
  const std::size_t n_chunks = (mc_draws + kChunk - 1) / kChunk;
  std::vector<ChunkSums> chunks(n_chunks);

  parallel_for(n_chunks, threads, [&](std::size_t c) {
    Rng rng(seed, c);
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(mc_draws, begin + kChunk);
    std::vector<double> x(spec.input_dim);
    Eigen::VectorXd b(p);
    Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t j = begin; j < end; ++j) {
      spec.input_law.sample(rng, x);
      basis.eval(x, std::span<double>(b.data(), p));
      const Eigen::MatrixXd outer = b * b.transpose();
      s1 += outer;
      s2 += outer.cwiseProduct(outer);
    }
    chunks[c] = ChunkSums{std::move(s1), std::move(s2)};
  });

  // pairwise reduction in chunk order
  for (std::size_t stride = 1; stride < n_chunks; stride *= 2) {
    for (std::size_t c = 0; c + stride < n_chunks; c += 2 * stride) {
      chunks[c].s1 += chunks[c + stride].s1;
      chunks[c].s2 += chunks[c + stride].s2;
    }
  }

  GramMatrix g;
  g.basis = basis;
  g.mc_draws = mc_draws;
  g.seed = seed;
  g.mode = GramMatrix::Mode::monte_carlo;
  g.sigma2 = spec.sigma2;
  const double n = static_cast<double>(mc_draws);
  const Eigen::MatrixXd mean = chunks[0].s1 / n;
  finish(g, mean);
  if (mc_draws > 1) {
    const Eigen::MatrixXd var =
        ((chunks[0].s2 / n - mean.cwiseProduct(mean)) * (n / (n - 1.0))).cwiseMax(0.0);
    g.x_gram_se = (var / n).cwiseSqrt();
  } else {
    g.x_gram_se = Eigen::MatrixXd::Zero(p, p);
  }
  g.x_gram(0, 0) = 1.0;  // B_0 = 1 identically
  g.sigma(0, 0) = 1.0 / g.sigma2;
  return g;
}

GramMatrix gram_matrix(const RegressionSpec& spec, std::size_t mc_draws, std::uint64_t seed) {
  return gram_matrix(spec, mc_draws, seed, ScoreBasis::from_spec(spec));
}

void gauss_hermite_rule(std::size_t nodes, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  if (nodes == 0) throw std::invalid_argument("gauss_hermite_rule: nodes must be >= 1");
  // Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nodes, nodes);
  for (std::size_t k = 1; k < nodes; ++k) {
    J(k - 1, k) = J(k, k - 1) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x = es.eigenvalues();
  w = es.eigenvectors().row(0).transpose().array().square();
  w /= w.sum();
}

GramMatrix gram_matrix_gauss_hermite(const RegressionSpec& spec, const ScoreBasis& basis,
                                     std::size_t nodes) {
  spec.validate();
  if (spec.input_dim != 1) throw std::invalid_argument("gauss_hermite: requires d = 1");
  if (!(spec.sigma2 > 0.0)) throw std::invalid_argument("gram_matrix: sigma2 must be > 0");
  Eigen::VectorXd t, w;
  gauss_hermite_rule(nodes, t, w);
  const std::size_t p = basis.dim();
  const double s = spec.input_law.stddev();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd b(p);
  for (std::size_t j = 0; j < nodes; ++j) {
    const double x = s * t[static_cast<Eigen::Index>(j)];
    basis.eval(std::span<const double>(&x, 1), std::span<double>(b.data(), p));
    acc += w[static_cast<Eigen::Index>(j)] * (b * b.transpose());
  }
  GramMatrix g;
  g.basis = basis;
  g.mc_draws = nodes;
  g.mode = GramMatrix::Mode::gauss_hermite;
  g.sigma2 = spec.sigma2;
  finish(g, acc);
  g.x_gram_se = Eigen::MatrixXd::Zero(p, p);
  return g;
}

GramMatrix gram_matrix_gauss_hermite(const RegressionSpec& spec, std::size_t nodes) {
  return gram_matrix_gauss_hermite(spec, ScoreBasis::from_spec(spec), nodes);
}

H4Report check_h4(const Eigen::MatrixXd& x_gram, double tolerance) {
  if (x_gram.rows() == 0 || x_gram.rows() != x_gram.cols()) {
    throw std::invalid_argument("check_h4: matrix must be square and non-empty");
  }
  const Eigen::MatrixXd sym = 0.5 * (x_gram + x_gram.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  H4Report r;
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.pass = r.min_eigenvalue >= tolerance;
  const Eigen::VectorXd diag = sym.diagonal();
  if ((diag.array() > 0.0).all()) {
    const Eigen::VectorXd inv = diag.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd corr = inv.asDiagonal() * sym * inv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(corr, Eigen::EigenvaluesOnly);
    r.min_correlation_eigenvalue = ec.eigenvalues().minCoeff();
  }
  return r;
}

H4Report check_h4(const GramMatrix& gram, double tolerance) {
  const auto p = static_cast<Eigen::Index>(gram.basis.core_dim());
  if (gram.x_gram.rows() < p) throw std::invalid_argument("check_h4: gram smaller than its basis");
  return check_h4(Eigen::MatrixXd(gram.x_gram.topLeftCorner(p, p)), tolerance);
}

}  // namespace mlplr
