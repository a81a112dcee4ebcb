#include "mlplr/score_basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mlplr/rng.hpp"
#include "mlplr/transfer.hpp"

namespace mlplr {

ScoreBasis ScoreBasis::from_spec(const RegressionSpec& spec,
                                 std::vector<std::vector<double>> extra_weights) {
  spec.validate();
  ScoreBasis b;
  b.k0 = spec.theta0.hidden();
  b.d = spec.input_dim;
  for (const auto& u : spec.theta0.units) {
    b.true_weights.push_back(u.w);
    b.true_amplitudes.push_back(u.a);
  }
  for (const auto& w : extra_weights) {
    if (w.size() != b.d + 1) throw std::invalid_argument("ScoreBasis: extra weight has wrong length");
  }
  b.extra_weights = std::move(extra_weights);
  return b;
}

std::size_t ScoreBasis::quad(std::size_t i, std::size_t l, std::size_t m) const noexcept {
  if (l > m) std::swap(l, m);
  const std::size_t n = d + 1;
  // rows l < current contribute n - l' entries each
  const std::size_t offset = l * n - l * (l - 1) / 2 + (m - l);
  return linear_dim() + i * quad_block() + offset;
}

void ScoreBasis::eval(std::span<const double> x, std::span<double> out) const {
  if (x.size() != d) throw std::invalid_argument("ScoreBasis::eval: input dimension mismatch");
  if (out.size() != dim()) throw std::invalid_argument("ScoreBasis::eval: output size mismatch");
  out[constant()] = 1.0;
  const std::size_t n = d + 1;
  for (std::size_t i = 0; i < k0; ++i) {
    const auto td = transfer_all(augmented_dot(true_weights[i], x));
    out[phi(i)] = td.value;
    std::size_t q = linear_dim() + i * quad_block();
    for (std::size_t l = 0; l < n; ++l) {
      const double xl = l == 0 ? 1.0 : x[l - 1];
      out[lin(i, l)] = xl * td.d1;
      for (std::size_t m = l; m < n; ++m) {
        const double xm = m == 0 ? 1.0 : x[m - 1];
        out[q++] = xl * xm * td.d2;
      }
    }
  }
  for (std::size_t g = 0; g < extra_weights.size(); ++g) {
    out[extra(g)] = sigmoid(augmented_dot(extra_weights[g], x));
  }
}

std::vector<double> eval_score_basis(const RegressionSpec& spec, std::span<const double> x) {
  const auto b = ScoreBasis::from_spec(spec);
  std::vector<double> out(b.dim());
  b.eval(x, out);
  return out;
}

std::vector<std::vector<double>> extended_weight_grid(const RegressionSpec& spec,
                                                      const ConstraintBox& box) {
  spec.validate();
  box.validate();
  const std::size_t n = spec.input_dim + 1;
  std::vector<std::vector<double>> dirs;
  if (n == 2) {
    // phi(-t) = 1 - phi(t), so a half circle of directions suffices.
    constexpr int kAngles = 12;
    for (int j = 0; j < kAngles; ++j) {
      const double ang = (j + 0.5) * std::numbers::pi / kAngles;
      dirs.push_back({std::sin(ang), std::cos(ang)});
    }
  } else {
    Rng rng(0x5eed5eedULL);
    while (dirs.size() < 24) {
      std::vector<double> u(n);
      double nrm = 0.0, input = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        u[l] = rng.normal();
        nrm += u[l] * u[l];
        if (l > 0) input += u[l] * u[l];
      }
      if (input < 1e-6 * nrm) continue;
      for (double& v : u) v /= std::sqrt(nrm);
      dirs.push_back(std::move(u));
    }
  }
  std::vector<std::vector<double>> grid;
  for (double r : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    if (r < box.eta || r > box.M) continue;
    for (const auto& u : dirs) {
      std::vector<double> w(n);
      for (std::size_t l = 0; l < n; ++l) w[l] = r * u[l];
      bool near_truth = false;
      for (const auto& unit : spec.theta0.units) {
        double dist2 = 0.0, dist2_neg = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
          dist2 += (w[l] - unit.w[l]) * (w[l] - unit.w[l]);
          dist2_neg += (w[l] + unit.w[l]) * (w[l] + unit.w[l]);
        }
        if (std::min(dist2, dist2_neg) < 1e-6) near_truth = true;
      }
      if (!near_truth) grid.push_back(std::move(w));
    }
  }
  return grid;
}

}  // namespace mlplr
