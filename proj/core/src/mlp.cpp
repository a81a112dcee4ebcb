#include "mlplr/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mlplr {

std::size_t MlpParams::input_dim() const {
  if (units.empty() || units.front().w.empty()) {
    throw std::invalid_argument("MlpParams: no hidden units");
  }
  return units.front().w.size() - 1;
}

void MlpParams::validate() const {
  if (units.empty()) throw std::invalid_argument("MlpParams: k must be >= 1");
  const std::size_t len = units.front().w.size();
  if (len < 1) throw std::invalid_argument("MlpParams: weight vector must have length d+1 >= 1");
  for (const auto& u : units) {
    if (u.w.size() != len) {
      throw std::invalid_argument("MlpParams: inconsistent weight lengths (" +
                                  std::to_string(u.w.size()) + " vs " + std::to_string(len) + ")");
    }
  }
}

std::vector<double> MlpParams::flatten() const {
  std::vector<double> out(flat_size());
  flatten_into(out);
  return out;
}

void MlpParams::flatten_into(std::span<double> out) const {
  const FlatLayout lay{hidden(), input_dim()};
  if (out.size() != lay.size()) throw std::invalid_argument("flatten_into: wrong output size");
  out[lay.beta()] = beta;
  for (std::size_t i = 0; i < lay.k; ++i) {
    out[lay.amp(i)] = units[i].a;
    for (std::size_t l = 0; l <= lay.d; ++l) out[lay.weight(i, l)] = units[i].w[l];
  }
}

MlpParams MlpParams::unflatten(std::span<const double> flat, std::size_t k, std::size_t d) {
  const FlatLayout lay{k, d};
  if (k == 0) throw std::invalid_argument("unflatten: k must be >= 1");
  if (flat.size() != lay.size()) {
    throw std::invalid_argument("unflatten: expected " + std::to_string(lay.size()) +
                                " values, got " + std::to_string(flat.size()));
  }
  MlpParams p;
  p.beta = flat[lay.beta()];
  p.units.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    p.units[i].a = flat[lay.amp(i)];
    p.units[i].w.assign(flat.begin() + static_cast<std::ptrdiff_t>(lay.weight(i, 0)),
                        flat.begin() + static_cast<std::ptrdiff_t>(lay.weight(i, 0) + d + 1));
  }
  return p;
}

double MlpParams::norm() const {
  // same summation order as the flat layout
  double s = beta * beta;
  for (const auto& u : units) s += u.a * u.a;
  for (const auto& u : units) {
    for (double v : u.w) s += v * v;
  }
  return std::sqrt(s);
}

double augmented_dot(std::span<const double> w, std::span<const double> x) noexcept {
  double s = w[0];
  for (std::size_t l = 0; l < x.size(); ++l) s += w[l + 1] * x[l];
  return s;
}

double mlp_forward(const MlpParams& theta, std::span<const double> x, TransferKind kind) {
  const std::size_t d = theta.input_dim();
  if (x.size() != d) {
    throw std::invalid_argument("mlp_forward: input has dimension " + std::to_string(x.size()) +
                                ", model expects " + std::to_string(d));
  }
  double f = theta.beta;
  for (const auto& u : theta.units) {
    f += u.a * transfer_eval(augmented_dot(u.w, x), 0, kind);
  }
  return f;
}

}  // namespace mlplr
