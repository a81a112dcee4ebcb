#include "mlplr/constraints.hpp"

#include <algorithm>
#include <cmath>

namespace mlplr {

namespace {

double norm_range(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Raises one unit to its lower bounds, in place, within a flat vector.
void apply_unit_bounds(std::span<double> flat, const FlatLayout& lay, std::size_t i,
                       const ConstraintBox& box) {
  double& a = flat[lay.amp(i)];
  if (box.positive_amplitudes) {
    a = std::max(a, box.eta);
  } else if (std::abs(a) < box.eta) {
    a = (a < 0.0) ? -box.eta : box.eta;
  }
  auto w = flat.subspan(lay.weight(i, 0), lay.d + 1);
  const double nw = norm_range(w);
  if (nw < box.eta) {
    if (nw == 0.0) {
      std::fill(w.begin(), w.end(), 0.0);
      w[0] = box.eta;
    } else {
      double s = box.eta / nw;
      for (double& v : w) v *= s;
      // rounding can leave the norm an ulp short of eta
      while (norm_range(w) < box.eta) {
        s = std::nextafter(1.0, 2.0);
        for (double& v : w) v *= s;
      }
    }
  }
}

bool flat_feasible(std::span<const double> flat, const FlatLayout& lay, const ConstraintBox& box,
                   double rel_tol) {
  for (std::size_t i = 0; i < lay.k; ++i) {
    const double a = flat[lay.amp(i)];
    const double as = box.positive_amplitudes ? a : std::abs(a);
    if (as < box.eta * (1.0 - rel_tol)) return false;
    if (norm_range(flat.subspan(lay.weight(i, 0), lay.d + 1)) < box.eta * (1.0 - rel_tol)) {
      return false;
    }
  }
  return norm_range(flat) <= box.M * (1.0 + rel_tol);
}

}  // namespace

void ConstraintBox::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("ConstraintBox: eta must be > 0");
  if (!(eta < M)) throw std::invalid_argument("ConstraintBox: eta must be < M");
}

bool ConstraintBox::consistent_for(std::size_t k) const noexcept {
  return 2.0 * static_cast<double>(k) * eta * eta <= M * M;
}

double FeasibilityReport::min_slack() const noexcept {
  double m = norm_slack;
  for (double s : weight_slack) m = std::min(m, s);
  for (double s : amplitude_slack) m = std::min(m, s);
  return m;
}

FeasibilityReport check_constraints(const MlpParams& theta, const ConstraintBox& box) {
  theta.validate();
  FeasibilityReport r;
  r.weight_slack.reserve(theta.hidden());
  r.amplitude_slack.reserve(theta.hidden());
  for (const auto& u : theta.units) {
    r.weight_slack.push_back(norm_range(u.w) - box.eta);
    r.amplitude_slack.push_back((box.positive_amplitudes ? u.a : std::abs(u.a)) - box.eta);
  }
  r.norm_slack = box.M - theta.norm();
  r.feasible = r.min_slack() >= 0.0;
  return r;
}

void project_flat(std::span<double> flat, std::size_t k, std::size_t d, const ConstraintBox& box) {
  const FlatLayout lay{k, d};
  if (flat.size() != lay.size()) throw std::invalid_argument("project_flat: size mismatch");
  if (!box.consistent_for(k)) {
    throw ProjectionError("project_to_box: eta and M admit no feasible point with this many units");
  }
  for (std::size_t i = 0; i < k; ++i) apply_unit_bounds(flat, lay, i, box);

  const double nrm = norm_range(flat);
  if (nrm <= box.M) return;

  std::vector<double> original(flat.begin(), flat.end());
  const double s = box.M / nrm;
  for (double& v : flat) v *= s;
  for (std::size_t i = 0; i < k; ++i) apply_unit_bounds(flat, lay, i, box);
  if (norm_range(flat) <= box.M) return;

  // Re-raising the per-unit bounds pushed the norm back over M. Bisect on a
  // common shrink factor applied before the per-unit clamps; the clamped norm
  // is monotone in the factor and equals sqrt(2k) eta at zero.
  auto shrunk = [&](double f, std::span<double> out) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = original[j] * f;
    for (std::size_t i = 0; i < k; ++i) apply_unit_bounds(out, lay, i, box);
  };
  std::vector<double> trial(flat.size());
  double lo = 0.0, hi = s;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    shrunk(mid, trial);
    (norm_range(trial) <= box.M ? lo : hi) = mid;
  }
  shrunk(lo, flat);
  if (!flat_feasible(flat, lay, box, 1e-12)) {
    throw ProjectionError("project_to_box: could not reach a feasible point");
  }
}

MlpParams project_to_box(const MlpParams& theta, const ConstraintBox& box) {
  theta.validate();
  box.validate();
  auto flat = theta.flatten();
  project_flat(flat, theta.hidden(), theta.input_dim(), box);
  return MlpParams::unflatten(flat, theta.hidden(), theta.input_dim());
}

}  // namespace mlplr
