#include "mlplr/regression.hpp"

#include <cmath>
#include <stdexcept>

namespace mlplr {

void InputLaw::sample(Rng& rng, std::span<double> out) const {
  const double s = stddev();
  for (double& v : out) v = s * rng.normal();
}

std::string InputLaw::name() const {
  return kind == Kind::normal ? "normal" : "standard_normal";
}

InputLaw InputLaw::from_name(const std::string& name, double scale) {
  if (name == "standard_normal") return {Kind::standard_normal, 1.0};
  if (name == "normal") {
    if (!(scale > 0.0)) throw std::invalid_argument("InputLaw: normal scale must be > 0");
    return {Kind::normal, scale};
  }
  throw std::invalid_argument("InputLaw: unknown kind '" + name + "'");
}

void RegressionSpec::validate() const {
  theta0.validate();
  if (theta0.input_dim() != input_dim) {
    throw std::invalid_argument("RegressionSpec: theta0 weights do not match input_dim");
  }
  if (input_dim == 0) throw std::invalid_argument("RegressionSpec: input_dim must be >= 1");
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("RegressionSpec: sigma2 must be >= 0");
  if (!(noise_scale >= 0.0)) throw std::invalid_argument("RegressionSpec: noise_scale must be >= 0");
}

bool RegressionSpec::distinct_true_weights(double tol) const {
  const auto& u = theta0.units;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < u[i].w.size(); ++l) {
        const double dlt = u[i].w[l] - u[j].w[l];
        s += dlt * dlt;
      }
      if (std::sqrt(s) <= tol) return false;
    }
  }
  return true;
}

bool RegressionSpec::interior_to(const ConstraintBox& box) const {
  const auto rep = check_constraints(theta0, box);
  return rep.min_slack() > 0.0;
}

RegressionSpec default_desk_spec() {
  RegressionSpec spec;
  spec.theta0.beta = 0.5;
  spec.theta0.units = {HiddenUnit{1.0, {0.5, 1.0}}};
  spec.sigma2 = 1.0;
  spec.input_dim = 1;
  return spec;
}

ConstraintBox default_desk_box() { return ConstraintBox{0.1, 50.0, true}; }

void Dataset::validate() const {
  if (y.empty()) throw std::invalid_argument("Dataset: n must be >= 1");
  if (d == 0) throw std::invalid_argument("Dataset: d must be >= 1");
  if (x.size() != y.size() * d) throw std::invalid_argument("Dataset: x has inconsistent row lengths");
}

Dataset generate_dataset(const RegressionSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw std::invalid_argument("generate_dataset: n must be >= 1");
  Dataset data;
  data.d = spec.input_dim;
  data.sigma2 = spec.sigma2;
  data.x.resize(n * data.d);
  data.y.resize(n);
  const double noise_sd = std::sqrt(spec.sigma2) * spec.noise_scale;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seed, i);
    std::span<double> xi(data.x.data() + i * data.d, data.d);
    spec.input_law.sample(rng, xi);
    const double eps = rng.normal();
    data.y[i] = mlp_forward(spec.theta0, xi) + noise_sd * eps;
  }
  return data;
}

}  // namespace mlplr
