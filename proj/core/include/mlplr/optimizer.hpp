#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mlplr {

/// Feasible region seen by the projected quasi-Newton solver.
class FeasibleSet {
 public:
  virtual ~FeasibleSet() = default;
  /// Map x onto the set, in place.
  virtual void project(std::span<double> x) const = 0;
  /// Remove from `direction` the components that would leave the set at once
  /// from the (feasible) point x: blocked coordinates and the outward normal
  /// of active norm constraints.
  virtual void restrict_direction(std::span<const double> x, std::span<double> direction) const = 0;
};

/// f(x), writing the gradient into grad. Minimized.
using ObjectiveFn = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct QuasiNewtonOptions {
  std::size_t max_iters = 1000;
  double grad_tol = 1e-6;   ///< sup-norm of x - P(x - grad f)
  double step_tol = 1e-12;  ///< stop when an accepted step moves less than this (sup-norm)
  std::size_t memory = 10;
  double armijo = 1e-4;
  std::size_t max_backtracks = 50;
  bool keep_trace = false;
};

struct QuasiNewtonResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  double projected_grad_norm = 0.0;
  std::vector<double> trace;  ///< objective after each accepted iteration (keep_trace)
};

/// Projected limited-memory BFGS with Armijo backtracking along the projected
/// path P(x + alpha d). Accepted iterations never increase f.
QuasiNewtonResult minimize_projected_qn(const ObjectiveFn& f, const FeasibleSet& set,
                                        std::vector<double> x0, const QuasiNewtonOptions& opt);

/// sup-norm of x - P(x - g).
double projected_gradient_norm(const FeasibleSet& set, std::span<const double> x,
                               std::span<const double> grad);

}  // namespace mlplr
