#include "mlplr/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace mlplr {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sup_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct Pair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// Two-loop recursion: returns H * v for the L-BFGS inverse Hessian estimate.
std::vector<double> apply_inverse_hessian(const std::deque<Pair>& mem, std::span<const double> v) {
  std::vector<double> q(v.begin(), v.end());
  std::vector<double> alpha(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    alpha[k] = mem[k].rho * dot(mem[k].s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * mem[k].y[i];
  }
  if (!mem.empty()) {
    const auto& last = mem.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v2 : q) v2 *= gamma;
  }
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double beta = mem[k].rho * dot(mem[k].y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * mem[k].s[i];
  }
  return q;
}

}  // namespace

double projected_gradient_norm(const FeasibleSet& set, std::span<const double> x,
                               std::span<const double> grad) {
  std::vector<double> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = x[i] - grad[i];
  set.project(p);
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - p[i]));
  return m;
}

QuasiNewtonResult minimize_projected_qn(const ObjectiveFn& f, const FeasibleSet& set,
                                        std::vector<double> x0, const QuasiNewtonOptions& opt) {
  const std::size_t n = x0.size();
  QuasiNewtonResult res;
  set.project(x0);
  std::vector<double> x = std::move(x0);
  std::vector<double> g(n), g_new(n), x_new(n), d(n);
  double fx = f(x, g);
  res.evaluations = 1;
  std::deque<Pair> mem;
  std::vector<char> restricted(n, 0), restricted_prev(n, 0);

  auto try_direction = [&](std::span<const double> dir, double alpha0, double& f_out) -> bool {
    double alpha = alpha0;
    for (std::size_t bt = 0; bt < opt.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + alpha * dir[i];
      set.project(x_new);
      double decrease = 0.0;
      for (std::size_t i = 0; i < n; ++i) decrease += g[i] * (x_new[i] - x[i]);
      const double f_try = f(x_new, g_new);
      ++res.evaluations;
      if (std::isfinite(f_try) && decrease < 0.0 && f_try <= fx + opt.armijo * decrease) {
        f_out = f_try;
        return true;
      }
      alpha *= 0.5;
    }
    return false;
  };

  res.projected_grad_norm = projected_gradient_norm(set, x, g);
  while (res.iterations < opt.max_iters) {
    if (res.projected_grad_norm <= opt.grad_tol) {
      res.converged = true;
      break;
    }
    // Steepest feasible direction, then the quasi-Newton direction built on it.
    std::vector<double> steepest(n);
    for (std::size_t i = 0; i < n; ++i) steepest[i] = -g[i];
    set.restrict_direction(x, steepest);
    // Curvature pairs gathered under a different active set mislead the
    // reduced problem; start the memory afresh when it changes.
    for (std::size_t i = 0; i < n; ++i) restricted[i] = steepest[i] != -g[i];
    if (restricted != restricted_prev) mem.clear();
    restricted_prev = restricted;

    d = apply_inverse_hessian(mem, steepest);
    set.restrict_direction(x, d);
    bool use_qn = !mem.empty() && dot(d, g) < 0.0;
    if (!use_qn) d = steepest;

    double f_new = fx;
    const double first_alpha = mem.empty() ? std::min(1.0, 1.0 / std::max(sup_norm(d), 1e-300)) : 1.0;
    bool ok = try_direction(d, first_alpha, f_new);
    if (!ok && use_qn) {
      mem.clear();
      d = steepest;
      ok = try_direction(d, std::min(1.0, 1.0 / std::max(sup_norm(d), 1e-300)), f_new);
    }
    if (!ok) break;

    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      // a coordinate held in place by the projection carries no curvature
      y[i] = s[i] == 0.0 ? 0.0 : g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y)) && sy > 0.0) {
      mem.push_back(Pair{s, y, 1.0 / sy});
      if (mem.size() > opt.memory) mem.pop_front();
    }
    const double step = sup_norm(s);
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    ++res.iterations;
    if (opt.keep_trace) res.trace.push_back(fx);
    res.projected_grad_norm = projected_gradient_norm(set, x, g);
    if (step < opt.step_tol) break;
  }
  if (res.projected_grad_norm <= opt.grad_tol) res.converged = true;
  res.x = std::move(x);
  res.f = fx;
  return res;
}

}  // namespace mlplr
