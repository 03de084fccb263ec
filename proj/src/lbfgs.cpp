#include "tpat/lbfgs.hpp"

#include <algorithm>
#include <cmath>

#include "tpat/error.hpp"

namespace tpat {

namespace {

struct Pair {
  std::vector<double> s, y;
  double rho = 0.0;
};

class Space {
 public:
  explicit Space(std::span<const double> w) : w_(w) {}
  double dot(std::span<const double> a, std::span<const double> b) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w_[i] * a[i] * b[i];
    return s;
  }
  double norm(std::span<const double> a) const { return std::sqrt(dot(a, a)); }

 private:
  std::span<const double> w_;
};

}  // namespace

LbfgsResult minimize_lbfgsb(const ObjectiveFn& fn, std::vector<double> x0, std::span<const double> weights,
                            const LbfgsOptions& opt) {
  const std::size_t n = x0.size();
  if (weights.size() != n) throw ValidationError("minimize_lbfgsb: weight vector has wrong length");
  if (!(opt.lower < opt.upper)) throw ValidationError("minimize_lbfgsb: lower bound must be below upper bound");
  if (!(opt.grad_tol > 0.0) || opt.history < 1) throw ValidationError("minimize_lbfgsb: invalid options");

  const Space sp(weights);
  auto project = [&](std::vector<double>& x) {
    for (auto& v : x) v = std::clamp(v, opt.lower, opt.upper);
  };
  // Zero the components that sit on a bound with the gradient pointing outward.
  auto active = [&](const std::vector<double>& x, const std::vector<double>& g, std::size_t i) {
    return (x[i] <= opt.lower && g[i] > 0.0) || (x[i] >= opt.upper && g[i] < 0.0);
  };
  auto projected_gradient = [&](const std::vector<double>& x, const std::vector<double>& g) {
    std::vector<double> pg = g;
    for (std::size_t i = 0; i < n; ++i) {
      if (active(x, g, i)) pg[i] = 0.0;
    }
    return pg;
  };

  LbfgsResult res;
  std::vector<double> x = std::move(x0);
  project(x);
  std::vector<double> g(n);
  double f = fn(x, g);
  double pgnorm = sp.norm(projected_gradient(x, g));
  const double pgnorm0 = pgnorm;
  res.history.push_back({0, f, pgnorm, 0.0});

  std::deque<Pair> mem;
  std::vector<double> d(n), xt(n), gt(n);
  int it = 0;
  for (;;) {
    if (pgnorm <= opt.grad_tol * pgnorm0) {
      res.converged = true;
      res.stop_reason = "gradient tolerance reached";
      break;
    }
    if (it >= opt.max_iterations) {
      res.stop_reason = "iteration limit";
      break;
    }

    // Two-loop recursion.
    std::vector<double> q = projected_gradient(x, g);
    std::vector<double> alpha(mem.size());
    for (std::size_t k = mem.size(); k-- > 0;) {
      alpha[k] = mem[k].rho * sp.dot(mem[k].s, q);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * mem[k].y[i];
    }
    double h0 = 1.0;
    if (!mem.empty()) h0 = sp.dot(mem.back().s, mem.back().y) / sp.dot(mem.back().y, mem.back().y);
    for (std::size_t i = 0; i < n; ++i) q[i] *= h0;
    for (std::size_t k = 0; k < mem.size(); ++k) {
      const double beta = mem[k].rho * sp.dot(mem[k].y, q);
      for (std::size_t i = 0; i < n; ++i) q[i] += (alpha[k] - beta) * mem[k].s[i];
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = active(x, g, i) ? 0.0 : -q[i];
    if (!(sp.dot(g, d) < 0.0)) {
      mem.clear();
      d = projected_gradient(x, g);
      for (auto& v : d) v = -v;
    }
    if (mem.empty()) {
      double dmax = 0.0, xmax = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dmax = std::max(dmax, std::abs(d[i]));
        xmax = std::max(xmax, std::abs(x[i]));
      }
      const double cap = opt.first_step_fraction * std::max(xmax, opt.lower);
      if (dmax > cap) {
        for (auto& v : d) v *= cap / dmax;
      }
    }

    double step = 1.0;
    double ft = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < opt.max_backtracks; ++bt, step *= opt.backtrack) {
      for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + step * d[i];
      project(xt);
      double decrease = 0.0;
      for (std::size_t i = 0; i < n; ++i) decrease += weights[i] * g[i] * (xt[i] - x[i]);
      if (!(decrease < 0.0)) continue;
      ft = fn(xt, gt);
      if (ft < f && ft <= f + opt.armijo * decrease) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!mem.empty()) {
        mem.clear();
        continue;
      }
      res.stop_reason = "line search failed";
      break;
    }

    Pair p;
    p.s.resize(n);
    p.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = xt[i] - x[i];
      p.y[i] = gt[i] - g[i];
    }
    const double sy = sp.dot(p.s, p.y);
    if (sy > 1e-12 * sp.norm(p.s) * sp.norm(p.y)) {
      p.rho = 1.0 / sy;
      mem.push_back(std::move(p));
      if (static_cast<int>(mem.size()) > opt.history) mem.pop_front();
    }
    x.swap(xt);
    g.swap(gt);
    f = ft;
    pgnorm = sp.norm(projected_gradient(x, g));
    ++it;
    res.history.push_back({it, f, pgnorm, step});
  }

  res.x = std::move(x);
  res.objective = f;
  return res;
}

}  // namespace tpat
