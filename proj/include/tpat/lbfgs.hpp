#pragma once

#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tpat {

/// Box-constrained limited-memory BFGS in a weighted inner product
/// <a, b> = sum w_i a_i b_i. The callback returns f(x) and writes the gradient
/// with respect to that inner product (its Riesz representer).
struct LbfgsOptions {
  double grad_tol = 1e-6;  ///< relative to the initial projected-gradient norm
  int max_iterations = 200;
  int history = 10;
  double lower = 0.0;
  double upper = 1.0;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  /// Infinity-norm cap of the first trial step relative to max |x|.
  double first_step_fraction = 0.1;
};

struct LbfgsIteration {
  int iteration = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step_length = 0.0;
};

struct LbfgsResult {
  std::vector<double> x;
  double objective = 0.0;
  bool converged = false;
  std::vector<LbfgsIteration> history;  ///< entry 0 is the initial point
  std::string stop_reason;
};

using ObjectiveFn = std::function<double(std::span<const double> x, std::span<double> grad)>;

LbfgsResult minimize_lbfgsb(const ObjectiveFn& fn, std::vector<double> x0, std::span<const double> weights,
                            const LbfgsOptions& opt);

}  // namespace tpat
