#pragma once

#include <functional>
#include <string>

#include "tps/common.hpp"

namespace tps {

// Evaluates the residual at x and, when jac is non-null, its Jacobian.
// Returning false marks x as infeasible (treated as a rejected step).
using ResidualFunction = std::function<bool(const RVector& x, RVector& r, RMatrix* jac)>;

enum class DescentMethod { levenberg_marquardt, gradient_descent };

struct DescentOptions {
  DescentMethod method = DescentMethod::levenberg_marquardt;
  int max_iter = 500;
  // Stop once ||r|| drops below this absolute value.
  double target_value = 0.0;
  // Stop when the step is below step_tol * (||x|| + step_tol).
  double step_tol = 1e-14;
  double initial_damping = 1e-3;
};

struct DescentResult {
  RVector x;
  RVector residual;
  double value = 0.0;  // ||residual||
  int iterations = 0;
  int evaluations = 0;
  bool reached_target = false;
  std::string stop_reason;
};

/// Damped Gauss-Newton with the Nielsen damping update; plain gradient
/// descent with Armijo backtracking when method == gradient_descent.
DescentResult minimize_least_squares(const ResidualFunction& f, RVector x0, const DescentOptions& opts);

// Central differences of a residual-only function.
RMatrix central_difference_jacobian(const std::function<RVector(const RVector&)>& f, const RVector& x, double step);

}  // namespace tps
