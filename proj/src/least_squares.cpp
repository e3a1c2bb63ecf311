#include "tps/least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace tps {

namespace {

DescentResult levenberg_marquardt(const ResidualFunction& f, RVector x, const DescentOptions& opts) {
  DescentResult res;
  RVector r;
  RMatrix jac;
  if (!f(x, r, &jac)) throw Error(ErrorKind::numerical, "residual is not defined at the starting point");
  res.evaluations = 1;
  double value = r.norm();
  RMatrix a = jac.transpose() * jac;
  RVector g = jac.transpose() * r;
  double mu = opts.initial_damping * std::max(1e-300, a.diagonal().maxCoeff());
  double nu = 2.0;

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (value <= opts.target_value) {
      res.reached_target = true;
      res.stop_reason = "target";
      break;
    }
    RMatrix damped = a;
    damped.diagonal().array() += mu;
    const RVector h = damped.ldlt().solve(-g);
    if (!h.allFinite()) {
      res.stop_reason = "singular";
      break;
    }
    if (h.norm() <= opts.step_tol * (x.norm() + opts.step_tol)) {
      res.stop_reason = "stalled";
      break;
    }
    RVector x_new = x + h;
    RVector r_new;
    RMatrix jac_new;
    const bool ok = f(x_new, r_new, &jac_new);
    ++res.evaluations;
    const double predicted = h.dot(mu * h - g);
    const double actual = ok ? (r.squaredNorm() - r_new.squaredNorm()) : -1.0;
    const double rho = predicted > 0.0 ? actual / predicted : -1.0;
    if (ok && rho > 0.0) {
      x = std::move(x_new);
      r = std::move(r_new);
      jac = std::move(jac_new);
      value = r.norm();
      a = jac.transpose() * jac;
      g = jac.transpose() * r;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
    } else {
      mu *= nu;
      nu *= 2.0;
      if (!std::isfinite(mu) || mu > 1e300) {
        res.stop_reason = "damping overflow";
        break;
      }
    }
  }
  if (res.stop_reason.empty()) {
    if (value <= opts.target_value) {
      res.reached_target = true;
      res.stop_reason = "target";
    } else {
      res.stop_reason = "max_iter";
    }
  }
  res.x = std::move(x);
  res.residual = std::move(r);
  res.value = value;
  res.iterations = it;
  return res;
}

DescentResult gradient_descent(const ResidualFunction& f, RVector x, const DescentOptions& opts) {
  DescentResult res;
  RVector r;
  RMatrix jac;
  if (!f(x, r, &jac)) throw Error(ErrorKind::numerical, "residual is not defined at the starting point");
  res.evaluations = 1;
  double step = 1.0;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (r.norm() <= opts.target_value) {
      res.reached_target = true;
      res.stop_reason = "target";
      break;
    }
    const RVector g = jac.transpose() * r;
    const double phi = 0.5 * r.squaredNorm();
    bool accepted = false;
    while (step > 1e-20) {
      const RVector dx = -step * g;
      if (dx.norm() <= opts.step_tol * (x.norm() + opts.step_tol)) break;
      RVector x_new = x + dx;
      RVector r_new;
      RMatrix jac_new;
      const bool ok = f(x_new, r_new, &jac_new);
      ++res.evaluations;
      if (ok && 0.5 * r_new.squaredNorm() <= phi - 1e-4 * step * g.squaredNorm()) {
        x = std::move(x_new);
        r = std::move(r_new);
        jac = std::move(jac_new);
        step *= 2.0;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.stop_reason = "stalled";
      break;
    }
  }
  if (res.stop_reason.empty()) {
    res.reached_target = r.norm() <= opts.target_value;
    res.stop_reason = res.reached_target ? "target" : "max_iter";
  }
  res.x = std::move(x);
  res.value = r.norm();
  res.residual = std::move(r);
  res.iterations = it;
  return res;
}

}  // namespace

DescentResult minimize_least_squares(const ResidualFunction& f, RVector x0, const DescentOptions& opts) {
  if (opts.method == DescentMethod::gradient_descent) return gradient_descent(f, std::move(x0), opts);
  return levenberg_marquardt(f, std::move(x0), opts);
}

RMatrix central_difference_jacobian(const std::function<RVector(const RVector&)>& f, const RVector& x, double step) {
  const RVector r0 = f(x);
  RMatrix jac(r0.size(), x.size());
  RVector xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xp(j) = x(j) + step;
    const RVector rp = f(xp);
    xp(j) = x(j) - step;
    const RVector rm = f(xp);
    xp(j) = x(j);
    jac.col(j) = (rp - rm) / (2.0 * step);
  }
  return jac;
}

}  // namespace tps
