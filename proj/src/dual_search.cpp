#include "tps/dual_search.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "tps/parallel.hpp"

namespace tps {

namespace {

struct Evaluation {
  EigenSystem eigen;
  std::vector<int> matching;  // eigen index assigned to each target slot
};

EigenSystem diagonalize(const SearchSpace& space, const CVector& params) {
  const CMatrix h = space.to_expr(params).dense();
  return space.complexified ? eig_general(h) : eigh(h);
}

std::vector<int> match(const EigenSystem& es, const Spectrum& target) {
  if (es.hermitian && target.all_real()) {
    // Both sorted ascending: the identity pairing is optimal.
    std::vector<int> pi(es.values.size());
    for (std::size_t k = 0; k < pi.size(); ++k) pi[k] = static_cast<int>(k);
    return pi;
  }
  return match_spectra(es.values, target.values()).source_of_target;
}

// Rows follow the eigen order of `es`.
CMatrix analytic_jacobian(const EigenSystem& es, const SearchSpace& space) {
  const auto n = static_cast<Eigen::Index>(es.values.size());
  const auto m = static_cast<Eigen::Index>(space.cls->dim());
  CMatrix jac(n, m);
  std::vector<Complex> overlap(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) overlap[i] = es.left.col(i).dot(es.right.col(i));
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& terms = space.cls->basis()[static_cast<std::size_t>(j)].terms();
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex acc{};
      for (const auto& [p, c] : terms) acc += c * matrix_element(p, es.left.col(i), es.right.col(i));
      jac(i, j) = acc / overlap[i];
    }
  }
  return jac;
}

RVector stack_residual(const CVector& r, bool complexified) {
  if (!complexified) return r.real();
  RVector out(2 * r.size());
  out << r.real(), r.imag();
  return out;
}

// Real Jacobian of stack_residual with respect to the real coordinates.
RMatrix stack_jacobian(const CMatrix& j, bool complexified) {
  if (!complexified) return j.real();
  RMatrix out(2 * j.rows(), 2 * j.cols());
  out << j.real(), -j.imag(), j.imag(), j.real();
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string space_name(const SearchSpace& space) {
  std::string s = space.cls->name();
  if (space.cls->kind() == ClassKind::k_local) s += "(k=" + std::to_string(space.cls->k()) + ")";
  s += "[n=" + std::to_string(space.cls->n()) + (space.complexified ? ",complex]" : ",real]");
  return s;
}

}  // namespace

OperatorExpr SearchSpace::to_expr(const CVector& params) const {
  if (params.size() != complex_dim()) throw Error(ErrorKind::dimension, "parameter vector has wrong length");
  return OperatorExpr(cls, params);
}

CVector SearchSpace::to_complex(const RVector& x) const {
  if (x.size() != parameter_dim()) throw Error(ErrorKind::dimension, "coordinate vector has wrong length");
  const auto m = complex_dim();
  CVector p(m);
  for (Eigen::Index j = 0; j < m; ++j) p(j) = complexified ? Complex(x(j), x(j + m)) : Complex(x(j), 0.0);
  return p;
}

RVector SearchSpace::to_real(const CVector& params) const {
  if (params.size() != complex_dim()) throw Error(ErrorKind::dimension, "parameter vector has wrong length");
  if (!complexified) {
    if (params.imag().cwiseAbs().maxCoeff() > 0.0)
      throw Error(ErrorKind::invalid_argument, "complex parameters in a real search space");
    return params.real();
  }
  RVector x(2 * params.size());
  x << params.real(), params.imag();
  return x;
}

GaugeFixResult gauge_fix(const TICoefficients& tc, bool allow_complex) {
  if (!tc.is_real(1e-12)) throw Error(ErrorKind::invalid_argument, "gauge_fix needs real coefficients");
  GaugeFixResult out;
  const double norm = tc.flat().norm();
  const double tol = 1e-14 * std::max(1.0, norm);

  // Stage 1: turn the 1-local row onto the z axis.
  Matrix2c g1 = Matrix2c::Identity();
  const Eigen::Vector3d v = tc.one_site().real();
  if (v.norm() <= tol) {
    out.first_stage_skipped = true;
  } else {
    const Eigen::Vector3d t(0.0, 0.0, v(2) < 0.0 ? -1.0 : 1.0);
    const Eigen::Vector3d u = v.normalized();
    const Eigen::Vector3d axis = u.cross(t);
    const double s = axis.norm();
    if (s > 1e-15) {
      const double angle = std::atan2(s, u.dot(t));
      g1 = axis_angle((angle / s * axis).cast<Complex>());
    }
  }
  const TICoefficients tc1 = rotate(tc, induced_rotation(g1));

  // Stage 2: rotate about z by phi so that the xy entry of the two-site block vanishes.
  // With theta = 2 phi that entry is P sin(theta) + Q cos(theta) + K.
  Matrix2c g2 = Matrix2c::Identity();
  const Complex bxy = tc1(1, 2);
  if (std::abs(bxy) > tol) {
    const double a = tc1(1, 1).real(), b = tc1(1, 2).real(), c = tc1(2, 1).real(), d = tc1(2, 2).real();
    const double p = (a - d) / 2.0, q = (b + c) / 2.0, k = (b - c) / 2.0;
    const double r = std::hypot(p, q);
    const double alpha = std::atan2(q, p);
    Complex theta{};
    if (r <= tol) {
      out.second_stage_skipped = true;
    } else if (std::abs(k) <= r) {
      const double base = std::asin(std::clamp(-k / r, -1.0, 1.0));
      auto wrap = [](double x) { return std::remainder(x, 2.0 * std::numbers::pi); };
      const double t1 = wrap(base - alpha);
      const double t2 = wrap(std::numbers::pi - base - alpha);
      theta = std::abs(t1) <= std::abs(t2) ? t1 : t2;
    } else if (allow_complex) {
      theta = std::asin(Complex(-k / r, 0.0)) - alpha;
      out.complex_witness = true;
    } else {
      theta = (k > 0 ? -1.0 : 1.0) * std::numbers::pi / 2.0 - alpha;
      out.second_stage_skipped = true;
    }
    if (theta != Complex{}) g2 = axis_angle(Vector3c(0.0, 0.0, theta / 2.0));
  }

  out.witness = g2 * g1;
  out.rotation = induced_rotation(out.witness);
  out.fixed = rotate(tc, out.rotation);
  const double clean = 1e-12 * std::max(1.0, norm);
  if (!out.first_stage_skipped) {
    if (std::abs(out.fixed(0, 1)) < clean) out.fixed(0, 1) = 0.0;
    if (std::abs(out.fixed(0, 2)) < clean) out.fixed(0, 2) = 0.0;
  }
  if (!out.second_stage_skipped && std::abs(out.fixed(1, 2)) < clean) out.fixed(1, 2) = 0.0;
  if (!out.complex_witness) {
    // Real rotation: drop rounding noise in the imaginary parts.
    for (auto& row : out.fixed.c)
      for (auto& x : row) x = Complex(x.real(), 0.0);
  }
  return out;
}

ObjectiveValue objective(const CVector& params, const Spectrum& target, const SearchSpace& space) {
  const CMatrix h = space.to_expr(params).dense();
  const Spectrum s = space.complexified ? spectrum_of(h, false) : spectrum_of(h, true);
  if (s.size() != target.size()) throw Error(ErrorKind::dimension, "target spectrum has wrong size");
  ObjectiveValue out;
  if (s.hermitian() && target.all_real()) {
    out.matching.resize(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) out.matching[k] = static_cast<int>(k);
  } else {
    out.matching = match_spectra(s.values(), target.values()).source_of_target;
  }
  out.residual.resize(static_cast<Eigen::Index>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k)
    out.residual(static_cast<Eigen::Index>(k)) = s.values()[out.matching[k]] - target.values()[k];
  out.value = out.residual.norm();
  return out;
}

CMatrix eig_jacobian(const CVector& params, const SearchSpace& space) {
  const EigenSystem es = diagonalize(space, params);
  if (es.near_defective(1e-8)) throw Error(ErrorKind::defective, "near-defective eigenpair; use finite differences");
  return analytic_jacobian(es, space);
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::trivial_equivalent: return "trivial_equivalent";
    case Classification::candidate_dual: return "candidate_dual";
    case Classification::non_converged: return "non_converged";
  }
  return "non_converged";
}

int SearchReport::count(Classification c) const {
  int k = 0;
  for (const auto& m : minima) k += m.classification == c;
  return k;
}

int SearchReport::converged(double rel_tol) const {
  int k = 0;
  for (const auto& m : minima) k += m.distance < rel_tol * scale;
  return k;
}

std::string spectrum_digest(const Spectrum& s) {
  const double q = 1e-10 * s.scale();
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::int64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (const auto& v : s.values()) {
    mix(std::llround(v.real() / q));
    mix(std::llround(v.imag() / q));
  }
  return hex64(h);
}

CVector random_start(const SearchSpace& space, double target_frobenius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const auto m = space.complex_dim();
  CVector p(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double re = nd(rng);
    const double im = space.complexified ? nd(rng) : 0.0;
    p(j) = Complex(re, im);
  }
  const double f = space.to_expr(p).frobenius_norm();
  if (f > 0.0 && target_frobenius > 0.0) p *= target_frobenius / f;
  return p;
}

DescentResult descend(const CVector& params0, const Spectrum& target, const SearchSpace& space,
                      const SearchOptions& opts) {
  const double scale = target.scale();
  const auto n = static_cast<Eigen::Index>(target.size());
  const bool cplx = space.complexified;

  // Eigenvalues of H(x) listed in target-slot order, aligned with `reference`
  // (eigen order) through a matching; used by the finite-difference fallback.
  auto aligned_values = [&](const RVector& x, const std::vector<Complex>& reference) {
    const CMatrix h = space.to_expr(space.to_complex(x)).dense();
    const Spectrum s = spectrum_of(h, !cplx);
    const auto pi = match_spectra(s.values(), reference).source_of_target;
    CVector out(static_cast<Eigen::Index>(reference.size()));
    for (std::size_t k = 0; k < reference.size(); ++k) out(static_cast<Eigen::Index>(k)) = s.values()[pi[k]];
    return out;
  };

  ResidualFunction f = [&](const RVector& x, RVector& r, RMatrix* jac) {
    EigenSystem es;
    try {
      es = diagonalize(space, space.to_complex(x));
    } catch (const Error&) {
      return false;
    }
    const auto pi = match(es, target);
    CVector res(n);
    for (Eigen::Index k = 0; k < n; ++k) res(k) = es.values[pi[k]] - target.values()[k];
    r = stack_residual(res, cplx);
    if (!r.allFinite()) return false;
    if (!jac) return true;
    CMatrix j_eig;
    if (!es.near_defective(1e-8)) {
      j_eig = analytic_jacobian(es, space);
      CMatrix j(n, j_eig.cols());
      for (Eigen::Index k = 0; k < n; ++k) j.row(k) = j_eig.row(pi[k]);
      *jac = stack_jacobian(j, cplx);
    } else {
      const double h = 1e-6 * scale;
      const auto p = x.size();
      RMatrix fd(r.size(), p);
      RVector xp = x;
      try {
        for (Eigen::Index c = 0; c < p; ++c) {
          xp(c) = x(c) + h;
          const CVector up = aligned_values(xp, es.values);
          xp(c) = x(c) - h;
          const CVector dn = aligned_values(xp, es.values);
          xp(c) = x(c);
          CVector d(n);
          for (Eigen::Index k = 0; k < n; ++k) d(k) = (up(pi[k]) - dn(pi[k])) / (2.0 * h);
          fd.col(c) = stack_residual(d, cplx);
        }
      } catch (const Error&) {
        return false;
      }
      *jac = fd;
    }
    return true;
  };

  DescentOptions d;
  d.method = opts.method;
  d.max_iter = opts.max_iter;
  d.target_value = opts.success_tol * scale;
  d.step_tol = opts.step_tol;
  const RVector x0 = space.to_real(params0);
  if (opts.frozen.empty()) return minimize_least_squares(f, x0, d);

  // Descend in the free coordinates only; frozen ones keep their start values.
  const auto dim = static_cast<Eigen::Index>(space.complex_dim());
  if (static_cast<Eigen::Index>(opts.frozen.size()) != dim)
    throw Error(ErrorKind::dimension, "frozen mask does not match the search space");
  std::vector<Eigen::Index> free;
  for (Eigen::Index c = 0; c < x0.size(); ++c)
    if (!opts.frozen[static_cast<std::size_t>(c % dim)]) free.push_back(c);
  const auto embed = [&](const RVector& y) {
    RVector x = x0;
    for (std::size_t k = 0; k < free.size(); ++k) x(free[k]) = y(static_cast<Eigen::Index>(k));
    return x;
  };
  ResidualFunction reduced = [&](const RVector& y, RVector& r, RMatrix* jac) {
    RMatrix full;
    if (!f(embed(y), r, jac ? &full : nullptr)) return false;
    if (jac) {
      jac->resize(full.rows(), static_cast<Eigen::Index>(free.size()));
      for (std::size_t k = 0; k < free.size(); ++k) jac->col(static_cast<Eigen::Index>(k)) = full.col(free[k]);
    }
    return true;
  };
  RVector y0(static_cast<Eigen::Index>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) y0(static_cast<Eigen::Index>(k)) = x0(free[k]);
  DescentResult res = minimize_least_squares(reduced, y0, d);
  res.x = embed(res.x);
  return res;
}

CVector sparsify(const CVector& params, const Spectrum& target, const SearchSpace& space, const SearchOptions& opts) {
  const double tol = opts.success_tol * target.scale();
  const auto dim = static_cast<Eigen::Index>(params.size());
  CVector best = params;
  SearchOptions o = opts;
  o.frozen.assign(static_cast<std::size_t>(dim), false);
  for (Eigen::Index c = 0; c < dim; ++c)
    if (best(c) == Complex{}) o.frozen[static_cast<std::size_t>(c)] = true;
  for (;;) {
    // Try zeroing the free coordinates from smallest to largest magnitude.
    std::vector<Eigen::Index> order;
    for (Eigen::Index c = 0; c < dim; ++c)
      if (!o.frozen[static_cast<std::size_t>(c)]) order.push_back(c);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return std::abs(best(i)) < std::abs(best(j)); });
    bool pruned = false;
    for (Eigen::Index c : order) {
      CVector trial = best;
      trial(c) = 0.0;
      SearchOptions t = o;
      t.frozen[static_cast<std::size_t>(c)] = true;
      DescentResult d;
      try {
        d = descend(trial, target, space, t);
      } catch (const Error&) {
        continue;
      }
      if (d.value >= tol) continue;
      best = space.to_complex(d.x);
      o = t;
      pruned = true;
      break;
    }
    if (!pruned) return best;
  }
}

SearchReport search_from(const OperatorExpr& h0, const SearchSpace& space, const std::vector<CVector>& starts,
                         const SearchOptions& opts) {
  if (h0.n() != space.cls->n()) throw Error(ErrorKind::dimension, "H0 and search space differ in site count");
  if (!h0.is_hermitian(1e-12)) throw Error(ErrorKind::invalid_argument, "H0 must be Hermitian");
  const Spectrum target = spectrum_of(h0.dense(), true);
  SearchReport rep;
  rep.space = space_name(space);
  rep.target_digest = spectrum_digest(target);
  rep.starts = static_cast<int>(starts.size());
  rep.scale = target.scale();
  const GroupOptions group = opts.group.value_or(group_defaults(*space.cls, space.complexified));

  for (std::size_t k = 0; k < starts.size(); ++k) {
    SearchMinimum m;
    m.start = static_cast<int>(k);
    DescentResult d;
    try {
      d = descend(starts[k], target, space, opts);
    } catch (const Error& e) {
      m.params = starts[k];
      m.distance = std::numeric_limits<double>::infinity();
      m.stop_reason = std::string("error: ") + e.what();
      rep.minima.push_back(std::move(m));
      continue;
    }
    m.params = space.to_complex(d.x);
    m.distance = d.value;
    m.iterations = d.iterations;
    m.stop_reason = d.stop_reason;
    if (opts.classify && m.distance < opts.classify_tol * rep.scale) {
      const OperatorExpr found = space.to_expr(m.params);
      GroupOptions g = group;
      g.seed = derive_seed(group.seed, k);
      m.equivalence = decide_equivalent(found, h0, g);
      if (m.equivalence->equivalent) {
        m.classification = Classification::trivial_equivalent;
      } else {
        // Independent re-diagonalization before reporting a dual.
        const double check = spectral_distance(spectrum_of(found.dense(), false), target);
        if (check < opts.success_tol * rep.scale) {
          m.classification = Classification::candidate_dual;
        } else {
          m.stop_reason += "; re-verification distance " + std::to_string(check);
        }
      }
    }
    rep.minima.push_back(std::move(m));
  }
  return rep;
}

SearchReport search_duals(const OperatorExpr& h0, const SearchSpace& space, int starts, std::uint64_t seed,
                          const SearchOptions& opts) {
  const double fro = h0.frobenius_norm();
  std::vector<CVector> points;
  points.reserve(static_cast<std::size_t>(std::max(0, starts)));
  for (int k = 0; k < starts; ++k) points.push_back(random_start(space, fro, derive_seed(seed, static_cast<std::uint64_t>(k))));
  SearchOptions o = opts;
  if (!o.group) {
    GroupOptions g = group_defaults(*space.cls, space.complexified);
    g.seed = derive_seed(seed, 0xE0u);
    o.group = g;
  }
  SearchReport rep = search_from(h0, space, points, o);
  rep.seed = seed;
  return rep;
}

BatchReport batch_trials(int num_h0, int starts_per_h0, const ClassPtr& source, const SearchSpace& space,
                         std::uint64_t seed, const SearchOptions& opts, int jobs) {
  BatchReport out;
  out.seed = seed;
  out.trials = num_h0;
  out.starts_per_trial = starts_per_h0;
  const auto count = static_cast<std::size_t>(std::max(0, num_h0));
  std::vector<std::optional<OperatorExpr>> h0(count);
  std::vector<SearchReport> reports(count);
  parallel_for(count, jobs, [&](std::size_t t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    h0[t] = sample_hamiltonian(source, derive_seed(trial_seed, 0));
    reports[t] = search_duals(*h0[t], space, starts_per_h0, derive_seed(trial_seed, 1), opts);
  });
  for (std::size_t t = 0; t < count; ++t) {
    const auto& r = reports[t];
    if (r.count(Classification::candidate_dual) > 0) ++out.any_candidate_dual;
    if (r.count(Classification::non_converged) > 0) ++out.any_non_converged;
    if (r.count(Classification::trivial_equivalent) == r.starts) ++out.all_trivial;
    out.h0.push_back(*h0[t]);
  }
  out.reports = std::move(reports);
  return out;
}

}  // namespace tps
