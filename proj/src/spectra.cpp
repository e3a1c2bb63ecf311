#include "tps/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tps/assignment.hpp"

namespace tps {

namespace {

bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

double max_abs(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_residuals(const CMatrix& h, const EigenSystem& es) {
  const double norm = h.norm();
  if (norm == 0.0) return;
  CMatrix r = h * es.right;
  for (Eigen::Index i = 0; i < es.right.cols(); ++i) r.col(i) -= es.values[i] * es.right.col(i);
  const double worst = r.colwise().norm().maxCoeff();
  if (!(worst <= 1e-9 * norm))
    throw Error(ErrorKind::numerical, "eigenpair residual " + std::to_string(worst) + " exceeds 1e-9 * ||H||");
}

}  // namespace

Spectrum Spectrum::from_real(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  Spectrum s;
  s.hermitian_ = true;
  s.values_.reserve(values.size());
  for (double v : values) s.values_.emplace_back(v, 0.0);
  return s;
}

Spectrum Spectrum::from_complex(std::vector<Complex> values, bool hermitian) {
  if (hermitian) {
    const double scale = std::max(1.0, max_abs(values));
    std::vector<double> re;
    re.reserve(values.size());
    for (const auto& v : values) {
      if (std::abs(v.imag()) > 1e-12 * scale)
        throw Error(ErrorKind::invalid_argument, "Hermitian spectrum has a non-negligible imaginary part");
      re.push_back(v.real());
    }
    return from_real(std::move(re));
  }
  std::sort(values.begin(), values.end(), lex_less);
  Spectrum s;
  s.values_ = std::move(values);
  s.hermitian_ = false;
  return s;
}

std::vector<double> Spectrum::real_values() const {
  std::vector<double> out;
  out.reserve(values_.size());
  for (const auto& v : values_) out.push_back(v.real());
  return out;
}

bool Spectrum::all_real() const {
  return hermitian_ || std::all_of(values_.begin(), values_.end(), [](const Complex& v) { return v.imag() == 0.0; });
}

double Spectrum::scale() const { return std::max(1.0, max_abs(values_)); }

Complex Spectrum::sum() const { return std::accumulate(values_.begin(), values_.end(), Complex{}); }

Spectrum EigenSystem::spectrum() const { return Spectrum::from_complex(values, hermitian); }

bool EigenSystem::near_defective(double threshold) const {
  for (Eigen::Index i = 0; i < condition.size(); ++i)
    if (!(condition(i) >= threshold)) return true;
  return false;
}

EigenSystem eigh(const CMatrix& h) {
  if (h.rows() != h.cols()) throw Error(ErrorKind::dimension, "eigh needs a square matrix");
  const double norm = h.norm();
  if ((h - h.adjoint()).norm() > 1e-10 * norm)
    throw Error(ErrorKind::invalid_argument, "eigh: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::numerical, "Hermitian eigensolver did not converge");
  EigenSystem es;
  es.hermitian = true;
  const auto& ev = solver.eigenvalues();
  es.values.reserve(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) es.values.emplace_back(ev(i), 0.0);
  es.right = solver.eigenvectors();
  es.left = es.right;
  es.condition = RVector::Ones(ev.size());
  check_residuals(h, es);
  return es;
}

EigenSystem eig_general(const CMatrix& h) {
  if (h.rows() != h.cols()) throw Error(ErrorKind::dimension, "eig_general needs a square matrix");
  if (!h.allFinite()) throw Error(ErrorKind::invalid_argument, "eig_general: non-finite entries");
  Eigen::ComplexEigenSolver<CMatrix> solver(h, true);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::numerical, "complex eigensolver did not converge");
  const auto dim = h.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return lex_less(ev(a), ev(b)); });

  EigenSystem es;
  es.hermitian = false;
  es.right.resize(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    es.values.push_back(ev(order[k]));
    es.right.col(k) = solver.eigenvectors().col(order[k]).normalized();
  }
  // Rows of V^{-1} are the (unnormalized) left eigenvectors.
  Eigen::PartialPivLU<CMatrix> lu(es.right);
  CMatrix inv = lu.inverse();
  es.left.resize(dim, dim);
  es.condition.resize(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    CVector w = inv.row(k).adjoint();
    const double wn = w.norm();
    if (!std::isfinite(wn) || wn == 0.0) {
      es.left.col(k) = es.right.col(k);
      es.condition(k) = 0.0;
      continue;
    }
    w /= wn;
    es.left.col(k) = w;
    const double c = std::abs(w.dot(es.right.col(k)));
    es.condition(k) = std::isfinite(c) ? c : 0.0;
  }
  check_residuals(h, es);
  return es;
}

Spectrum spectrum_of(const CMatrix& h, bool hermitian) {
  if (hermitian) {
    if ((h - h.adjoint()).norm() > 1e-10 * h.norm())
      throw Error(ErrorKind::invalid_argument, "spectrum_of: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::numerical, "Hermitian eigensolver did not converge");
    const auto& ev = solver.eigenvalues();
    return Spectrum::from_real(std::vector<double>(ev.data(), ev.data() + ev.size()));
  }
  Eigen::ComplexEigenSolver<CMatrix> solver(h, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::numerical, "complex eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  return Spectrum::from_complex(std::vector<Complex>(ev.data(), ev.data() + ev.size()), false);
}

SpectrumMatching match_spectra(const std::vector<Complex>& source, const std::vector<Complex>& target) {
  if (source.size() != target.size()) throw Error(ErrorKind::dimension, "spectra differ in size");
  const auto n = static_cast<Eigen::Index>(source.size());
  RMatrix cost(n, n);
  for (Eigen::Index t = 0; t < n; ++t)
    for (Eigen::Index s = 0; s < n; ++s) cost(t, s) = std::norm(source[s] - target[t]);
  auto a = solve_assignment(cost);
  SpectrumMatching m;
  m.source_of_target = std::move(a.row_to_col);
  m.distance = std::sqrt(std::max(0.0, a.cost));
  return m;
}

double spectral_distance(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::dimension, "spectral_distance: dimension mismatch");
  if (a.all_real() && b.all_real()) {
    // On the real line the sorted pairing is optimal for squared costs.
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += std::norm(a.values()[k] - b.values()[k]);
    return std::sqrt(acc);
  }
  return match_spectra(a.values(), b.values()).distance;
}

DegeneracyProfile degeneracy_profile(const Spectrum& s, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "degeneracy tolerance must be positive");
  DegeneracyProfile p;
  const auto& v = s.values();
  if (v.empty()) return p;
  const double cut = tol * s.scale();
  p.min_gap = std::numeric_limits<double>::infinity();
  int run = 1;
  for (std::size_t k = 1; k < v.size(); ++k) {
    const double gap = std::abs(v[k] - v[k - 1]);
    p.min_gap = std::min(p.min_gap, gap);
    if (gap < cut) {
      ++run;
    } else {
      p.cluster_sizes.push_back(run);
      run = 1;
    }
  }
  p.cluster_sizes.push_back(run);
  p.max_multiplicity = *std::max_element(p.cluster_sizes.begin(), p.cluster_sizes.end());
  return p;
}

}  // namespace tps
