#include "tps/operator.hpp"

#include <cmath>

namespace tps {

OperatorExpr::OperatorExpr(ClassPtr cls, CVector coeffs) : cls_(std::move(cls)), coeffs_(std::move(coeffs)) {
  if (!cls_) throw Error(ErrorKind::invalid_argument, "operator needs a class");
  if (coeffs_.size() != static_cast<Eigen::Index>(cls_->dim()))
    throw Error(ErrorKind::dimension, "coefficient count " + std::to_string(coeffs_.size()) +
                                          " differs from class dimension " + std::to_string(cls_->dim()));
}

OperatorExpr OperatorExpr::zero(ClassPtr cls) {
  const auto m = static_cast<Eigen::Index>(cls->dim());
  return OperatorExpr(std::move(cls), CVector::Zero(m));
}

OperatorExpr OperatorExpr::from_pauli_sum(ClassPtr cls, const PauliSum& op, double tol) {
  auto proj = cls->project(op);
  if (proj.residual > tol)
    throw Error(ErrorKind::not_in_class, "operator lies outside class " + cls->name() +
                                             " (relative residual " + std::to_string(proj.residual) + ")");
  return OperatorExpr(std::move(cls), std::move(proj.coeffs));
}

OperatorExpr OperatorExpr::from_dense(ClassPtr cls, const CMatrix& h, double tol) {
  const int n = cls->n();
  if (static_cast<std::size_t>(h.rows()) != hilbert_dim(n))
    throw Error(ErrorKind::dimension, "matrix size does not match class");
  PauliSum sum(n);
  for (const auto& elem : cls->basis())
    for (const auto& [p, w] : elem.terms()) {
      if (sum.terms().count(p)) continue;
      sum.add(p, pauli_coefficient(h, p));
    }
  // Anything not captured by the class strings is outside the class. The
  // residual is formed directly; a difference of norms loses half the digits.
  auto proj = cls->project(sum);
  const double total = h.norm();
  const double residual = total > 0.0 ? (h - tps::dense(cls->expand(proj.coeffs))).norm() / total : 0.0;
  if (residual > tol)
    throw Error(ErrorKind::not_in_class, "matrix lies outside class " + cls->name());
  return OperatorExpr(std::move(cls), std::move(proj.coeffs));
}

bool OperatorExpr::is_hermitian(double tol) const {
  for (Eigen::Index j = 0; j < coeffs_.size(); ++j)
    if (std::abs(coeffs_(j).imag()) > tol) return false;
  return true;
}

CMatrix OperatorExpr::dense() const { return tps::dense(to_pauli_sum()); }

double OperatorExpr::frobenius_norm() const {
  return std::sqrt(to_pauli_sum().coefficient_norm2() * static_cast<double>(hilbert_dim(n())));
}

bool TICoefficients::is_real(double tol) const {
  for (const auto& row : c)
    for (const auto& v : row)
      if (std::abs(v.imag()) > tol) return false;
  return true;
}

bool TICoefficients::is_gauge_fixed(double tol) const {
  return std::abs((*this)(0, 1)) <= tol && std::abs((*this)(0, 2)) <= tol && std::abs((*this)(1, 2)) <= tol;
}

Eigen::Vector3cd TICoefficients::one_site() const {
  return {(*this)(0, 1), (*this)(0, 2), (*this)(0, 3)};
}

Eigen::Matrix3cd TICoefficients::two_site() const {
  Eigen::Matrix3cd m;
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) m(a - 1, b - 1) = (*this)(a, b);
  return m;
}

TICoefficients TICoefficients::from_blocks(const Eigen::Vector3cd& one_site, const Eigen::Matrix3cd& two_site) {
  TICoefficients tc;
  for (int b = 1; b <= 3; ++b) tc(0, b) = one_site(b - 1);
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) tc(a, b) = two_site(a - 1, b - 1);
  return tc;
}

CVector TICoefficients::flat() const {
  CVector v(12);
  for (int a = 0; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) v(3 * a + b - 1) = (*this)(a, b);
  return v;
}

TICoefficients TICoefficients::from_flat(const CVector& v) {
  if (v.size() != 12) throw Error(ErrorKind::dimension, "TI coefficient vector must have 12 entries");
  TICoefficients tc;
  for (int a = 0; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) tc(a, b) = v(3 * a + b - 1);
  return tc;
}

OperatorExpr ti_to_expr(const TICoefficients& tc, int n) {
  return OperatorExpr(LocalityClass::ti_chain(n, false), tc.flat());
}

TICoefficients expr_to_ti(const OperatorExpr& expr, double tol) {
  if (expr.cls().kind() == ClassKind::ti_chain_periodic) return TICoefficients::from_flat(expr.coeffs());
  auto ti = LocalityClass::ti_chain(expr.n(), false);
  return TICoefficients::from_flat(OperatorExpr::from_pauli_sum(ti, expr.to_pauli_sum(), tol).coeffs());
}

OperatorExpr build_ising(int n, double J, double h, bool open_boundary) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "Ising chain needs n >= 2");
  auto cls = LocalityClass::nn_chain(n, !open_boundary);
  PauliSum s(n);
  const int bonds = open_boundary ? n - 1 : n;
  for (int i = 0; i < bonds; ++i) s.add(PauliString::pair(n, i, Z, (i + 1) % n, Z), J);
  for (int i = 0; i < n; ++i) s.add(PauliString::single(n, i, X), h);
  return OperatorExpr::from_pauli_sum(cls, s, 0.0);
}

OperatorExpr build_ising_dual(int n, double J, double h) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "Ising chain needs n >= 2");
  auto cls = LocalityClass::nn_chain(n, false);
  PauliSum s(n);
  for (int i = 0; i < n; ++i) s.add(PauliString::single(n, i, X), J);
  for (int i = 0; i + 1 < n; ++i) s.add(PauliString::pair(n, i, Z, i + 1, Z), h);
  s.add(PauliString::single(n, n - 1, X), -J);
  s.add(PauliString::single(n, 0, Z), h);
  return OperatorExpr::from_pauli_sum(cls, s, 0.0);
}

ClassPtr build_boundary_class(int n) { return LocalityClass::boundary(n); }

}  // namespace tps
