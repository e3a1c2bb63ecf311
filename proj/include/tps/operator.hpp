#pragma once

#include <array>

#include "tps/locality.hpp"

namespace tps {

/// A coefficient vector over a LocalityClass basis. Real coefficients give a
/// Hermitian operator since every basis element is a sum of Pauli strings.
class OperatorExpr {
 public:
  OperatorExpr(ClassPtr cls, CVector coeffs);
  static OperatorExpr zero(ClassPtr cls);
  // Projects onto the class; throws not_in_class when the residual exceeds tol.
  static OperatorExpr from_pauli_sum(ClassPtr cls, const PauliSum& op, double tol = 1e-10);
  // Coefficient extraction via tr(P^dagger H) / 2^n.
  static OperatorExpr from_dense(ClassPtr cls, const CMatrix& h, double tol = 1e-10);

  const LocalityClass& cls() const { return *cls_; }
  const ClassPtr& class_ptr() const { return cls_; }
  const CVector& coeffs() const { return coeffs_; }
  int n() const { return cls_->n(); }

  bool is_hermitian(double tol = 0.0) const;
  PauliSum to_pauli_sum() const { return cls_->expand(coeffs_); }
  CMatrix dense() const;
  // Hilbert-Schmidt norm of the dense realization, computed from coefficients.
  double frobenius_norm() const;

 private:
  ClassPtr cls_;
  CVector coeffs_;
};

/// Coefficients of the translation-invariant nearest-neighbour chain
///   H = sum_i sum_{a=0..3} sum_{b=1..3} c[a][b] sigma^a_i sigma^b_{i+1}
/// with periodic identification of site n+1 with site 1.
struct TICoefficients {
  std::array<std::array<Complex, 3>, 4> c{};

  Complex& operator()(int a, int b) { return c[a][b - 1]; }
  Complex operator()(int a, int b) const { return c[a][b - 1]; }

  bool is_real(double tol = 0.0) const;
  bool is_gauge_fixed(double tol = 0.0) const;
  // Row a=0 as a 3-vector and the 3x3 two-site block.
  Eigen::Vector3cd one_site() const;
  Eigen::Matrix3cd two_site() const;
  static TICoefficients from_blocks(const Eigen::Vector3cd& one_site, const Eigen::Matrix3cd& two_site);

  // Flattened in (a, b) order, a=0..3, b=1..3.
  CVector flat() const;
  static TICoefficients from_flat(const CVector& v);

  bool operator==(const TICoefficients&) const = default;
};

OperatorExpr ti_to_expr(const TICoefficients& tc, int n);
// Inverse on the translation-invariant subspace; throws not_in_class otherwise.
TICoefficients expr_to_ti(const OperatorExpr& expr, double tol = 1e-10);

// J sum_{i<n} Z_i Z_{i+1} + h sum_i X_i on the open (or closed) chain.
OperatorExpr build_ising(int n, double J, double h, bool open_boundary = true);

// Kramers-Wannier image of build_ising written in the sigma realization of the
// dual variables: J sum_i X_i + h sum_{i<n} Z_i Z_{i+1} - J X_n + h Z_1.
OperatorExpr build_ising_dual(int n, double J, double h);

ClassPtr build_boundary_class(int n);

}  // namespace tps
