#pragma once

#include <optional>
#include <vector>

#include "tps/operator.hpp"

namespace tps {

using Matrix2c = Eigen::Matrix2cd;
using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;

// The three Pauli matrices, index 0..2 for X, Y, Z.
const Matrix2c& pauli_matrix(int a);

// exp(-i omega.sigma / 2). Unitary for real omega, in SL(2,C) otherwise.
Matrix2c axis_angle(const Vector3c& omega);

/// Induced action on Pauli indices: g sigma_b g^-1 = sum_a R(a,b) sigma_a.
/// Orthogonal for unitary g, complex orthogonal for g in GL(2,C).
Matrix3c induced_rotation(const Matrix2c& g);

// Recovers g (det 1) from a complex orthogonal R with det +1.
std::optional<Matrix2c> lift_rotation(const Matrix3c& r, double tol = 1e-8);

// c0 -> R c0, C -> R C R^T.
TICoefficients rotate(const TICoefficients& tc, const Matrix3c& r);

// G m G^-1 with G the n-fold tensor power of g.
CMatrix conjugate_uniform(const CMatrix& m, const Matrix2c& g, int n);
// G m G^-1 with G = g_0 (x) g_1 (x) ... (x) g_{n-1}.
CMatrix conjugate_local(const CMatrix& m, const std::vector<Matrix2c>& g);

// Every Pauli string maps to a combination over the same support.
PauliSum conjugate_uniform(const PauliSum& op, const Matrix3c& r);
// Site i transforms with r[i].
PauliSum conjugate_local(const PauliSum& op, const std::vector<Matrix3c>& r);

// Haar-random SU(2) element.
template <class Rng>
Matrix2c random_su2(Rng& rng);

}  // namespace tps

#include <random>

namespace tps {

template <class Rng>
Matrix2c random_su2(Rng& rng) {
  std::normal_distribution<double> nd;
  double q[4];
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : q) {
      x = nd(rng);
      norm += x * x;
    }
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  for (double& x : q) x /= norm;
  Matrix2c g;
  g << Complex(q[0], q[1]), Complex(q[2], q[3]), Complex(-q[2], q[3]), Complex(q[0], -q[1]);
  return g;
}

}  // namespace tps
