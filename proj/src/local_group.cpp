#include "tps/local_group.hpp"

#include <cmath>

namespace tps {

namespace {

Matrix2c make_pauli(int a) {
  Matrix2c m;
  switch (a) {
    case 0: m << 0, 1, 1, 0; break;
    case 1: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

// Applies u to qubit `site` of every column (left) of m.
void apply_left(CMatrix& m, const Matrix2c& u, int site, int n) {
  const std::uint64_t bit = std::uint64_t{1} << (n - 1 - site);
  const auto dim = static_cast<std::uint64_t>(m.rows());
  for (std::uint64_t r0 = 0; r0 < dim; ++r0) {
    if (r0 & bit) continue;
    const auto i0 = static_cast<Eigen::Index>(r0);
    const auto i1 = static_cast<Eigen::Index>(r0 | bit);
    const Eigen::RowVectorXcd a = m.row(i0);
    const Eigen::RowVectorXcd b = m.row(i1);
    m.row(i0) = u(0, 0) * a + u(0, 1) * b;
    m.row(i1) = u(1, 0) * a + u(1, 1) * b;
  }
}

// m <- m (u on qubit `site`).
void apply_right(CMatrix& m, const Matrix2c& u, int site, int n) {
  const std::uint64_t bit = std::uint64_t{1} << (n - 1 - site);
  const auto dim = static_cast<std::uint64_t>(m.cols());
  for (std::uint64_t c0 = 0; c0 < dim; ++c0) {
    if (c0 & bit) continue;
    const auto j0 = static_cast<Eigen::Index>(c0);
    const auto j1 = static_cast<Eigen::Index>(c0 | bit);
    const CVector a = m.col(j0);
    const CVector b = m.col(j1);
    m.col(j0) = a * u(0, 0) + b * u(1, 0);
    m.col(j1) = a * u(0, 1) + b * u(1, 1);
  }
}

}  // namespace

const Matrix2c& pauli_matrix(int a) {
  static const Matrix2c s[3] = {make_pauli(0), make_pauli(1), make_pauli(2)};
  return s[a];
}

Matrix2c axis_angle(const Vector3c& omega) {
  // M = -i/2 omega.sigma satisfies M^2 = -q^2 with q^2 = omega.omega / 4.
  const Complex q2 = (omega(0) * omega(0) + omega(1) * omega(1) + omega(2) * omega(2)) / 4.0;
  const Complex q = std::sqrt(q2);
  Complex c, sinc;
  if (std::abs(q) < 1e-4) {
    c = 1.0 - q2 / 2.0 + q2 * q2 / 24.0;
    sinc = 1.0 - q2 / 6.0 + q2 * q2 / 120.0;
  } else {
    c = std::cos(q);
    sinc = std::sin(q) / q;
  }
  Matrix2c m = Matrix2c::Zero();
  for (int a = 0; a < 3; ++a) m += omega(a) * pauli_matrix(a);
  return c * Matrix2c::Identity() + sinc * Complex(0.0, -0.5) * m;
}

Matrix3c induced_rotation(const Matrix2c& g) {
  const Complex det = g.determinant();
  if (std::abs(det) < 1e-14 * std::max(1.0, g.squaredNorm()))
    throw Error(ErrorKind::invalid_argument, "conjugating matrix is singular");
  Matrix2c inv;
  inv << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
  inv /= det;
  Matrix3c r;
  for (int b = 0; b < 3; ++b) {
    const Matrix2c img = g * pauli_matrix(b) * inv;
    for (int a = 0; a < 3; ++a) r(a, b) = 0.5 * (pauli_matrix(a) * img).trace();
  }
  return r;
}

std::optional<Matrix2c> lift_rotation(const Matrix3c& r, double tol) {
  // g sigma_b - (sum_a R(a,b) sigma_a) g = 0, linear in the four entries of g.
  Eigen::Matrix<Complex, 12, 4> a;
  for (int k = 0; k < 4; ++k) {
    Matrix2c e = Matrix2c::Zero();
    e(k / 2, k % 2) = 1.0;
    for (int b = 0; b < 3; ++b) {
      Matrix2c target = Matrix2c::Zero();
      for (int c = 0; c < 3; ++c) target += r(c, b) * pauli_matrix(c);
      const Matrix2c res = e * pauli_matrix(b) - target * e;
      for (int q = 0; q < 4; ++q) a(4 * b + q, k) = res(q / 2, q % 2);
    }
  }
  Eigen::JacobiSVD<Eigen::Matrix<Complex, 12, 4>> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(3) > tol * sv(0)) return std::nullopt;
  const Eigen::Vector4cd v = svd.matrixV().col(3);
  Matrix2c g;
  g << v(0), v(1), v(2), v(3);
  const Complex det = g.determinant();
  if (std::abs(det) < 1e-12) return std::nullopt;
  g /= std::sqrt(det);
  if ((induced_rotation(g) - r).norm() > 1e-6 * std::max(1.0, r.norm())) return std::nullopt;
  return g;
}

TICoefficients rotate(const TICoefficients& tc, const Matrix3c& r) {
  return TICoefficients::from_blocks(r * tc.one_site(), r * tc.two_site() * r.transpose());
}

CMatrix conjugate_uniform(const CMatrix& m, const Matrix2c& g, int n) {
  return conjugate_local(m, std::vector<Matrix2c>(static_cast<std::size_t>(n), g));
}

CMatrix conjugate_local(const CMatrix& m, const std::vector<Matrix2c>& g) {
  const int n = static_cast<int>(g.size());
  if (n == 0 || static_cast<std::size_t>(m.rows()) != hilbert_dim(n) || m.rows() != m.cols())
    throw Error(ErrorKind::dimension, "matrix size does not match site count");
  CMatrix out = m;
  for (int s = 0; s < n; ++s) {
    const Complex det = g[s].determinant();
    if (std::abs(det) < 1e-14) throw Error(ErrorKind::invalid_argument, "conjugating matrix is singular");
    Matrix2c inv;
    inv << g[s](1, 1), -g[s](0, 1), -g[s](1, 0), g[s](0, 0);
    inv /= det;
    apply_left(out, g[s], s, n);
    apply_right(out, inv, s, n);
  }
  return out;
}

PauliSum conjugate_uniform(const PauliSum& op, const Matrix3c& r) {
  return conjugate_local(op, std::vector<Matrix3c>(static_cast<std::size_t>(op.n()), r));
}

PauliSum conjugate_local(const PauliSum& op, const std::vector<Matrix3c>& r) {
  if (static_cast<int>(r.size()) != op.n()) throw Error(ErrorKind::dimension, "one rotation per site required");
  PauliSum out(op.n());
  for (const auto& [p, c] : op.terms()) {
    const auto supp = p.support();
    const auto w = supp.size();
    std::size_t total = 1;
    for (std::size_t k = 0; k < w; ++k) total *= 3;
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<std::uint8_t> letters(p.letters());
      Complex coeff = c;
      std::size_t rest = idx;
      for (std::size_t k = 0; k < w; ++k) {
        const int a_new = static_cast<int>(rest % 3);
        rest /= 3;
        const int a_old = p[supp[k]] - 1;
        coeff *= r[supp[k]](a_new, a_old);
        letters[supp[k]] = static_cast<std::uint8_t>(a_new + 1);
      }
      if (coeff != Complex{}) out.add(PauliString(std::move(letters)), coeff);
    }
  }
  out.prune(1e-15 * std::sqrt(std::max(op.coefficient_norm2(), 1e-300)));
  return out;
}

}  // namespace tps
