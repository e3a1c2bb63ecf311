#include <doctest.h>

#include <random>

#include "tps/operator.hpp"
#include "tps/spectra.hpp"

using namespace tps;

namespace {

// Kronecker product built directly from 2x2 matrices, independent of the
// library's bit-twiddling realization.
CMatrix kron_oracle(const PauliString& p) {
  CMatrix s[4];
  s[0] = CMatrix::Identity(2, 2);
  s[1] = CMatrix::Zero(2, 2);
  s[1](0, 1) = s[1](1, 0) = 1.0;
  s[2] = CMatrix::Zero(2, 2);
  s[2](0, 1) = Complex(0, -1);
  s[2](1, 0) = Complex(0, 1);
  s[3] = CMatrix::Zero(2, 2);
  s[3](0, 0) = 1.0;
  s[3](1, 1) = -1.0;
  CMatrix out = CMatrix::Identity(1, 1);
  for (int i = 0; i < p.n(); ++i) {
    const CMatrix& f = s[p[i]];
    CMatrix next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = out(r, c) * f;
    out = next;
  }
  return out;
}

std::vector<double> sorted_real(const CMatrix& h) {
  return spectrum_of(h, true).real_values();
}

unsigned long long binom(int n, int k) {
  unsigned long long r = 1;
  for (int j = 1; j <= k; ++j) r = r * static_cast<unsigned long long>(n - k + j) / static_cast<unsigned long long>(j);
  return r;
}

}  // namespace

TEST_CASE("dense realization matches Kronecker products") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> letter(0, 3);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 4;
    std::vector<std::uint8_t> l(static_cast<std::size_t>(n));
    for (auto& c : l) c = static_cast<std::uint8_t>(letter(rng));
    const PauliString p(l);
    CHECK((dense(p) - kron_oracle(p)).norm() < 1e-14);
  }
}

TEST_CASE("ZZ on two sites is diag(1,-1,-1,1)") {
  const CMatrix m = dense(PauliString::parse("ZZ"));
  CMatrix expect = CMatrix::Zero(4, 4);
  expect.diagonal() << 1, -1, -1, 1;
  CHECK((m - expect).norm() == 0.0);
  CHECK((dense(PauliString::identity(3)) - CMatrix::Identity(8, 8)).norm() == 0.0);
}

TEST_CASE("Pauli products and commutation agree with dense matrices") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> letter(0, 3);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::uint8_t> a(3), b(3);
    for (auto& c : a) c = static_cast<std::uint8_t>(letter(rng));
    for (auto& c : b) c = static_cast<std::uint8_t>(letter(rng));
    const PauliString pa(a), pb(b);
    const auto [phase, prod] = multiply(pa, pb);
    CHECK((phase * dense(prod) - dense(pa) * dense(pb)).norm() < 1e-13);
    const CMatrix comm = dense(pa) * dense(pb) - dense(pb) * dense(pa);
    CHECK(pa.commutes_with(pb) == (comm.norm() < 1e-13));
  }
}

TEST_CASE("Hilbert-Schmidt orthogonality over class bases") {
  for (const auto& cls : {LocalityClass::k_local(3, 2), LocalityClass::nn_chain(4, true)}) {
    const auto& basis = cls->basis();
    const double dim = static_cast<double>(hilbert_dim(cls->n()));
    for (std::size_t a = 0; a < basis.size(); ++a)
      for (std::size_t b = a; b < basis.size(); ++b) {
        const Complex ip = (dense(basis[a]).adjoint() * dense(basis[b])).trace() / dim;
        CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-13);
      }
  }
}

TEST_CASE("class dimensions and canonical order") {
  CHECK(LocalityClass::k_local(10, 2)->dim() == 436);
  CHECK(LocalityClass::k_local(2, 2)->dim() == 16);
  const auto nn = LocalityClass::nn_chain(3, false);
  CHECK(nn->index_of(PauliString::parse("XXI")).has_value());
  CHECK_FALSE(nn->index_of(PauliString::parse("XIX")).has_value());
  const auto k2 = LocalityClass::k_local(4, 2);
  CHECK(k2->basis()[0].terms().begin()->first.is_identity());
  int last_weight = 0;
  for (const auto& b : k2->basis()) {
    const int w = b.terms().begin()->first.weight();
    CHECK(w >= last_weight);
    last_weight = w;
  }
  CHECK(LocalityClass::boundary(6)->dim() == 12);
  CHECK(LocalityClass::ti_chain(6, false)->dim() == 12);
  CHECK(LocalityClass::ti_chain(6, true)->dim() == 9);
  CHECK_THROWS_AS(build_class("k_local", 3, 4), Error);
  CHECK_THROWS_AS(build_class("no_such_class", 3), Error);
}

TEST_CASE("dim_local_space agrees with enumeration") {
  CHECK(dim_local_space(10, 2, 2).s == 436);
  CHECK(dim_local_space(10, 2, 2).below_hilbert);
  CHECK(dim_local_space(5, 2, 0).s == 1);
  CHECK(dim_local_space(2, 2, 2).s == 16);
  CHECK(dim_local_space(4, 3, 2).s == 1 + 4 * 8 + 6 * 64);
  for (int n = 1; n <= 6; ++n)
    for (int k = 0; k <= n; ++k) {
      unsigned long long count = 0;
      for (std::uint64_t code = 0; code < (1ull << (2 * n)); ++code) {
        int w = 0;
        for (int i = 0; i < n; ++i) w += ((code >> (2 * i)) & 3) != 0;
        count += w <= k;
      }
      unsigned long long formula = 0;
      for (int j = 0; j <= k; ++j) {
        unsigned long long p = 1;
        for (int q = 0; q < j; ++q) p *= 3;
        formula += binom(n, j) * p;
      }
      CHECK(dim_local_space(n, 2, k).s == count);
      CHECK(count == formula);
      if (k >= 1) CHECK(LocalityClass::k_local(n, k)->dim() == count);
    }
}

TEST_CASE("coefficient round trip through dense matrices") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int n = 2; n <= 6; ++n) {
    const auto cls = LocalityClass::k_local(n, 2);
    CVector c(static_cast<Eigen::Index>(cls->dim()));
    for (auto& x : c) x = Complex(nd(rng), nd(rng));
    const OperatorExpr e(cls, c);
    const OperatorExpr back = OperatorExpr::from_dense(cls, e.dense());
    CHECK((back.coeffs() - c).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("out-of-class operators are rejected") {
  const auto nn = LocalityClass::nn_chain(3, false);
  PauliSum s(3);
  s.add(PauliString::parse("XIX"), 1.0);
  CHECK_THROWS_AS(OperatorExpr::from_pauli_sum(nn, s), Error);
  try {
    OperatorExpr::from_pauli_sum(nn, s);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_in_class);
  }
}

TEST_CASE("Ising model spectra") {
  CHECK(sorted_real(build_ising(2, 1, 0).dense()) == std::vector<double>{-1, -1, 1, 1});
  const auto x3 = sorted_real(build_ising(3, 0, 1).dense());
  const std::vector<double> expect{-3, -1, -1, -1, 1, 1, 1, 3};
  for (std::size_t i = 0; i < 8; ++i) CHECK(x3[i] == doctest::Approx(expect[i]).epsilon(1e-12));

  // Independent oracle: Ising assembled from Kronecker products.
  const int n = 4;
  CMatrix h = CMatrix::Zero(16, 16);
  for (int i = 0; i + 1 < n; ++i) {
    std::vector<std::uint8_t> l(n, I);
    l[i] = l[i + 1] = Z;
    h += kron_oracle(PauliString(l));
  }
  for (int i = 0; i < n; ++i) {
    std::vector<std::uint8_t> l(n, I);
    l[i] = X;
    h += 0.7 * kron_oracle(PauliString(l));
  }
  CHECK(spectral_distance(spectrum_of(h, true), spectrum_of(build_ising(4, 1, 0.7).dense(), true)) < 1e-12);
}

TEST_CASE("Kramers-Wannier dual is isospectral") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2, 2);
  CHECK(spectral_distance(spectrum_of(build_ising(6, 1, 0.7).dense(), true),
                          spectrum_of(build_ising_dual(6, 1, 0.7).dense(), true)) < 1e-10);
  CHECK(spectral_distance(spectrum_of(build_ising(4, 1, 1).dense(), true),
                          spectrum_of(build_ising_dual(4, 1, 1).dense(), true)) < 1e-10);
  CHECK(build_ising_dual(5, 0, 0).dense().norm() == 0.0);
  for (int n = 3; n <= 8; ++n) {
    const double J = u(rng), h = u(rng);
    const Spectrum a = spectrum_of(build_ising(n, J, h).dense(), true);
    const Spectrum b = spectrum_of(build_ising_dual(n, J, h).dense(), true);
    CHECK(spectral_distance(a, b) < 1e-10 * a.scale());
  }
}

TEST_CASE("boundary class contains Ising and its dual") {
  const auto cls = build_boundary_class(6);
  CHECK(cls->dim() == 12);
  const OperatorExpr is = OperatorExpr::from_pauli_sum(cls, build_ising(6, 1, 0.7).to_pauli_sum());
  CHECK((is.dense() - build_ising(6, 1, 0.7).dense()).norm() < 1e-12);
  const OperatorExpr du = OperatorExpr::from_pauli_sum(cls, build_ising_dual(6, 1, 0.7).to_pauli_sum());
  CHECK((du.dense() - build_ising_dual(6, 1, 0.7).dense()).norm() < 1e-12);
  CHECK(OperatorExpr::zero(cls).dense().norm() == 0.0);
}

TEST_CASE("translation-invariant coefficients round trip") {
  TICoefficients zz;
  zz(3, 3) = 1.0;
  const auto s = spectrum_of(ti_to_expr(zz, 4).dense(), true).real_values();
  CHECK(s.front() == doctest::Approx(-4.0));
  CHECK(s.back() == doctest::Approx(4.0));
  CHECK(ti_to_expr(TICoefficients{}, 4).dense().norm() == 0.0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    TICoefficients tc;
    for (int a = 0; a < 4; ++a)
      for (int b = 1; b < 4; ++b) tc(a, b) = nd(rng);
    const TICoefficients back = expr_to_ti(ti_to_expr(tc, 5));
    for (int a = 0; a < 4; ++a)
      for (int b = 1; b < 4; ++b) CHECK(std::abs(back(a, b) - tc(a, b)) < 1e-12);
  }
}
