#include <doctest.h>

#include "tps/io.hpp"
#include "tps/kernel_check.hpp"
#include "tps/sampling.hpp"

using namespace tps;

TEST_CASE("numerical rank") {
  CHECK(numerical_rank(RMatrix::Zero(4, 3)).rank == 0);
  const RankResult id = numerical_rank(RMatrix::Identity(5, 5));
  CHECK(id.rank == 5);
  CHECK(std::isinf(id.gap_ratio));
  RMatrix d = RMatrix::Zero(3, 3);
  d.diagonal() << 1.0, 1e-3, 1e-12;
  const RankResult r = numerical_rank(d);
  CHECK(r.rank == 2);
  CHECK(r.gap_ratio == doctest::Approx(1e9));
}

TEST_CASE("M matrix for a single Z") {
  const auto s = LocalityClass::k_local(1, 1);
  PauliSum z(1);
  z.add(PauliString::parse("Z"), 1.0);
  const OperatorExpr h0 = OperatorExpr::from_pauli_sum(s, z);
  const RMatrix m = build_M(h0, *s);
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 4);
  // Eigenbasis |1>, |0> in ascending energy; columns I, X, Y, Z.
  CHECK(m.col(0).isApprox(Eigen::Vector2d(1, 1)));
  CHECK(m.col(1).norm() < 1e-12);
  CHECK(m.col(2).norm() < 1e-12);
  CHECK(std::abs(m.col(3)(0) + m.col(3)(1)) < 1e-12);
  CHECK(std::abs(std::abs(m.col(3)(0)) - 1.0) < 1e-12);
  const CertificateReport rep = certify_finite_duals(h0, *s);
  CHECK(rep.dim_ker_M == 2);
  CHECK(rep.expected == 2);
}

TEST_CASE("identity column is all ones") {
  const auto s = LocalityClass::k_local(3, 2);
  const RMatrix m = build_M(sample_hamiltonian(s, 4), *s);
  CHECK((m.col(0) - RVector::Ones(m.rows())).norm() < 1e-12);
}

TEST_CASE("degenerate spectra are refused") {
  const auto s = LocalityClass::k_local(3, 1);
  const OperatorExpr h0 = OperatorExpr::from_pauli_sum(s, build_ising(3, 0, 1).to_pauli_sum());
  CHECK_THROWS_AS(build_M(h0, *s), Error);
  const CertificateReport rep = certify_finite_duals(h0, *s);
  CHECK(rep.verdict != Verdict::pass);
  CHECK_FALSE(rep.spectrum_nondegenerate);
}

TEST_CASE("1-local commutant") {
  const auto s = LocalityClass::k_local(4, 2);
  CHECK(commutant_1local_dim(sample_hamiltonian(s, 9)) == 1);
  PauliSum zz(2);
  zz.add(PauliString::parse("ZZ"), 1.0);
  CHECK(commutant_1local_dim(OperatorExpr::from_pauli_sum(LocalityClass::k_local(2, 2), zz)) >= 3);
  CHECK(commutant_1local_dim(OperatorExpr::zero(LocalityClass::k_local(3, 2))) == 10);
}

TEST_CASE("kernel oracle agrees with the M matrix") {
  const ClassPtr classes[] = {LocalityClass::k_local(2, 1), LocalityClass::k_local(2, 2), LocalityClass::k_local(3, 1),
                              LocalityClass::k_local(3, 2), LocalityClass::nn_chain(3, false)};
  int checked = 0;
  for (int t = 0; t < 20; ++t) {
    const auto& s = classes[t % 5];
    const OperatorExpr h0 = sample_hamiltonian(s, derive_seed(31, static_cast<std::uint64_t>(t)));
    const CertificateReport rep = certify_finite_duals(h0, *s);
    REQUIRE(rep.spectrum_nondegenerate);
    CHECK(brute_force_ker_fH(h0, *s) == rep.dim_ker_M + static_cast<int>(rep.N));
    ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("kernel oracle trivial cases") {
  const auto full = LocalityClass::k_local(2, 2);
  CHECK(brute_force_ker_fH(sample_hamiltonian(full, 1), *full) == 16);
  CHECK(brute_force_ker_fH(OperatorExpr::zero(LocalityClass::k_local(2, 1)), *LocalityClass::k_local(2, 1)) == 16);
}

TEST_CASE("1-local commutators lie in ker M") {
  const auto s = LocalityClass::k_local(5, 2);
  const OperatorExpr h0 = sample_hamiltonian(s, 12);
  const RMatrix m = build_M(h0, *s);
  for (int site = 0; site < 5; ++site)
    for (std::uint8_t a = X; a <= Z; ++a) {
      PauliSum v(5);
      v.add(PauliString::single(5, site, a), 1.0);
      const CVector c = OperatorExpr::from_pauli_sum(s, commutator_i(v, h0.to_pauli_sum())).coeffs();
      CHECK(c.imag().norm() < 1e-12);
      const RVector r = c.real();
      CHECK((m * r).norm() <= 1e-8 * m.norm() * r.norm());
    }
}

TEST_CASE("certificate passes on small generic instances and respects the lower bound") {
  // n = 9 is the smallest chain where the 2-local space is smaller than 2^n.
  for (std::uint64_t t = 0; t < 2; ++t) {
    const auto s = LocalityClass::k_local(9, 2);
    const CertificateReport rep = certify_finite_duals(sample_hamiltonian(s, derive_seed(5, t)), *s);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.dim_ker_M == 27);
    CHECK(rep.dim_ker_M >= 3 * 9 - (rep.commutant_1local_dim - 1));
  }
  // Below that size the kernel is dominated by dim S - N.
  const auto small = LocalityClass::k_local(6, 2);
  const CertificateReport rep6 = certify_finite_duals(sample_hamiltonian(small, 5), *small);
  CHECK(rep6.verdict != Verdict::pass);
  CHECK(rep6.dim_ker_M == 154 - 64);
}

TEST_CASE("certificates are scale invariant and deterministic") {
  const auto s = LocalityClass::k_local(5, 2);
  const OperatorExpr h0 = sample_hamiltonian(s, 44);
  const CertificateReport a = certify_finite_duals(h0, *s);
  const CertificateReport b = certify_finite_duals(OperatorExpr(s, 37.5 * h0.coeffs()), *s);
  CHECK(a.verdict == b.verdict);
  CHECK(a.dim_ker_M == b.dim_ker_M);
  CHECK(io::dump(io::to_json(a, 44)) == io::dump(io::to_json(certify_finite_duals(h0, *s), 44)));
}

TEST_CASE("locality lemma") {
  const LemmaResult r32 = verify_locality_lemma(3, 2);
  CHECK(r32.dim_found == 10);
  CHECK(r32.dim_expected == 10);
  const LemmaResult r31 = verify_locality_lemma(3, 1);
  CHECK(r31.dim_found == 10);
  const LemmaResult r22 = verify_locality_lemma(2, 2);
  CHECK(r22.vacuous);
  CHECK(r22.dim_found == 16);
}
