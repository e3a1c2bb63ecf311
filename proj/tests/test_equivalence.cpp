#include <doctest.h>

#include <random>

#include "tps/equivalence.hpp"
#include "tps/sampling.hpp"

using namespace tps;

namespace {

PauliSum single(const std::string& letters, Complex c = 1.0) {
  PauliSum s(static_cast<int>(letters.size()));
  s.add(PauliString::parse(letters), c);
  return s;
}

Complex coeff(const PauliSum& s, const std::string& letters) { return s.coefficient(PauliString::parse(letters)); }

}  // namespace

TEST_CASE("transpose flips the sign of strings with an odd number of Y") {
  SymmetryElement t;
  t.transpose = true;
  CHECK(coeff(apply_symmetry(single("X"), t), "X") == Complex(1));
  CHECK(coeff(apply_symmetry(single("Y"), t), "Y") == Complex(-1));
  CHECK(coeff(apply_symmetry(single("YY"), t), "YY") == Complex(1));
  CHECK(coeff(apply_symmetry(single("XYZ", Complex(0, 2)), t), "XYZ") == Complex(0, -2));
  const CMatrix h = sample_hamiltonian(LocalityClass::k_local(3, 2), 8).dense();
  CHECK((apply_symmetry_dense(h, t, 3) - h.transpose()).norm() < 1e-12);
}

TEST_CASE("site permutations") {
  SymmetryElement s;
  s.shift = 1;
  CHECK(permuted_site(s, 0, 4) == 1);
  CHECK(permuted_site(s, 3, 4) == 0);
  CHECK(coeff(apply_symmetry(single("XZII"), s), "IXZI") == Complex(1));
  SymmetryElement r;
  r.reflect = true;
  CHECK(coeff(apply_symmetry(single("XZII"), r), "IIZX") == Complex(1));

  TICoefficients tc;
  tc(0, 3) = 0.4;
  tc(1, 1) = 1.0;
  tc(2, 3) = -0.3;
  const OperatorExpr ti = ti_to_expr(tc, 5);
  CHECK((apply_symmetry(ti, s).coeffs() - ti.coeffs()).norm() < 1e-12);
}

TEST_CASE("Pauli and dense actions agree on random elements") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  const int n = 4;
  const OperatorExpr a = sample_hamiltonian(LocalityClass::k_local(n, 2), 2);
  for (int t = 0; t < 12; ++t) {
    SymmetryElement e;
    e.shift = t % n;
    e.reflect = t % 2 == 1;
    e.transpose = t % 3 == 0;
    if (t % 4 == 1) e.conjugation = {random_su2(rng)};
    if (t % 4 == 2)
      for (int i = 0; i < n; ++i) e.conjugation.push_back(random_su2(rng));
    if (t % 4 == 3) {
      Matrix2c g;
      g << Complex(nd(rng), nd(rng)), Complex(nd(rng), nd(rng)), Complex(nd(rng), nd(rng)), Complex(nd(rng), nd(rng));
      e.conjugation = {g};
    }
    const PauliSum p = apply_symmetry(a.to_pauli_sum(), e);
    const CMatrix d = apply_symmetry_dense(a.dense(), e, n);
    CHECK((dense(p) - d).norm() < 1e-10 * d.norm());
    if (t % 4 != 3) {
      CHECK(spectral_distance(spectrum_of(d, true), spectrum_of(a.dense(), true)) < 1e-9);
    } else {
      CHECK(spectral_distance(spectrum_of(d, false), spectrum_of(a.dense(), true)) < 1e-8 * d.norm());
    }
  }
  SymmetryElement bad;
  bad.conjugation.resize(3, Matrix2c::Identity());
  CHECK_THROWS_AS(apply_symmetry(a.to_pauli_sum(), bad), Error);
}

TEST_CASE("an operator is equivalent to itself with the identity witness") {
  const OperatorExpr a = sample_hamiltonian(LocalityClass::k_local(4, 2), 5);
  const EquivalenceVerdict v = decide_equivalent(a, a);
  REQUIRE(v.equivalent);
  CHECK(v.residual < 1e-6);
  CHECK(v.witness->shift == 0);
  CHECK_FALSE(v.witness->transpose);
  CHECK(to_string(v) == "equivalent");
}

TEST_CASE("planted uniform conjugations are recovered") {
  std::mt19937_64 rng(23);
  const auto cls = LocalityClass::ti_chain(5, false);
  for (int t = 0; t < 5; ++t) {
    const OperatorExpr a = sample_hamiltonian(cls, derive_seed(40, static_cast<std::uint64_t>(t)));
    SymmetryElement e;
    e.shift = t % 5;
    e.transpose = t % 2 == 0;
    e.conjugation = {random_su2(rng)};
    const OperatorExpr b = apply_symmetry(a, e);
    const EquivalenceVerdict v = decide_equivalent(a, b);
    CHECK(v.equivalent);
    if (v.witness) CHECK(dense_residual(a, b, *v.witness) < 1e-6);
  }
}

TEST_CASE("planted per-site conjugation on the boundary class") {
  std::mt19937_64 rng(29);
  const int n = 5;
  const auto cls = build_boundary_class(n);
  const OperatorExpr a = OperatorExpr::from_pauli_sum(cls, build_ising(n, 1, 0.7).to_pauli_sum());
  SymmetryElement e;
  for (int i = 0; i < n; ++i) e.conjugation.push_back(random_su2(rng));
  const OperatorExpr b = OperatorExpr::from_pauli_sum(LocalityClass::k_local(n, 2), apply_symmetry(a.to_pauli_sum(), e));
  GroupOptions opts = group_defaults(*cls);
  CHECK(opts.per_site);
  opts.starts = 40;
  const EquivalenceVerdict v = decide_equivalent(a, b, opts);
  CHECK(v.equivalent);
  CHECK(v.residual < 1e-6);

  SymmetryElement shift;
  shift.shift = 1;
  CHECK_THROWS_AS(apply_symmetry(a, shift), Error);
}

TEST_CASE("ZZ and XX chains are equivalent") {
  TICoefficients zz, xx;
  zz(3, 3) = 1.0;
  xx(1, 1) = 1.0;
  const EquivalenceVerdict v = decide_equivalent(ti_to_expr(zz, 4), ti_to_expr(xx, 4));
  CHECK(v.equivalent);
  CHECK(v.residual < 1e-6);
}

TEST_CASE("transposed and shifted copies are equivalent") {
  const auto cls = LocalityClass::ti_chain(6, false);
  const OperatorExpr a = sample_hamiltonian(cls, 61);
  SymmetryElement t;
  t.transpose = true;
  CHECK(decide_equivalent(a, apply_symmetry(a, t)).equivalent);
  SymmetryElement s;
  s.shift = 2;
  CHECK(decide_equivalent(a, apply_symmetry(a, s)).equivalent);
}

TEST_CASE("unrelated operators are not found equivalent") {
  const auto cls = LocalityClass::ti_chain(4, false);
  const EquivalenceVerdict v = decide_equivalent(sample_hamiltonian(cls, 1), sample_hamiltonian(cls, 2));
  CHECK_FALSE(v.equivalent);
  CHECK(to_string(v) == "not_found");
  CHECK_FALSE(v.attempts.empty());
}

TEST_CASE("Ising and its Kramers-Wannier dual are a probable dual pair") {
  const int n = 6;
  const auto cls = build_boundary_class(n);
  const OperatorExpr a = OperatorExpr::from_pauli_sum(cls, build_ising(n, 1, 0.7).to_pauli_sum());
  const OperatorExpr b = OperatorExpr::from_pauli_sum(cls, build_ising_dual(n, 1, 0.7).to_pauli_sum());
  GroupOptions opts = probe_defaults();
  opts.per_site = true;
  const ProbeReport p = isospectral_inequivalence_probe(a, b, opts);
  CHECK(p.spectral_distance < 1e-9);
  CHECK_FALSE(p.verdict.equivalent);
  CHECK(p.probable_dual);
  CHECK_THROWS_AS(isospectral_inequivalence_probe(a, OperatorExpr::from_pauli_sum(cls, build_ising(n, 1, 0.5).to_pauli_sum())),
                  Error);
}
