#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tps/operator.hpp"
#include "tps/spectra.hpp"

namespace tps {

struct RankResult {
  int rank = 0;
  // sigma_rank / sigma_{rank+1}; +inf when nothing lies below the cut.
  double gap_ratio = 0.0;
  std::vector<double> singular_values;  // descending
};

// rank = #{sigma_i > rel_tol * sigma_max}.
RankResult numerical_rank(const RMatrix& a, double rel_tol = 1e-8);

enum class Verdict { pass, fail, ambiguous };
std::string to_string(Verdict v);

struct CertificateOptions {
  double rank_rel_tol = 1e-8;
  double degeneracy_tol = 1e-10;  // relative to spectrum scale
  double min_gap_ratio = 1e3;
};

struct CertificateReport {
  std::string class_name;
  int n = 0;
  std::size_t s = 0;
  std::size_t N = 0;
  int dim_ker_M = 0;
  int dim_g = 0;
  int expected = 0;
  std::vector<double> singular_values;
  double gap_ratio = 0.0;
  bool spectrum_nondegenerate = false;
  double min_level_gap = 0.0;
  int commutant_1local_dim = 0;
  Verdict verdict = Verdict::ambiguous;
  std::string diagnostic;
};

/// M_ij = <E_i| L_j |E_i> over the eigenbasis of h0 and the basis of s.
/// Refuses (ErrorKind::degenerate) when the spectrum of h0 is degenerate.
RMatrix build_M(const OperatorExpr& h0, const LocalityClass& s, double degeneracy_tol = 1e-10);
RMatrix build_M(const EigenSystem& eigen, const LocalityClass& s);

// Dimension of {V in span(identity, 1-local) : [V, h0] = 0}.
int commutant_1local_dim(const OperatorExpr& h0, double rel_tol = 1e-8);

CertificateReport certify_finite_duals(const OperatorExpr& h0, const LocalityClass& s,
                                       const CertificateOptions& opts = {});

// dim ker of V -> Proj_{S-perp} i[V, h0] over all Hermitian V, from dense
// commutators. n <= 4.
int brute_force_ker_fH(const OperatorExpr& h0, const LocalityClass& s, double rel_tol = 1e-8);

struct LemmaResult {
  int n = 0;
  int k = 0;
  int dim_found = 0;
  int dim_expected = 0;
  // S already spans every operator, so the statement carries no content.
  bool vacuous = false;
};

// Hermitian V with Proj_{S-perp} i[V, L] = 0 for every basis element L of
// S = k_local(n, k). n <= 4.
LemmaResult verify_locality_lemma(int n, int k, double rel_tol = 1e-8);

}  // namespace tps
