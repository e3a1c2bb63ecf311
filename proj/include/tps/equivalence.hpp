#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tps/local_group.hpp"
#include "tps/spectra.hpp"

namespace tps {

/// One element of the trivial-duality group, applied in the order
/// site permutation (reflect, then shift), transpose, local conjugation.
struct SymmetryElement {
  int shift = 0;
  bool reflect = false;
  bool transpose = false;
  // Empty: none. One entry: the same g on every site. n entries: g_i on site i.
  std::vector<Matrix2c> conjugation;

  std::string describe() const;  // e.g. "shift=2,reflect=0,transpose=1"
};

// Site i goes to this image under the element's permutation.
int permuted_site(const SymmetryElement& e, int site, int n);

// Pauli-level action; exact for every element.
PauliSum apply_symmetry(const PauliSum& op, const SymmetryElement& e);
// Dense action; the reference implementation used for verification.
CMatrix apply_symmetry_dense(const CMatrix& h, const SymmetryElement& e, int n);
// Result re-expressed in the input's class; throws not_in_class when the
// element does not preserve the class or is not among its symmetries.
OperatorExpr apply_symmetry(const OperatorExpr& expr, const SymmetryElement& e);

struct GroupOptions {
  // false: SU(2) (3 real parameters). true: SL(2,C) (6 real parameters).
  bool complexified = false;
  // Independent g_i per site instead of one g for all sites. Needed for
  // classes without translation symmetry, where local unitaries need not
  // be uniform.
  bool per_site = false;
  int starts = 20;
  double tol = 1e-6;  // relative to ||B||
  std::uint64_t seed = 0;
};

struct EquivalenceAttempt {
  std::string element;
  double best_residual = 0.0;
};

/// A "not_found" verdict is not a proof of inequivalence.
struct EquivalenceVerdict {
  bool equivalent = false;
  std::optional<SymmetryElement> witness;
  double residual = 0.0;  // ||witness(A) - B||_F / ||B||_F, dense-verified on accept
  std::vector<EquivalenceAttempt> attempts;
};

std::string to_string(const EquivalenceVerdict& v);  // "equivalent" or "not_found"

// Relative Frobenius distance between e(A) and B computed densely.
double dense_residual(const OperatorExpr& a, const OperatorExpr& b, const SymmetryElement& e);

/// Searches the discrete elements allowed by A's class in canonical order
/// (transpose, reflect, shift) and, for each, the continuous conjugation
/// group (uniform or per site) by multistart least squares on the Pauli coefficient
/// tensors. A and B may belong to different classes on the same sites.
EquivalenceVerdict decide_equivalent(const OperatorExpr& a, const OperatorExpr& b, const GroupOptions& opts = {});

struct ProbeReport {
  double spectral_distance = 0.0;
  EquivalenceVerdict verdict;
  bool probable_dual = false;
};

// Uniform for translation-invariant classes, per site otherwise.
GroupOptions group_defaults(const LocalityClass& cls, bool complexified = false);

// Group options with the elevated start count used by the probe.
GroupOptions probe_defaults(bool complexified = false);

// Requires isospectral inputs (distance < 1e-8 * scale).
ProbeReport isospectral_inequivalence_probe(const OperatorExpr& a, const OperatorExpr& b,
                                            const GroupOptions& opts = probe_defaults());

}  // namespace tps
