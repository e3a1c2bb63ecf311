#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tps/equivalence.hpp"
#include "tps/least_squares.hpp"
#include "tps/sampling.hpp"

namespace tps {

/// Coordinates for the search: one (possibly complex) coefficient per basis
/// element of the class. Real coordinates are [Re p] or [Re p; Im p].
struct SearchSpace {
  ClassPtr cls;
  bool complexified = false;

  int complex_dim() const { return static_cast<int>(cls->dim()); }
  int parameter_dim() const { return complex_dim() * (complexified ? 2 : 1); }
  OperatorExpr to_expr(const CVector& params) const;
  CVector to_complex(const RVector& x) const;
  RVector to_real(const CVector& params) const;
};

struct GaugeFixResult {
  TICoefficients fixed;
  Matrix2c witness = Matrix2c::Identity();  // fixed = witness-conjugated input
  Matrix3c rotation = Matrix3c::Identity();
  bool first_stage_skipped = false;   // zero 1-local row
  bool second_stage_skipped = false;  // no rotation can clear c[1][2]
  bool complex_witness = false;       // witness outside SU(2)
};

/// Uniform single-qubit rotation taking c[0][1], c[0][2] and c[1][2] to zero.
/// The first stage turns the 1-local row onto +-z (sign of c[0][3]); the
/// second rotates about z. When no real angle clears c[1][2] the witness
/// uses a complex angle unless allow_complex is false, in which case the
/// closest real angle is used and the stage is flagged as skipped.
GaugeFixResult gauge_fix(const TICoefficients& tc, bool allow_complex = true);

struct ObjectiveValue {
  double value = 0.0;
  // lambda_{pi(k)} - target_k
  CVector residual;
  std::vector<int> matching;  // pi
};

ObjectiveValue objective(const CVector& params, const Spectrum& target, const SearchSpace& space);

/// d lambda_i / d p_j for the eigenvalues of H(params) in Spectrum order.
/// Throws ErrorKind::defective when an eigenpair condition is below 1e-8.
CMatrix eig_jacobian(const CVector& params, const SearchSpace& space);

enum class Classification { trivial_equivalent, candidate_dual, non_converged };
std::string to_string(Classification c);

struct SearchOptions {
  DescentMethod method = DescentMethod::levenberg_marquardt;
  int max_iter = 500;
  double success_tol = 1e-8;   // relative to the target scale
  double classify_tol = 1e-6;  // relative to the target scale
  double step_tol = 1e-14;
  // Equivalence group used to classify minima; defaults to the search's
  // complexification when unset.
  std::optional<GroupOptions> group;
  bool classify = true;
  // Per complex coordinate: held at its starting value during descent.
  std::vector<bool> frozen;
};

struct SearchMinimum {
  int start = 0;
  CVector params;
  double distance = 0.0;
  int iterations = 0;
  std::string stop_reason;
  Classification classification = Classification::non_converged;
  std::optional<EquivalenceVerdict> equivalence;
};

struct SearchReport {
  std::string space;
  std::string target_digest;
  std::uint64_t seed = 0;
  int starts = 0;
  double scale = 1.0;
  std::vector<SearchMinimum> minima;

  int count(Classification c) const;
  int converged(double rel_tol) const;
};

// Stable hex digest of a spectrum rounded to 1e-10 * scale.
std::string spectrum_digest(const Spectrum& s);

// Random start with iid normal coordinates rescaled to the Frobenius norm of h0.
CVector random_start(const SearchSpace& space, double target_frobenius, std::uint64_t seed);

/// One descent from params0 against the target spectrum.
DescentResult descend(const CVector& params0, const Spectrum& target, const SearchSpace& space,
                      const SearchOptions& opts);

/// Greedily zeroes coordinates of an isospectral point while a descent over
/// the remaining ones stays on the target spectrum. Moves a point of a
/// continuous isospectral family to a sparse representative.
CVector sparsify(const CVector& params, const Spectrum& target, const SearchSpace& space,
                 const SearchOptions& opts = {});

/// Multistart search; start k uses derive_seed(seed, k).
SearchReport search_duals(const OperatorExpr& h0, const SearchSpace& space, int starts, std::uint64_t seed,
                          const SearchOptions& opts = {});
// Same, with explicit starting points instead of random ones.
SearchReport search_from(const OperatorExpr& h0, const SearchSpace& space, const std::vector<CVector>& starts,
                         const SearchOptions& opts = {});

struct BatchReport {
  std::uint64_t seed = 0;
  int trials = 0;
  int starts_per_trial = 0;
  int all_trivial = 0;
  int any_candidate_dual = 0;
  int any_non_converged = 0;
  std::vector<OperatorExpr> h0;
  std::vector<SearchReport> reports;
};

/// Random Hermitian H0 from `source` for each trial, searched over `space`.
/// jobs > 1 runs trials on worker threads without changing the result.
BatchReport batch_trials(int num_h0, int starts_per_h0, const ClassPtr& source, const SearchSpace& space,
                         std::uint64_t seed, const SearchOptions& opts = {}, int jobs = 1);

}  // namespace tps
