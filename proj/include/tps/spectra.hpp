#pragma once

#include <vector>

#include "tps/common.hpp"

namespace tps {

/// Eigenvalue multiset stored sorted: ascending for Hermitian sources,
/// lexicographic by (Re, Im) otherwise.
class Spectrum {
 public:
  Spectrum() = default;
  static Spectrum from_real(std::vector<double> values);
  // With hermitian=true the imaginary parts must vanish to 1e-12 * scale.
  static Spectrum from_complex(std::vector<Complex> values, bool hermitian = false);

  bool hermitian() const { return hermitian_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<Complex>& values() const { return values_; }
  std::vector<double> real_values() const;
  bool all_real() const;
  // max(1, largest |eigenvalue|); every relative tolerance uses it.
  double scale() const;
  Complex sum() const;

 private:
  std::vector<Complex> values_;
  bool hermitian_ = false;
};

struct EigenSystem {
  // Eigenvalues in the same order as the vector columns (sorted as Spectrum).
  std::vector<Complex> values;
  bool hermitian = false;
  CMatrix right;
  // Unit left eigenvectors, w_i^dagger H = lambda_i w_i^dagger. Equal to
  // `right` for Hermitian input.
  CMatrix left;
  // |w_i^dagger v_i| for unit w_i, v_i; 1 for Hermitian input.
  RVector condition;

  Spectrum spectrum() const;
  // Pairs with condition below the threshold are treated as defective.
  bool near_defective(double threshold = 1e-8) const;
};

EigenSystem eigh(const CMatrix& h);
EigenSystem eig_general(const CMatrix& h);
Spectrum spectrum_of(const CMatrix& h, bool hermitian);

/// l2 distance under the optimal bijection between two equal-size spectra.
double spectral_distance(const Spectrum& a, const Spectrum& b);

struct SpectrumMatching {
  // source index assigned to each target slot
  std::vector<int> source_of_target;
  double distance = 0.0;
};

// Optimal assignment of `source` eigenvalues onto `target` slots under
// squared-modulus costs.
SpectrumMatching match_spectra(const std::vector<Complex>& source, const std::vector<Complex>& target);

struct DegeneracyProfile {
  std::vector<int> cluster_sizes;
  int max_multiplicity = 0;
  double min_gap = 0.0;  // smallest consecutive gap, absolute
};

// Clusters sorted values whose consecutive gaps are below tol * scale.
DegeneracyProfile degeneracy_profile(const Spectrum& s, double tol);

}  // namespace tps
