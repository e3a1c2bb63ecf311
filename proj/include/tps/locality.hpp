#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tps/pauli.hpp"

namespace tps {

enum class ClassKind {
  k_local,
  nn_chain_open,
  nn_chain_periodic,
  ti_chain_periodic,
  ti_chain_gauge_fixed,
  boundary_class,
  custom,
};

std::string to_string(ClassKind kind);
// Accepts both "k_local" and "k-local" spellings.
ClassKind parse_class_kind(const std::string& name);

/// Discrete lattice symmetries an equivalence check may use. `translations`
/// counts cyclic shifts including the identity (1 means no shifts).
struct SymmetryDescriptor {
  int translations = 1;
  bool reflection = false;
  bool transpose = true;
};

// Coefficients of an operator projected onto a class, plus the relative
// size of the part that lies outside it.
struct Projection {
  CVector coeffs;
  double residual = 0.0;
};

/// An ordered basis spanning a subspace S of operators on n qubits.
///
/// String-based classes (k_local, nn chains, custom) hold one Pauli string
/// per element with identity first. Grouped classes (translation-invariant
/// chains, boundary class) hold uniform sums of strings per element and no
/// identity, so their dimension is the number of free couplings.
class LocalityClass {
 public:
  static std::shared_ptr<const LocalityClass> k_local(int n, int k, int d = 2);
  static std::shared_ptr<const LocalityClass> nn_chain(int n, bool periodic);
  static std::shared_ptr<const LocalityClass> ti_chain(int n, bool gauge_fixed);
  static std::shared_ptr<const LocalityClass> boundary(int n);
  static std::shared_ptr<const LocalityClass> custom(int n, std::vector<PauliString> strings);

  ClassKind kind() const { return kind_; }
  int n() const { return n_; }
  int d() const { return d_; }
  // Locality bound for k_local classes, -1 otherwise.
  int k() const { return k_; }
  std::string name() const { return to_string(kind_); }

  std::size_t dim() const { return basis_.size(); }
  const std::vector<PauliSum>& basis() const { return basis_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const SymmetryDescriptor& symmetry() const { return symmetry_; }

  bool string_based() const { return string_based_; }
  // Basis index of a string, for string-based classes.
  std::optional<std::size_t> index_of(const PauliString& p) const;
  // True when the string's support is an allowed hyperedge of the class.
  bool respects_hypergraph(const PauliString& p) const;

  Projection project(const PauliSum& op) const;
  PauliSum expand(const CVector& coeffs) const;

 private:
  LocalityClass(ClassKind kind, int n, int d, int k);
  void finish();

  ClassKind kind_;
  int n_;
  int d_;
  int k_;
  bool string_based_ = true;
  std::vector<PauliSum> basis_;
  std::vector<std::string> labels_;
  SymmetryDescriptor symmetry_;
  std::map<PauliString, std::size_t> index_;
  Eigen::LDLT<CMatrix> gram_;
};

using ClassPtr = std::shared_ptr<const LocalityClass>;

// Build a class by name: k is required for k_local and ignored otherwise.
ClassPtr build_class(ClassKind kind, int n, std::optional<int> k = std::nullopt);
ClassPtr build_class(const std::string& name, int n, std::optional<int> k = std::nullopt);

struct LocalDimension {
  unsigned long long s = 0;
  unsigned long long hilbert = 0;  // d^n, saturating at ULLONG_MAX
  bool below_hilbert = false;      // s < d^n
};

/// Dimension of the space of k-local operators on n qudits of dimension d,
/// identity included: sum_{j<=k} C(n,j) (d^2-1)^j.
LocalDimension dim_local_space(int n, int d, int k);

}  // namespace tps
