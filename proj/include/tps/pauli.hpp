#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tps/common.hpp"

namespace tps {

// Single-site Pauli letters. The numeric values match the operator JSON
// encoding (0=I, 1=X, 2=Y, 3=Z).
enum Letter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// An n-site word over {I,X,Y,Z}. Site 0 is the leftmost Kronecker factor,
/// i.e. the most significant bit of a computational basis index.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<std::uint8_t> letters);

  static PauliString identity(int n);
  static PauliString single(int n, int site, std::uint8_t letter);
  static PauliString pair(int n, int site_a, std::uint8_t letter_a, int site_b,
                          std::uint8_t letter_b);
  // Parses "XIZY"-style words.
  static PauliString parse(std::string_view word);

  int n() const { return static_cast<int>(letters_.size()); }
  const std::vector<std::uint8_t>& letters() const { return letters_; }
  std::uint8_t operator[](int site) const { return letters_[site]; }

  std::vector<int> support() const;
  int weight() const;
  bool is_identity() const { return weight() == 0; }

  // Bit masks over basis indices: x_mask flips, z_mask signs (Y sets both).
  std::uint64_t x_mask() const;
  std::uint64_t z_mask() const;
  int y_count() const;

  bool commutes_with(const PauliString& other) const;
  std::string to_string() const;

  auto operator<=>(const PauliString&) const = default;
  bool operator==(const PauliString&) const = default;

 private:
  std::vector<std::uint8_t> letters_;
};

// Identity first, then ascending weight, then lexicographic by support and
// finally by the letters on the support.
bool canonical_less(const PauliString& a, const PauliString& b);

// a * b = phase * result.
std::pair<Complex, PauliString> multiply(const PauliString& a,
                                         const PauliString& b);

/// Sparse complex combination of Pauli strings on a fixed number of sites.
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(int n) : n_(n) {}

  int n() const { return n_; }
  const std::map<PauliString, Complex>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add(const PauliString& p, Complex coeff);
  Complex coefficient(const PauliString& p) const;
  // Drops terms with |coeff| <= tol.
  void prune(double tol = 0.0);

  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator*=(Complex s);
  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator*(Complex s, PauliSum a) { return a *= s; }

  // Sum over terms of |c|^2; the squared Hilbert-Schmidt norm divided by 2^n.
  double coefficient_norm2() const;

 private:
  int n_ = 0;
  std::map<PauliString, Complex> terms_;
};

// i[A, B] computed in the Pauli algebra.
PauliSum commutator_i(const PauliSum& a, const PauliSum& b);

// Dense realizations. All respect the dense cap.
CMatrix dense(const PauliString& p);
CMatrix dense(const PauliSum& sum);
void add_dense(const PauliString& p, Complex coeff, CMatrix& out);

// P v for a single string, O(2^n).
CVector apply(const PauliString& p, const CVector& v);
// <v| P |v>.
Complex expectation(const PauliString& p, const Eigen::Ref<const CVector>& v);
// <w| P |v>.
Complex matrix_element(const PauliString& p, const Eigen::Ref<const CVector>& w,
                       const Eigen::Ref<const CVector>& v);
// tr(P H) / 2^n, the coefficient of P in the Pauli expansion of H.
Complex pauli_coefficient(const CMatrix& h, const PauliString& p);

}  // namespace tps
