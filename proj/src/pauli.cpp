#include "tps/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace tps {

namespace {

constexpr Complex kI{0.0, 1.0};

Complex i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Phase picked up by P|b>, where P|b> = phase * |b ^ x_mask>.
inline Complex column_phase(std::uint64_t b, std::uint64_t z_mask, Complex y_phase) {
  return (std::popcount(b & z_mask) & 1) ? -y_phase : y_phase;
}

}  // namespace

PauliString::PauliString(std::vector<std::uint8_t> letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw Error(ErrorKind::invalid_argument, "Pauli string needs at least one site");
  if (letters_.size() > 63) throw Error(ErrorKind::invalid_argument, "Pauli string too long");
  for (auto l : letters_) {
    if (l > 3) throw Error(ErrorKind::invalid_argument, "Pauli letter out of range 0..3");
  }
}

PauliString PauliString::identity(int n) {
  return PauliString(std::vector<std::uint8_t>(static_cast<std::size_t>(n), I));
}

PauliString PauliString::single(int n, int site, std::uint8_t letter) {
  std::vector<std::uint8_t> l(static_cast<std::size_t>(n), I);
  l.at(static_cast<std::size_t>(site)) = letter;
  return PauliString(std::move(l));
}

PauliString PauliString::pair(int n, int site_a, std::uint8_t letter_a, int site_b,
                              std::uint8_t letter_b) {
  if (site_a == site_b) throw Error(ErrorKind::invalid_argument, "pair sites must differ");
  std::vector<std::uint8_t> l(static_cast<std::size_t>(n), I);
  l.at(static_cast<std::size_t>(site_a)) = letter_a;
  l.at(static_cast<std::size_t>(site_b)) = letter_b;
  return PauliString(std::move(l));
}

PauliString PauliString::parse(std::string_view word) {
  std::vector<std::uint8_t> l;
  for (char c : word) {
    switch (c) {
      case 'I': l.push_back(I); break;
      case 'X': l.push_back(X); break;
      case 'Y': l.push_back(Y); break;
      case 'Z': l.push_back(Z); break;
      default: throw Error(ErrorKind::invalid_argument, std::string("bad Pauli letter '") + c + "'");
    }
  }
  return PauliString(std::move(l));
}

std::vector<int> PauliString::support() const {
  std::vector<int> s;
  for (int i = 0; i < n(); ++i)
    if (letters_[i] != I) s.push_back(i);
  return s;
}

int PauliString::weight() const {
  return static_cast<int>(std::count_if(letters_.begin(), letters_.end(),
                                        [](std::uint8_t l) { return l != I; }));
}

std::uint64_t PauliString::x_mask() const {
  std::uint64_t m = 0;
  const int len = n();
  for (int i = 0; i < len; ++i)
    if (letters_[i] == X || letters_[i] == Y) m |= std::uint64_t{1} << (len - 1 - i);
  return m;
}

std::uint64_t PauliString::z_mask() const {
  std::uint64_t m = 0;
  const int len = n();
  for (int i = 0; i < len; ++i)
    if (letters_[i] == Z || letters_[i] == Y) m |= std::uint64_t{1} << (len - 1 - i);
  return m;
}

int PauliString::y_count() const {
  return static_cast<int>(std::count(letters_.begin(), letters_.end(), std::uint8_t{Y}));
}

bool PauliString::commutes_with(const PauliString& other) const {
  if (other.n() != n()) throw Error(ErrorKind::dimension, "Pauli strings on different site counts");
  int anti = 0;
  for (int i = 0; i < n(); ++i) {
    const auto a = letters_[i];
    const auto b = other.letters_[i];
    if (a != I && b != I && a != b) ++anti;
  }
  return (anti & 1) == 0;
}

std::string PauliString::to_string() const {
  static constexpr char names[] = {'I', 'X', 'Y', 'Z'};
  std::string s;
  s.reserve(letters_.size());
  for (auto l : letters_) s.push_back(names[l]);
  return s;
}

bool canonical_less(const PauliString& a, const PauliString& b) {
  const int wa = a.weight();
  const int wb = b.weight();
  if (wa != wb) return wa < wb;
  const auto sa = a.support();
  const auto sb = b.support();
  if (sa != sb) return sa < sb;
  for (int s : sa) {
    if (a[s] != b[s]) return a[s] < b[s];
  }
  return false;
}

std::pair<Complex, PauliString> multiply(const PauliString& a, const PauliString& b) {
  if (a.n() != b.n()) throw Error(ErrorKind::dimension, "Pauli strings on different site counts");
  std::vector<std::uint8_t> out(a.letters());
  int quarter_turns = 0;
  for (int i = 0; i < a.n(); ++i) {
    const std::uint8_t p = a[i];
    const std::uint8_t q = b[i];
    if (q == I) continue;
    if (p == I) {
      out[i] = q;
      continue;
    }
    if (p == q) {
      out[i] = I;
      continue;
    }
    out[i] = static_cast<std::uint8_t>(6 - p - q);
    // sigma_p sigma_q = i eps_{pqr} sigma_r
    const bool cyclic = (q == p % 3 + 1);
    quarter_turns += cyclic ? 1 : 3;
  }
  return {i_power(quarter_turns), PauliString(std::move(out))};
}

void PauliSum::add(const PauliString& p, Complex coeff) {
  if (n_ == 0) n_ = p.n();
  if (p.n() != n_) throw Error(ErrorKind::dimension, "Pauli sum site count mismatch");
  terms_[p] += coeff;
}

Complex PauliSum::coefficient(const PauliString& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? Complex{} : it->second;
}

void PauliSum::prune(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  for (const auto& [p, c] : other.terms_) add(p, c);
  return *this;
}

PauliSum& PauliSum::operator*=(Complex s) {
  for (auto& kv : terms_) kv.second *= s;
  return *this;
}

double PauliSum::coefficient_norm2() const {
  double s = 0.0;
  for (const auto& kv : terms_) s += std::norm(kv.second);
  return s;
}

PauliSum commutator_i(const PauliSum& a, const PauliSum& b) {
  PauliSum out(a.n());
  for (const auto& [p, cp] : a.terms()) {
    for (const auto& [q, cq] : b.terms()) {
      if (p.commutes_with(q)) continue;
      // anticommuting: [P, Q] = 2 P Q
      auto [phase, r] = multiply(p, q);
      out.add(r, kI * 2.0 * phase * cp * cq);
    }
  }
  out.prune(0.0);
  return out;
}

void add_dense(const PauliString& p, Complex coeff, CMatrix& out) {
  const auto dim = static_cast<Eigen::Index>(hilbert_dim(p.n()));
  if (out.rows() != dim || out.cols() != dim) throw Error(ErrorKind::dimension, "dense target has wrong size");
  const std::uint64_t xm = p.x_mask();
  const std::uint64_t zm = p.z_mask();
  const Complex yph = i_power(p.y_count()) * coeff;
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim); ++b) {
    out(static_cast<Eigen::Index>(b ^ xm), static_cast<Eigen::Index>(b)) += column_phase(b, zm, yph);
  }
}

CMatrix dense(const PauliString& p) {
  check_dense_size(p.n());
  const auto dim = static_cast<Eigen::Index>(hilbert_dim(p.n()));
  CMatrix m = CMatrix::Zero(dim, dim);
  add_dense(p, 1.0, m);
  return m;
}

CMatrix dense(const PauliSum& sum) {
  check_dense_size(sum.n());
  const auto dim = static_cast<Eigen::Index>(hilbert_dim(sum.n()));
  CMatrix m = CMatrix::Zero(dim, dim);
  for (const auto& [p, c] : sum.terms()) add_dense(p, c, m);
  return m;
}

CVector apply(const PauliString& p, const CVector& v) {
  const auto dim = static_cast<std::uint64_t>(v.size());
  if (dim != hilbert_dim(p.n())) throw Error(ErrorKind::dimension, "vector has wrong size");
  const std::uint64_t xm = p.x_mask();
  const std::uint64_t zm = p.z_mask();
  const Complex yph = i_power(p.y_count());
  CVector out(v.size());
  for (std::uint64_t b = 0; b < dim; ++b) {
    out(static_cast<Eigen::Index>(b ^ xm)) = column_phase(b, zm, yph) * v(static_cast<Eigen::Index>(b));
  }
  return out;
}

Complex matrix_element(const PauliString& p, const Eigen::Ref<const CVector>& w,
                       const Eigen::Ref<const CVector>& v) {
  const auto dim = static_cast<std::uint64_t>(v.size());
  if (dim != hilbert_dim(p.n()) || w.size() != v.size())
    throw Error(ErrorKind::dimension, "vector has wrong size");
  const std::uint64_t xm = p.x_mask();
  const std::uint64_t zm = p.z_mask();
  Complex acc_plus{};
  Complex acc_minus{};
  for (std::uint64_t b = 0; b < dim; ++b) {
    const Complex t = std::conj(w(static_cast<Eigen::Index>(b ^ xm))) * v(static_cast<Eigen::Index>(b));
    if (std::popcount(b & zm) & 1)
      acc_minus += t;
    else
      acc_plus += t;
  }
  return i_power(p.y_count()) * (acc_plus - acc_minus);
}

Complex expectation(const PauliString& p, const Eigen::Ref<const CVector>& v) { return matrix_element(p, v, v); }

Complex pauli_coefficient(const CMatrix& h, const PauliString& p) {
  const auto dim = static_cast<std::uint64_t>(h.rows());
  if (dim != hilbert_dim(p.n()) || h.cols() != h.rows())
    throw Error(ErrorKind::dimension, "matrix has wrong size");
  const std::uint64_t xm = p.x_mask();
  const std::uint64_t zm = p.z_mask();
  const Complex yph = i_power(p.y_count());
  // tr(P H) = sum_c phase(c) H(c, c ^ x)
  Complex acc{};
  for (std::uint64_t c = 0; c < dim; ++c) {
    acc += column_phase(c, zm, yph) * h(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c ^ xm));
  }
  return acc / static_cast<double>(dim);
}

}  // namespace tps
