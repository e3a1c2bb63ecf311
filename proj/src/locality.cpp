#include "tps/locality.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace tps {

namespace {

constexpr char kLetterNames[] = {'I', 'X', 'Y', 'Z'};

// All strings of exactly weight w on n sites, each support with every letter
// assignment over {X,Y,Z}.
void enumerate_weight(int n, int w, std::vector<PauliString>& out) {
  std::vector<int> sites(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) sites[i] = i;
  if (w == 0) {
    out.push_back(PauliString::identity(n));
    return;
  }
  while (true) {
    std::vector<int> letters(static_cast<std::size_t>(w), 1);
    while (true) {
      std::vector<std::uint8_t> l(static_cast<std::size_t>(n), I);
      for (int i = 0; i < w; ++i) l[sites[i]] = static_cast<std::uint8_t>(letters[i]);
      out.emplace_back(std::move(l));
      int pos = w - 1;
      while (pos >= 0 && letters[pos] == 3) letters[pos--] = 1;
      if (pos < 0) break;
      ++letters[pos];
    }
    int pos = w - 1;
    while (pos >= 0 && sites[pos] == n - w + pos) --pos;
    if (pos < 0) break;
    ++sites[pos];
    for (int i = pos + 1; i < w; ++i) sites[i] = sites[i - 1] + 1;
  }
}

PauliSum single_term(const PauliString& p) {
  PauliSum s(p.n());
  s.add(p, 1.0);
  return s;
}

double pauli_inner_real(const PauliSum& a, const PauliSum& b) {
  double acc = 0.0;
  for (const auto& [p, c] : a.terms()) acc += std::real(std::conj(c) * b.coefficient(p));
  return acc;
}

}  // namespace

std::string to_string(ClassKind kind) {
  switch (kind) {
    case ClassKind::k_local: return "k_local";
    case ClassKind::nn_chain_open: return "nn_chain_open";
    case ClassKind::nn_chain_periodic: return "nn_chain_periodic";
    case ClassKind::ti_chain_periodic: return "ti_chain_periodic";
    case ClassKind::ti_chain_gauge_fixed: return "ti_chain_gauge_fixed";
    case ClassKind::boundary_class: return "boundary_class";
    case ClassKind::custom: return "custom";
  }
  return "custom";
}

ClassKind parse_class_kind(const std::string& name) {
  std::string s = name;
  std::replace(s.begin(), s.end(), '-', '_');
  for (auto k : {ClassKind::k_local, ClassKind::nn_chain_open, ClassKind::nn_chain_periodic,
                 ClassKind::ti_chain_periodic, ClassKind::ti_chain_gauge_fixed,
                 ClassKind::boundary_class, ClassKind::custom}) {
    if (to_string(k) == s) return k;
  }
  if (s == "boundary") return ClassKind::boundary_class;
  throw Error(ErrorKind::invalid_argument, "unknown class name '" + name + "'");
}

LocalityClass::LocalityClass(ClassKind kind, int n, int d, int k) : kind_(kind), n_(n), d_(d), k_(k) {}

void LocalityClass::finish() {
  if (string_based_) {
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      const auto& p = basis_[j].terms().begin()->first;
      if (!index_.emplace(p, j).second)
        throw Error(ErrorKind::invalid_argument, "duplicate basis string " + p.to_string());
      labels_.push_back(p.to_string());
    }
    return;
  }
  const auto m = static_cast<Eigen::Index>(basis_.size());
  CMatrix g(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) g(a, b) = pauli_inner_real(basis_[a], basis_[b]);
  gram_.compute(g);
}

std::shared_ptr<const LocalityClass> LocalityClass::k_local(int n, int k, int d) {
  if (d != 2) throw Error(ErrorKind::invalid_argument, "dense classes are implemented for d=2 only");
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be positive");
  if (k < 0 || k > n) throw Error(ErrorKind::invalid_argument, "k_local requires 0 <= k <= n");
  std::shared_ptr<LocalityClass> c(new LocalityClass(ClassKind::k_local, n, d, k));
  std::vector<PauliString> strings;
  for (int w = 0; w <= k; ++w) enumerate_weight(n, w, strings);
  std::sort(strings.begin(), strings.end(), canonical_less);
  for (const auto& p : strings) c->basis_.push_back(single_term(p));
  c->symmetry_ = {n, true, true};
  c->finish();
  return c;
}

std::shared_ptr<const LocalityClass> LocalityClass::nn_chain(int n, bool periodic) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "chain classes need n >= 2");
  if (periodic && n < 3) throw Error(ErrorKind::invalid_argument, "periodic chains need n >= 3");
  std::shared_ptr<LocalityClass> c(new LocalityClass(
      periodic ? ClassKind::nn_chain_periodic : ClassKind::nn_chain_open, n, 2, -1));
  std::vector<PauliString> strings{PauliString::identity(n)};
  for (int i = 0; i < n; ++i)
    for (std::uint8_t a = 1; a <= 3; ++a) strings.push_back(PauliString::single(n, i, a));
  const int bonds = periodic ? n : n - 1;
  for (int i = 0; i < bonds; ++i)
    for (std::uint8_t a = 1; a <= 3; ++a)
      for (std::uint8_t b = 1; b <= 3; ++b) strings.push_back(PauliString::pair(n, i, a, (i + 1) % n, b));
  std::sort(strings.begin(), strings.end(), canonical_less);
  for (const auto& p : strings) c->basis_.push_back(single_term(p));
  c->symmetry_ = {periodic ? n : 1, true, true};
  c->finish();
  return c;
}

std::shared_ptr<const LocalityClass> LocalityClass::ti_chain(int n, bool gauge_fixed) {
  if (n < 3) throw Error(ErrorKind::invalid_argument, "translation-invariant chains need n >= 3");
  std::shared_ptr<LocalityClass> c(new LocalityClass(
      gauge_fixed ? ClassKind::ti_chain_gauge_fixed : ClassKind::ti_chain_periodic, n, 2, -1));
  c->string_based_ = false;
  for (std::uint8_t a = 0; a <= 3; ++a) {
    for (std::uint8_t b = 1; b <= 3; ++b) {
      if (gauge_fixed && ((a == 0 && b != 3) || (a == 1 && b == 2))) continue;
      PauliSum s(n);
      for (int i = 0; i < n; ++i) {
        std::vector<std::uint8_t> l(static_cast<std::size_t>(n), I);
        l[i] = a;
        l[(i + 1) % n] = b;
        s.add(PauliString(std::move(l)), 1.0);
      }
      c->basis_.push_back(std::move(s));
      c->labels_.push_back(std::string("c") + kLetterNames[a] + kLetterNames[b]);
    }
  }
  c->symmetry_ = {n, true, true};
  c->finish();
  return c;
}

std::shared_ptr<const LocalityClass> LocalityClass::boundary(int n) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "boundary class needs n >= 2");
  std::shared_ptr<LocalityClass> c(new LocalityClass(ClassKind::boundary_class, n, 2, -1));
  c->string_based_ = false;
  // a_p: uniform same-letter bonds on the open chain
  for (std::uint8_t p = 1; p <= 3; ++p) {
    PauliSum s(n);
    for (int i = 0; i + 1 < n; ++i) s.add(PauliString::pair(n, i, p, i + 1, p), 1.0);
    c->basis_.push_back(std::move(s));
    c->labels_.push_back(std::string("a") + kLetterNames[p]);
  }
  // b_p: uniform field on sites 1..n-1
  for (std::uint8_t p = 1; p <= 3; ++p) {
    PauliSum s(n);
    for (int i = 0; i + 1 < n; ++i) s.add(PauliString::single(n, i, p), 1.0);
    c->basis_.push_back(std::move(s));
    c->labels_.push_back(std::string("b") + kLetterNames[p]);
  }
  for (std::uint8_t p = 1; p <= 3; ++p) {
    c->basis_.push_back(single_term(PauliString::single(n, 0, p)));
    c->labels_.push_back(std::string("c") + kLetterNames[p]);
  }
  for (std::uint8_t p = 1; p <= 3; ++p) {
    c->basis_.push_back(single_term(PauliString::single(n, n - 1, p)));
    c->labels_.push_back(std::string("d") + kLetterNames[p]);
  }
  c->symmetry_ = {1, true, true};
  c->finish();
  return c;
}

std::shared_ptr<const LocalityClass> LocalityClass::custom(int n, std::vector<PauliString> strings) {
  std::shared_ptr<LocalityClass> c(new LocalityClass(ClassKind::custom, n, 2, -1));
  const auto id = PauliString::identity(n);
  if (std::find(strings.begin(), strings.end(), id) == strings.end()) strings.push_back(id);
  for (const auto& p : strings)
    if (p.n() != n) throw Error(ErrorKind::invalid_argument, "custom basis string has wrong length");
  std::sort(strings.begin(), strings.end(), canonical_less);
  for (const auto& p : strings) c->basis_.push_back(single_term(p));
  c->symmetry_ = {1, false, true};
  c->finish();
  return c;
}

std::optional<std::size_t> LocalityClass::index_of(const PauliString& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool LocalityClass::respects_hypergraph(const PauliString& p) const {
  const auto sup = p.support();
  switch (kind_) {
    case ClassKind::k_local: return static_cast<int>(sup.size()) <= k_;
    case ClassKind::nn_chain_open:
    case ClassKind::boundary_class:
      return sup.size() <= 1 || (sup.size() == 2 && sup[1] == sup[0] + 1);
    case ClassKind::nn_chain_periodic:
    case ClassKind::ti_chain_periodic:
    case ClassKind::ti_chain_gauge_fixed:
      return sup.size() <= 1 ||
             (sup.size() == 2 && (sup[1] == sup[0] + 1 || (sup[0] == 0 && sup[1] == n_ - 1)));
    case ClassKind::custom: return index_of(p).has_value();
  }
  return false;
}

Projection LocalityClass::project(const PauliSum& op) const {
  if (op.n() != 0 && op.n() != n_) throw Error(ErrorKind::dimension, "operator site count differs from class");
  const auto m = static_cast<Eigen::Index>(basis_.size());
  Projection out;
  out.coeffs = CVector::Zero(m);
  if (string_based_) {
    double outside = 0.0;
    for (const auto& [p, c] : op.terms()) {
      if (auto j = index_of(p))
        out.coeffs(static_cast<Eigen::Index>(*j)) = c;
      else
        outside += std::norm(c);
    }
    const double total = op.coefficient_norm2();
    out.residual = total > 0.0 ? std::sqrt(outside / total) : 0.0;
    return out;
  }
  CVector rhs(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    Complex acc{};
    for (const auto& [p, c] : basis_[j].terms()) acc += std::conj(c) * op.coefficient(p);
    rhs(j) = acc;
  }
  out.coeffs = gram_.solve(rhs);
  PauliSum diff = op;
  diff += Complex(-1.0) * expand(out.coeffs);
  const double total = op.coefficient_norm2();
  out.residual = total > 0.0 ? std::sqrt(diff.coefficient_norm2() / total) : 0.0;
  return out;
}

PauliSum LocalityClass::expand(const CVector& coeffs) const {
  if (coeffs.size() != static_cast<Eigen::Index>(basis_.size()))
    throw Error(ErrorKind::dimension, "coefficient vector length differs from class dimension");
  PauliSum out(n_);
  for (std::size_t j = 0; j < basis_.size(); ++j) {
    const Complex c = coeffs(static_cast<Eigen::Index>(j));
    if (c == Complex{}) continue;
    for (const auto& [p, w] : basis_[j].terms()) out.add(p, c * w);
  }
  out.prune(0.0);
  return out;
}

ClassPtr build_class(ClassKind kind, int n, std::optional<int> k) {
  switch (kind) {
    case ClassKind::k_local:
      if (!k) throw Error(ErrorKind::invalid_argument, "k_local needs k");
      return LocalityClass::k_local(n, *k);
    case ClassKind::nn_chain_open: return LocalityClass::nn_chain(n, false);
    case ClassKind::nn_chain_periodic: return LocalityClass::nn_chain(n, true);
    case ClassKind::ti_chain_periodic: return LocalityClass::ti_chain(n, false);
    case ClassKind::ti_chain_gauge_fixed: return LocalityClass::ti_chain(n, true);
    case ClassKind::boundary_class: return LocalityClass::boundary(n);
    case ClassKind::custom:
      throw Error(ErrorKind::invalid_argument, "custom classes need an explicit basis");
  }
  throw Error(ErrorKind::invalid_argument, "unknown class");
}

ClassPtr build_class(const std::string& name, int n, std::optional<int> k) {
  return build_class(parse_class_kind(name), n, k);
}

LocalDimension dim_local_space(int n, int d, int k) {
  if (n < 0 || d < 2 || k < 0 || k > n)
    throw Error(ErrorKind::invalid_argument, "dim_local_space needs 0 <= k <= n and d >= 2");
  using u64 = unsigned long long;
  const u64 local = static_cast<u64>(d) * static_cast<u64>(d) - 1;
  auto mul = [](u64 a, u64 b) -> u64 {
    u64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorKind::dimension, "dimension overflows 64 bits");
    return r;
  };
  u64 s = 0;
  u64 binom = 1;  // C(n, j)
  u64 power = 1;  // (d^2-1)^j
  for (int j = 0; j <= k; ++j) {
    if (j > 0) {
      binom = mul(binom, static_cast<u64>(n - j + 1)) / static_cast<u64>(j);
      power = mul(power, local);
    }
    if (__builtin_add_overflow(s, mul(binom, power), &s))
      throw Error(ErrorKind::dimension, "dimension overflows 64 bits");
  }
  LocalDimension out;
  out.s = s;
  out.hilbert = 1;
  for (int i = 0; i < n; ++i) {
    if (__builtin_mul_overflow(out.hilbert, static_cast<u64>(d), &out.hilbert)) {
      out.hilbert = ULLONG_MAX;
      break;
    }
  }
  out.below_hilbert = out.s < out.hilbert;
  return out;
}

}  // namespace tps
