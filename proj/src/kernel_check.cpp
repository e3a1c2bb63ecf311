#include "tps/kernel_check.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace tps {

namespace {

constexpr int kBruteForceMaxSites = 4;

// Real coefficient vectors of the class basis over a fixed list of strings.
RMatrix class_coefficient_matrix(const LocalityClass& s, const std::vector<PauliString>& strings) {
  std::map<PauliString, Eigen::Index> row;
  for (std::size_t i = 0; i < strings.size(); ++i) row.emplace(strings[i], static_cast<Eigen::Index>(i));
  RMatrix b = RMatrix::Zero(static_cast<Eigen::Index>(strings.size()), static_cast<Eigen::Index>(s.dim()));
  for (std::size_t j = 0; j < s.dim(); ++j)
    for (const auto& [p, w] : s.basis()[j].terms()) b(row.at(p), static_cast<Eigen::Index>(j)) = w.real();
  return b;
}

// Orthonormal basis for the column span.
RMatrix orthonormal_columns(const RMatrix& b) {
  Eigen::ColPivHouseholderQR<RMatrix> qr(b);
  const auto r = qr.rank();
  RMatrix q = qr.householderQ() * RMatrix::Identity(b.rows(), r);
  return q;
}

std::vector<PauliString> all_strings(int n) {
  auto full = LocalityClass::k_local(n, n);
  std::vector<PauliString> out;
  out.reserve(full->dim());
  for (const auto& e : full->basis()) out.push_back(e.terms().begin()->first);
  return out;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::ambiguous: return "ambiguous";
  }
  return "ambiguous";
}

RankResult numerical_rank(const RMatrix& a, double rel_tol) {
  RankResult r;
  if (a.size() == 0) {
    r.gap_ratio = std::numeric_limits<double>::infinity();
    return r;
  }
  if (!a.allFinite()) throw Error(ErrorKind::invalid_argument, "numerical_rank: non-finite entries");
  Eigen::BDCSVD<RMatrix> svd(a);
  const auto& sv = svd.singularValues();
  r.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = r.singular_values.empty() ? 0.0 : r.singular_values.front();
  for (double s : r.singular_values)
    if (s > rel_tol * smax) ++r.rank;
  if (r.rank == 0 || r.rank == static_cast<int>(r.singular_values.size()) || r.singular_values[r.rank] == 0.0)
    r.gap_ratio = std::numeric_limits<double>::infinity();
  else
    r.gap_ratio = r.singular_values[r.rank - 1] / r.singular_values[r.rank];
  return r;
}

RMatrix build_M(const EigenSystem& eigen, const LocalityClass& s) {
  const auto dim = eigen.right.cols();
  if (static_cast<std::size_t>(dim) != hilbert_dim(s.n())) throw Error(ErrorKind::dimension, "eigenbasis does not match class");
  RMatrix m = RMatrix::Zero(dim, static_cast<Eigen::Index>(s.dim()));
  double worst_imag = 0.0;
  for (std::size_t j = 0; j < s.dim(); ++j) {
    for (const auto& [p, w] : s.basis()[j].terms()) {
      for (Eigen::Index i = 0; i < dim; ++i) {
        const Complex e = w * expectation(p, eigen.right.col(i));
        m(i, static_cast<Eigen::Index>(j)) += e.real();
        worst_imag = std::max(worst_imag, std::abs(e.imag()));
      }
    }
  }
  if (worst_imag > 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::numerical, "M entries are not real; basis or eigenvectors are not Hermitian");
  return m;
}

RMatrix build_M(const OperatorExpr& h0, const LocalityClass& s, double degeneracy_tol) {
  if (h0.n() != s.n()) throw Error(ErrorKind::dimension, "operator and class differ in site count");
  if (!h0.is_hermitian()) throw Error(ErrorKind::invalid_argument, "build_M needs a Hermitian operator");
  const auto es = eigh(h0.dense());
  const auto prof = degeneracy_profile(es.spectrum(), degeneracy_tol);
  if (prof.max_multiplicity > 1)
    throw Error(ErrorKind::degenerate, "spectrum is degenerate (max multiplicity " +
                                           std::to_string(prof.max_multiplicity) +
                                           "); ker M no longer tracks Im(C_H) within S");
  return build_M(es, s);
}

int commutant_1local_dim(const OperatorExpr& h0, double rel_tol) {
  const int n = h0.n();
  const PauliSum h = h0.to_pauli_sum();
  std::vector<PauliSum> images;
  images.reserve(static_cast<std::size_t>(3 * n + 1));
  images.emplace_back(n);  // identity commutes with everything
  for (int i = 0; i < n; ++i)
    for (std::uint8_t a = 1; a <= 3; ++a) {
      PauliSum v(n);
      v.add(PauliString::single(n, i, a), 1.0);
      images.push_back(commutator_i(v, h));
    }
  std::map<PauliString, Eigen::Index> rows;
  for (const auto& im : images)
    for (const auto& kv : im.terms()) rows.emplace(kv.first, static_cast<Eigen::Index>(rows.size()));
  const auto cols = static_cast<Eigen::Index>(images.size());
  const auto nrows = static_cast<Eigen::Index>(rows.size());
  RMatrix a = RMatrix::Zero(2 * nrows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (const auto& [p, v] : images[c].terms()) {
      a(rows.at(p), c) = v.real();
      a(nrows + rows.at(p), c) = v.imag();
    }
  if (nrows == 0) return static_cast<int>(cols);
  return static_cast<int>(cols) - numerical_rank(a, rel_tol).rank;
}

CertificateReport certify_finite_duals(const OperatorExpr& h0, const LocalityClass& s, const CertificateOptions& opts) {
  if (h0.n() != s.n()) throw Error(ErrorKind::dimension, "operator and class differ in site count");
  if (!h0.is_hermitian()) throw Error(ErrorKind::invalid_argument, "certificate needs a Hermitian operator");
  CertificateReport rep;
  rep.class_name = s.name() + (s.kind() == ClassKind::k_local ? "(" + std::to_string(s.k()) + ")" : "");
  rep.n = s.n();
  rep.s = s.dim();
  rep.N = hilbert_dim(s.n());

  const auto es = eigh(h0.dense());
  const auto prof = degeneracy_profile(es.spectrum(), opts.degeneracy_tol);
  rep.spectrum_nondegenerate = prof.max_multiplicity == 1;
  rep.min_level_gap = prof.min_gap;
  rep.commutant_1local_dim = commutant_1local_dim(h0, opts.rank_rel_tol);

  const RMatrix m = build_M(es, s);
  const auto rank = numerical_rank(m, opts.rank_rel_tol);
  rep.dim_ker_M = static_cast<int>(s.dim()) - rank.rank;
  rep.singular_values = rank.singular_values;
  rep.gap_ratio = rank.gap_ratio;
  rep.dim_g = 3 * s.n() + 1;
  rep.expected = rep.dim_g - rep.commutant_1local_dim;

  const bool gap_ok = rep.gap_ratio >= opts.min_gap_ratio;
  if (rep.spectrum_nondegenerate && rep.commutant_1local_dim == 1 && gap_ok && rep.dim_ker_M == rep.expected) {
    rep.verdict = Verdict::pass;
  } else if (!rep.spectrum_nondegenerate) {
    rep.verdict = Verdict::ambiguous;
    rep.diagnostic = "degenerate spectrum (max multiplicity " + std::to_string(prof.max_multiplicity) +
                     "); M-matrix criterion does not apply";
  } else if (!gap_ok) {
    rep.verdict = Verdict::ambiguous;
    rep.diagnostic = "no clear singular-value gap at the rank cut";
  } else if (rep.commutant_1local_dim != 1) {
    rep.verdict = Verdict::ambiguous;
    rep.diagnostic = "h0 commutes with " + std::to_string(rep.commutant_1local_dim - 1) +
                     " independent 1-local operators besides the identity";
  } else {
    rep.verdict = Verdict::fail;
    rep.diagnostic = "dim ker M = " + std::to_string(rep.dim_ker_M) + " exceeds the gauge count " +
                     std::to_string(rep.expected);
  }
  return rep;
}

int brute_force_ker_fH(const OperatorExpr& h0, const LocalityClass& s, double rel_tol) {
  const int n = s.n();
  if (n > kBruteForceMaxSites) throw Error(ErrorKind::dimension, "brute_force_ker_fH is capped at n = 4");
  if (h0.n() != n) throw Error(ErrorKind::dimension, "operator and class differ in site count");
  const auto strings = all_strings(n);
  const auto count = static_cast<Eigen::Index>(strings.size());
  const RMatrix q = orthonormal_columns(class_coefficient_matrix(s, strings));
  const CMatrix h = h0.dense();

  RMatrix f(2 * count, count);
  for (Eigen::Index c = 0; c < count; ++c) {
    const CMatrix p = dense(strings[c]);
    const CMatrix x = Complex(0.0, 1.0) * (p * h - h * p);
    RVector re(count), im(count);
    for (Eigen::Index r = 0; r < count; ++r) {
      const Complex coeff = pauli_coefficient(x, strings[r]);
      re(r) = coeff.real();
      im(r) = coeff.imag();
    }
    // S is spanned by real combinations, so project both parts.
    f.col(c).head(count) = re - q * (q.transpose() * re);
    f.col(c).tail(count) = im - q * (q.transpose() * im);
  }
  return static_cast<int>(count) - numerical_rank(f, rel_tol).rank;
}

LemmaResult verify_locality_lemma(int n, int k, double rel_tol) {
  if (n > kBruteForceMaxSites) throw Error(ErrorKind::dimension, "verify_locality_lemma is capped at n = 4");
  auto s = LocalityClass::k_local(n, k);
  const auto strings = all_strings(n);
  LemmaResult out;
  out.n = n;
  out.k = k;
  out.dim_expected = 3 * n + 1;
  out.vacuous = s->dim() == strings.size();

  // Row per (basis element, image string outside S); column per V string.
  std::map<std::pair<std::size_t, PauliString>, Eigen::Index> rows;
  std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> entries;
  for (std::size_t c = 0; c < strings.size(); ++c) {
    PauliSum v(n);
    v.add(strings[c], 1.0);
    for (std::size_t j = 0; j < s->dim(); ++j) {
      const PauliSum img = commutator_i(v, s->basis()[j]);
      for (const auto& [r, coeff] : img.terms()) {
        if (s->index_of(r)) continue;
        auto [it, fresh] = rows.emplace(std::make_pair(j, r), static_cast<Eigen::Index>(rows.size()));
        entries.emplace_back(it->second, static_cast<Eigen::Index>(c), coeff.real());
      }
    }
  }
  const auto cols = static_cast<Eigen::Index>(strings.size());
  if (rows.empty()) {
    out.dim_found = static_cast<int>(cols);
    return out;
  }
  RMatrix a = RMatrix::Zero(static_cast<Eigen::Index>(rows.size()), cols);
  for (const auto& [r, c, v] : entries) a(r, c) += v;
  out.dim_found = static_cast<int>(cols) - numerical_rank(a, rel_tol).rank;
  return out;
}

}  // namespace tps
