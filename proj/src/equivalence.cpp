#include "tps/equivalence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

#include "tps/least_squares.hpp"

namespace tps {

namespace {

// Pauli coefficients grouped by support; each block is a 3^w tensor with the
// lowest site as the most significant axis.
struct TensorForm {
  Complex identity{};
  std::map<std::vector<int>, CVector> blocks;
};

TensorForm tensorize(const PauliSum& op) {
  TensorForm t;
  for (const auto& [p, c] : op.terms()) {
    const auto supp = p.support();
    if (supp.empty()) {
      t.identity += c;
      continue;
    }
    auto it = t.blocks.find(supp);
    if (it == t.blocks.end()) {
      Eigen::Index size = 1;
      for (std::size_t k = 0; k < supp.size(); ++k) size *= 3;
      it = t.blocks.emplace(supp, CVector::Zero(size)).first;
    }
    Eigen::Index idx = 0;
    for (int s : supp) idx = 3 * idx + (p[s] - 1);
    it->second(idx) += c;
  }
  return t;
}

// Axis k of the block transforms with r[supp[k]], or r[0] when uniform.
CVector transform_block(const CVector& block, const std::vector<int>& supp, const std::vector<Matrix3c>& rs) {
  const std::size_t w = supp.size();
  CVector cur = block;
  CVector next(cur.size());
  Eigen::Index right = cur.size();
  Eigen::Index left = 1;
  for (std::size_t axis = 0; axis < w; ++axis) {
    const Matrix3c& r = rs.size() == 1 ? rs[0] : rs[static_cast<std::size_t>(supp[axis])];
    right /= 3;
    for (Eigen::Index l = 0; l < left; ++l)
      for (Eigen::Index rr = 0; rr < right; ++rr)
        for (int a = 0; a < 3; ++a) {
          Complex acc{};
          for (int b = 0; b < 3; ++b) acc += r(a, b) * cur((l * 3 + b) * right + rr);
          next((l * 3 + a) * right + rr) = acc;
        }
    std::swap(cur, next);
    left *= 3;
  }
  return cur;
}

double form_norm(const TensorForm& t) {
  double s = std::norm(t.identity);
  for (const auto& kv : t.blocks) s += kv.second.squaredNorm();
  return std::sqrt(s);
}

double form_distance(const TensorForm& a, const TensorForm& b) {
  double s = std::norm(a.identity - b.identity);
  for (const auto& [supp, blk] : a.blocks) {
    auto it = b.blocks.find(supp);
    s += it == b.blocks.end() ? blk.squaredNorm() : (blk - it->second).squaredNorm();
  }
  for (const auto& [supp, blk] : b.blocks)
    if (!a.blocks.count(supp)) s += blk.squaredNorm();
  return std::sqrt(s);
}

// Residual of the rotations acting on A against B, flattened as [Re; Im] and divided by ||B||.
class ConjugationResidual {
 public:
  ConjugationResidual(const TensorForm& a, const TensorForm& b, double scale) : a_(a), scale_(scale) {
    std::size_t total = 1;
    for (const auto& [supp, blk] : a.blocks) {
      offsets_.emplace(supp, total);
      total += static_cast<std::size_t>(blk.size());
    }
    for (const auto& [supp, blk] : b.blocks) {
      if (offsets_.count(supp)) continue;
      offsets_.emplace(supp, total);
      total += static_cast<std::size_t>(blk.size());
    }
    target_ = CVector::Zero(static_cast<Eigen::Index>(total));
    target_(0) = b.identity;
    for (const auto& [supp, blk] : b.blocks)
      target_.segment(static_cast<Eigen::Index>(offsets_.at(supp)), blk.size()) = blk;
  }

  CVector complex_residual(const std::vector<Matrix3c>& rs) const {
    CVector out = -target_;
    out(0) += a_.identity;
    for (const auto& [supp, blk] : a_.blocks)
      out.segment(static_cast<Eigen::Index>(offsets_.at(supp)), blk.size()) += transform_block(blk, supp, rs);
    return out / scale_;
  }

  RVector operator()(const std::vector<Matrix3c>& rs) const {
    const CVector c = complex_residual(rs);
    RVector out(2 * c.size());
    out << c.real(), c.imag();
    return out;
  }

 private:
  const TensorForm& a_;
  double scale_;
  std::map<std::vector<int>, std::size_t> offsets_;
  CVector target_;
};

// Block `site` of x: 3 real angles, or 3 real and 3 imaginary parts.
Vector3c omega_of(const RVector& x, bool complexified, int site = 0) {
  const int off = site * (complexified ? 6 : 3);
  Vector3c w;
  for (int k = 0; k < 3; ++k) w(k) = complexified ? Complex(x(off + k), x(off + k + 3)) : Complex(x(off + k), 0.0);
  return w;
}

// Conjugating matrices for parameters x around the seed g0.
std::vector<Matrix2c> group_element(const RVector& x, const std::vector<Matrix2c>& g0, bool complexified) {
  std::vector<Matrix2c> g(g0.size());
  for (std::size_t i = 0; i < g0.size(); ++i)
    g[i] = axis_angle(omega_of(x, complexified, static_cast<int>(i))) * g0[i];
  return g;
}

std::vector<Matrix3c> induced_rotations(const std::vector<Matrix2c>& g) {
  std::vector<Matrix3c> r(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = induced_rotation(g[i]);
  return r;
}

Eigen::Matrix3cd aggregated_two_site(const TensorForm& t) {
  Eigen::Matrix3cd s = Eigen::Matrix3cd::Zero();
  for (const auto& [supp, blk] : t.blocks) {
    if (supp.size() != 2) continue;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) s(a, b) += blk(3 * a + b);
  }
  return 0.5 * (s + s.transpose());
}

bool is_unitary(const Matrix2c& g) { return (g * g.adjoint() - Matrix2c::Identity()).norm() < 1e-8; }

// Complex-orthogonal eigenbasis of a complex symmetric matrix, or nothing
// when eigenvalues are close or an eigenvector is isotropic.
bool symmetric_eigenbasis(const Matrix3c& s, Vector3c& values, Matrix3c& vectors) {
  Eigen::ComplexEigenSolver<Matrix3c> es(s);
  if (es.info() != Eigen::Success) return false;
  values = es.eigenvalues();
  const double scale = values.cwiseAbs().maxCoeff();
  if (scale == 0.0) return false;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(values(i) - values(j)) < 1e-6 * scale) return false;
  vectors = es.eigenvectors();
  for (int k = 0; k < 3; ++k) {
    const Complex q = vectors.col(k).transpose() * vectors.col(k);
    if (std::abs(q) < 1e-8) return false;
    vectors.col(k) /= std::sqrt(q);
  }
  return true;
}

// Starting points that align the symmetric two-site parts of A and B.
std::vector<Matrix2c> alignment_seeds(const TensorForm& a, const TensorForm& b, bool complexified) {
  std::vector<Matrix2c> out;
  Vector3c la, lb;
  Matrix3c qa, qb;
  if (!symmetric_eigenbasis(aggregated_two_site(a), la, qa)) return out;
  if (!symmetric_eigenbasis(aggregated_two_site(b), lb, qb)) return out;
  std::array<int, 3> perm{0, 1, 2};
  std::array<int, 3> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int k = 0; k < 3; ++k) cost += std::norm(la(k) - lb(perm[k]));
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (int signs = 0; signs < 8; ++signs) {
    Matrix3c r = Matrix3c::Zero();
    for (int k = 0; k < 3; ++k) {
      const double s = (signs >> k) & 1 ? -1.0 : 1.0;
      r += s * qb.col(best[k]) * qa.col(k).transpose();
    }
    auto g = lift_rotation(r);
    if (!g) continue;
    if (!complexified && !is_unitary(*g)) continue;
    out.push_back(*g);
  }
  return out;
}

const std::vector<Matrix2c>& octahedral_seeds() {
  static const std::vector<Matrix2c> seeds = [] {
    std::vector<Matrix2c> out;
    std::array<int, 3> perm{0, 1, 2};
    do {
      for (int signs = 0; signs < 8; ++signs) {
        Matrix3c r = Matrix3c::Zero();
        for (int k = 0; k < 3; ++k) r(perm[k], k) = (signs >> k) & 1 ? -1.0 : 1.0;
        if (std::abs(r.determinant() - 1.0) > 1e-12) continue;
        if (auto g = lift_rotation(r)) out.push_back(*g);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }();
  return seeds;
}

std::vector<SymmetryElement> discrete_elements(const SymmetryDescriptor& sym) {
  std::vector<SymmetryElement> out;
  for (int t = 0; t < (sym.transpose ? 2 : 1); ++t)
    for (int r = 0; r < (sym.reflection ? 2 : 1); ++r)
      for (int s = 0; s < std::max(1, sym.translations); ++s) {
        SymmetryElement e;
        e.transpose = t == 1;
        e.reflect = r == 1;
        e.shift = s;
        out.push_back(e);
      }
  return out;
}

bool element_allowed(const SymmetryElement& e, const SymmetryDescriptor& sym, int n) {
  if (e.shift < 0 || e.shift >= n) return false;
  if (e.shift != 0 && sym.translations <= 1) return false;
  if (e.reflect && !sym.reflection) return false;
  if (e.transpose && !sym.transpose) return false;
  return true;
}

}  // namespace

std::string SymmetryElement::describe() const {
  return "shift=" + std::to_string(shift) + ",reflect=" + (reflect ? "1" : "0") + ",transpose=" +
         (transpose ? "1" : "0");
}

int permuted_site(const SymmetryElement& e, int site, int n) {
  const int r = e.reflect ? n - 1 - site : site;
  return ((r + e.shift) % n + n) % n;
}

PauliSum apply_symmetry(const PauliSum& op, const SymmetryElement& e) {
  const int n = op.n();
  PauliSum out(n);
  for (const auto& [p, c] : op.terms()) {
    std::vector<std::uint8_t> l(static_cast<std::size_t>(n), I);
    for (int i = 0; i < n; ++i) l[permuted_site(e, i, n)] = p[i];
    // P^T = (-1)^{#Y} P; coefficients are not conjugated.
    const Complex sign = e.transpose && (p.y_count() & 1) ? -1.0 : 1.0;
    out.add(PauliString(std::move(l)), sign * c);
  }
  if (e.conjugation.size() == 1) return conjugate_uniform(out, induced_rotation(e.conjugation[0]));
  if (!e.conjugation.empty()) {
    if (static_cast<int>(e.conjugation.size()) != n)
      throw Error(ErrorKind::dimension, "per-site conjugation needs one matrix per site");
    return conjugate_local(out, induced_rotations(e.conjugation));
  }
  return out;
}

CMatrix apply_symmetry_dense(const CMatrix& h, const SymmetryElement& e, int n) {
  const auto dim = hilbert_dim(n);
  if (static_cast<std::size_t>(h.rows()) != dim || h.rows() != h.cols())
    throw Error(ErrorKind::dimension, "matrix size does not match site count");
  std::vector<Eigen::Index> u(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    std::size_t image = 0;
    for (int i = 0; i < n; ++i) {
      if ((b >> (n - 1 - i)) & 1) image |= std::size_t{1} << (n - 1 - permuted_site(e, i, n));
    }
    u[b] = static_cast<Eigen::Index>(image);
  }
  CMatrix out(h.rows(), h.cols());
  for (std::size_t c = 0; c < dim; ++c)
    for (std::size_t r = 0; r < dim; ++r)
      out(u[r], u[c]) = h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  if (e.transpose) out.transposeInPlace();
  if (e.conjugation.size() == 1) {
    out = conjugate_uniform(out, e.conjugation[0], n);
  } else if (!e.conjugation.empty()) {
    if (static_cast<int>(e.conjugation.size()) != n)
      throw Error(ErrorKind::dimension, "per-site conjugation needs one matrix per site");
    out = conjugate_local(out, e.conjugation);
  }
  return out;
}

OperatorExpr apply_symmetry(const OperatorExpr& expr, const SymmetryElement& e) {
  if (!element_allowed(e, expr.cls().symmetry(), expr.n()))
    throw Error(ErrorKind::not_in_class,
                "element " + e.describe() + " is not a symmetry of class " + expr.cls().name());
  const PauliSum img = apply_symmetry(expr.to_pauli_sum(), e);
  try {
    return OperatorExpr::from_pauli_sum(expr.class_ptr(), img, 1e-10);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::not_in_class) throw;
    throw Error(ErrorKind::not_in_class, "element " + e.describe() + " does not preserve class " +
                                             expr.cls().name() + ": " + err.what());
  }
}

std::string to_string(const EquivalenceVerdict& v) { return v.equivalent ? "equivalent" : "not_found"; }

double dense_residual(const OperatorExpr& a, const OperatorExpr& b, const SymmetryElement& e) {
  const CMatrix db = b.dense();
  const CMatrix diff = apply_symmetry_dense(a.dense(), e, a.n()) - db;
  const double nb = db.norm();
  return nb > 0.0 ? diff.norm() / nb : diff.norm();
}

EquivalenceVerdict decide_equivalent(const OperatorExpr& a, const OperatorExpr& b, const GroupOptions& opts) {
  if (a.n() != b.n()) throw Error(ErrorKind::dimension, "operators act on different site counts");
  EquivalenceVerdict verdict;
  const PauliSum pa = a.to_pauli_sum();
  const TensorForm tb = tensorize(b.to_pauli_sum());
  const double norm_b = form_norm(tb);
  const double scale = norm_b > 0.0 ? norm_b : 1.0;
  const int sites = opts.per_site ? a.n() : 1;
  const int params = (opts.complexified ? 6 : 3) * sites;
  const auto broadcast = [&](const Matrix2c& g) { return std::vector<Matrix2c>(static_cast<std::size_t>(sites), g); };

  DescentOptions lm;
  lm.max_iter = opts.per_site ? 200 : 100;
  lm.target_value = std::min(1e-12, 1e-4 * opts.tol);

  std::vector<TensorForm> seen;
  std::vector<double> seen_best;
  const auto elements = discrete_elements(a.cls().symmetry());
  verdict.residual = std::numeric_limits<double>::infinity();

  for (std::size_t idx = 0; idx < elements.size(); ++idx) {
    const SymmetryElement& base = elements[idx];
    const TensorForm ta = tensorize(apply_symmetry(pa, base));
    const double norm_a = form_norm(ta);

    bool duplicate = false;
    for (std::size_t k = 0; k < seen.size(); ++k) {
      if (form_distance(ta, seen[k]) <= 1e-14 * std::max(1.0, norm_a)) {
        verdict.attempts.push_back({base.describe(), seen_best[k]});
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;

    const ConjugationResidual residual(ta, tb, scale);
    std::vector<std::vector<Matrix2c>> seeds{broadcast(Matrix2c::Identity())};
    for (const auto& g : alignment_seeds(ta, tb, opts.complexified)) seeds.push_back(broadcast(g));
    for (const auto& g : octahedral_seeds()) seeds.push_back(broadcast(g));
    std::seed_seq sq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                     static_cast<std::uint32_t>(idx), 0x65717576u};
    std::mt19937_64 rng(sq);
    std::normal_distribution<double> nd(0.0, 0.5);
    for (int s = 0; s < opts.starts; ++s) {
      std::vector<Matrix2c> gs;
      for (int i = 0; i < sites; ++i) {
        Matrix2c g = random_su2(rng);
        if (opts.complexified) {
          Vector3c boost;
          for (int k = 0; k < 3; ++k) boost(k) = Complex(0.0, nd(rng));
          g = g * axis_angle(boost);
        }
        gs.push_back(g);
      }
      seeds.push_back(std::move(gs));
    }

    double best = std::numeric_limits<double>::infinity();
    for (const auto& g0 : seeds) {
      auto eval_r = [&](const RVector& x) {
        return residual(induced_rotations(group_element(x, g0, opts.complexified)));
      };
      ResidualFunction f = [&](const RVector& x, RVector& r, RMatrix* jac) {
        r = eval_r(x);
        if (!r.allFinite()) return false;
        if (jac) *jac = central_difference_jacobian(eval_r, x, 1e-7);
        return true;
      };
      RVector x = RVector::Zero(params);
      double value = eval_r(x).norm();
      if (value > lm.target_value) {
        const auto res = minimize_least_squares(f, x, lm);
        x = res.x;
        value = res.value;
      }
      best = std::min(best, value);
      if (value >= opts.tol) continue;

      SymmetryElement witness = base;
      witness.conjugation = group_element(x, g0, opts.complexified);
      const double dense_res = dense_residual(a, b, witness);
      if (dense_res < opts.tol) {
        verdict.equivalent = true;
        verdict.witness = witness;
        verdict.residual = dense_res;
        verdict.attempts.push_back({base.describe(), value});
        return verdict;
      }
    }
    verdict.attempts.push_back({base.describe(), best});
    verdict.residual = std::min(verdict.residual, best);
    seen.push_back(ta);
    seen_best.push_back(best);
  }
  return verdict;
}

GroupOptions group_defaults(const LocalityClass& cls, bool complexified) {
  GroupOptions g;
  g.complexified = complexified;
  g.per_site = cls.symmetry().translations <= 1;
  return g;
}

GroupOptions probe_defaults(bool complexified) {
  GroupOptions g;
  g.complexified = complexified;
  g.starts = 200;
  return g;
}

ProbeReport isospectral_inequivalence_probe(const OperatorExpr& a, const OperatorExpr& b, const GroupOptions& opts) {
  if (a.n() != b.n()) throw Error(ErrorKind::dimension, "operators act on different site counts");
  const bool herm = a.is_hermitian(1e-12) && b.is_hermitian(1e-12);
  const Spectrum sa = spectrum_of(a.dense(), herm);
  const Spectrum sb = spectrum_of(b.dense(), herm);
  ProbeReport rep;
  rep.spectral_distance = spectral_distance(sa, sb);
  const double scale = std::max(sa.scale(), sb.scale());
  if (!(rep.spectral_distance < 1e-8 * scale))
    throw Error(ErrorKind::invalid_argument, "inequivalence probe needs isospectral inputs (distance " +
                                                 std::to_string(rep.spectral_distance) + ")");
  rep.verdict = decide_equivalent(a, b, opts);
  rep.probable_dual = !rep.verdict.equivalent;
  return rep;
}

}  // namespace tps
