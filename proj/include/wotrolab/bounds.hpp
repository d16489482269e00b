#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "wotrolab/gf.hpp"
#include "wotrolab/mub.hpp"
#include "wotrolab/qsim.hpp"

// Spectral certificate for the cheating bound of the m = n protocol.  The bad
// set B(a) = { x : x3 = c(a) (x1 + x2) } collects the outcome triples whose
// challenge lands on the target; S sums the corresponding basis projectors,
// and a feasible dual point Z = (alpha+1) f_alpha(S), f_alpha(x) = x/(alpha+x),
// upper-bounds every prover's hit probability by tr(Z)/p^{3n}.
namespace wotrolab::bounds {

using qsim::CMat;
using qsim::cplx;
using qsim::CVec;

struct SOperator {
  gf::Field field;
  std::vector<uint64_t> target;  // c : F_{p^n} -> F_{p^n}, by element index
  CMat matrix;                   // dimension p^{3n}
  uint64_t bad_per_input = 0;    // |B(a)|, always p^{2n}
};

inline CVec bad_outcome_ket(const gf::Field& field, const CMat& basis, uint64_t target_a, uint64_t x1,
                            uint64_t x2) {
  gf::FieldElem e1 = field.from_index(x1), e2 = field.from_index(x2);
  uint64_t x3 = (field.from_index(target_a) * (e1 + e2)).index();
  return qsim::kron(qsim::kron(basis.col(x1), basis.col(x2)), basis.col(x3));
}

inline SOperator build_S(const gf::Field& field, const std::vector<uint64_t>& target) {
  uint64_t d = field.order();
  uint64_t big = d * d * d;
  qsim::check_matrix_dim(big);
  if (target.size() != d) fail(Err::BadParams, "target table must cover the field");
  SOperator s{field, target, CMat(big, big), d * d};
  for (uint64_t a = 0; a < d; ++a) {
    CMat basis = mub::mub_basis(field, field.from_index(a));
    for (uint64_t x1 = 0; x1 < d; ++x1)
      for (uint64_t x2 = 0; x2 < d; ++x2) {
        CVec ket = bad_outcome_ket(field, basis, target[a], x1, x2);
        s.matrix.add_outer(ket);
      }
  }
  return s;
}

struct TraceMoments {
  double tr1 = 0, tr2 = 0, tr3 = 0;
  double expected1 = 0, expected2 = 0, bound3 = 0;
  bool tr1_ok = false, tr2_ok = false, tr3_ok = false;
};

inline TraceMoments trace_moments(const SOperator& s) {
  uint64_t d = s.field.order();
  double p3n = double(d) * double(d) * double(d);
  double p2n = double(d) * double(d);
  TraceMoments m;
  m.expected1 = p3n;
  m.expected2 = 2 * p3n - p2n;
  m.bound3 = 4 * p3n + p2n;
  m.tr1 = std::real(s.matrix.trace());
  m.tr2 = 0;  // tr S^2 = squared Frobenius norm for Hermitian S
  for (size_t i = 0; i < s.matrix.rows(); ++i)
    for (size_t j = 0; j < s.matrix.cols(); ++j) m.tr2 += std::norm(s.matrix(i, j));
  CMat sq = s.matrix * s.matrix;
  m.tr3 = 0;
  for (size_t i = 0; i < sq.rows(); ++i)
    for (size_t j = 0; j < sq.cols(); ++j) m.tr3 += std::real(sq(i, j) * s.matrix(j, i));
  double tol = 1e-6 * p3n;
  m.tr1_ok = std::abs(m.tr1 - m.expected1) <= tol;
  m.tr2_ok = std::abs(m.tr2 - m.expected2) <= tol;
  m.tr3_ok = m.tr3 <= m.bound3 + tol;
  return m;
}

// the proof's closed-form Taylor assembly, all terms kept
inline double taylor_dual_value(uint64_t p, uint64_t n, double alpha) {
  if (alpha <= 0 || alpha > 1) fail(Err::BadParams, "alpha must lie in (0,1]");
  double pn = std::pow(double(p), -double(n));
  double a1 = alpha + 1;
  return 1 - alpha * (1 - pn) / (a1 * a1) + 4 * alpha * pn / (a1 * a1 * a1);
}

struct DualCertificate {
  double alpha = 0;
  CMat z;
  double dual_value = 0;            // tr(Z) / p^{3n}, certified cheating bound
  double feasibility_min_eig = 0;   // min over checked (a,x) of min-eig(Z - proj)
  double taylor_value = 0;
  uint64_t pairs_checked = 0;
};

namespace detail {

// Smallest eigenvalue of D - vv^dagger given the eigensystem of Z = U D U^t:
// the secular function g(t) = 1 - sum_i |c_i|^2/(d_i - t) with c = U^dagger v
// is decreasing below d_min, so the minimum eigenvalue is its unique root
// there (or d_min itself when v has no weight on that eigenspace).
inline double min_eig_minus_projector(const qsim::EigResult& eig, const CVec& v) {
  size_t n = eig.values.size();
  CVec c(n, cplx{});
  for (size_t k = 0; k < n; ++k) {
    cplx acc = 0;
    for (size_t i = 0; i < n; ++i) acc += std::conj(eig.vectors(i, k)) * v[i];
    c[k] = acc;
  }
  double dmin = eig.values.front();
  double vnorm2 = 0;
  for (auto& x : c) vnorm2 += std::norm(x);
  auto g = [&](double t) {
    double s = 0;
    for (size_t k = 0; k < n; ++k) {
      double w = std::norm(c[k]);
      if (w > 0) s += w / (eig.values[k] - t);
    }
    return 1 - s;
  };
  double lo = dmin - vnorm2 - 1e-9, hi = dmin - 1e-15;
  if (g(hi) >= 0) return dmin;  // no weight on the bottom eigenspace within precision
  for (int it = 0; it < 200; ++it) {
    double mid = (lo + hi) / 2;
    (g(mid) >= 0 ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace detail

// Dual feasibility is checked exhaustively at n=1 and on a seeded sample of
// pairs (plus the most binding ones) at n=2, where the full set is too large.
inline DualCertificate dual_certificate(const SOperator& s, double alpha, uint64_t sample_pairs = 200,
                                        uint64_t seed = 1) {
  DualCertificate cert;
  cert.alpha = alpha;
  uint64_t d = s.field.order();
  uint64_t big = d * d * d;
  cert.taylor_value = taylor_dual_value(uint64_t(s.field.p()), s.field.n(), alpha);

  qsim::EigResult eig = qsim::herm_eig(s.matrix);
  std::vector<double> fvals(eig.values.size());
  double trz = 0;
  for (size_t i = 0; i < fvals.size(); ++i) {
    double x = std::max(0.0, eig.values[i]);
    fvals[i] = (alpha + 1) * x / (alpha + x);
    trz += fvals[i];
  }
  cert.dual_value = trz / double(big);
  cert.z = qsim::spectral_map(eig, fvals);

  // feasibility: Z - |x>_a<x| >= 0 on the checked pair set; f_alpha is
  // increasing, so the eigenvector order carries over
  qsim::EigResult zeig;
  zeig.values = fvals;
  zeig.vectors = eig.vectors;

  cert.feasibility_min_eig = 1e300;
  auto check_pair = [&](uint64_t a, uint64_t x1, uint64_t x2, const CMat& basis) {
    CVec ket = bad_outcome_ket(s.field, basis, s.target[a], x1, x2);
    double me = detail::min_eig_minus_projector(zeig, ket);
    cert.feasibility_min_eig = std::min(cert.feasibility_min_eig, me);
    cert.pairs_checked++;
  };

  uint64_t total_pairs = d * d * d;  // (a, x1, x2)
  if (total_pairs <= 256) {
    for (uint64_t a = 0; a < d; ++a) {
      CMat basis = mub::mub_basis(s.field, s.field.from_index(a));
      for (uint64_t x1 = 0; x1 < d; ++x1)
        for (uint64_t x2 = 0; x2 < d; ++x2) check_pair(a, x1, x2, basis);
    }
  } else {
    RngStream rng(seed);
    for (uint64_t t = 0; t < sample_pairs; ++t) {
      uint64_t a = rng.below(d);
      CMat basis = mub::mub_basis(s.field, s.field.from_index(a));
      check_pair(a, rng.below(d), rng.below(d), basis);
    }
    // the most binding constraints: bad kets with the largest weight in the
    // low-lying eigenspaces of Z
    struct Binding {
      double score;
      uint64_t a, x1, x2;
    };
    std::vector<Binding> top;
    for (uint64_t a = 0; a < d; ++a) {
      CMat basis = mub::mub_basis(s.field, s.field.from_index(a));
      for (uint64_t x1 = 0; x1 < d; ++x1)
        for (uint64_t x2 = 0; x2 < d; ++x2) {
          CVec ket = bad_outcome_ket(s.field, basis, s.target[a], x1, x2);
          // inverse-quadratic form v^t Z^{-1} v; close to 1 means tight
          double score = 0;
          for (size_t k = 0; k < zeig.values.size(); ++k) {
            if (zeig.values[k] < 1e-12) continue;
            cplx acc = 0;
            for (uint64_t i = 0; i < big; ++i) acc += std::conj(zeig.vectors(i, k)) * ket[i];
            score += std::norm(acc) / zeig.values[k];
          }
          top.push_back({score, a, x1, x2});
        }
    }
    std::partial_sort(top.begin(), top.begin() + 10, top.end(),
                      [](const Binding& x, const Binding& y) { return x.score > y.score; });
    for (int i = 0; i < 10; ++i) {
      CMat basis = mub::mub_basis(s.field, s.field.from_index(top[i].a));
      check_pair(top[i].a, top[i].x1, top[i].x2, basis);
    }
  }

  if (cert.feasibility_min_eig < -1e-7)
    fail(Err::InfeasibleCertificate, "dual certificate infeasible; construction or numerics are off");
  return cert;
}

// ---------------------------------------------------------------------------
// Weil sums.  Full quadratic mode sums psi(trace(x^t M x + b^t x)) over the
// whole space; constrained mode sums psi(trace(x^t C x)) over the kernel of B.

struct WeilReport {
  double abs_sum = 0;
  double bound = 0;
  bool holds = false;
  uint64_t domain = 0;        // points actually summed
  uint64_t kernel_dim = 0;    // constrained mode
  uint64_t rank_b = 0;        // constrained mode
  bool applicable = true;     // bound hypotheses held (nonsingular restriction)
  uint64_t restricted_rank = 0;
};

using FMat = std::vector<std::vector<gf::FieldElem>>;

namespace detail {

inline uint64_t rank_of(FMat m, const gf::Field& field, FMat* kernel_basis = nullptr) {
  if (m.empty()) return 0;
  size_t rows = m.size(), cols = m[0].size();
  std::vector<size_t> pivot_col;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t sel = rows;
    for (size_t i = r; i < rows; ++i)
      if (!m[i][c].is_zero()) {
        sel = i;
        break;
      }
    if (sel == rows) continue;
    std::swap(m[r], m[sel]);
    gf::FieldElem inv = m[r][c].inv();
    for (size_t j = 0; j < cols; ++j) m[r][j] = m[r][j] * inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      gf::FieldElem coef = m[i][c];
      for (size_t j = 0; j < cols; ++j) m[i][j] = m[i][j] - coef * m[r][j];
    }
    pivot_col.push_back(c);
    r++;
  }
  if (kernel_basis) {
    kernel_basis->clear();
    std::vector<bool> is_pivot(cols, false);
    for (size_t c : pivot_col) is_pivot[c] = true;
    for (size_t c = 0; c < cols; ++c) {
      if (is_pivot[c]) continue;
      std::vector<gf::FieldElem> v(cols, field.zero());
      v[c] = field.one();
      for (size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -m[i][c];
      kernel_basis->push_back(std::move(v));
    }
  }
  return r;
}

}  // namespace detail

// | sum_x psi(tr(x^t M x + b^t x)) | over the full space, against the
// Deligne bound (d-1)^vars q^{vars/2} with d = 2
inline WeilReport weil_full_quadratic(const gf::Field& field, const FMat& m,
                                      const std::vector<gf::FieldElem>& b, uint64_t domain_cap = 10000000) {
  size_t vars = m.size();
  uint64_t q = field.order();
  double dompts = std::pow(double(q), double(vars));
  if (dompts > double(domain_cap)) fail(Err::TooLarge, "quadratic sum domain too large");
  FMat mm = m;
  if (detail::rank_of(mm, field) != vars) fail(Err::RankDeficient, "quadratic form is singular");

  WeilReport rep;
  rep.domain = uint64_t(dompts);
  double unit = 2 * 3.14159265358979323846 / double(field.p());
  cplx total = 0;
  std::vector<gf::FieldElem> x(vars, field.zero());
  for (uint64_t pt = 0; pt < rep.domain; ++pt) {
    uint64_t t = pt;
    for (size_t i = 0; i < vars; ++i, t /= q) x[i] = field.from_index(t % q);
    gf::FieldElem val = field.zero();
    for (size_t i = 0; i < vars; ++i) {
      for (size_t j = 0; j < vars; ++j) val = val + m[i][j] * x[i] * x[j];
      val = val + b[i] * x[i];
    }
    total += std::polar(1.0, unit * double(val.trace()));
  }
  rep.abs_sum = std::abs(total);
  rep.bound = std::pow(double(q), double(vars) / 2);  // (d-1)^vars = 1 at d = 2
  rep.holds = rep.abs_sum <= rep.bound + 1e-6;
  return rep;
}

// | sum_{x : Bx = 0} psi(tr(x^t C x)) | against q^{m/2}, m = dim ker B.
// The bound is only claimed when the form restricted to the kernel is
// nonsingular; a singular restriction raises RankDeficient, since the sum
// then picks up a full power of q per radical dimension.
inline WeilReport weil_constrained(const gf::Field& field, const FMat& bmat, const FMat& cmat,
                                   uint64_t domain_cap = 10000000, bool require_nonsingular = true) {
  size_t k = cmat.size();
  uint64_t q = field.order();
  FMat kernel;
  WeilReport rep;
  rep.rank_b = detail::rank_of(bmat, field, &kernel);
  rep.kernel_dim = kernel.size();
  FMat cc = cmat;
  if (detail::rank_of(cc, field) != k) fail(Err::RankDeficient, "C must have full rank");

  // restriction G_{ij} = u_i^t C u_j on the kernel basis
  size_t m = kernel.size();
  FMat g(m, std::vector<gf::FieldElem>(m, field.zero()));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) {
      gf::FieldElem acc = field.zero();
      for (size_t u = 0; u < k; ++u)
        for (size_t v = 0; v < k; ++v) acc = acc + kernel[i][u] * cmat[u][v] * kernel[j][v];
      g[i][j] = acc;
    }
  rep.restricted_rank = detail::rank_of(g, field);
  rep.applicable = rep.restricted_rank == m;
  if (require_nonsingular && !rep.applicable)
    fail(Err::RankDeficient, "form restricted to the kernel is singular; bound not applicable");

  double dompts = std::pow(double(q), double(m));
  if (dompts > double(domain_cap)) fail(Err::TooLarge, "kernel too large to enumerate");
  rep.domain = uint64_t(dompts);
  double unit = 2 * 3.14159265358979323846 / double(field.p());
  cplx total = 0;
  std::vector<gf::FieldElem> x(k, field.zero());
  for (uint64_t pt = 0; pt < rep.domain; ++pt) {
    uint64_t t = pt;
    for (size_t u = 0; u < k; ++u) x[u] = field.zero();
    for (size_t i = 0; i < m; ++i, t /= q) {
      gf::FieldElem coef = field.from_index(t % q);
      if (coef.is_zero()) continue;
      for (size_t u = 0; u < k; ++u) x[u] = x[u] + coef * kernel[i][u];
    }
    gf::FieldElem val = field.zero();
    for (size_t u = 0; u < k; ++u)
      for (size_t v = 0; v < k; ++v) val = val + x[u] * cmat[u][v] * x[v];
    total += std::polar(1.0, unit * double(val.trace()));
  }
  rep.abs_sum = std::abs(total);
  rep.bound = std::pow(double(q), double(m) / 2);
  rep.holds = rep.abs_sum <= rep.bound + 1e-6;
  return rep;
}

// ---------------------------------------------------------------------------
// The matrices behind the tr S^3 cross-term: B_a maps (x1, x2) to a bad
// outcome triple, B_{a,b,c} stacks the pairwise differences, and C_{a,b,c} is
// the block-diagonal phase form.

struct WeilMatrices {
  FMat b_a;      // 2 x 3
  FMat b_abc;    // 6 x 9
  FMat c_abc;    // 9 x 9
  uint64_t rank_b_abc = 0;
};

inline WeilMatrices build_weil_matrices(const gf::Field& field, const gf::FieldElem& a, const gf::FieldElem& b,
                                        const gf::FieldElem& c, const std::vector<uint64_t>& target) {
  if (a == b || b == c || a == c) fail(Err::NotDistinct, "basis indices must be pairwise distinct");
  auto row_block = [&](const gf::FieldElem& idx) {
    gf::FieldElem t = field.from_index(target[idx.index()]);
    FMat m(2, std::vector<gf::FieldElem>(3, field.zero()));
    m[0][0] = field.one();
    m[0][2] = t;
    m[1][1] = field.one();
    m[1][2] = t;
    return m;
  };
  WeilMatrices wm;
  wm.b_a = row_block(a);
  FMat ba = row_block(a), bb = row_block(b), bc = row_block(c);
  wm.b_abc.assign(6, std::vector<gf::FieldElem>(9, field.zero()));
  for (size_t r = 0; r < 2; ++r)
    for (size_t j = 0; j < 3; ++j) {
      wm.b_abc[r][j] = -ba[r][j];
      wm.b_abc[r][6 + j] = ba[r][j];
      wm.b_abc[2 + r][3 + j] = bb[r][j];
      wm.b_abc[2 + r][6 + j] = -bb[r][j];
      wm.b_abc[4 + r][j] = bc[r][j];
      wm.b_abc[4 + r][3 + j] = -bc[r][j];
    }
  wm.c_abc.assign(9, std::vector<gf::FieldElem>(9, field.zero()));
  gf::FieldElem d1 = c - a, d2 = b - c, d3 = a - b;
  for (size_t i = 0; i < 3; ++i) {
    wm.c_abc[i][i] = d1;
    wm.c_abc[3 + i][3 + i] = d2;
    wm.c_abc[6 + i][6 + i] = d3;
  }
  wm.rank_b_abc = detail::rank_of(wm.b_abc, field);
  if (wm.rank_b_abc < 4) fail(Err::RankDeficient, "stacked difference matrix lost rank");
  return wm;
}

}  // namespace wotrolab::bounds
