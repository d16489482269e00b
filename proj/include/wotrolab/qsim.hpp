#pragma once

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <numeric>
#include <utility>
#include <vector>

#include "wotrolab/common.hpp"

// Dense complex linear algebra over qudit registers.  Everything is plain
// std::vector storage; the size caps keep accidental blowups from trashing a
// run (raise them through WOTROLAB_MAX_DIM / WOTROLAB_MAX_VEC if needed).
namespace wotrolab::qsim {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

struct Caps {
  uint64_t max_dim;
  uint64_t max_vec;
};

inline const Caps& caps() {
  static Caps c = [] {
    Caps r{4096, 1000000};
    if (const char* e = std::getenv("WOTROLAB_MAX_DIM")) r.max_dim = std::strtoull(e, nullptr, 10);
    if (const char* e = std::getenv("WOTROLAB_MAX_VEC")) r.max_vec = std::strtoull(e, nullptr, 10);
    return r;
  }();
  return c;
}

inline void check_matrix_dim(uint64_t d) {
  if (d > caps().max_dim) fail(Err::TooLarge, "matrix dimension " + std::to_string(d) + " exceeds cap");
}
inline void check_vector_len(uint64_t d) {
  if (d > caps().max_vec) fail(Err::TooLarge, "vector length " + std::to_string(d) + " exceeds cap");
}

class CMat {
 public:
  CMat() = default;
  CMat(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static CMat identity(size_t d) {
    CMat m(d, d);
    for (size_t i = 0; i < d; ++i) m(i, i) = 1;
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  cplx& operator()(size_t i, size_t j) { return a_[i * cols_ + j]; }
  const cplx& operator()(size_t i, size_t j) const { return a_[i * cols_ + j]; }
  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }

  CMat adjoint() const {
    CMat r(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  CMat conjugate() const {
    CMat r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = std::conj(a_[i]);
    return r;
  }

  CVec col(size_t j) const {
    CVec v(rows_);
    for (size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  friend CMat operator+(const CMat& x, const CMat& y) {
    CMat r = x;
    for (size_t i = 0; i < r.a_.size(); ++i) r.a_[i] += y.a_[i];
    return r;
  }
  friend CMat operator-(const CMat& x, const CMat& y) {
    CMat r = x;
    for (size_t i = 0; i < r.a_.size(); ++i) r.a_[i] -= y.a_[i];
    return r;
  }
  friend CMat operator*(cplx s, const CMat& x) {
    CMat r = x;
    for (auto& v : r.a_) v *= s;
    return r;
  }

  CMat& operator+=(const CMat& y) {
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += y.a_[i];
    return *this;
  }

  friend CMat operator*(const CMat& x, const CMat& y) {
    if (x.cols_ != y.rows_) fail(Err::DimensionMismatch, "matmul shape mismatch");
    CMat r(x.rows_, y.cols_);
    for (size_t i = 0; i < x.rows_; ++i) {
      const cplx* xi = x.a_.data() + i * x.cols_;
      cplx* ri = r.a_.data() + i * y.cols_;
      for (size_t k = 0; k < x.cols_; ++k) {
        cplx v = xi[k];
        if (v == cplx{}) continue;
        const cplx* yk = y.a_.data() + k * y.cols_;
        for (size_t j = 0; j < y.cols_; ++j) ri[j] += v * yk[j];
      }
    }
    return r;
  }

  CVec apply(const CVec& v) const {
    CVec r(rows_);
    for (size_t i = 0; i < rows_; ++i) {
      cplx acc = 0;
      const cplx* row = a_.data() + i * cols_;
      for (size_t j = 0; j < cols_; ++j) acc += row[j] * v[j];
      r[i] = acc;
    }
    return r;
  }

  cplx trace() const {
    cplx t = 0;
    for (size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius() const {
    double s = 0;
    for (auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
  }

  double max_abs() const {
    double s = 0;
    for (auto& v : a_) s = std::max(s, std::abs(v));
    return s;
  }

  void add_outer(const CVec& v, cplx weight = 1.0) {
    for (size_t i = 0; i < rows_; ++i) {
      cplx w = weight * v[i];
      cplx* row = a_.data() + i * cols_;
      for (size_t j = 0; j < cols_; ++j) row[j] += w * std::conj(v[j]);
    }
  }

 private:
  size_t rows_ = 0, cols_ = 0;
  CVec a_;
};

using HermOp = CMat;

inline CMat kron(const CMat& x, const CMat& y) {
  CMat r(x.rows() * y.rows(), x.cols() * y.cols());
  for (size_t i = 0; i < x.rows(); ++i)
    for (size_t j = 0; j < x.cols(); ++j) {
      cplx v = x(i, j);
      if (v == cplx{}) continue;
      for (size_t k = 0; k < y.rows(); ++k)
        for (size_t l = 0; l < y.cols(); ++l) r(i * y.rows() + k, j * y.cols() + l) = v * y(k, l);
    }
  return r;
}

inline CVec kron(const CVec& x, const CVec& y) {
  CVec r(x.size() * y.size());
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = 0; j < y.size(); ++j) r[i * y.size() + j] = x[i] * y[j];
  return r;
}

inline cplx inner(const CVec& x, const CVec& y) {
  cplx s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

inline double norm(const CVec& x) { return std::sqrt(std::real(inner(x, x))); }

inline CMat outer(const CVec& v) {
  CMat r(v.size(), v.size());
  r.add_outer(v);
  return r;
}

inline bool is_hermitian(const CMat& m, double tol = 1e-9) {
  if (m.rows() != m.cols()) return false;
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition, cyclic Jacobi rotations.

struct EigResult {
  std::vector<double> values;  // ascending
  CMat vectors;                // columns, M = V diag V^dagger
};

inline EigResult herm_eig(const CMat& m_in, double rel_tol = 1e-12, int max_sweeps = 64) {
  size_t d = m_in.rows();
  if (d != m_in.cols()) fail(Err::DimensionMismatch, "herm_eig wants a square matrix");
  if (!is_hermitian(m_in, 1e-9 * std::max(1.0, m_in.max_abs())))
    fail(Err::NotHermitian, "herm_eig input is not Hermitian");
  check_matrix_dim(d);

  CMat a = m_in;
  CMat v = CMat::identity(d);
  double normf = a.frobenius();
  if (normf == 0) normf = 1;
  double stop = rel_tol * normf;

  auto off_mass = [&] {
    double s = 0;
    for (size_t i = 0; i < d; ++i)
      for (size_t j = i + 1; j < d; ++j) s += 2 * std::norm(a(i, j));
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = off_mass();
    if (off < stop) break;
    double thresh = off / (double(d) * double(d));
    for (size_t i = 0; i < d; ++i) {
      for (size_t j = i + 1; j < d; ++j) {
        cplx beta = a(i, j);
        double ab = std::abs(beta);
        if (ab <= thresh * 0.01) continue;
        double alpha = std::real(a(i, i));
        double gamma = std::real(a(j, j));
        cplx w = beta / ab;  // a(i,j) = ab * w; diag(1, conj(w)) makes the 2x2 block real
        double tau = (gamma - alpha) / (2 * ab);
        // smaller-magnitude root of t^2 - 2 tau t - 1 = 0 zeroes the
        // off-diagonal (cancellation-free form)
        double t = -((tau >= 0) ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
        double c = 1 / std::sqrt(1 + t * t);
        double s = t * c;
        // unitary on (i,j): U = [[c, -s],[conj(w) s, conj(w) c]]
        cplx ws = w * s, wc = w * c;                     // row-side factors
        cplx cws = std::conj(ws), cwc = std::conj(wc);   // column-side factors
        cplx* ri = a.data() + i * d;
        cplx* rj = a.data() + j * d;
        for (size_t k = 0; k < d; ++k) {
          cplx xi = ri[k], xj = rj[k];
          ri[k] = c * xi + ws * xj;
          rj[k] = -s * xi + wc * xj;
        }
        for (size_t k = 0; k < d; ++k) {
          cplx xi = a(k, i), xj = a(k, j);
          a(k, i) = c * xi + cws * xj;
          a(k, j) = -s * xi + cwc * xj;
        }
        a(i, j) = 0;
        a(j, i) = 0;
        a(i, i) = cplx(std::real(a(i, i)), 0);
        a(j, j) = cplx(std::real(a(j, j)), 0);
        for (size_t k = 0; k < d; ++k) {
          cplx xi = v(k, i), xj = v(k, j);
          v(k, i) = c * xi + cws * xj;
          v(k, j) = -s * xi + cwc * xj;
        }
      }
    }
  }
  if (sweep == max_sweeps && off_mass() >= stop) fail(Err::NoConvergence, "Jacobi sweeps exhausted");

  std::vector<size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) { return std::real(a(x, x)) < std::real(a(y, y)); });
  EigResult r;
  r.values.resize(d);
  r.vectors = CMat(d, d);
  for (size_t j = 0; j < d; ++j) {
    r.values[j] = std::real(a(order[j], order[j]));
    for (size_t i = 0; i < d; ++i) r.vectors(i, j) = v(i, order[j]);
  }
  return r;
}

inline double min_eigenvalue(const CMat& m) { return herm_eig(m).values.front(); }
inline double max_eigenvalue(const CMat& m) { return herm_eig(m).values.back(); }

// f applied to the spectrum: V f(diag) V^dagger
inline CMat spectral_map(const EigResult& e, const std::vector<double>& fvals) {
  size_t d = e.values.size();
  CMat r(d, d);
  for (size_t k = 0; k < d; ++k) {
    if (fvals[k] == 0) continue;
    CVec col = e.vectors.col(k);
    r.add_outer(col, fvals[k]);
  }
  return r;
}

inline CMat sqrt_psd(const CMat& m) {
  EigResult e = herm_eig(m);
  std::vector<double> f(e.values.size());
  for (size_t i = 0; i < f.size(); ++i) f[i] = e.values[i] > 0 ? std::sqrt(e.values[i]) : 0.0;
  return spectral_map(e, f);
}

// half the trace norm of rho - sigma
inline double trace_distance(const CMat& rho, const CMat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    fail(Err::DimensionMismatch, "trace_distance shape mismatch");
  EigResult e = herm_eig(rho - sigma);
  double s = 0;
  for (double v : e.values) s += std::abs(v);
  return s / 2;
}

// ---------------------------------------------------------------------------
// States over registers.

struct StateVec {
  std::vector<uint64_t> dims;
  CVec amps;
  bool subnormalized = false;

  uint64_t total_dim() const {
    uint64_t t = 1;
    for (auto d : dims) t *= d;
    return t;
  }
  double norm() const { return qsim::norm(amps); }
};

inline StateVec make_state(std::vector<uint64_t> dims, CVec amps) {
  StateVec s{std::move(dims), std::move(amps)};
  check_vector_len(s.total_dim());
  return s;
}

inline StateVec basis_state(std::vector<uint64_t> dims, uint64_t index) {
  StateVec s{std::move(dims), {}};
  check_vector_len(s.total_dim());
  s.amps.assign(s.total_dim(), 0);
  s.amps[index] = 1;
  return s;
}

// re-group registers without touching amplitudes (products must match)
inline StateVec reshape(StateVec s, std::vector<uint64_t> new_dims) {
  uint64_t t = 1;
  for (auto d : new_dims) t *= d;
  if (t != s.total_dim()) fail(Err::DimensionMismatch, "reshape changes total dimension");
  s.dims = std::move(new_dims);
  return s;
}

inline StateVec tensor(const StateVec& a, const StateVec& b) {
  StateVec r;
  r.dims = a.dims;
  r.dims.insert(r.dims.end(), b.dims.begin(), b.dims.end());
  check_vector_len(a.total_dim() * b.total_dim());
  r.amps = kron(a.amps, b.amps);
  r.subnormalized = a.subnormalized || b.subnormalized;
  return r;
}

// count EPR pairs of local dimension p, register layout [P_1..P_c, V_1..V_c]
// with P_i paired to V_i
inline StateVec epr_state(uint64_t p, uint64_t count) {
  if (p < 2 || count < 1) fail(Err::BadParams, "epr_state wants p >= 2, count >= 1");
  uint64_t local = ipow(p, count);
  check_vector_len(local * local);
  StateVec s;
  s.dims.assign(2 * count, p);
  s.amps.assign(local * local, 0);
  double amp = 1.0 / std::sqrt(double(local));
  for (uint64_t j = 0; j < local; ++j) s.amps[j * local + j] = amp;
  return s;
}

namespace detail {

struct RegView {
  uint64_t sub_dim = 1;   // product of selected register dims
  uint64_t rest_dim = 1;  // product of the others
  std::vector<uint64_t> sub_offsets;
  std::vector<uint64_t> rest_offsets;
};

inline RegView reg_view(const StateVec& s, const std::vector<size_t>& regs) {
  RegView v;
  std::vector<uint64_t> strides(s.dims.size(), 1);
  for (size_t i = s.dims.size(); i-- > 1;) strides[i - 1] = strides[i] * s.dims[i];
  std::vector<bool> in(s.dims.size(), false);
  for (size_t r : regs) {
    if (r >= s.dims.size()) fail(Err::DimensionMismatch, "register index out of range");
    in[r] = true;
    v.sub_dim *= s.dims[r];
  }
  v.rest_dim = s.total_dim() / v.sub_dim;

  v.sub_offsets.assign(v.sub_dim, 0);
  for (uint64_t a = 0; a < v.sub_dim; ++a) {
    uint64_t t = a, off = 0;
    for (size_t k = regs.size(); k-- > 0;) {
      size_t r = regs[k];
      off += (t % s.dims[r]) * strides[r];
      t /= s.dims[r];
    }
    v.sub_offsets[a] = off;
  }
  std::vector<size_t> rest;
  for (size_t i = 0; i < s.dims.size(); ++i)
    if (!in[i]) rest.push_back(i);
  v.rest_offsets.assign(v.rest_dim, 0);
  for (uint64_t b = 0; b < v.rest_dim; ++b) {
    uint64_t t = b, off = 0;
    for (size_t k = rest.size(); k-- > 0;) {
      size_t r = rest[k];
      off += (t % s.dims[r]) * strides[r];
      t /= s.dims[r];
    }
    v.rest_offsets[b] = off;
  }
  return v;
}

}  // namespace detail

// y = (op on regs (x) identity elsewhere) x
inline void apply_op(StateVec& s, const CMat& op, const std::vector<size_t>& regs) {
  auto v = detail::reg_view(s, regs);
  if (op.rows() != v.sub_dim || op.cols() != v.sub_dim)
    fail(Err::DimensionMismatch, "operator does not match selected registers");
  CVec tmp(v.sub_dim), res(v.sub_dim);
  for (uint64_t b = 0; b < v.rest_dim; ++b) {
    uint64_t base = v.rest_offsets[b];
    for (uint64_t a = 0; a < v.sub_dim; ++a) tmp[a] = s.amps[base + v.sub_offsets[a]];
    res = op.apply(tmp);
    for (uint64_t a = 0; a < v.sub_dim; ++a) s.amps[base + v.sub_offsets[a]] = res[a];
  }
}

inline double born_probability(const StateVec& s, const CMat& op, const std::vector<size_t>& regs) {
  auto v = detail::reg_view(s, regs);
  if (op.rows() != v.sub_dim) fail(Err::DimensionMismatch, "operator does not match selected registers");
  double p = 0;
  CVec tmp(v.sub_dim);
  for (uint64_t b = 0; b < v.rest_dim; ++b) {
    uint64_t base = v.rest_offsets[b];
    for (uint64_t a = 0; a < v.sub_dim; ++a) tmp[a] = s.amps[base + v.sub_offsets[a]];
    p += std::real(inner(tmp, op.apply(tmp)));
  }
  return p;
}

// contract selected registers against a fixed ket (they are removed);
// the result is left unnormalized
inline StateVec project_out(const StateVec& s, const std::vector<size_t>& regs, const CVec& ket) {
  auto v = detail::reg_view(s, regs);
  if (ket.size() != v.sub_dim) fail(Err::DimensionMismatch, "ket does not match selected registers");
  StateVec r;
  std::vector<bool> in(s.dims.size(), false);
  for (size_t x : regs) in[x] = true;
  for (size_t i = 0; i < s.dims.size(); ++i)
    if (!in[i]) r.dims.push_back(s.dims[i]);
  if (r.dims.empty()) r.dims.push_back(1);
  r.amps.assign(v.rest_dim, 0);
  for (uint64_t b = 0; b < v.rest_dim; ++b) {
    cplx acc = 0;
    uint64_t base = v.rest_offsets[b];
    for (uint64_t a = 0; a < v.sub_dim; ++a) acc += std::conj(ket[a]) * s.amps[base + v.sub_offsets[a]];
    r.amps[b] = acc;
  }
  r.subnormalized = true;
  return r;
}

// ---------------------------------------------------------------------------
// POVMs and measurement sampling.

struct ValidationReport {
  bool is_povm = false;
  double min_eig = 0;           // smallest eigenvalue across elements
  double completeness_gap = 0;  // operator norm of (sum E - I)
  double sum_max_eig = 0;       // largest eigenvalue of sum E
  double sum_min_eig = 0;
};

inline ValidationReport povm_validate(const std::vector<CMat>& ops, double tol = 1e-8) {
  if (ops.empty()) fail(Err::BadParams, "empty POVM");
  size_t d = ops.front().rows();
  ValidationReport rep;
  rep.min_eig = 1e300;
  CMat sum(d, d);
  for (auto& e : ops) {
    if (e.rows() != d || e.cols() != d) fail(Err::DimensionMismatch, "POVM elements of mixed dimension");
    rep.min_eig = std::min(rep.min_eig, min_eigenvalue(e));
    sum += e;
  }
  EigResult es = herm_eig(sum);
  rep.sum_min_eig = es.values.front();
  rep.sum_max_eig = es.values.back();
  rep.completeness_gap = std::max(std::abs(rep.sum_min_eig - 1), std::abs(rep.sum_max_eig - 1));
  rep.is_povm = rep.min_eig >= -tol && rep.completeness_gap <= tol;
  return rep;
}

class Povm {
 public:
  explicit Povm(std::vector<CMat> elements) : elements_(std::move(elements)) {}

  size_t size() const { return elements_.size(); }
  const CMat& element(size_t i) const { return elements_[i]; }
  ValidationReport validate(double tol = 1e-8) const { return povm_validate(elements_, tol); }

  const CMat& sqrt_element(size_t i) const {
    if (sqrts_.empty()) sqrts_.resize(elements_.size());
    if (sqrts_[i].rows() == 0) sqrts_[i] = sqrt_psd(elements_[i]);
    return sqrts_[i];
  }

 private:
  std::vector<CMat> elements_;
  mutable std::vector<CMat> sqrts_;
};

// Born sampling of a general POVM on a register subset; the state collapses
// to the normalized sqrt(E)-update.
inline size_t measure_povm(StateVec& s, const Povm& povm, const std::vector<size_t>& regs, RngStream& rng) {
  std::vector<double> probs(povm.size());
  double total = 0;
  for (size_t i = 0; i < povm.size(); ++i) {
    probs[i] = born_probability(s, povm.element(i), regs);
    total += probs[i];
  }
  double u = rng.next_double() * total;
  size_t pick = povm.size() - 1;
  double acc = 0;
  for (size_t i = 0; i < povm.size(); ++i) {
    acc += probs[i];
    if (u < acc) {
      pick = i;
      break;
    }
  }
  if (probs[pick] < 1e-15) fail(Err::ZeroProbabilityBranch, "selected outcome has vanishing probability");
  apply_op(s, povm.sqrt_element(pick), regs);
  double nm = s.norm();
  for (auto& a : s.amps) a /= nm;
  return pick;
}

// Projective measurement in an orthonormal basis given by columns; returns the
// column index and collapses the state.
inline size_t measure_basis(StateVec& s, const CMat& basis, const std::vector<size_t>& regs, RngStream& rng) {
  auto v = detail::reg_view(s, regs);
  if (basis.rows() != v.sub_dim) fail(Err::DimensionMismatch, "basis does not match selected registers");
  size_t d = v.sub_dim;
  // coefficients in the measurement basis, per rest-branch
  std::vector<CVec> coef(v.rest_dim);
  std::vector<double> probs(d, 0.0);
  CMat bdag = basis.adjoint();
  CVec tmp(d);
  for (uint64_t b = 0; b < v.rest_dim; ++b) {
    uint64_t base = v.rest_offsets[b];
    for (uint64_t a = 0; a < d; ++a) tmp[a] = s.amps[base + v.sub_offsets[a]];
    coef[b] = bdag.apply(tmp);
    for (uint64_t x = 0; x < d; ++x) probs[x] += std::norm(coef[b][x]);
  }
  double total = 0;
  for (double p : probs) total += p;
  double u = rng.next_double() * total;
  size_t pick = d - 1;
  double acc = 0;
  for (size_t x = 0; x < d; ++x) {
    acc += probs[x];
    if (u < acc) {
      pick = x;
      break;
    }
  }
  if (probs[pick] < 1e-15) fail(Err::ZeroProbabilityBranch, "selected outcome has vanishing probability");
  double nm = std::sqrt(probs[pick]);
  CVec bcol = basis.col(pick);
  for (uint64_t b = 0; b < v.rest_dim; ++b) {
    uint64_t base = v.rest_offsets[b];
    cplx c = coef[b][pick] / nm;
    for (uint64_t a = 0; a < d; ++a) s.amps[base + v.sub_offsets[a]] = c * bcol[a];
  }
  return pick;
}

// ---------------------------------------------------------------------------
// Qudit teleportation over EPR pairs.

inline CMat shift_op(uint64_t p) {  // X|j> = |j+1 mod p>
  CMat x(p, p);
  for (uint64_t j = 0; j < p; ++j) x((j + 1) % p, j) = 1;
  return x;
}

inline CMat clock_op(uint64_t p) {  // Z|j> = w^j |j>
  CMat z(p, p);
  for (uint64_t j = 0; j < p; ++j) z(j, j) = std::polar(1.0, 2 * 3.14159265358979323846 * double(j) / double(p));
  return z;
}

inline CMat pauli_xz(uint64_t p, uint64_t q, uint64_t r) {
  CMat m = CMat::identity(p);
  CMat x = shift_op(p), z = clock_op(p);
  for (uint64_t i = 0; i < r; ++i) m = z * m;
  for (uint64_t i = 0; i < q; ++i) m = x * m;
  return m;  // X^q Z^r
}

// generalized Bell basis on two p-level registers: |b_{qr}> = (X^q Z^r (x) I)|Phi>
inline CMat bell_basis(uint64_t p) {
  CMat b(p * p, p * p);
  double amp = 1.0 / std::sqrt(double(p));
  for (uint64_t q = 0; q < p; ++q)
    for (uint64_t r = 0; r < p; ++r) {
      CMat u = pauli_xz(p, q, r);
      size_t colidx = q * p + r;
      for (uint64_t a = 0; a < p; ++a)
        for (uint64_t bj = 0; bj < p; ++bj) b(a * p + bj, colidx) = u(a, bj) * amp;
    }
  return b;
}

struct TeleportResult {
  StateVec out;
  std::vector<std::pair<uint64_t, uint64_t>> corrections;  // (q, r) per qudit
};

// Teleports a |payload| of `count` p-level qudits through epr_state(p, count):
// Bell-measure (payload_i, P_i), contract the measured pair away, then apply
// X^q Z^r on V_i.
inline TeleportResult teleport(const StateVec& payload, const StateVec& epr, RngStream& rng) {
  size_t count = epr.dims.size() / 2;
  if (payload.dims.size() != count) fail(Err::DimensionMismatch, "payload register count mismatch");
  uint64_t p = epr.dims[0];
  for (auto d : payload.dims)
    if (d != p) fail(Err::DimensionMismatch, "payload qudit dimension mismatch");

  StateVec joint = tensor(payload, epr);  // regs: A_0..A_{c-1}, P_0.., V_0..
  CMat bell = bell_basis(p);
  TeleportResult res;
  // process pair 0 repeatedly; contracted registers vanish as we go
  for (size_t i = 0; i < count; ++i) {
    std::vector<size_t> pair = {0, count - i};  // A_i is always reg 0, P_i right after remaining A's
    size_t outcome = measure_basis(joint, bell, pair, rng);
    uint64_t q = outcome / p, r = outcome % p;
    res.corrections.emplace_back(q, r);
    joint = project_out(joint, pair, bell.col(outcome));
    double nm = joint.norm();
    for (auto& a : joint.amps) a /= nm;
    joint.subnormalized = false;
  }
  // remaining registers are V_0..V_{c-1}
  for (size_t i = 0; i < count; ++i) {
    auto [q, r] = res.corrections[i];
    apply_op(joint, pauli_xz(p, q, r), {i});
  }
  res.out = std::move(joint);
  return res;
}

inline double fidelity(const StateVec& a, const StateVec& b) {
  return std::norm(inner(a.amps, b.amps));
}

}  // namespace wotrolab::qsim
