#pragma once

#include <vector>

#include "wotrolab/gf.hpp"
#include "wotrolab/qsim.hpp"

// Wootters-Fields mutually unbiased bases over F_{p^n}, p >= 3 prime.  The
// basis indexed by a has vectors |u>_a with amplitude
// p^{-n/2} exp(2 pi i / p * trace(a x^2 + u x)) at |x>.  Phases come from
// exact integer traces; the only float operation is the final exp.
namespace wotrolab::mub {

using qsim::CMat;
using qsim::cplx;
using qsim::CVec;

inline CVec mub_vector(const gf::Field& field, const gf::FieldElem& a, const gf::FieldElem& u) {
  uint64_t dim = field.order();
  qsim::check_vector_len(dim);
  CVec v(dim);
  double scale = 1.0 / std::sqrt(double(dim));
  double unit = 2 * 3.14159265358979323846 / double(field.p());
  for (uint64_t xi = 0; xi < dim; ++xi) {
    gf::FieldElem x = field.from_index(xi);
    int64_t phase = (a * x * x + u * x).trace();
    v[xi] = std::polar(scale, unit * double(phase));
  }
  return v;
}

// unitary whose column u is |u>_a
inline CMat mub_basis(const gf::Field& field, const gf::FieldElem& a) {
  uint64_t dim = field.order();
  qsim::check_matrix_dim(dim);
  CMat b(dim, dim);
  for (uint64_t ui = 0; ui < dim; ++ui) {
    CVec col = mub_vector(field, a, field.from_index(ui));
    for (uint64_t xi = 0; xi < dim; ++xi) b(xi, ui) = col[xi];
  }
  return b;
}

struct OverlapAudit {
  uint64_t pairs_checked = 0;
  uint64_t overlaps_checked = 0;
  double max_deviation = 0;  // of |<u_a|v_a'>|^2 from p^{-n}
};

// exhaustive per-pair audit of cross-basis overlaps
inline OverlapAudit mub_overlap_audit(const gf::Field& field,
                                      const std::vector<std::pair<uint64_t, uint64_t>>& basis_pairs) {
  uint64_t dim = field.order();
  double target = 1.0 / double(dim);
  OverlapAudit audit;
  for (auto [ai, bi] : basis_pairs) {
    if (ai == bi) fail(Err::BadParams, "overlap audit wants distinct basis indices");
    CMat ba = mub_basis(field, field.from_index(ai));
    CMat bb = mub_basis(field, field.from_index(bi));
    CMat g = ba.adjoint() * bb;
    for (uint64_t u = 0; u < dim; ++u)
      for (uint64_t v = 0; v < dim; ++v) {
        double dev = std::abs(std::norm(g(u, v)) - target);
        audit.max_deviation = std::max(audit.max_deviation, dev);
        audit.overlaps_checked++;
      }
    audit.pairs_checked++;
  }
  return audit;
}

}  // namespace wotrolab::mub
