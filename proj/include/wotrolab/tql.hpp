#pragma once

#include <functional>
#include <optional>

#include "wotrolab/gf.hpp"
#include "wotrolab/mub.hpp"
#include "wotrolab/qsim.hpp"

// Quantum-lightning style schemes at desk scale.  The mock scheme carries its
// serial as a classical tag (no secure instantiation is known, and the honest
// interface is all the protocols here need); a small genuinely-quantum toy
// whose bolts are MUB states exercises the teleportation path.  Typing wraps
// any scheme with a t-wise independent hash and rejection sampling.
namespace wotrolab::tql {

struct Bolt {
  uint64_t tag = 0;  // serial carrier for the mock
  std::optional<qsim::StateVec> payload;
  std::optional<uint64_t> basis_tag;  // toy quantum: basis index = serial
  std::optional<uint64_t> label_tag;  //              vector label inside the basis
};

struct QlScheme {
  uint64_t serial_bits = 8;
  std::function<Bolt(RngStream&)> gen;
  std::function<std::optional<uint64_t>(const Bolt&)> ver;  // serial or nullopt
};

inline QlScheme mock_ql(uint64_t serial_bits) {
  QlScheme s;
  s.serial_bits = serial_bits;
  s.gen = [serial_bits](RngStream& rng) {
    Bolt b;
    b.tag = rng.below(ipow(2, serial_bits));
    return b;
  };
  s.ver = [](const Bolt& b) { return std::optional<uint64_t>(b.tag); };
  return s;
}

// bolts are random basis states |u>_b of the p=3 family; the serial is the
// basis index, verified by projecting onto the tagged vector
inline QlScheme toy_quantum_ql() {
  gf::Field f3 = gf::Field::make(3, 1);
  QlScheme s;
  s.serial_bits = 2;  // serials 0..2 inside two bits
  s.gen = [f3](RngStream& rng) {
    Bolt b;
    b.basis_tag = rng.below(3);
    b.label_tag = rng.below(3);
    qsim::StateVec st;
    st.dims = {3};
    st.amps = mub::mub_vector(f3, f3.from_index(*b.basis_tag), f3.from_index(*b.label_tag));
    b.payload = std::move(st);
    b.tag = *b.basis_tag;
    return b;
  };
  s.ver = [f3](const Bolt& b) -> std::optional<uint64_t> {
    if (!b.payload || !b.basis_tag || !b.label_tag) return std::nullopt;
    qsim::CVec ket = mub::mub_vector(f3, f3.from_index(*b.basis_tag), f3.from_index(*b.label_tag));
    double overlap = std::norm(qsim::inner(ket, b.payload->amps));
    if (overlap < 1 - 1e-9) return std::nullopt;
    return *b.basis_tag;
  };
  return s;
}

// ---------------------------------------------------------------------------
// t-wise independent hashing by degree-(t-1) polynomial evaluation over
// F_{2^m}, truncated to the type length.

class PolyHash {
 public:
  PolyHash(uint64_t in_bits, uint64_t out_bits, uint64_t degree_plus_one, RngStream& rng)
      : field_(gf::Field::binary(in_bits)), out_bits_(out_bits) {
    for (uint64_t i = 0; i < degree_plus_one; ++i) coeffs_.push_back(rng.below(field_.order()));
  }

  uint64_t operator()(uint64_t s) const {
    gf::FieldElem x = field_.from_index(s);
    gf::FieldElem acc = field_.zero();
    for (size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + field_.from_index(coeffs_[i]);
    return acc.index() & (ipow(2, out_bits_) - 1);
  }

 private:
  gf::Field field_;
  uint64_t out_bits_;
  std::vector<uint64_t> coeffs_;
};

// ---------------------------------------------------------------------------
// Typing wrapper.

struct TqlScheme {
  QlScheme ql;
  std::function<uint64_t(uint64_t)> hash;  // serial -> type
  uint64_t type_bits = 2;
  uint64_t retry_cap = 0;  // n * p(n)

  struct GenResult {
    Bolt bolt;
    uint64_t retries = 0;  // generations consumed (>= 1)
  };

  GenResult gen(uint64_t type, RngStream& rng) const {
    for (uint64_t t = 1; t <= retry_cap; ++t) {
      Bolt b = ql.gen(rng);
      auto s = ql.ver(b);
      if (s && hash(*s) == type) return {std::move(b), t};
    }
    fail(Err::RetryExhausted, "typed generation ran out of retries");
  }

  struct VerResult {
    std::optional<uint64_t> type, serial;
  };

  VerResult ver(const Bolt& b) const {
    VerResult r;
    auto s = ql.ver(b);
    if (!s) return r;
    r.serial = s;
    r.type = hash(*s);
    return r;
  }
};

// n_param plays the security-parameter role: the retry cap is
// n_param * 2^{type_bits} and the hash family is (cap)-wise independent
inline TqlScheme tql_from_ql(QlScheme ql, uint64_t type_bits, uint64_t n_param, RngStream& setup_rng) {
  if (type_bits > 16) fail(Err::BadParams, "types are meant to be logarithmic");
  TqlScheme t;
  t.type_bits = type_bits;
  t.retry_cap = n_param * ipow(2, type_bits);
  auto h = std::make_shared<PolyHash>(ql.serial_bits, type_bits, t.retry_cap, setup_rng);
  t.ql = std::move(ql);
  t.hash = [h](uint64_t s) { return (*h)(s); };
  return t;
}

// ---------------------------------------------------------------------------
// Collision finder: the uniqueness adversary against low serial entropy.

struct CollisionResult {
  bool found = false;
  uint64_t pairs_used = 0;
  uint64_t serial = 0;
};

inline CollisionResult collision_finder(const std::function<std::optional<uint64_t>(RngStream&)>& draw_serial,
                                        uint64_t budget, RngStream& rng) {
  if (budget < 1) fail(Err::BadParams, "collision finder wants a positive budget");
  CollisionResult r;
  for (uint64_t t = 1; t <= budget; ++t) {
    auto s1 = draw_serial(rng);
    auto s2 = draw_serial(rng);
    if (s1 && s2 && *s1 == *s2) {
      r.found = true;
      r.pairs_used = t;
      r.serial = *s1;
      return r;
    }
  }
  fail(Err::Exhausted, "no collision within the pair budget");
}

// ---------------------------------------------------------------------------
// The one-message protocol: generate a typed bolt for the input, teleport the
// quantum payload, announce (type, serial) plus the bolt's classical tags.

struct TqlTranscript {
  uint64_t a = 0;
  bool accepted = false;
  std::optional<uint64_t> c;
  uint64_t gen_retries = 0;
  std::vector<std::pair<uint64_t, uint64_t>> corrections;
};

// `tamper` applies an extra clock operator to the teleported payload, which a
// faithful verifier must catch
inline TqlTranscript wotro_from_tql_run(const TqlScheme& tql, uint64_t a, RngStream& rng, bool tamper = false) {
  TqlTranscript t;
  t.a = a;
  auto gr = tql.gen(a, rng);
  t.gen_retries = gr.retries;
  auto pv = tql.ver(gr.bolt);
  if (!pv.serial || !pv.type || *pv.type != a) return t;

  Bolt received = gr.bolt;
  if (gr.bolt.payload) {
    uint64_t p = gr.bolt.payload->dims[0];
    uint64_t count = gr.bolt.payload->dims.size();
    auto res = qsim::teleport(*gr.bolt.payload, qsim::epr_state(p, count), rng);
    t.corrections = res.corrections;
    received.payload = std::move(res.out);
    if (tamper) qsim::apply_op(*received.payload, qsim::clock_op(p), {0});
  }
  auto vv = tql.ver(received);
  if (!vv.serial || !vv.type || *vv.type != a || *vv.serial != *pv.serial) return t;
  t.accepted = true;
  t.c = *vv.serial;
  return t;
}

}  // namespace wotrolab::tql
