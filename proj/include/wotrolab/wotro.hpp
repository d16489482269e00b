#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wotrolab/gf.hpp"
#include "wotrolab/mub.hpp"
#include "wotrolab/qsim.hpp"

// One-message WOTRO protocols: a shared entangled state, a prover measurement
// per input a, a verifier check per announcement, and a challenge map.  The
// quantum instances here are projective: the prover measures an orthonormal
// basis B_a on register P and reveals the raw outcome as the auxiliary string
// w; the verifier projects register V onto the conjugate basis vector.  The
// conjugate is what EPR correlations actually single out -- projecting P onto
// |v> collapses V onto conj(|v>) -- so checking conj(B_a) col w is the
// "measure in the same basis" test that accepts an honest prover with
// certainty.
namespace wotrolab::wotro {

using qsim::CMat;
using qsim::cplx;
using qsim::CVec;
using qsim::StateVec;

struct Transcript {
  uint64_t a = 0;
  std::optional<uint64_t> y;  // announced output, nullopt = bottom
  uint64_t w = 0;             // auxiliary string (raw measurement outcome)
  bool accepted = false;
  std::optional<uint64_t> c;  // final challenge, set only on accept
};

class QuantumWotro {
 public:
  uint64_t q = 2;                // alphabet size
  uint64_t n_sym = 1, m_sym = 1; // input/output lengths in symbols
  StateVec crqs;                 // two registers [P, V]
  std::string name;

  uint64_t inputs() const { return ipow(q, n_sym); }
  uint64_t outputs() const { return ipow(q, m_sym); }
  uint64_t p_dim() const { return crqs.dims[0]; }
  uint64_t v_dim() const { return crqs.dims[1]; }

  // columns of basis(a) are the prover's measurement kets for input a
  std::function<CMat(uint64_t a)> basis;
  // challenge associated with prover outcome x on input a
  std::function<uint64_t(uint64_t a, uint64_t x)> output_of;

  const CMat& basis_cached(uint64_t a) const {
    auto it = basis_cache_.find(a);
    if (it == basis_cache_.end()) it = basis_cache_.emplace(a, basis(a)).first;
    return it->second;
  }

 private:
  mutable std::map<uint64_t, CMat> basis_cache_;
};

// ---------------------------------------------------------------------------
// The entangled protocol over F_{p^n}: CRQS of 3n p-level EPR pairs, prover
// measures theta_a on all three blocks, challenge c = x3 / (x1 + x2) with
// c = 0 when x1 + x2 = 0 (the verifier recomputes c by the same rule).

struct WfProtocol {
  QuantumWotro proto;
  gf::Field field;
};

inline WfProtocol build_wf_protocol(uint64_t p, size_t n) {
  gf::Field field = gf::Field::make(p, n);
  uint64_t d = field.order();         // p^n
  uint64_t big = d * d * d;           // p^{3n}
  qsim::check_matrix_dim(big);

  WfProtocol wf{QuantumWotro{}, field};
  QuantumWotro& w = wf.proto;
  w.q = p;
  w.n_sym = n;
  w.m_sym = n;
  w.name = "wf(p=" + std::to_string(p) + ",n=" + std::to_string(n) + ")";
  w.crqs = qsim::reshape(qsim::epr_state(p, 3 * n), {big, big});
  w.basis = [field](uint64_t a) {
    CMat b = mub::mub_basis(field, field.from_index(a));
    return qsim::kron(qsim::kron(b, b), b);
  };
  w.output_of = [field, d](uint64_t a, uint64_t x) {
    (void)a;
    gf::FieldElem x3 = field.from_index(x % d);
    gf::FieldElem x2 = field.from_index((x / d) % d);
    gf::FieldElem x1 = field.from_index(x / (d * d));
    gf::FieldElem s = x1 + x2;
    if (s.is_zero()) return uint64_t{0};
    return (x3 * s.inv()).index();
  };
  return wf;
}

// decode a prover outcome of the protocol above into (x1, x2, x3) indices
inline std::array<uint64_t, 3> wf_outcome_split(uint64_t d, uint64_t x) {
  return {x / (d * d), (x / d) % d, x % d};
}

// checks the verifier's conjugate-basis projector and the announced output;
// consumes the V register of `joint`
inline bool verifier_accepts(const QuantumWotro& proto, StateVec& joint, uint64_t a,
                             const std::optional<uint64_t>& y, uint64_t w, RngStream& rng) {
  if (!y || a >= proto.inputs() || w >= proto.v_dim()) return false;
  if (proto.output_of(a, w) != *y) return false;
  CVec ket = proto.basis_cached(a).col(w);
  for (auto& v : ket) v = std::conj(v);
  double p1 = qsim::born_probability(joint, qsim::outer(ket), {1});
  return rng.next_double() < p1;
}

inline Transcript honest_run(const QuantumWotro& proto, uint64_t a, RngStream& rng) {
  if (a >= proto.inputs()) fail(Err::BadParams, "input outside the protocol alphabet");
  StateVec joint = proto.crqs;
  uint64_t x = qsim::measure_basis(joint, proto.basis_cached(a), {0}, rng);
  Transcript t;
  t.a = a;
  t.w = x;
  t.y = proto.output_of(a, x);
  t.accepted = verifier_accepts(proto, joint, a, t.y, t.w, rng);
  if (t.accepted) t.c = *t.y;
  return t;
}

// ---------------------------------------------------------------------------
// Hashed wrapper: same transcripts, final challenge G(a, c') instead of c'.

inline QuantumWotro build_hashed_protocol(const QuantumWotro& base,
                                          std::function<uint64_t(uint64_t a, uint64_t c)> hash,
                                          uint64_t m_sym) {
  if (base.m_sym != base.n_sym) fail(Err::AlphabetMismatch, "hashed wrapper wants a base with m = n");
  QuantumWotro w = base;
  w.m_sym = m_sym;
  w.name = base.name + "+hash";
  auto base_out = base.output_of;
  w.output_of = [base_out, hash](uint64_t a, uint64_t x) { return hash(a, base_out(a, x)); };
  return w;
}

// ---------------------------------------------------------------------------
// Classical baselines sharing the transcript/audit surface.

class ClassicalBaseline {
 public:
  enum class Kind { TrivialTwoMessage, CrsDirect, CrsBlocks };

  static ClassicalBaseline trivial(uint64_t q, uint64_t n_sym, uint64_t m_sym) {
    return {Kind::TrivialTwoMessage, q, n_sym, m_sym, 0};
  }
  static ClassicalBaseline crs_direct(uint64_t q, uint64_t n_sym, uint64_t m_sym) {
    if (m_sym <= n_sym) fail(Err::BadParams, "direct CR$ baseline wants m > n");
    return {Kind::CrsDirect, q, n_sym, m_sym, 0};
  }
  static ClassicalBaseline crs_blocks(uint64_t q, uint64_t n_sym, uint64_t blocks) {
    ClassicalBaseline b{Kind::CrsBlocks, q, n_sym, n_sym, blocks};
    if (blocks == 0 || b.inputs() % blocks != 0) fail(Err::BadParams, "block count must divide the input count");
    return b;
  }

  Kind kind() const { return kind_; }
  uint64_t inputs() const { return ipow(q_, n_sym_); }
  uint64_t outputs() const { return ipow(q_, m_sym_); }
  uint64_t blocks() const { return blocks_; }

  Transcript honest_run(uint64_t a, RngStream& rng) const {
    Transcript t;
    t.a = a;
    t.accepted = true;
    switch (kind_) {
      case Kind::TrivialTwoMessage:
        t.c = rng.below(outputs());
        break;
      case Kind::CrsDirect:
        t.c = rng.below(outputs());  // the CR$ itself
        break;
      case Kind::CrsBlocks: {
        std::vector<uint64_t> crs(blocks_);
        for (auto& r : crs) r = rng.below(outputs());
        t.c = crs[a / (inputs() / blocks_)];
        break;
      }
    }
    t.y = t.c;
    return t;
  }

  // exact best-adversary hit probability against the given target
  double optimal_hit_probability(const std::vector<uint64_t>& target) const {
    switch (kind_) {
      case Kind::TrivialTwoMessage:
        return 1.0 / double(outputs());
      case Kind::CrsDirect: {
        std::vector<bool> image(outputs(), false);
        uint64_t count = 0;
        for (uint64_t a = 0; a < inputs(); ++a)
          if (!image[target[a]]) {
            image[target[a]] = true;
            count++;
          }
        return double(count) / double(outputs());
      }
      case Kind::CrsBlocks: {
        uint64_t per = inputs() / blocks_;
        double miss = 1;
        for (uint64_t b = 0; b < blocks_; ++b) {
          std::vector<bool> image(outputs(), false);
          uint64_t count = 0;
          for (uint64_t a = b * per; a < (b + 1) * per; ++a)
            if (!image[target[a]]) {
              image[target[a]] = true;
              count++;
            }
          miss *= 1 - double(count) / double(outputs());
        }
        return 1 - miss;
      }
    }
    return 0;
  }

  // the target the best adversary likes most: distinct challenge per input
  // inside each block (identity-like labeling)
  std::vector<uint64_t> optimal_target() const {
    std::vector<uint64_t> t(inputs());
    uint64_t per = kind_ == Kind::CrsBlocks ? inputs() / blocks_ : inputs();
    for (uint64_t a = 0; a < inputs(); ++a) t[a] = (a % per) % outputs();
    return t;
  }

  // one adversarial execution against the target; returns hit or not
  bool adversary_run(const std::vector<uint64_t>& target, RngStream& rng) const {
    switch (kind_) {
      case Kind::TrivialTwoMessage:
        return rng.below(outputs()) == target[0];
      case Kind::CrsDirect: {
        uint64_t r = rng.below(outputs());
        for (uint64_t a = 0; a < inputs(); ++a)
          if (target[a] == r) return true;
        return false;
      }
      case Kind::CrsBlocks: {
        uint64_t per = inputs() / blocks_;
        for (uint64_t b = 0; b < blocks_; ++b) {
          uint64_t r = rng.below(outputs());
          for (uint64_t a = b * per; a < (b + 1) * per; ++a)
            if (target[a] == r) return true;
        }
        return false;
      }
    }
    return false;
  }

 private:
  ClassicalBaseline(Kind kind, uint64_t q, uint64_t n_sym, uint64_t m_sym, uint64_t blocks)
      : kind_(kind), q_(q), n_sym_(n_sym), m_sym_(m_sym), blocks_(blocks) {}

  Kind kind_;
  uint64_t q_, n_sym_, m_sym_, blocks_;
};

// ---------------------------------------------------------------------------
// Audits.

struct CorrectnessReport {
  double accept_rate = 0;          // empirical over `trials`
  uint64_t trials = 0;
  double max_uniform_distance = 0; // max over inputs of SD(law(c|a), uniform), exact
  std::vector<double> law_first_input;  // exact Pi(c|a=0)
};

// Exact per-input challenge law of a projective protocol: outcome x has Born
// probability given by the honest measurement on the shared state, pushed
// through the challenge map.
inline std::vector<double> exact_output_law(const QuantumWotro& proto, uint64_t a) {
  const CMat& b = proto.basis_cached(a);
  uint64_t d = proto.p_dim(), vd = proto.v_dim();
  // coefficients of the joint state in basis b on register P
  std::vector<double> px(d, 0.0);
  CVec tmp(d);
  CMat bdag = b.adjoint();
  for (uint64_t col = 0; col < vd; ++col) {
    for (uint64_t row = 0; row < d; ++row) tmp[row] = proto.crqs.amps[row * vd + col];
    CVec coef = bdag.apply(tmp);
    for (uint64_t x = 0; x < d; ++x) px[x] += std::norm(coef[x]);
  }
  std::vector<double> law(proto.outputs(), 0.0);
  for (uint64_t x = 0; x < d; ++x) law[proto.output_of(a, x)] += px[x];
  return law;
}

inline CorrectnessReport correctness_audit(const QuantumWotro& proto, uint64_t trials, RngStream& rng) {
  CorrectnessReport rep;
  rep.trials = trials;
  uint64_t accepted = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    uint64_t a = rng.below(proto.inputs());
    if (honest_run(proto, a, rng).accepted) accepted++;
  }
  rep.accept_rate = trials ? double(accepted) / double(trials) : 0;
  double uniform = 1.0 / double(proto.outputs());
  for (uint64_t a = 0; a < proto.inputs(); ++a) {
    auto law = exact_output_law(proto, a);
    double sd = 0;
    for (double v : law) sd += std::abs(v - uniform);
    rep.max_uniform_distance = std::max(rep.max_uniform_distance, sd / 2);
    if (a == 0) rep.law_first_input = law;
  }
  return rep;
}

inline CorrectnessReport correctness_audit(const ClassicalBaseline& proto, uint64_t trials, RngStream& rng) {
  CorrectnessReport rep;
  rep.trials = trials;
  uint64_t accepted = 0;
  for (uint64_t t = 0; t < trials; ++t)
    if (proto.honest_run(rng.below(proto.inputs()), rng).accepted) accepted++;
  rep.accept_rate = trials ? double(accepted) / double(trials) : 0;
  rep.max_uniform_distance = 0;  // every baseline's c is exactly uniform per input
  rep.law_first_input.assign(proto.outputs(), 1.0 / double(proto.outputs()));
  return rep;
}

struct AvoidanceReport {
  std::string target_description;
  uint64_t hit_count = 0;
  uint64_t trials = 0;
  double hit_prob = 0;
  WilsonInterval ci;
};

// A cheating strategy measures register P of `joint` however it likes and
// announces (a, y, w); the audit then runs the verifier on register V.
struct AdvOutcome {
  uint64_t a = 0;
  std::optional<uint64_t> y;
  uint64_t w = 0;
};
using Adversary = std::function<AdvOutcome(const QuantumWotro&, StateVec& joint, RngStream&)>;

inline Adversary honest_adversary() {
  return [](const QuantumWotro& proto, StateVec& joint, RngStream& rng) {
    AdvOutcome out;
    out.a = rng.below(proto.inputs());
    out.w = qsim::measure_basis(joint, proto.basis_cached(out.a), {0}, rng);
    out.y = proto.output_of(out.a, out.w);
    return out;
  };
}

// a fully general cheating measurement: one PSD operator per announcement,
// completed with I - sum; validated before any run
struct LabeledPovmElement {
  uint64_t a = 0, y = 0, w = 0;
  qsim::CMat op;
};

inline Adversary povm_adversary(std::vector<LabeledPovmElement> elements) {
  if (elements.empty()) fail(Err::BadParams, "empty adversary POVM");
  size_t d = elements.front().op.rows();
  CMat sum(d, d);
  std::vector<CMat> family;
  for (auto& el : elements) {
    sum += el.op;
    family.push_back(el.op);
  }
  CMat bottom = CMat::identity(d) - sum;
  family.push_back(bottom);
  auto rep = qsim::povm_validate(family);
  if (!rep.is_povm) fail(Err::BadParams, "adversary operators do not complete to a POVM");
  auto shared = std::make_shared<qsim::Povm>(std::move(family));
  auto labels = std::make_shared<std::vector<LabeledPovmElement>>(std::move(elements));
  return [shared, labels](const QuantumWotro&, StateVec& joint, RngStream& rng) {
    size_t pick = qsim::measure_povm(joint, *shared, {0}, rng);
    AdvOutcome out;
    if (pick < labels->size()) {
      out.a = (*labels)[pick].a;
      out.y = (*labels)[pick].y;
      out.w = (*labels)[pick].w;
    }
    return out;  // bottom leaves y unset
  };
}

inline AvoidanceReport avoidance_audit(const QuantumWotro& proto, const Adversary& adversary,
                                       const std::vector<uint64_t>& target, uint64_t trials, RngStream& rng) {
  AvoidanceReport rep;
  rep.trials = trials;
  for (uint64_t t = 0; t < trials; ++t) {
    StateVec joint = proto.crqs;
    AdvOutcome out = adversary(proto, joint, rng);
    bool accepted = verifier_accepts(proto, joint, out.a, out.y, out.w, rng);
    if (accepted && out.y && *out.y == target[out.a]) rep.hit_count++;
  }
  rep.hit_prob = trials ? double(rep.hit_count) / double(trials) : 0;
  rep.ci = wilson_interval(rep.hit_count, trials);
  return rep;
}

inline AvoidanceReport avoidance_audit(const ClassicalBaseline& proto, const std::vector<uint64_t>& target,
                                       uint64_t trials, RngStream& rng) {
  AvoidanceReport rep;
  rep.trials = trials;
  for (uint64_t t = 0; t < trials; ++t)
    if (proto.adversary_run(target, rng)) rep.hit_count++;
  rep.hit_prob = trials ? double(rep.hit_count) / double(trials) : 0;
  rep.ci = wilson_interval(rep.hit_count, trials);
  return rep;
}

// uniformly random target function over the protocol's alphabet
inline std::vector<uint64_t> random_target(uint64_t inputs, uint64_t outputs, RngStream& rng) {
  std::vector<uint64_t> t(inputs);
  for (auto& v : t) v = rng.below(outputs);
  return t;
}

}  // namespace wotrolab::wotro
