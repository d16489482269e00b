#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "wotrolab/chernoff.hpp"
#include "wotrolab/wotro.hpp"

// Three-message public-coin proofs and their one-message form where the
// challenge comes from a WOTRO execution instead of the verifier.  The family
// of empty-language protocols with bad-challenge table f is what connects
// soundness breaks to the target-hitting attack.
namespace wotrolab::fs {

using wotro::QuantumWotro;

struct SigmaProtocol {
  uint64_t q = 2;            // conversation alphabet size
  uint64_t commit_sym = 1;   // commitment length in symbols
  uint64_t challenge_sym = 1;
  // honest prover halves; absent for adversarial-only protocols
  std::function<uint64_t(uint64_t x, uint64_t w, RngStream&)> commit;
  std::function<uint64_t(uint64_t a, uint64_t x, uint64_t w, uint64_t c)> respond;
  std::function<bool(uint64_t x, uint64_t a, uint64_t c, uint64_t z)> verify;
  // special-soundness witness extractor, where defined
  std::function<uint64_t(uint64_t a, uint64_t c, uint64_t z, uint64_t c2, uint64_t z2)> extract;

  uint64_t commits() const { return ipow(q, commit_sym); }
  uint64_t challenges() const { return ipow(q, challenge_sym); }
};

// Toy relation with planted witnesses (w = x): the response masks the witness
// with a public mixing function, so two accepting conversations at different
// challenges recover it.
inline SigmaProtocol toy_sigma(uint64_t commit_bits, uint64_t challenge_bits) {
  SigmaProtocol s;
  s.q = 2;
  s.commit_sym = commit_bits;
  s.challenge_sym = challenge_bits;
  auto mix = [](uint64_t a, uint64_t c) { return (a * 0x9e3779b9u) ^ (c * 0x85ebca6bu); };
  s.commit = [commit_bits](uint64_t, uint64_t, RngStream& rng) { return rng.below(ipow(2, commit_bits)); };
  s.respond = [mix](uint64_t a, uint64_t, uint64_t w, uint64_t c) { return w ^ mix(a, c); };
  s.verify = [mix](uint64_t x, uint64_t a, uint64_t c, uint64_t z) { return (z ^ mix(a, c)) == x; };
  s.extract = [mix](uint64_t a, uint64_t c, uint64_t z, uint64_t, uint64_t) { return z ^ mix(a, c); };
  return s;
}

// The empty-language family: commitments are free, the verifier draws a
// uniform challenge and accepts only c = f(a).  Special soundness holds
// vacuously (one good challenge per commitment).
inline SigmaProtocol sigma_f(const std::vector<uint64_t>& f, uint64_t q, uint64_t commit_sym,
                             uint64_t challenge_sym) {
  if (f.size() != ipow(q, commit_sym)) fail(Err::BadParams, "bad-challenge table must cover every commitment");
  SigmaProtocol s;
  s.q = q;
  s.commit_sym = commit_sym;
  s.challenge_sym = challenge_sym;
  s.verify = [f](uint64_t, uint64_t a, uint64_t c, uint64_t) { return c == f[a]; };
  return s;
}

// ---------------------------------------------------------------------------
// Composition: run the WOTRO protocol to produce the challenge.

struct FsTranscript {
  uint64_t a = 0;
  std::optional<uint64_t> c;
  uint64_t w_aux = 0;
  uint64_t z = 0;
  bool wotro_accepted = false;
  bool accepted = false;
};

inline void check_compatible(const SigmaProtocol& sigma, const QuantumWotro& proto) {
  if (sigma.q != proto.q) fail(Err::AlphabetMismatch, "conversation alphabets differ");
  if (sigma.commit_sym != proto.n_sym || sigma.challenge_sym != proto.m_sym)
    fail(Err::LengthMismatch, "commitment/challenge lengths differ");
}

// honest non-interactive run on instance x with witness w
inline FsTranscript fs_run(const SigmaProtocol& sigma, const QuantumWotro& proto, uint64_t x, uint64_t w,
                           RngStream& rng) {
  check_compatible(sigma, proto);
  if (!sigma.commit || !sigma.respond) fail(Err::BadParams, "sigma protocol has no honest prover");
  FsTranscript t;
  t.a = sigma.commit(x, w, rng);
  wotro::Transcript wt = wotro::honest_run(proto, t.a, rng);
  t.wotro_accepted = wt.accepted;
  t.w_aux = wt.w;
  if (!wt.accepted) return t;
  t.c = wt.c;
  t.z = sigma.respond(t.a, x, w, *t.c);
  t.accepted = sigma.verify(x, t.a, *t.c, t.z);
  return t;
}

// soundness attack: drive the composed protocol with the target-hitting
// measurement for the bad-challenge table f
struct FsAttackReport {
  uint64_t trials = 0;
  uint64_t breaks = 0;
  double break_rate = 0;
  WilsonInterval ci;
  bool attack_family_valid = true;  // f in F*; invalid families run flagged
  double exact_success = 0;         // chernoff attack_success for cross-checking
};

inline FsAttackReport fs_attack(const std::vector<uint64_t>& f, const QuantumWotro& proto, uint64_t trials,
                                RngStream& rng) {
  SigmaProtocol sf = sigma_f(f, proto.q, proto.n_sym, proto.m_sym);
  check_compatible(sf, proto);
  chernoff::AttackPovm atk = chernoff::build_attack(proto, f);
  FsAttackReport rep;
  rep.trials = trials;
  rep.attack_family_valid = atk.valid;
  rep.exact_success = chernoff::attack_success(proto, atk);
  for (uint64_t t = 0; t < trials; ++t) {
    qsim::StateVec joint = proto.crqs;
    auto sample = chernoff::sample_attack(proto, atk, joint, rng);
    const auto& out = sample.outcome;
    if (!out.y) continue;
    bool wotro_ok = wotro::verifier_accepts(proto, joint, out.a, out.y, out.w, rng);
    if (wotro_ok && sf.verify(0, out.a, *out.y, 0)) rep.breaks++;
  }
  rep.break_rate = trials ? double(rep.breaks) / double(trials) : 0;
  rep.ci = wilson_interval(rep.breaks, trials);
  return rep;
}

// ---------------------------------------------------------------------------
// Joint simulation of (prover attack, empty-language verifier) from the
// stateless simulator: both sides answer from one lazily-built table f_A.

struct JointSimState {
  std::set<uint64_t> used;
  std::map<uint64_t, uint64_t> f_table;
};

class JointSimulator {
 public:
  explicit JointSimulator(const QuantumWotro& proto) : proto_(&proto) {}

  const JointSimState& state() const { return state_; }

  struct ProverAnswer {
    uint64_t a = 0, c = 0, w = 0;
    qsim::StateVec joint;  // the execution's CRQS, P register measured
    bool failed = false;   // simulator produced a commitment already in use
  };

  // S_P: invoke the stateless simulator on a fresh CRQS and record f_A(a) = c
  ProverAnswer prover_query(RngStream& rng) {
    ProverAnswer ans;
    ans.joint = proto_->crqs;
    auto out = chernoff::simulator_step(*proto_, ans.joint, rng);
    ans.a = out.a;
    ans.c = *out.y;
    ans.w = out.w;
    if (state_.used.count(out.a)) {
      ans.failed = true;
      return ans;
    }
    state_.used.insert(out.a);
    state_.f_table[out.a] = ans.c;
    return ans;
  }

  // S_V: run the one-message verifier on register V of the execution the
  // message came from, then check the challenge against f_A, extending the
  // table on fresh commitments with a uniform value
  bool verifier_query(uint64_t a, uint64_t c, uint64_t w, qsim::StateVec& joint, RngStream& rng) {
    bool fs_ok = wotro::verifier_accepts(*proto_, joint, a, c, w, rng);
    auto it = state_.f_table.find(a);
    if (it == state_.f_table.end()) {
      it = state_.f_table.emplace(a, rng.below(proto_->outputs())).first;
      state_.used.insert(a);
    }
    return fs_ok && c == it->second;
  }

 private:
  const QuantumWotro* proto_;
  JointSimState state_;
};

struct ConsistencyReport {
  uint64_t runs = 0;
  uint64_t failed_runs = 0;    // a repeat surfaced
  double failure_rate = 0;
  double failure_bound = 0;    // q^2 2^{-n}
  bool all_consistent = true;  // every answer matched one global table
};

// q interleaved prover/verifier queries per run; consistency means the
// verifier accepts exactly the recorded (a, c) pairs and rejects alternates
inline ConsistencyReport joint_sim_consistency_audit(const QuantumWotro& proto, uint64_t queries, uint64_t runs,
                                                     RngStream& rng) {
  ConsistencyReport rep;
  rep.runs = runs;
  rep.failure_bound = double(queries) * double(queries) / double(proto.inputs());
  for (uint64_t r = 0; r < runs; ++r) {
    JointSimulator sim(proto);
    bool failed = false;
    for (uint64_t qi = 0; qi < queries && !failed; ++qi) {
      auto ans = sim.prover_query(rng);
      if (ans.failed) {
        failed = true;
        break;
      }
      // the recorded pair must verify, a perturbed challenge must not
      qsim::StateVec replay = ans.joint;
      if (!sim.verifier_query(ans.a, ans.c, ans.w, ans.joint, rng)) rep.all_consistent = false;
      if (sim.verifier_query(ans.a, (ans.c + 1) % proto.outputs(), ans.w, replay, rng))
        rep.all_consistent = false;
      // a later lookup of the same commitment must return the recorded value
      if (sim.state().f_table.at(ans.a) != ans.c) rep.all_consistent = false;
    }
    if (failed) rep.failed_runs++;
  }
  rep.failure_rate = runs ? double(rep.failed_runs) / double(runs) : 0;
  return rep;
}

}  // namespace wotrolab::fs
