#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "wotrolab/gf.hpp"
#include "wotrolab/qsim.hpp"
#include "wotrolab/wotro.hpp"

// The operator-Chernoff cheating family and its efficient simulator.  A
// target function f turns the honest prover's measurement into the rescaled
// family P^f_{a,w} = N^a_{f(a),w} / ((1+eta) q^{n-m}); the audits here verify
// the exact f-averaged identities by enumerating every target function, which
// is what replaces the concentration step at this scale (eta > 1/2 for every
// instance small enough to enumerate, so the tail bounds are recorded as
// informational only).
namespace wotrolab::chernoff {

using qsim::CMat;
using qsim::cplx;
using qsim::CVec;
using qsim::StateVec;
using wotro::QuantumWotro;

struct EtaResult {
  double eta = 0;
  bool vacuous = false;  // eta > 1/2 puts the matrix concentration bound out of range
};

inline EtaResult eta(uint64_t n, uint64_t m, uint64_t k, uint64_t q = 2) {
  if (n < m || m < 1 || k < 1) fail(Err::BadParams, "eta wants n >= m >= 1 and k >= 1");
  EtaResult r;
  r.eta = std::sqrt(2 * std::log(2.0) * double(n + k) * std::pow(double(q), double(m) - double(n)));
  r.vacuous = r.eta > 0.5;
  return r;
}

inline uint64_t log_alphabet(uint64_t dim, uint64_t q) {
  uint64_t k = 0, t = 1;
  while (t < dim) {
    t *= q;
    k++;
  }
  if (t != dim) fail(Err::BadParams, "register dimension is not a power of the alphabet size");
  return k;
}

inline EtaResult eta_for(const QuantumWotro& proto) {
  return eta(proto.n_sym, proto.m_sym, log_alphabet(proto.p_dim(), proto.q), proto.q);
}

// ---------------------------------------------------------------------------
// Binary toy protocol: n-bit inputs select one of the 2^k tensor-product
// computational/Hadamard bases on k qubits (input a uses bit pattern
// a mod 2^k), the output is the low m bits of the k-bit outcome, and the CRQS
// is k EPR pairs.  `degenerate` pins every input to the same basis, which
// makes the non-POVM regime reachable for m >= 2.

inline QuantumWotro build_binary_toy(uint64_t n_bits, uint64_t m_bits, uint64_t k_qubits,
                                     bool degenerate = false) {
  if (m_bits > k_qubits) fail(Err::BadParams, "toy protocol wants m <= k");
  QuantumWotro w;
  w.q = 2;
  w.n_sym = n_bits;
  w.m_sym = m_bits;
  uint64_t d = ipow(2, k_qubits);
  w.crqs = qsim::reshape(qsim::epr_state(2, k_qubits), {d, d});
  w.name = "toy(n=" + std::to_string(n_bits) + ",m=" + std::to_string(m_bits) + ",k=" + std::to_string(k_qubits) +
           (degenerate ? ",degenerate" : "") + ")";
  w.basis = [k_qubits, degenerate](uint64_t a) {
    CMat h(2, 2), id = CMat::identity(2);
    double r = 1 / std::sqrt(2.0);
    h(0, 0) = h(0, 1) = h(1, 0) = r;
    h(1, 1) = -r;
    uint64_t pattern = degenerate ? 0 : (a & (ipow(2, k_qubits) - 1));
    CMat b(1, 1);
    b(0, 0) = 1;
    for (uint64_t j = 0; j < k_qubits; ++j) b = qsim::kron(b, (pattern >> j) & 1 ? h : id);
    return b;
  };
  w.output_of = [m_bits](uint64_t, uint64_t x) { return x & (ipow(2, m_bits) - 1); };
  return w;
}

// ---------------------------------------------------------------------------
// Attack construction.

struct AttackPovm {
  std::vector<uint64_t> f;  // target table, one output per input
  double eta = 0;
  bool eta_vacuous = false;
  bool valid = false;  // membership in F*: sum of attack operators <= I
  double sum_max_eig = 0;
  double sum_min_eig = 0;
  struct El {
    uint64_t a, w;
    CMat op;
  };
  std::vector<El> ops;  // the nonzero P^f_{a,w}
  CMat bottom;          // I - sum, clipped to its PSD part when f is invalid
  bool bottom_clipped = false;
};

inline AttackPovm build_attack(const QuantumWotro& proto, const std::vector<uint64_t>& f) {
  if (f.size() != proto.inputs()) fail(Err::BadParams, "target table must cover every input");
  uint64_t d = proto.p_dim();
  // one dense d x d operator per matching (a, w)
  if (d > 512) fail(Err::TooLarge, "attack construction wants a small prover register");
  AttackPovm atk;
  atk.f = f;
  EtaResult e = eta_for(proto);
  atk.eta = e.eta;
  atk.eta_vacuous = e.vacuous;
  double denom = (1 + atk.eta) * std::pow(double(proto.q), double(proto.n_sym) - double(proto.m_sym));

  CMat sum(d, d);
  for (uint64_t a = 0; a < proto.inputs(); ++a) {
    const CMat& b = proto.basis_cached(a);
    for (uint64_t w = 0; w < d; ++w) {
      if (proto.output_of(a, w) != f[a]) continue;
      CVec ket = b.col(w);
      CMat op(d, d);
      op.add_outer(ket, 1.0 / denom);
      sum += op;
      atk.ops.push_back({a, w, std::move(op)});
    }
  }
  qsim::EigResult es = qsim::herm_eig(sum);
  atk.sum_min_eig = es.values.front();
  atk.sum_max_eig = es.values.back();
  atk.valid = atk.sum_max_eig <= 1 + 1e-9;
  atk.bottom = CMat::identity(d) - sum;
  if (!atk.valid) {
    // keep the error outcome positive even though the family is non-physical
    std::vector<double> clipped(es.values.size());
    for (size_t i = 0; i < clipped.size(); ++i) clipped[i] = std::max(0.0, 1 - es.values[i]);
    atk.bottom = qsim::spectral_map(es, clipped);
    atk.bottom_clipped = true;
  }
  return atk;
}

// exact acceptance of one announcement: tr((P (x) V1^{a,y,w}) Psi)
inline double exact_accept_term(const QuantumWotro& proto, const CMat& p_op, uint64_t a, uint64_t y,
                                uint64_t w) {
  if (proto.output_of(a, w) != y) return 0;
  CVec ket = proto.basis_cached(a).col(w);
  for (auto& v : ket) v = std::conj(v);
  StateVec moved = proto.crqs;
  qsim::apply_op(moved, p_op, {0});
  qsim::apply_op(moved, qsim::outer(ket), {1});
  return std::real(qsim::inner(proto.crqs.amps, moved.amps));
}

// Pr[Y = f(A) and the verifier accepts], computed exactly by dense algebra
inline double attack_success(const QuantumWotro& proto, const AttackPovm& atk) {
  double total = 0;
  for (const auto& el : atk.ops) total += exact_accept_term(proto, el.op, el.a, atk.f[el.a], el.w);
  return total;
}

// honest acceptance mass delta = 1/|inputs| sum_a sum_y Pi(y|a)
inline double honest_delta(const QuantumWotro& proto) {
  double total = 0;
  uint64_t d = proto.p_dim();
  for (uint64_t a = 0; a < proto.inputs(); ++a) {
    const CMat& b = proto.basis_cached(a);
    for (uint64_t w = 0; w < d; ++w) {
      CVec ket = b.col(w);
      CMat op(d, d);
      op.add_outer(ket);
      total += exact_accept_term(proto, op, a, proto.output_of(a, w), w);
    }
  }
  return total / double(proto.inputs());
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration over every target function.

struct BracketCheck {
  double t = 0;
  double outside_fraction = 0;  // fraction of f with sum P^f outside the eta-bracket
  double bound = 0;             // 2^{-n t^2}
  bool informational = false;   // recorded but meaningless when eta is vacuous
};

struct EnumerationReport {
  uint64_t total_f = 0;
  double fraction_valid = 0;
  double exact_mean_success = 0;
  double delta = 0;
  double eta = 0;
  bool eta_vacuous = false;
  double predicted = 0;          // delta / (1 + eta)
  double identity_residual = 0;  // |mean - predicted|
  double ef_x_residual = 0;      // max_a || E_f[X^f_a] - I/q^m ||_max
  std::vector<BracketCheck> brackets;
};

inline std::vector<uint64_t> decode_f(uint64_t fidx, uint64_t inputs, uint64_t outputs) {
  std::vector<uint64_t> f(inputs);
  for (uint64_t a = 0; a < inputs; ++a, fidx /= outputs) f[a] = fidx % outputs;
  return f;
}

inline EnumerationReport enumerate_f_audit(const QuantumWotro& proto, uint64_t limit = (1u << 17)) {
  EnumerationReport rep;
  uint64_t inputs = proto.inputs(), outputs = proto.outputs(), d = proto.p_dim();
  double lf = double(inputs) * std::log2(double(outputs));
  if (lf > 40 || ipow(outputs, inputs) > limit) fail(Err::TooManyFunctions, "function family too large to enumerate");
  rep.total_f = ipow(outputs, inputs);
  EtaResult e = eta_for(proto);
  rep.eta = e.eta;
  rep.eta_vacuous = e.vacuous;
  rep.delta = honest_delta(proto);
  rep.predicted = rep.delta / (1 + rep.eta);

  std::vector<double> tgrid = {1.25, 1.5, 2.0};
  if (!e.vacuous) {
    tgrid.clear();
    double tmax = 1 / (2 * e.eta);
    for (double t = 1.05; t <= tmax; t += (tmax - 1.05) / 3) tgrid.push_back(t);
  }
  std::vector<uint64_t> outside(tgrid.size(), 0);

  std::vector<CMat> ef_x(inputs, CMat(d, d));
  uint64_t valid = 0;
  double mean = 0;
  for (uint64_t fidx = 0; fidx < rep.total_f; ++fidx) {
    std::vector<uint64_t> f = decode_f(fidx, inputs, outputs);
    AttackPovm atk = build_attack(proto, f);
    if (atk.valid) valid++;
    mean += attack_success(proto, atk);
    double denom = (1 + rep.eta) * std::pow(double(proto.q), double(proto.n_sym) - double(proto.m_sym));
    for (const auto& el : atk.ops) ef_x[el.a] += denom * cplx(1.0 / double(rep.total_f)) * el.op;
    for (size_t ti = 0; ti < tgrid.size(); ++ti) {
      double lo = (1 - tgrid[ti] * rep.eta) / (1 + rep.eta);
      double hi = (1 + tgrid[ti] * rep.eta) / (1 + rep.eta);
      if (atk.sum_min_eig < lo - 1e-12 || atk.sum_max_eig > hi + 1e-12) outside[ti]++;
    }
  }
  mean /= double(rep.total_f);
  rep.exact_mean_success = mean;
  rep.fraction_valid = double(valid) / double(rep.total_f);
  rep.identity_residual = std::abs(mean - rep.predicted);
  for (uint64_t a = 0; a < inputs; ++a) {
    CMat diff = ef_x[a] - cplx(1.0 / double(outputs)) * CMat::identity(d);
    rep.ef_x_residual = std::max(rep.ef_x_residual, diff.max_abs());
  }
  for (size_t ti = 0; ti < tgrid.size(); ++ti)
    rep.brackets.push_back({tgrid[ti], double(outside[ti]) / double(rep.total_f),
                            std::pow(2.0, -double(proto.n_sym) * tgrid[ti] * tgrid[ti]), e.vacuous});
  return rep;
}

// ---------------------------------------------------------------------------
// Simulator and adversary strategies for the sampling audits.

// the stateless simulator: uniform a, honest measurement on register P
inline wotro::AdvOutcome simulator_step(const QuantumWotro& proto, StateVec& joint, RngStream& rng) {
  return wotro::honest_adversary()(proto, joint, rng);
}

// POVM sampling of the attack family; for invalid families the likelihoods
// are normalized and the run is only meaningful with its flag
struct AttackSample {
  wotro::AdvOutcome outcome;  // y = nullopt on the error branch
  bool non_physical = false;
};

inline AttackSample sample_attack([[maybe_unused]] const QuantumWotro& proto, const AttackPovm& atk,
                                  StateVec& joint, RngStream& rng) {
  AttackSample s;
  s.non_physical = !atk.valid;
  std::vector<double> like(atk.ops.size() + 1);
  double total = 0;
  for (size_t i = 0; i < atk.ops.size(); ++i) {
    like[i] = qsim::born_probability(joint, atk.ops[i].op, {0});
    total += like[i];
  }
  like.back() = qsim::born_probability(joint, atk.bottom, {0});
  total += like.back();
  double u = rng.next_double() * total;
  size_t pick = like.size() - 1;
  double acc = 0;
  for (size_t i = 0; i < like.size(); ++i) {
    acc += like[i];
    if (u < acc) {
      pick = i;
      break;
    }
  }
  if (pick + 1 == like.size()) {
    qsim::apply_op(joint, qsim::sqrt_psd(atk.bottom), {0});
    s.outcome.y = std::nullopt;
  } else {
    const auto& el = atk.ops[pick];
    qsim::apply_op(joint, qsim::sqrt_psd(el.op), {0});
    s.outcome.a = el.a;
    s.outcome.w = el.w;
    s.outcome.y = atk.f[el.a];
  }
  double nm = joint.norm();
  if (nm > 1e-15)
    for (auto& a : joint.amps) a /= nm;
  return s;
}

inline wotro::Adversary chernoff_adversary(AttackPovm atk) {
  return [atk](const QuantumWotro& proto, StateVec& joint, RngStream& rng) {
    return sample_attack(proto, atk, joint, rng).outcome;
  };
}

// ---------------------------------------------------------------------------
// Hybrid harness: fresh CRQS per query, classical labels, retained V halves.

struct DistinguisherCircuit {
  size_t queries = 1;
  // optional unitaries on the accumulated V registers, applied after each
  // query; entry j (0-based) follows query j+1
  std::vector<CMat> interleave;
  // binary decision from the label history, for the sampled mode
  std::function<int(const std::vector<wotro::AdvOutcome>&)> decide;
};

struct HybridReport {
  double eta = 0;
  std::vector<double> per_hybrid;  // distance between consecutive hybrids
  double total = 0;                // distance between all-attack and all-simulator
};

namespace detail {

// one query-output branch: classical label and an unnormalized V ket
struct Branch {
  std::vector<int64_t> labels;  // one per query; (a * p_dim + w) or -1 for bottom
  CVec ket;                     // over accumulated V registers
};

// density blocks keyed by label history
using Ensemble = std::map<std::vector<int64_t>, CMat>;

inline std::vector<Branch> extend_sim(const QuantumWotro& proto, const std::vector<Branch>& in) {
  uint64_t d = proto.p_dim();
  double scale = 1 / std::sqrt(double(proto.inputs()));
  std::vector<Branch> out;
  for (const auto& br : in) {
    for (uint64_t a = 0; a < proto.inputs(); ++a) {
      const CMat& b = proto.basis_cached(a);
      for (uint64_t w = 0; w < d; ++w) {
        CVec ket = b.col(w);
        StateVec collapsed = qsim::project_out(proto.crqs, {0}, ket);
        for (auto& v : collapsed.amps) v *= scale;
        Branch nb;
        nb.labels = br.labels;
        nb.labels.push_back(int64_t(a * d + w));
        nb.ket = qsim::kron(br.ket, collapsed.amps);
        out.push_back(std::move(nb));
      }
    }
  }
  return out;
}

inline std::vector<Branch> extend_attack(const QuantumWotro& proto, const AttackPovm& atk,
                                         const std::vector<Branch>& in) {
  uint64_t d = proto.p_dim();
  double denom = (1 + atk.eta) * std::pow(double(proto.q), double(proto.n_sym) - double(proto.m_sym));
  double scale = 1 / std::sqrt(denom);
  std::vector<Branch> out;
  qsim::EigResult bot = qsim::herm_eig(atk.bottom);
  for (const auto& br : in) {
    for (const auto& el : atk.ops) {
      CVec ket = proto.basis_cached(el.a).col(el.w);
      StateVec collapsed = qsim::project_out(proto.crqs, {0}, ket);
      for (auto& v : collapsed.amps) v *= scale;
      Branch nb;
      nb.labels = br.labels;
      nb.labels.push_back(int64_t(el.a * d + el.w));
      nb.ket = qsim::kron(br.ket, collapsed.amps);
      out.push_back(std::move(nb));
    }
    for (uint64_t i = 0; i < d; ++i) {
      if (bot.values[i] <= 1e-14) continue;
      CVec u = bot.vectors.col(i);
      StateVec collapsed = qsim::project_out(proto.crqs, {0}, u);
      double s = std::sqrt(bot.values[i]);
      for (auto& v : collapsed.amps) v *= s;
      Branch nb;
      nb.labels = br.labels;
      nb.labels.push_back(-1);
      nb.ket = qsim::kron(br.ket, collapsed.amps);
      out.push_back(std::move(nb));
    }
  }
  return out;
}

inline void accumulate(Ensemble& ens, const std::vector<Branch>& branches, double weight, uint64_t vdim_total) {
  for (const auto& br : branches) {
    auto it = ens.find(br.labels);
    if (it == ens.end()) it = ens.emplace(br.labels, CMat(vdim_total, vdim_total)).first;
    it->second.add_outer(br.ket, weight);
  }
}

inline double ensemble_distance(const Ensemble& x, const Ensemble& y) {
  double total = 0;
  auto keys = [&] {
    std::vector<std::vector<int64_t>> k;
    for (auto& [h, m] : x) k.push_back(h);
    for (auto& [h, m] : y)
      if (!x.count(h)) k.push_back(h);
    return k;
  }();
  for (auto& h : keys) {
    auto ix = x.find(h);
    auto iy = y.find(h);
    if (ix != x.end() && iy != y.end())
      total += qsim::trace_distance(ix->second, iy->second) * 2;  // un-halve: summed below
    else if (ix != x.end())
      total += std::real(ix->second.trace());
    else
      total += std::real(iy->second.trace());
  }
  return total / 2;
}

}  // namespace detail

// Exact hybrid ensembles: hybrid j answers the first j queries with the
// simulator and the rest with the f-averaged attack channel; all densities
// are computed exactly and the distances are trace norms of the label-block
// differences.
inline HybridReport hybrid_distance_exact(const QuantumWotro& proto, const DistinguisherCircuit& circuit,
                                          uint64_t limit = (1u << 17)) {
  size_t q = circuit.queries;
  uint64_t inputs = proto.inputs(), outputs = proto.outputs(), vd = proto.v_dim();
  uint64_t total_f = ipow(outputs, inputs);
  if (total_f > limit) fail(Err::TooManyFunctions, "function family too large to enumerate");
  uint64_t vdim_total = ipow(vd, q);
  qsim::check_matrix_dim(vdim_total);
  for (const auto& u : circuit.interleave)
    if ((u.adjoint() * u - CMat::identity(u.rows())).max_abs() > 1e-8)
      fail(Err::BadParams, "interleaving circuit element is not unitary");

  HybridReport rep;
  rep.eta = eta_for(proto).eta;

  auto apply_interleave = [&](std::vector<detail::Branch>& branches, size_t after_query) {
    if (after_query >= circuit.interleave.size()) return;
    const CMat& u = circuit.interleave[after_query];
    if (u.rows() == 0) return;
    for (auto& br : branches) {
      if (u.rows() != br.ket.size())
        fail(Err::DimensionMismatch, "interleaving unitary does not match the accumulated registers");
      br.ket = u.apply(br.ket);
    }
  };

  std::vector<detail::Ensemble> rho(q + 1);
  for (size_t j = 0; j <= q; ++j) {
    // first j queries to the simulator (f-independent), rest to the attack
    bool uses_attack = j < q;
    uint64_t f_count = uses_attack ? total_f : 1;
    for (uint64_t fidx = 0; fidx < f_count; ++fidx) {
      AttackPovm atk;
      if (uses_attack) atk = build_attack(proto, decode_f(fidx, inputs, outputs));
      std::vector<detail::Branch> branches(1);
      branches[0].ket = {1.0};
      for (size_t step = 0; step < q; ++step) {
        branches = (step < j) ? detail::extend_sim(proto, branches)
                              : detail::extend_attack(proto, atk, branches);
        apply_interleave(branches, step);
      }
      detail::accumulate(rho[j], branches, 1.0 / double(f_count), vdim_total);
    }
  }

  for (size_t j = 1; j <= q; ++j) rep.per_hybrid.push_back(detail::ensemble_distance(rho[j], rho[j - 1]));
  rep.total = detail::ensemble_distance(rho[q], rho[0]);
  return rep;
}

// Sampled distinguishing advantage of a binary-output circuit between the
// all-attack oracle (fresh uniform f each run) and the all-simulator oracle.
inline double sampled_advantage(const QuantumWotro& proto, const DistinguisherCircuit& circuit,
                                uint64_t trials, RngStream& rng) {
  if (!circuit.decide) fail(Err::BadParams, "sampled mode wants a decision function");
  uint64_t inputs = proto.inputs(), outputs = proto.outputs();
  uint64_t total_f = ipow(outputs, inputs);
  uint64_t hits_attack = 0, hits_sim = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    AttackPovm atk = build_attack(proto, decode_f(rng.below(total_f), inputs, outputs));
    std::vector<wotro::AdvOutcome> history;
    for (size_t s = 0; s < circuit.queries; ++s) {
      StateVec joint = proto.crqs;
      history.push_back(sample_attack(proto, atk, joint, rng).outcome);
    }
    if (circuit.decide(history)) hits_attack++;
    history.clear();
    for (size_t s = 0; s < circuit.queries; ++s) {
      StateVec joint = proto.crqs;
      history.push_back(simulator_step(proto, joint, rng));
    }
    if (circuit.decide(history)) hits_sim++;
  }
  return std::abs(double(hits_attack) - double(hits_sim)) / double(trials);
}

// ---------------------------------------------------------------------------
// Superposition attack against an a-independent hash: the uniform state over
// (x, h(x)-extended a) holds a collision superposition per measured a.

struct ShelterReport {
  StateVec state;                  // registers [A, X], both of dimension p^n
  double colliding_mass = 0;       // 1 - |psi*|^2 with the heaviest branch kept per a
  std::vector<double> per_a_mass;  // per-a collision mass after measuring A
  double state_norm = 0;
};

inline ShelterReport shelter_attack_state(const std::function<uint64_t(uint64_t)>& hash, const gf::Field& field,
                                          uint64_t m_sym) {
  uint64_t n = field.n();
  if (m_sym > n) fail(Err::BadParams, "hash output longer than the input");
  uint64_t dn = field.order();
  uint64_t dm = ipow(uint64_t(field.p()), m_sym);
  qsim::check_vector_len(dn * dn);

  ShelterReport rep;
  rep.state.dims = {dn, dn};
  rep.state.amps.assign(dn * dn, 0);
  double amp = std::pow(double(field.p()), -double(n) / 2) * std::pow(double(field.p()), (double(m_sym) - double(n)) / 2);
  for (uint64_t x = 0; x < dn; ++x) {
    uint64_t pre = hash(x) % dm;
    for (uint64_t free = 0; free < dn / dm; ++free) {
      uint64_t a = free * dm + pre;  // low symbols carry the hash value
      rep.state.amps[a * dn + x] = amp;
    }
  }
  rep.state_norm = rep.state.norm();

  rep.per_a_mass.assign(dn, 0);
  double best_total = 0;
  for (uint64_t a = 0; a < dn; ++a) {
    double mass = 0, best = 0;
    for (uint64_t x = 0; x < dn; ++x) {
      double m2 = std::norm(rep.state.amps[a * dn + x]);
      mass += m2;
      best = std::max(best, m2);
    }
    best_total += best;
    rep.per_a_mass[a] = mass > 0 ? 1 - best / mass : 0;
  }
  rep.colliding_mass = 1 - best_total;
  return rep;
}

// seeded affine hash family x -> first m symbols of (alpha x + beta)
struct AffineHashFamily {
  gf::Field field;
  uint64_t m_sym;

  uint64_t seed_count() const { return (field.order() - 1) * field.order(); }
  std::function<uint64_t(uint64_t)> at(uint64_t seed) const {
    uint64_t alpha_idx = 1 + seed % (field.order() - 1);
    uint64_t beta_idx = seed / (field.order() - 1);
    gf::Field f = field;
    uint64_t dm = ipow(uint64_t(f.p()), m_sym);
    return [f, alpha_idx, beta_idx, dm](uint64_t x) {
      gf::FieldElem v = f.from_index(alpha_idx) * f.from_index(x) + f.from_index(beta_idx);
      return v.index() % dm;
    };
  }
};

}  // namespace wotrolab::chernoff
