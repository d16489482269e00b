#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "json.hpp"
#include "wotrolab/bounds.hpp"
#include "wotrolab/chernoff.hpp"
#include "wotrolab/fs.hpp"
#include "wotrolab/gf.hpp"
#include "wotrolab/mub.hpp"
#include "wotrolab/nlbox.hpp"
#include "wotrolab/qsim.hpp"
#include "wotrolab/tql.hpp"
#include "wotrolab/wotro.hpp"

// Named, seeded, reproducible experiments over the library, with their
// pass/fail thresholds pinned here.  The CLI and the acceptance suite both
// dispatch through run().
namespace wotrolab::experiments {

using nlohmann::json;

struct Check {
  std::string name;
  bool pass = false;
  double value = 0;
  std::string detail;
};

struct Result {
  json metrics = json::object();
  std::vector<Check> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  void check(const std::string& name, bool pass, double value, const std::string& detail = "") {
    checks.push_back({name, pass, value, detail});
  }
};

namespace detail {

inline uint64_t get_u64(const json& p, const std::string& key, uint64_t defval) {
  return p.contains(key) ? p.at(key).get<uint64_t>() : defval;
}
inline double get_f64(const json& p, const std::string& key, double defval) {
  return p.contains(key) ? p.at(key).get<double>() : defval;
}

inline json field_json(const gf::Field& f) {
  return json{{"p", f.p()}, {"n", f.n()}, {"modulus", f.modulus()}};
}

}  // namespace detail

// debugging dumps of the dense quantum objects: {dims, re, im}, row-major
inline json state_json(const qsim::StateVec& s) {
  std::vector<double> re, im;
  re.reserve(s.amps.size());
  im.reserve(s.amps.size());
  for (auto& a : s.amps) {
    re.push_back(a.real());
    im.push_back(a.imag());
  }
  return json{{"dims", s.dims}, {"re", re}, {"im", im}};
}

inline json matrix_json(const qsim::CMat& m) {
  std::vector<double> re, im;
  re.reserve(m.rows() * m.cols());
  im.reserve(m.rows() * m.cols());
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return json{{"dims", {m.rows(), m.cols()}}, {"re", re}, {"im", im}};
}

// --------------------------------------------------------------------------
// one runner per experiment

inline Result run_field(const json& p) {
  uint64_t pp = detail::get_u64(p, "p", 3), nn = detail::get_u64(p, "n", 2);
  gf::Field f = gf::Field::make(pp, nn);
  Result r;
  r.metrics["field"] = detail::field_json(f);
  std::vector<uint64_t> trace_counts(pp, 0);
  bool mult_ok = true;
  for (auto& x : f.enumerate()) {
    trace_counts[size_t(x.trace())]++;
    if (!x.is_zero() && !(x.pow(f.order() - 1) == f.one())) mult_ok = false;
  }
  r.metrics["trace_counts"] = trace_counts;
  bool surj = true;
  for (auto c : trace_counts)
    if (c != ipow(pp, nn - 1)) surj = false;
  r.check("trace_surjective_balanced", surj, double(trace_counts[0]));
  r.check("multiplicative_order", mult_ok, double(f.order() - 1));
  return r;
}

inline Result run_mub_audit(const json& p) {
  uint64_t pp = detail::get_u64(p, "p", 3), nn = detail::get_u64(p, "n", 1);
  uint64_t npairs = detail::get_u64(p, "pairs", 0);  // 0 = all pairs
  RngStream rng(detail::get_u64(p, "seed", 1));
  gf::Field f = gf::Field::make(pp, nn);
  std::vector<std::pair<uint64_t, uint64_t>> pairs;
  if (npairs == 0) {
    for (uint64_t a = 0; a < f.order(); ++a)
      for (uint64_t b = a + 1; b < f.order(); ++b) pairs.emplace_back(a, b);
  } else {
    while (pairs.size() < npairs) {
      uint64_t a = rng.below(f.order()), b = rng.below(f.order());
      if (a != b) pairs.emplace_back(a, b);
    }
  }
  auto audit = mub::mub_overlap_audit(f, pairs);
  Result r;
  r.metrics["pairs_checked"] = audit.pairs_checked;
  r.metrics["overlaps_checked"] = audit.overlaps_checked;
  r.metrics["max_deviation"] = audit.max_deviation;
  r.check("unbiasedness_1e-9", audit.max_deviation <= 1e-9, audit.max_deviation);
  return r;
}

inline Result run_wf_run(const json& p) {
  uint64_t pp = detail::get_u64(p, "p", 3), nn = detail::get_u64(p, "n", 1);
  uint64_t trials = detail::get_u64(p, "trials", 1000);
  RngStream rng(detail::get_u64(p, "seed", 1));
  auto wf = wotro::build_wf_protocol(pp, nn);
  uint64_t accept = 0, zero_sum = 0;
  std::vector<uint64_t> hist(wf.proto.outputs(), 0);
  uint64_t d = wf.field.order();
  for (uint64_t t = 0; t < trials; ++t) {
    auto tr = wotro::honest_run(wf.proto, rng.below(wf.proto.inputs()), rng);
    if (tr.accepted) {
      accept++;
      hist[*tr.c]++;
    }
    auto [x1, x2, x3] = wotro::wf_outcome_split(d, tr.w);
    if ((wf.field.from_index(x1) + wf.field.from_index(x2)).is_zero()) zero_sum++;
  }
  Result r;
  r.metrics["accept_rate"] = double(accept) / double(trials);
  r.metrics["challenge_histogram"] = hist;
  r.metrics["zero_sum_rate"] = double(zero_sum) / double(trials);
  r.check("accept_rate_one", accept == trials, double(accept) / double(trials));
  r.check("zero_sum_3sigma", within_3sigma(zero_sum, trials, 1.0 / double(d)), double(zero_sum) / double(trials));
  return r;
}

inline Result run_wf_correctness(const json& p) {
  uint64_t pp = detail::get_u64(p, "p", 3), nn = detail::get_u64(p, "n", 1);
  uint64_t trials = detail::get_u64(p, "trials", 1000);
  RngStream rng(detail::get_u64(p, "seed", 1));
  auto wf = wotro::build_wf_protocol(pp, nn);
  auto rep = wotro::correctness_audit(wf.proto, trials, rng);
  Result r;
  r.metrics["accept_rate"] = rep.accept_rate;
  r.metrics["max_uniform_distance"] = rep.max_uniform_distance;
  r.metrics["law_first_input"] = rep.law_first_input;
  r.check("accept_rate_one", rep.accept_rate == 1.0, rep.accept_rate);
  if (pp == 3 && nn == 1) {
    bool law_ok = std::abs(rep.law_first_input[0] - 5.0 / 9) <= 1e-9 &&
                  std::abs(rep.law_first_input[1] - 2.0 / 9) <= 1e-9 &&
                  std::abs(rep.law_first_input[2] - 2.0 / 9) <= 1e-9;
    r.check("law_5_2_2_ninths", law_ok, rep.law_first_input[0]);
    r.check("distance_2_9", std::abs(rep.max_uniform_distance - 2.0 / 9) <= 1e-9, rep.max_uniform_distance);
  }
  return r;
}

inline Result run_baselines(const json& p) {
  uint64_t trials = detail::get_u64(p, "trials", 100000);
  RngStream rng(detail::get_u64(p, "seed", 1));
  Result r;

  auto trivial = wotro::ClassicalBaseline::trivial(3, 1, 1);
  auto target = wotro::random_target(3, 3, rng);
  auto rep = wotro::avoidance_audit(trivial, target, trials, rng);
  r.metrics["trivial_hit_prob"] = rep.hit_prob;
  r.metrics["trivial_analytic"] = trivial.optimal_hit_probability(target);
  r.check("trivial_3sigma", within_3sigma(rep.hit_count, rep.trials, 1.0 / 3), rep.hit_prob);

  for (uint64_t ell : {uint64_t(2), uint64_t(64)}) {
    auto blocks = wotro::ClassicalBaseline::crs_blocks(2, 6, ell);  // 64 binary inputs
    auto opt = blocks.optimal_target();
    double analytic = blocks.optimal_hit_probability(opt);
    double formula = 1 - std::pow(1 - 1.0 / double(ell), double(ell));
    auto brep = wotro::avoidance_audit(blocks, opt, trials, rng);
    std::string key = "blocks_" + std::to_string(ell);
    r.metrics[key + "_hit_prob"] = brep.hit_prob;
    r.metrics[key + "_analytic"] = analytic;
    r.check(key + "_formula_exact", std::abs(analytic - formula) <= 1e-12, analytic);
    r.check(key + "_3sigma", within_3sigma(brep.hit_count, brep.trials, analytic), brep.hit_prob);
  }
  return r;
}

inline Result run_chernoff_enum(const json& p) {
  uint64_t n = detail::get_u64(p, "n", 2), m = detail::get_u64(p, "m", 1), k = detail::get_u64(p, "k", 1);
  bool degenerate = detail::get_u64(p, "degenerate", 0) != 0;
  auto toy = chernoff::build_binary_toy(n, m, k, degenerate);
  auto rep = chernoff::enumerate_f_audit(toy);
  Result r;
  r.metrics["total_f"] = rep.total_f;
  r.metrics["fraction_valid"] = rep.fraction_valid;
  r.metrics["exact_mean_success"] = rep.exact_mean_success;
  r.metrics["delta"] = rep.delta;
  r.metrics["eta"] = rep.eta;
  r.metrics["eta_vacuous"] = rep.eta_vacuous;
  r.metrics["predicted"] = rep.predicted;
  r.metrics["identity_residual"] = rep.identity_residual;
  r.metrics["ef_x_residual"] = rep.ef_x_residual;
  json brackets = json::array();
  for (auto& b : rep.brackets)
    brackets.push_back({{"t", b.t},
                        {"outside_fraction", b.outside_fraction},
                        {"bound", b.bound},
                        {"informational", b.informational}});
  r.metrics["tail_brackets"] = brackets;
  r.check("mean_equals_delta_over_1_plus_eta", rep.identity_residual <= 1e-9, rep.identity_residual);
  r.check("ef_x_identity", rep.ef_x_residual <= 1e-9, rep.ef_x_residual);
  return r;
}

inline Result run_hybrid(const json& p) {
  Result r;
  double prev = 1e9;
  bool monotone = true, analytic_ok = true;
  json rows = json::array();
  for (auto [n, m, k] : {std::array<uint64_t, 3>{2, 1, 1}, {3, 1, 2}, {4, 1, 3}}) {
    auto toy = chernoff::build_binary_toy(n, m, k);
    chernoff::DistinguisherCircuit circ;
    circ.queries = detail::get_u64(p, "queries", 1);
    auto rep = chernoff::hybrid_distance_exact(toy, circ);
    double analytic = rep.eta / (1 + rep.eta);
    rows.push_back({{"n", n}, {"m", m}, {"k", k}, {"total", rep.total}, {"analytic", analytic}});
    if (std::abs(rep.total - analytic) > 1e-9) analytic_ok = false;
    if (rep.total > prev + 1e-12) monotone = false;
    prev = rep.total;
  }
  r.metrics["instances"] = rows;
  r.check("exact_matches_analytic_1e-9", analytic_ok, 0);
  r.check("monotone_nonincreasing_in_n_minus_m", monotone, prev);
  return r;
}

inline Result run_shelter(const json& p) {
  uint64_t pp = detail::get_u64(p, "p", 3), nn = detail::get_u64(p, "n", 2), mm = detail::get_u64(p, "m", 1);
  gf::Field f = gf::Field::make(pp, nn);
  uint64_t dm = ipow(pp, mm);
  auto rep = chernoff::shelter_attack_state([dm](uint64_t x) { return x % dm; }, f, mm);
  Result r;
  r.metrics["truncation_colliding_mass"] = rep.colliding_mass;
  r.metrics["state_norm"] = rep.state_norm;
  r.check("colliding_mass_above_half", rep.colliding_mass > 0.5, rep.colliding_mass);
  if (pp == 3 && nn == 2 && mm == 1)
    r.check("frozen_two_thirds", std::abs(rep.colliding_mass - 2.0 / 3) <= 1e-9, rep.colliding_mass);

  chernoff::AffineHashFamily fam{f, mm};
  uint64_t positive = 0;
  for (uint64_t s = 0; s < fam.seed_count(); ++s)
    if (chernoff::shelter_attack_state(fam.at(s), f, mm).colliding_mass > 0) positive++;
  double frac = double(positive) / double(fam.seed_count());
  r.metrics["seeded_family_positive_fraction"] = frac;
  r.check("seeded_family_90pct", frac >= 0.9, frac);
  if (detail::get_u64(p, "dump_state", 0)) r.metrics["state"] = state_json(rep.state);
  return r;
}

inline Result run_trace_moments(const json& p) {
  uint64_t pp = detail::get_u64(p, "p", 3), nn = detail::get_u64(p, "n", 1);
  uint64_t targets = detail::get_u64(p, "targets", 20);
  RngStream rng(detail::get_u64(p, "seed", 1));
  gf::Field f = gf::Field::make(pp, nn);
  Result r;
  bool ok1 = true, ok2 = true, ok3 = true;
  double tr3_max = 0;
  for (uint64_t t = 0; t < targets; ++t) {
    auto target = wotro::random_target(f.order(), f.order(), rng);
    auto s = bounds::build_S(f, target);
    auto m = bounds::trace_moments(s);
    ok1 = ok1 && m.tr1_ok;
    ok2 = ok2 && m.tr2_ok;
    ok3 = ok3 && m.tr3_ok;
    tr3_max = std::max(tr3_max, m.tr3);
    if (t == 0) {
      r.metrics["tr1"] = m.tr1;
      r.metrics["tr2"] = m.tr2;
      r.metrics["expected1"] = m.expected1;
      r.metrics["expected2"] = m.expected2;
      r.metrics["bound3"] = m.bound3;
    }
  }
  r.metrics["targets"] = targets;
  r.metrics["tr3_max"] = tr3_max;
  r.check("tr1_closed_form", ok1, tr3_max);
  r.check("tr2_closed_form", ok2, tr3_max);
  r.check("tr3_within_cap", ok3, tr3_max);
  return r;
}

inline Result run_dual_certificate(const json& p) {
  uint64_t pp = detail::get_u64(p, "p", 3), nn = detail::get_u64(p, "n", 1);
  double alpha = detail::get_f64(p, "alpha", 1.0);
  uint64_t seed = detail::get_u64(p, "seed", 1);
  RngStream rng(seed);
  gf::Field f = gf::Field::make(pp, nn);
  auto target = wotro::random_target(f.order(), f.order(), rng);
  auto s = bounds::build_S(f, target);
  auto cert = bounds::dual_certificate(s, alpha, 200, seed);
  Result r;
  r.metrics["alpha"] = alpha;
  r.metrics["dual_value"] = cert.dual_value;
  r.metrics["taylor_value"] = cert.taylor_value;
  r.metrics["feasibility_min_eig"] = cert.feasibility_min_eig;
  r.metrics["pairs_checked"] = cert.pairs_checked;
  r.check("feasible", cert.feasibility_min_eig >= -1e-7, cert.feasibility_min_eig);
  r.check("dual_below_taylor", cert.dual_value <= cert.taylor_value + 1e-8, cert.dual_value);
  if (pp == 3 && nn == 2 && alpha == 1.0)
    r.check("dual_below_0.83334", cert.dual_value <= 0.83334, cert.dual_value);

  // analytic sweep of the closed form in the large-field limit
  double best = 2, best_alpha = 0;
  for (int i = 1; i <= 100; ++i) {
    double a = 0.01 * i;
    double v = 1 - a / ((a + 1) * (a + 1));
    if (v < best) {
      best = v;
      best_alpha = a;
    }
  }
  r.metrics["sweep_min_alpha"] = best_alpha;
  r.metrics["sweep_min_value"] = best;
  r.check("sweep_min_at_alpha_one", std::abs(best_alpha - 1.0) <= 1e-9 && std::abs(best - 0.75) <= 1e-12, best);
  return r;
}

inline Result run_weil(const json& p) {
  uint64_t seed = detail::get_u64(p, "seed", 1);
  uint64_t cases = detail::get_u64(p, "trials", 12);
  Result r;
  bool gauss_ok = true;
  json rows = json::array();
  for (uint64_t pp : {uint64_t(3), uint64_t(5), uint64_t(7)}) {
    gf::Field f = gf::Field::make(pp, 1);
    bounds::FMat m = {{f.one()}};
    auto rep = bounds::weil_full_quadratic(f, m, {f.zero()});
    rows.push_back({{"p", pp}, {"abs_sum", rep.abs_sum}, {"bound", rep.bound}});
    if (std::abs(rep.abs_sum - std::sqrt(double(pp))) > 1e-6) gauss_ok = false;
  }
  r.metrics["gauss_cases"] = rows;
  r.check("gauss_equality_1e-6", gauss_ok, 0);

  // random constrained cases at p=3 meeting the bound's hypotheses:
  // full-rank B, full-rank C, nonsingular restriction
  gf::Field f3 = gf::Field::make(3, 1);
  RngStream rng(seed);
  uint64_t done = 0, held = 0, attempts = 0;
  while (done < cases && attempts < 10000) {
    attempts++;
    size_t k = 5, mrows = 2;
    bounds::FMat b(mrows, std::vector<gf::FieldElem>(k, f3.zero()));
    for (auto& row : b)
      for (auto& e : row) e = f3.from_index(rng.below(3));
    bounds::FMat c(k, std::vector<gf::FieldElem>(k, f3.zero()));
    for (size_t i = 0; i < k; ++i)
      for (size_t j = i; j < k; ++j) {
        c[i][j] = f3.from_index(rng.below(3));
        c[j][i] = c[i][j];
      }
    try {
      auto rep = bounds::weil_constrained(f3, b, c);
      done++;
      if (rep.holds) held++;
    } catch (const Error&) {
      continue;  // rank-deficient draw; redraw
    }
  }
  r.metrics["constrained_cases"] = done;
  r.metrics["constrained_held"] = held;
  r.check("constrained_all_hold", done > 0 && held == done, double(held));
  return r;
}

inline Result run_nlbox(const json& p) {
  uint64_t trials = detail::get_u64(p, "trials", 100000);
  RngStream rng(detail::get_u64(p, "seed", 1));
  nlbox::LinearCode code = nlbox::LinearCode::repetition(4, 3);
  nlbox::ToeplitzFamily fam(12, 2);
  Result r;
  uint64_t accept = 0, agree = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    auto tr = nlbox::protocol_run(code, fam, rng.below(fam.seed_count()), rng.below(16), rng);
    if (tr.accepted) accept++;
    if (tr.accepted && tr.prover_c == tr.verifier_c) agree++;
  }
  r.metrics["honest_accept_rate"] = double(accept) / double(trials);
  r.metrics["honest_agreement_rate"] = accept ? double(agree) / double(accept) : 0;
  r.check("honest_accept_one", accept == trials, double(accept) / double(trials));
  r.check("honest_agreement_one", agree == accept, double(agree));

  auto target = wotro::random_target(16, 4, rng);
  auto rep = nlbox::flip_attack_audit(code, fam, 0b100100100100, target, trials, rng);  // |S| = 4
  r.metrics["flip4_accept_rate"] = rep.accept_rate;
  r.metrics["flip4_hit_given_accept"] = rep.hit_given_accept;
  r.check("flip4_accept_3sigma", within_3sigma(rep.accepted, rep.trials, 1.0 / 16), rep.accept_rate);
  r.check("flip4_hit_3sigma", within_3sigma(rep.hits, rep.accepted, 0.25), rep.hit_given_accept);
  return r;
}

inline Result run_fs_attack(const json& p) {
  uint64_t trials = detail::get_u64(p, "trials", 20000);
  RngStream rng(detail::get_u64(p, "seed", 1));
  auto toy = chernoff::build_binary_toy(detail::get_u64(p, "n", 2), detail::get_u64(p, "m", 1),
                                        detail::get_u64(p, "k", 1));
  Result r;
  json rows = json::array();
  bool all_ci = true;
  int idx = 0;
  for (auto f : {std::vector<uint64_t>{0, 0, 0, 0}, {1, 0, 1, 0}, {0, 1, 1, 1}}) {
    auto rep = fs::fs_attack(f, toy, trials, rng);
    rows.push_back({{"f_index", idx++},
                    {"break_rate", rep.break_rate},
                    {"exact", rep.exact_success},
                    {"ci_lo", rep.ci.lo},
                    {"ci_hi", rep.ci.hi}});
    if (!rep.ci.contains(rep.exact_success)) all_ci = false;
  }
  r.metrics["targets"] = rows;
  r.check("break_rate_matches_exact_wilson99", all_ci, 0);
  return r;
}

inline Result run_joint_sim(const json& p) {
  uint64_t n = detail::get_u64(p, "n", 8);
  uint64_t queries = detail::get_u64(p, "queries", 10);
  uint64_t runs = detail::get_u64(p, "runs", 400);
  RngStream rng(detail::get_u64(p, "seed", 1));
  auto toy = chernoff::build_binary_toy(n, 1, 1);
  auto rep = fs::joint_sim_consistency_audit(toy, queries, runs, rng);
  Result r;
  r.metrics["failure_rate"] = rep.failure_rate;
  r.metrics["failure_bound"] = rep.failure_bound;
  r.metrics["all_consistent"] = rep.all_consistent;
  r.check("failure_within_bound", rep.failure_rate <= rep.failure_bound, rep.failure_rate);
  r.check("cross_query_consistency", rep.all_consistent, double(rep.failed_runs));
  return r;
}

inline Result run_tql(const json& p) {
  uint64_t runs = detail::get_u64(p, "trials", 10000);
  RngStream setup(detail::get_u64(p, "seed", 1));
  tql::TqlScheme tq = tql::tql_from_ql(tql::mock_ql(8), 2, 8, setup);
  RngStream rng(setup.next_u64());
  Result r;

  double total_retries = 0;
  uint64_t exhausted = 0;
  for (uint64_t t = 0; t < runs; ++t) {
    try {
      total_retries += double(tq.gen(rng.below(4), rng).retries);
    } catch (const Error&) {
      exhausted++;
    }
  }
  double mean = total_retries / double(runs - exhausted);
  r.metrics["mean_retries"] = mean;
  r.metrics["exhausted"] = exhausted;
  // cap-out probability of the truncated geometric, against the e^{-n} bound
  r.metrics["exhaustion_prob_analytic"] = std::pow(0.75, double(tq.retry_cap));
  r.metrics["exhaustion_bound"] = std::exp(-8.0);
  r.check("mean_retries_3sigma", std::abs(mean - 4.0) <= 3 * std::sqrt(12.0 / double(runs)), mean);
  r.check("zero_exhaustion", exhausted == 0, double(exhausted));

  auto planted = [](RngStream& rr) { return std::optional<uint64_t>(rr.below(4)); };
  double pairs_total = 0;
  const int cruns = 500;
  for (int t = 0; t < cruns; ++t) pairs_total += double(tql::collision_finder(planted, 1000, rng).pairs_used);
  double cmean = pairs_total / cruns;
  r.metrics["planted_collision_mean_pairs"] = cmean;
  r.check("collision_within_3x", cmean <= 3 * 4.0, cmean);
  return r;
}

// --------------------------------------------------------------------------

inline const std::vector<std::string>& registry() {
  static std::vector<std::string> names = {
      "field",      "mub-audit",     "wf-run",  "wf-correctness", "baselines",
      "chernoff-enum", "hybrid",     "shelter", "trace-moments",  "dual-certificate",
      "weil",       "nlbox",         "fs-attack", "joint-sim",    "tql"};
  return names;
}

inline Result run(const std::string& name, const json& params) {
  if (name == "field") return run_field(params);
  if (name == "mub-audit") return run_mub_audit(params);
  if (name == "wf-run") return run_wf_run(params);
  if (name == "wf-correctness") return run_wf_correctness(params);
  if (name == "baselines") return run_baselines(params);
  if (name == "chernoff-enum") return run_chernoff_enum(params);
  if (name == "hybrid") return run_hybrid(params);
  if (name == "shelter") return run_shelter(params);
  if (name == "trace-moments") return run_trace_moments(params);
  if (name == "dual-certificate") return run_dual_certificate(params);
  if (name == "weil") return run_weil(params);
  if (name == "nlbox") return run_nlbox(params);
  if (name == "fs-attack") return run_fs_attack(params);
  if (name == "joint-sim") return run_joint_sim(params);
  if (name == "tql") return run_tql(params);
  fail(Err::UnknownExperiment, "no experiment named '" + name + "'");
}

// full report with config echo, used by the CLI and the suite runner
inline json run_report(const std::string& name, const json& params) {
  auto t0 = std::chrono::steady_clock::now();
  Result res = run(name, params);
  auto t1 = std::chrono::steady_clock::now();
  json checks = json::array();
  for (const auto& c : res.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}});
  return json{{"schema", 1},
              {"experiment", name},
              {"params", params},
              {"seed", detail::get_u64(params, "seed", 1)},
              {"metrics", res.metrics},
              {"checks", checks},
              {"pass", res.all_pass()},
              {"wall_ms", std::chrono::duration<double, std::milli>(t1 - t0).count()}};
}

}  // namespace wotrolab::experiments
