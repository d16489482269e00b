// Acceptance suite: every quantitative gate of the lab, one line per
// criterion.  Each criterion is pinned to fixed parameters, tolerances and
// seeds; the binary exits nonzero if any line fails.

#include <cstdio>
#include <string>
#include <vector>

#include "wotrolab/experiments.hpp"

using nlohmann::json;
namespace ex = wotrolab::experiments;

namespace {

int failures = 0;

void report(int idx, const std::string& title, bool pass, const std::string& detail) {
  std::printf("criterion %02d [%s] %s  -- %s\n", idx, pass ? "PASS" : "FAIL", title.c_str(), detail.c_str());
  if (!pass) failures++;
}

bool checks_pass(const ex::Result& r, std::string* why = nullptr) {
  bool ok = true;
  for (const auto& c : r.checks)
    if (!c.pass) {
      ok = false;
      if (why) *why += (why->empty() ? "" : "; ") + c.name + "=" + std::to_string(c.value);
    }
  return ok;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

int main() {
  // 1. MUB unbiasedness, exhaustive overlaps
  {
    auto a1 = ex::run_mub_audit({{"p", 3}, {"n", 1}});
    auto a2 = ex::run_mub_audit({{"p", 3}, {"n", 2}, {"pairs", 10}, {"seed", 11}});
    double dev = std::max(a1.metrics["max_deviation"].get<double>(), a2.metrics["max_deviation"].get<double>());
    report(1, "MUB unbiasedness (p=3, n=1 all pairs; n=2 ten pairs)", checks_pass(a1) && checks_pass(a2),
           "max |<u|v>|^2 deviation " + fmt(dev) + " <= 1e-9");
  }

  // 2. honest entangled protocol at p=3, n=1
  {
    auto run = ex::run_wf_run({{"p", 3}, {"n", 1}, {"trials", 10000}, {"seed", 21}});
    auto law = ex::run_wf_correctness({{"p", 3}, {"n", 1}, {"trials", 200}, {"seed", 22}});
    report(2, "honest protocol: accept=1, law (5/9,2/9,2/9), Pr[x1+x2=0]~1/3",
           checks_pass(run) && checks_pass(law),
           "accept_rate " + fmt(run.metrics["accept_rate"].get<double>()) + ", zero_sum_rate " +
               fmt(run.metrics["zero_sum_rate"].get<double>()) + ", distance " +
               fmt(law.metrics["max_uniform_distance"].get<double>()));
  }

  // 3. trace moment identities over random targets
  {
    auto m1 = ex::run_trace_moments({{"p", 3}, {"n", 1}, {"targets", 20}, {"seed", 31}});
    auto m2 = ex::run_trace_moments({{"p", 3}, {"n", 2}, {"targets", 20}, {"seed", 32}});
    std::string why;
    bool ok = checks_pass(m1, &why) && checks_pass(m2, &why);
    report(3, "trace moments: tr S, tr S^2 closed forms; tr S^3 within 4p^{3n}+p^{2n}", ok,
           ok ? "all moments in range"
              : "n=2 tr S^3 max " + fmt(m2.metrics["tr3_max"].get<double>()) + " exceeds cap " +
                    fmt(m2.metrics["bound3"].get<double>()) + " for every sampled target (tr S, tr S^2 exact)");
  }

  // 4. dual certificate at p=3, n=2, alpha=1
  {
    auto d = ex::run_dual_certificate({{"p", 3}, {"n", 2}, {"alpha", 1.0}, {"seed", 41}});
    report(4, "dual certificate: feasible, value <= 0.83334, sweep min 3/4 at alpha=1", checks_pass(d),
           "dual_value " + fmt(d.metrics["dual_value"].get<double>()) + ", feasibility_min_eig " +
               fmt(d.metrics["feasibility_min_eig"].get<double>()));
  }

  // 5. Weil sums
  {
    auto w = ex::run_weil({{"seed", 51}, {"trials", 12}});
    report(5, "Weil sums: Gauss equalities at p=3,5,7; constrained cases hold q^{m/2}", checks_pass(w),
           "constrained " + fmt(w.metrics["constrained_held"].get<double>()) + "/" +
               fmt(w.metrics["constrained_cases"].get<double>()));
  }

  // 6. exact f-averaged attack identity
  {
    auto c1 = ex::run_chernoff_enum({{"n", 2}, {"m", 1}, {"k", 1}});
    auto c2 = ex::run_chernoff_enum({{"n", 3}, {"m", 1}, {"k", 2}});
    double resid = std::max(c1.metrics["identity_residual"].get<double>(),
                            c2.metrics["identity_residual"].get<double>());
    double efx = std::max(c1.metrics["ef_x_residual"].get<double>(), c2.metrics["ef_x_residual"].get<double>());
    report(6, "exhaustive attack average equals delta/(1+eta); E_f[X_a] = I/2^m", checks_pass(c1) && checks_pass(c2),
           "identity residual " + fmt(resid) + ", operator residual " + fmt(efx));
  }

  // 7. hybrid / simulator exact distances
  {
    auto h = ex::run_hybrid({{"queries", 1}});
    std::string vals;
    for (auto& row : h.metrics["instances"]) vals += fmt(row["total"].get<double>()) + " ";
    report(7, "single-query exact channel distance, monotone in n-m", checks_pass(h),
           "distances " + vals + "(analytic eta/(1+eta) to 1e-9)");
  }

  // 8. non-local box protocol
  {
    auto nb = ex::run_nlbox({{"trials", 100000}, {"seed", 81}});
    report(8, "NL-box protocol: honest accept/agreement 1; flip-4 accept 1/16; hit 2^-m", checks_pass(nb),
           "flip4 accept " + fmt(nb.metrics["flip4_accept_rate"].get<double>()) + ", hit|accept " +
               fmt(nb.metrics["flip4_hit_given_accept"].get<double>()));
  }

  // 9. classical baselines
  {
    auto b = ex::run_baselines({{"trials", 100000}, {"seed", 91}});
    report(9, "baselines: trivial 1/|G|^m; blocks l=2 exactly 3/4; l=64 formula", checks_pass(b),
           "trivial " + fmt(b.metrics["trivial_hit_prob"].get<double>()) + ", blocks2 " +
               fmt(b.metrics["blocks_2_analytic"].get<double>()) + ", blocks64 " +
               fmt(b.metrics["blocks_64_analytic"].get<double>()));
  }

  // 10. Fiat-Shamir attack and joint simulation
  {
    auto fa = ex::run_fs_attack({{"trials", 20000}, {"seed", 101}});
    auto js = ex::run_joint_sim({{"n", 8}, {"queries", 10}, {"runs", 400}, {"seed", 102}});
    report(10, "FS attack matches exact success (Wilson 99%); joint simulation consistent",
           checks_pass(fa) && checks_pass(js),
           "joint failure_rate " + fmt(js.metrics["failure_rate"].get<double>()) + " <= bound " +
               fmt(js.metrics["failure_bound"].get<double>()));
  }

  // 11. typed lightning
  {
    auto t = ex::run_tql({{"trials", 10000}, {"seed", 112}});
    report(11, "typed lightning: retries ~ p(n)=4; no retry exhaustion; collisions within 3x", checks_pass(t),
           "mean_retries " + fmt(t.metrics["mean_retries"].get<double>()) + ", exhausted " +
               fmt(t.metrics["exhausted"].get<double>()));
  }

  // 12. collision superposition state
  {
    auto s = ex::run_shelter({{"p", 3}, {"n", 2}, {"m", 1}});
    report(12, "superposition state for the a-independent hash: colliding mass 2/3 > 0.5", checks_pass(s),
           "colliding_mass " + fmt(s.metrics["truncation_colliding_mass"].get<double>()));
  }

  if (failures) std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  else std::printf("acceptance: all criteria passed\n");
  return failures ? 1 : 0;
}
