#include <catch2/catch_amalgamated.hpp>

#include "wotrolab/bounds.hpp"

using namespace wotrolab;
using namespace wotrolab::bounds;

namespace {

FMat make_fmat(const gf::Field& f, const std::vector<std::vector<int64_t>>& rows) {
  FMat m;
  for (auto& r : rows) {
    std::vector<gf::FieldElem> row;
    for (auto v : r) row.push_back(f.from_index(uint64_t(((v % f.p()) + f.p()) % f.p())));
    m.push_back(std::move(row));
  }
  return m;
}

}  // namespace

TEST_CASE("S operator at p=3, n=1") {
  gf::Field f3 = gf::Field::make(3, 1);

  SECTION("bad sets have p^{2n} members and S is PSD") {
    SOperator s = build_S(f3, {0, 1, 2});
    REQUIRE(s.bad_per_input == 9);
    REQUIRE(qsim::min_eigenvalue(s.matrix) >= -1e-9);
  }

  SECTION("trace moments match the closed forms for every target") {
    // tr S = 27 and tr S^2 = 45 are target-independent; tr S^3 varies
    std::vector<double> tr3_seen;
    for (uint64_t t0 = 0; t0 < 3; ++t0)
      for (uint64_t t1 = 0; t1 < 3; ++t1)
        for (uint64_t t2 = 0; t2 < 3; ++t2) {
          SOperator s = build_S(f3, {t0, t1, t2});
          auto m = trace_moments(s);
          REQUIRE(m.tr1_ok);
          REQUIRE(m.tr2_ok);
          REQUIRE(m.tr3_ok);
          REQUIRE_THAT(m.tr1, Catch::Matchers::WithinAbs(27, 1e-6));
          REQUIRE_THAT(m.tr2, Catch::Matchers::WithinAbs(45, 1e-6));
          tr3_seen.push_back(m.tr3);
        }
    // frozen: the 27 targets realize exactly the values 81, 87 and 99
    double lo = 1e9, hi = 0;
    for (double v : tr3_seen) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    REQUIRE_THAT(lo, Catch::Matchers::WithinAbs(81, 1e-6));
    REQUIRE_THAT(hi, Catch::Matchers::WithinAbs(99, 1e-6));
  }

  SECTION("spectrum of the identity-target S (frozen)") {
    SOperator s = build_S(f3, {0, 1, 2});
    auto eig = qsim::herm_eig(s.matrix);
    double sum = 0;
    for (double v : eig.values) sum += v;
    REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(27, 1e-8));  // eigenvalue sum = tr S
    std::vector<double> expect = {0, 0, 0, 0.257772801, 0.257772801, 0.257772801, 0.257772801, 0.257772801,
                                  0.257772801, 0.605069156, 0.605069156, 0.605069156, 0.605069156, 0.605069156,
                                  0.605069156, 1, 1, 1, 2, 2, 2, 2.137158043, 2.137158043, 2.137158043,
                                  2.137158043, 2.137158043, 2.137158043};
    REQUIRE(eig.values.size() == expect.size());
    for (size_t i = 0; i < expect.size(); ++i)
      REQUIRE_THAT(eig.values[i], Catch::Matchers::WithinAbs(expect[i], 1e-8));
  }
}

TEST_CASE("tr S^3 exceeds the closed-form cap at n=2 (frozen defect)") {
  // The three-basis cross term does not cancel the way the closed-form cap
  // 4 p^{3n} + p^{2n} assumes; measured values sit near 4.4 p^{3n} at n=2.
  gf::Field f9 = gf::Field::make(3, 2);
  std::vector<uint64_t> target = {2, 2, 7, 8, 0, 4, 7, 1, 7};
  SOperator s = build_S(f9, target);
  auto m = trace_moments(s);
  REQUIRE(m.tr1_ok);
  REQUIRE(m.tr2_ok);
  REQUIRE_THAT(m.tr1, Catch::Matchers::WithinAbs(729, 1e-4));
  REQUIRE_THAT(m.tr2, Catch::Matchers::WithinAbs(1377, 1e-4));
  REQUIRE_THAT(m.tr3, Catch::Matchers::WithinAbs(3189, 1e-3));  // cap would be 2997
  REQUIRE_FALSE(m.tr3_ok);
}

TEST_CASE("taylor_dual_value") {
  // 1 - a(1-p^{-n})/(a+1)^2 + 4a p^{-n}/(a+1)^3, assembled by hand
  REQUIRE_THAT(taylor_dual_value(3, 1, 1.0), Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(taylor_dual_value(3, 2, 1.0), Catch::Matchers::WithinAbs(1 - (8.0 / 9) / 4 + (4.0 / 9) / 8, 1e-12));
  REQUIRE_THAT(taylor_dual_value(3, 2, 1.0), Catch::Matchers::WithinAbs(0.8333333333, 1e-9));
  REQUIRE_THAT(taylor_dual_value(3, 3, 0.5),
               Catch::Matchers::WithinAbs(1 - 0.5 * (26.0 / 27) / 2.25 + 4 * 0.5 * (1.0 / 27) / 3.375, 1e-12));
  REQUIRE_THROWS_AS(taylor_dual_value(3, 1, 0.0), Error);

  SECTION("alpha sweep: minimum at alpha = 1 with limit 3/4") {
    // the p^{-n} -> 0 limit of the formula is 1 - a/(a+1)^2
    double best = 2;
    double best_alpha = 0;
    for (int i = 1; i <= 20; ++i) {
      double a = 0.05 * i;
      double v = 1 - a / ((a + 1) * (a + 1));
      if (v < best) {
        best = v;
        best_alpha = a;
      }
    }
    REQUIRE_THAT(best_alpha, Catch::Matchers::WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(best, Catch::Matchers::WithinAbs(0.75, 1e-12));
  }
}

TEST_CASE("dual certificate at p=3, n=1") {
  gf::Field f3 = gf::Field::make(3, 1);
  SOperator s = build_S(f3, {0, 1, 2});
  for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
    auto cert = dual_certificate(s, alpha);
    INFO("alpha=" << alpha);
    REQUIRE(cert.pairs_checked == 27);  // exhaustive
    REQUIRE(cert.feasibility_min_eig >= -1e-7);
    REQUIRE(cert.dual_value <= cert.taylor_value + 1e-8);
  }
  // frozen anchors for the identity target
  REQUIRE_THAT(dual_certificate(s, 1.0).dual_value, Catch::Matchers::WithinAbs(0.820662768031, 1e-9));
  REQUIRE_THAT(dual_certificate(s, 0.5).dual_value, Catch::Matchers::WithinAbs(0.810482180294, 1e-9));
}

TEST_CASE("weil sums, full quadratic mode") {
  SECTION("Gauss sum over F_3: |1 + 2w| = sqrt(3)") {
    gf::Field f3 = gf::Field::make(3, 1);
    auto rep = weil_full_quadratic(f3, make_fmat(f3, {{1}}), {f3.zero()});
    REQUIRE_THAT(rep.abs_sum, Catch::Matchers::WithinAbs(std::sqrt(3.0), 1e-6));
    REQUIRE_THAT(rep.bound, Catch::Matchers::WithinAbs(std::sqrt(3.0), 1e-12));
    REQUIRE(rep.holds);
  }
  SECTION("x^2 + y^2 over F_5 attains 5") {
    gf::Field f5 = gf::Field::make(5, 1);
    auto rep = weil_full_quadratic(f5, make_fmat(f5, {{1, 0}, {0, 1}}), {f5.zero(), f5.zero()});
    REQUIRE_THAT(rep.abs_sum, Catch::Matchers::WithinAbs(5.0, 1e-6));
    REQUIRE(rep.holds);
  }
  SECTION("p=7 with a linear term still meets the bound") {
    gf::Field f7 = gf::Field::make(7, 1);
    auto rep = weil_full_quadratic(f7, make_fmat(f7, {{1, 2}, {2, 3}}), {f7.one(), f7.from_index(4)});
    REQUIRE(rep.holds);
  }
  SECTION("singular form rejected") {
    gf::Field f3 = gf::Field::make(3, 1);
    REQUIRE_THROWS_MATCHES(weil_full_quadratic(f3, make_fmat(f3, {{1, 1}, {1, 1}}), {f3.zero(), f3.zero()}),
                           Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Err::RankDeficient;
                           }));
  }
}

TEST_CASE("weil sums, constrained mode") {
  gf::Field f3 = gf::Field::make(3, 1);
  SECTION("diagonal restriction: product of Gauss sums meets q^{m/2} exactly") {
    FMat b = make_fmat(f3, {{1, 0, 0, 0, 0}});
    FMat c = make_fmat(f3, {{1, 0, 0, 0, 0},
                            {0, 1, 0, 0, 0},
                            {0, 0, 2, 0, 0},
                            {0, 0, 0, 1, 0},
                            {0, 0, 0, 0, 2}});
    auto rep = weil_constrained(f3, b, c);
    REQUIRE(rep.kernel_dim == 4);
    REQUIRE(rep.applicable);
    REQUIRE_THAT(rep.abs_sum, Catch::Matchers::WithinAbs(9.0, 1e-6));  // q^{4/2}
    REQUIRE(rep.holds);
  }
  SECTION("off-diagonal nondegenerate case holds") {
    FMat b = make_fmat(f3, {{1, 2, 0, 1}, {0, 1, 1, 1}});
    FMat c = make_fmat(f3, {{1, 1, 0, 0}, {1, 2, 1, 0}, {0, 1, 1, 2}, {0, 0, 2, 1}});
    auto rep = weil_constrained(f3, b, c);
    REQUIRE(rep.applicable);
    REQUIRE(rep.holds);
  }
}

TEST_CASE("bad-outcome difference matrices") {
  gf::Field f3 = gf::Field::make(3, 1);
  std::vector<uint64_t> zero_target = {0, 0, 0};
  std::vector<uint64_t> id_target = {0, 1, 2};

  SECTION("B_a for the zero target is the plain selector") {
    auto wm = build_weil_matrices(f3, f3.zero(), f3.one(), f3.from_index(2), zero_target);
    REQUIRE(wm.b_a[0][0] == f3.one());
    REQUIRE(wm.b_a[0][2].is_zero());
    FMat ba = wm.b_a;
    REQUIRE(bounds::detail::rank_of(ba, f3) == 2);
  }
  SECTION("stacked matrix has rank at least 4; C is full rank when distinct") {
    for (auto& target : {zero_target, id_target, std::vector<uint64_t>{2, 0, 1}}) {
      auto wm = build_weil_matrices(f3, f3.zero(), f3.one(), f3.from_index(2), target);
      REQUIRE(wm.rank_b_abc >= 4);
      FMat c = wm.c_abc;
      REQUIRE(bounds::detail::rank_of(c, f3) == 9);
    }
  }
  SECTION("indices must be distinct") {
    REQUIRE_THROWS_MATCHES(build_weil_matrices(f3, f3.zero(), f3.zero(), f3.one(), id_target), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Err::NotDistinct;
                           }));
  }
  SECTION("the protocol's own matrices always have a singular restriction (frozen defect)") {
    // the diagonal directions (t,t,t) lie in ker(B_{a,b,c}) and are isotropic
    // for C_{a,b,c}, so the kernel-sum bound's nonsingularity hypothesis
    // fails and the sum overshoots q^{m/2}
    auto wm = build_weil_matrices(f3, f3.zero(), f3.one(), f3.from_index(2), id_target);
    REQUIRE_THROWS_MATCHES(weil_constrained(f3, wm.b_abc, wm.c_abc), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Err::RankDeficient;
                           }));
    auto rep = weil_constrained(f3, wm.b_abc, wm.c_abc, 10000000, false);
    REQUIRE(rep.rank_b == 5);
    REQUIRE(rep.kernel_dim == 4);
    REQUIRE(rep.restricted_rank == 2);
    REQUIRE_FALSE(rep.applicable);
    REQUIRE_THAT(rep.abs_sum, Catch::Matchers::WithinAbs(27.0, 1e-6));  // q^{m/2} would be 9
    REQUIRE_FALSE(rep.holds);
  }
}
