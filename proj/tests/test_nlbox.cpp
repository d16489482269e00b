#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "wotrolab/nlbox.hpp"

using namespace wotrolab;
using namespace wotrolab::nlbox;

TEST_CASE("nl box law") {
  RngStream rng(1);
  SECTION("x=0, y=0 forces u xor v = 0") {
    for (int t = 0; t < 200; ++t) {
      NlBoxBank bank(1);
      int u = bank.fire(0, 0, 0, rng);
      int v = bank.fire(1, 0, 0, rng);
      REQUIRE((u ^ v) == 0);
      REQUIRE(bank.law_holds());
    }
  }
  SECTION("x=1, y=1 forces u xor v = 1 and u is uniform") {
    uint64_t ones = 0;
    const uint64_t trials = 10000;
    for (uint64_t t = 0; t < trials; ++t) {
      NlBoxBank bank(1);
      int u = bank.fire(0, 0, 1, rng);
      int v = bank.fire(1, 0, 1, rng);
      REQUIRE((u ^ v) == 1);
      ones += uint64_t(u);
    }
    REQUIRE(within_3sigma(ones, trials, 0.5));
  }
  SECTION("adaptive ordering: verifier may fire first") {
    NlBoxBank bank(2);
    bank.fire(1, 0, 1, rng);
    bank.fire(0, 0, 1, rng);
    bank.fire(0, 1, 0, rng);
    bank.fire(1, 1, 1, rng);
    REQUIRE(bank.law_holds());
  }
  SECTION("double fire rejected") {
    NlBoxBank bank(1);
    bank.fire(0, 0, 1, rng);
    REQUIRE_THROWS_MATCHES(bank.fire(0, 0, 0, rng), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Err::DoubleFire;
                           }));
  }
}

TEST_CASE("repetition code") {
  for (size_t factor : {2, 3, 5}) {
    LinearCode code = LinearCode::repetition(4, factor);
    REQUIRE(code.length() == 4 * factor);
    REQUIRE(code.min_distance() == factor);
  }
  // encoding doubles every bit
  LinearCode c2 = LinearCode::repetition(2, 2);
  REQUIRE(c2.encode(0b01) == 0b0011);
  REQUIRE(c2.encode(0b10) == 0b1100);
}

TEST_CASE("toeplitz family") {
  SECTION("exhaustive preimage mean is exactly 2^{N-m}") {
    ToeplitzFamily fam(6, 2);
    for (uint64_t z = 0; z < 4; ++z) REQUIRE_THAT(preimage_mean(fam, z), Catch::Matchers::WithinAbs(16.0, 1e-12));
  }
  SECTION("two-universality: collision rate of a fixed pair over seeds") {
    ToeplitzFamily fam(8, 2);
    uint64_t u = 0b10110001, v = 0b00100111;
    uint64_t coll = 0;
    for (uint64_t seed = 0; seed < fam.seed_count(); ++seed)
      if (fam.apply(seed, u) == fam.apply(seed, v)) coll++;
    REQUIRE_THAT(double(coll) / double(fam.seed_count()), Catch::Matchers::WithinAbs(0.25, 1e-12));
  }
}

TEST_CASE("nl protocol honest runs") {
  LinearCode code = LinearCode::repetition(4, 3);
  ToeplitzFamily fam(12, 2);
  RngStream rng(7);
  SECTION("always accepted, both sides agree, challenge uniform") {
    std::map<uint64_t, uint64_t> counts;
    const uint64_t trials = 10000;
    for (uint64_t t = 0; t < trials; ++t) {
      uint64_t seed = rng.below(fam.seed_count());
      auto tr = protocol_run(code, fam, seed, rng.below(16), rng);
      REQUIRE(tr.accepted);
      REQUIRE(tr.prover_c == tr.verifier_c);
      counts[*tr.prover_c]++;
    }
    double chi2 = 0, e = double(trials) / 4;
    for (auto& [c, k] : counts) chi2 += (double(k) - e) * (double(k) - e) / e;
    REQUIRE(chi2 < chi2_crit99(3));
  }
  SECTION("tampered codeword announcement is rejected immediately") {
    for (int t = 0; t < 50; ++t) {
      uint64_t a = rng.below(16);
      auto tr = protocol_run(code, fam, 0, a, rng, code.encode(a) ^ 1);
      REQUIRE_FALSE(tr.accepted);
    }
  }
}

TEST_CASE("flip adversary") {
  LinearCode code = LinearCode::repetition(4, 3);
  ToeplitzFamily fam(12, 2);
  RngStream rng(11);
  std::vector<uint64_t> target = wotro::random_target(16, 4, rng);

  SECTION("no flips: never rejected") {
    auto rep = flip_attack_audit(code, fam, 0, target, 2000, rng);
    REQUIRE(rep.accept_rate == 1.0);
  }
  SECTION("|S| = 4: accepted at rate 1/16, conditional hit 1/4") {
    auto rep = flip_attack_audit(code, fam, 0b100110001000, target, 100000, rng);
    REQUIRE(within_3sigma(rep.accepted, rep.trials, 1.0 / 16));
    REQUIRE(within_3sigma(rep.hits, rep.accepted, 1.0 / 4));
  }
  SECTION("|S| = 2: accepted at rate 1/4") {
    auto rep = flip_attack_audit(code, fam, 0b000001000001, target, 40000, rng);
    REQUIRE(within_3sigma(rep.accepted, rep.trials, 1.0 / 4));
  }
}
