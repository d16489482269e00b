#include <catch2/catch_amalgamated.hpp>

#include "wotrolab/fs.hpp"

using namespace wotrolab;
using namespace wotrolab::fs;

TEST_CASE("toy sigma protocol") {
  SigmaProtocol s = toy_sigma(2, 1);
  RngStream rng(3);
  SECTION("perfect correctness") {
    for (int t = 0; t < 100; ++t) {
      uint64_t x = rng.below(16), w = x;  // planted witness
      uint64_t a = s.commit(x, w, rng);
      for (uint64_t c = 0; c < 2; ++c) {
        uint64_t z = s.respond(a, x, w, c);
        REQUIRE(s.verify(x, a, c, z));
      }
    }
  }
  SECTION("special soundness extractor recovers the witness") {
    uint64_t x = 9, w = 9;
    uint64_t a = s.commit(x, w, rng);
    uint64_t z0 = s.respond(a, x, w, 0), z1 = s.respond(a, x, w, 1);
    REQUIRE(s.extract(a, 0, z0, 1, z1) == w);
  }
}

TEST_CASE("fs composition") {
  wotro::QuantumWotro toy = chernoff::build_binary_toy(2, 1, 1);
  SigmaProtocol sigma = toy_sigma(2, 1);
  RngStream rng(5);

  SECTION("honest run accepts") {
    for (int t = 0; t < 100; ++t) {
      uint64_t x = rng.below(16);
      auto tr = fs_run(sigma, toy, x, x, rng);
      REQUIRE(tr.wotro_accepted);
      REQUIRE(tr.accepted);
    }
  }
  SECTION("a failing sigma verifier fails the composition") {
    SigmaProtocol broken = sigma;
    broken.verify = [](uint64_t, uint64_t, uint64_t, uint64_t) { return false; };
    auto tr = fs_run(broken, toy, 3, 3, rng);
    REQUIRE(tr.wotro_accepted);
    REQUIRE_FALSE(tr.accepted);
  }
  SECTION("mismatched alphabets and lengths are rejected") {
    auto wf = wotro::build_wf_protocol(3, 1);
    REQUIRE_THROWS_MATCHES(fs_run(sigma, wf.proto, 0, 0, rng), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Err::AlphabetMismatch;
                           }));
    SigmaProtocol longer = toy_sigma(3, 1);
    REQUIRE_THROWS_MATCHES(fs_run(longer, toy, 0, 0, rng), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Err::LengthMismatch;
                           }));
  }
}

TEST_CASE("empty-language family") {
  RngStream rng(7);
  std::vector<uint64_t> f = {1, 0, 1, 1};
  SigmaProtocol sf = sigma_f(f, 2, 2, 1);
  SECTION("uniform challenges hit the bad table at rate 2^{-m}") {
    uint64_t hits = 0;
    const uint64_t trials = 20000;
    for (uint64_t t = 0; t < trials; ++t) {
      uint64_t a = rng.below(4), c = rng.below(2);
      if (sf.verify(0, a, c, 0)) hits++;
    }
    REQUIRE(within_3sigma(hits, trials, 0.5));
  }
  SECTION("at most one accepting challenge per commitment") {
    for (uint64_t a = 0; a < 4; ++a) {
      int accepting = 0;
      for (uint64_t c = 0; c < 2; ++c)
        if (sf.verify(0, a, c, 0)) accepting++;
      REQUIRE(accepting == 1);
    }
  }
}

TEST_CASE("fs attack equals the exact attack success") {
  wotro::QuantumWotro toy = chernoff::build_binary_toy(2, 1, 1);
  RngStream rng(11);
  SECTION("three valid targets, Wilson 99% check") {
    for (auto f : {std::vector<uint64_t>{0, 0, 0, 0}, {1, 0, 1, 0}, {0, 1, 1, 1}}) {
      auto rep = fs_attack(f, toy, 20000, rng);
      REQUIRE(rep.attack_family_valid);
      INFO("exact=" << rep.exact_success << " rate=" << rep.break_rate);
      REQUIRE(rep.ci.contains(rep.exact_success));
    }
  }
  SECTION("averaged over every target: delta/(1+eta)") {
    double expect = 1 / (1 + chernoff::eta(2, 1, 1).eta);
    uint64_t breaks = 0, trials_per_f = 2000;
    for (uint64_t fidx = 0; fidx < 16; ++fidx) {
      auto rep = fs_attack(chernoff::decode_f(fidx, 4, 2), toy, trials_per_f, rng);
      breaks += rep.breaks;
    }
    REQUIRE(within_3sigma(breaks, 16 * trials_per_f, expect));
  }
  SECTION("invalid attack families run with their flag down") {
    wotro::QuantumWotro deg = chernoff::build_binary_toy(3, 2, 2, true);
    std::vector<uint64_t> constant(8, 3);  // non-physical family on the pinned-basis toy
    auto rep = fs_attack(constant, deg, 500, rng);
    REQUIRE_FALSE(rep.attack_family_valid);
    REQUIRE(rep.trials == 500);
  }
  SECTION("an honest prover only breaks at the guessing rate") {
    std::vector<uint64_t> f = {1, 1, 0, 0};
    SigmaProtocol sf = sigma_f(f, 2, 2, 1);
    uint64_t breaks = 0;
    const uint64_t trials = 10000;
    for (uint64_t t = 0; t < trials; ++t) {
      uint64_t a = rng.below(4);
      auto wt = wotro::honest_run(toy, a, rng);
      if (wt.accepted && sf.verify(0, a, *wt.c, 0)) breaks++;
    }
    REQUIRE(within_3sigma(breaks, trials, 0.5));  // 2^{-m}
  }
}

TEST_CASE("joint simulator") {
  RngStream rng(13);
  SECTION("single query never fails and stays consistent") {
    wotro::QuantumWotro toy = chernoff::build_binary_toy(2, 1, 1);
    auto rep = joint_sim_consistency_audit(toy, 1, 400, rng);
    REQUIRE(rep.failed_runs == 0);
    REQUIRE(rep.all_consistent);
  }
  SECTION("ten queries at n=8: failure within the q^2 2^{-n} bound") {
    wotro::QuantumWotro toy = chernoff::build_binary_toy(8, 1, 1);
    const uint64_t runs = 400, queries = 10;
    auto rep = joint_sim_consistency_audit(toy, queries, runs, rng);
    REQUIRE(rep.all_consistent);
    REQUIRE(rep.failure_bound >= 100.0 / 256);
    REQUIRE(rep.failure_rate <= rep.failure_bound);
    // birthday oracle: 1 - prod_{i<10} (1 - i/256)
    double miss = 1;
    for (uint64_t i = 0; i < queries; ++i) miss *= 1 - double(i) / 256.0;
    REQUIRE(within_3sigma(rep.failed_runs, runs, 1 - miss));
  }
}
