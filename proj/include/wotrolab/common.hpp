#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wotrolab {

enum class Err {
  NonPrime,
  EvenCharacteristic,
  ReducibleModulus,
  ZeroInverse,
  FieldMismatch,
  TooLarge,
  DimensionMismatch,
  NotHermitian,
  NoConvergence,
  ZeroProbabilityBranch,
  BadParams,
  AlphabetMismatch,
  LengthMismatch,
  DoubleFire,
  TooManyFunctions,
  NotDistinct,
  RankDeficient,
  InfeasibleCertificate,
  SimulationFailed,
  RetryExhausted,
  Exhausted,
  UnknownExperiment,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

inline uint64_t ipow(uint64_t base, uint64_t exp) {
  uint64_t r = 1;
  while (exp--) r *= base;
  return r;
}

// Counter-based stream RNG: output i of a stream is mix(key, i), so any value
// can be recomputed from (seed, path, index) alone.  Streams derive children
// by mixing a salt into the key; experiments hand one child per trial.
class RngStream {
 public:
  explicit RngStream(uint64_t key) : key_(key) {}

  RngStream derive(uint64_t salt) const { return RngStream(mix(key_ ^ 0x9e3779b97f4a7c15ULL, salt)); }

  uint64_t next_u64() { return mix(key_, ctr_++); }

  // uniform in [0,1)
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [0, bound) without modulo bias
  uint64_t below(uint64_t bound) {
    if (bound == 0) fail(Err::BadParams, "RngStream::below: zero bound");
    uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
    for (;;) {
      uint64_t v = next_u64();
      if (v >= threshold) return v % bound;
    }
  }

 private:
  static uint64_t mix(uint64_t key, uint64_t ctr) {
    uint64_t z = key + ctr * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t key_;
  uint64_t ctr_ = 0;
};

struct WilsonInterval {
  double lo = 0, hi = 1;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Wilson score interval for a binomial proportion.
inline WilsonInterval wilson_interval(uint64_t hits, uint64_t trials, double z = 2.5758293035489004 /*99%*/) {
  if (trials == 0) return {0, 1};
  double n = double(trials), ph = double(hits) / n, z2 = z * z;
  double denom = 1 + z2 / n;
  double center = (ph + z2 / (2 * n)) / denom;
  double half = z / denom * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n));
  return {center - half, center + half};
}

// three-sigma band around a binomial mean
inline bool within_3sigma(uint64_t hits, uint64_t trials, double prob) {
  double mean = double(trials) * prob;
  double sigma = std::sqrt(double(trials) * prob * (1 - prob));
  return std::abs(double(hits) - mean) <= 3 * sigma + 1e-12;
}

// chi-squared critical value at p=0.01 (Wilson–Hilferty approximation)
inline double chi2_crit99(int df) {
  double z = 2.3263478740408408;
  double d = double(df);
  double t = 1 - 2 / (9 * d) + z * std::sqrt(2 / (9 * d));
  return d * t * t * t;
}

}  // namespace wotrolab
