#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wotrolab/common.hpp"
#include "wotrolab/wotro.hpp"

// Ideal non-local boxes (u xor v = x and y, uniform marginals) and the coded
// one-message protocol on top of them: the prover feeds a codeword into its
// side of N boxes, the verifier feeds fresh random bits, and a two-universal
// hash of the prover's outputs becomes the challenge.
namespace wotrolab::nlbox {

class NlBoxBank {
 public:
  explicit NlBoxBank(size_t count) : boxes_(count) {}

  size_t size() const { return boxes_.size(); }

  // first toucher gets a fresh uniform bit, the second is forced to satisfy
  // u xor v = x and y; a side may touch each box once
  int fire(int side, size_t index, int input, RngStream& rng) {
    if (index >= boxes_.size()) fail(Err::BadParams, "box index out of range");
    Box& b = boxes_[index];
    std::optional<Fire>& mine = side == 0 ? b.p : b.v;
    std::optional<Fire>& theirs = side == 0 ? b.v : b.p;
    if (mine) fail(Err::DoubleFire, "side already used this box");
    Fire f;
    f.input = input & 1;
    if (theirs)
      f.output = (theirs->output ^ (f.input & theirs->input)) & 1;
    else
      f.output = int(rng.next_u64() & 1);
    mine = f;
    return f.output;
  }

  // box law check over everything fired so far
  bool law_holds() const {
    for (const Box& b : boxes_)
      if (b.p && b.v && ((b.p->output ^ b.v->output) != (b.p->input & b.v->input))) return false;
    return true;
  }

 private:
  struct Fire {
    int input = 0, output = 0;
  };
  struct Box {
    std::optional<Fire> p, v;
  };
  std::vector<Box> boxes_;
};

// ---------------------------------------------------------------------------
// Linear codes over F_2 as bit-row generator matrices.

class LinearCode {
 public:
  LinearCode(size_t n, size_t len, std::vector<uint64_t> generator_rows)
      : n_(n), len_(len), rows_(std::move(generator_rows)) {
    if (rows_.size() != n_ || len_ > 64) fail(Err::BadParams, "generator must have n rows of length <= 64");
  }

  static LinearCode repetition(size_t n, size_t factor) {
    std::vector<uint64_t> rows(n, 0);
    for (size_t i = 0; i < n; ++i)
      for (size_t t = 0; t < factor; ++t) rows[i] |= uint64_t(1) << (i * factor + t);
    return LinearCode(n, n * factor, std::move(rows));
  }

  size_t dimension() const { return n_; }
  size_t length() const { return len_; }

  uint64_t encode(uint64_t a) const {
    uint64_t x = 0;
    for (size_t i = 0; i < n_; ++i)
      if ((a >> i) & 1) x ^= rows_[i];
    return x;
  }

  // exhaustive minimum distance (n <= 14)
  size_t min_distance() const {
    if (n_ > 14) fail(Err::TooLarge, "exhaustive distance check limited to dimension 14");
    size_t best = len_;
    for (uint64_t a = 1; a < (uint64_t(1) << n_); ++a)
      best = std::min(best, size_t(__builtin_popcountll(encode(a))));
    return best;
  }

 private:
  size_t n_, len_;
  std::vector<uint64_t> rows_;
};

// ---------------------------------------------------------------------------
// Two-universal hashing by Toeplitz matrix plus offset; the offset makes the
// preimage-count identity E_r |h_r^{-1}(z)| = 2^{N-m} exact for every z.

class ToeplitzFamily {
 public:
  ToeplitzFamily(size_t in_bits, size_t out_bits) : n_(in_bits), m_(out_bits) {
    if (n_ > 62 || m_ > 62 || m_ > n_) fail(Err::BadParams, "bad Toeplitz shape");
  }

  size_t seed_bits() const { return n_ + m_ - 1 + m_; }  // diagonals + offset
  uint64_t seed_count() const { return uint64_t(1) << seed_bits(); }

  uint64_t apply(uint64_t seed, uint64_t u) const {
    uint64_t diag = seed & ((uint64_t(1) << (n_ + m_ - 1)) - 1);
    uint64_t offset = seed >> (n_ + m_ - 1);
    uint64_t out = 0;
    for (size_t i = 0; i < m_; ++i) {
      // row i of the Toeplitz matrix: bits diag[i], diag[i+1], ...
      uint64_t row = (diag >> i) & ((uint64_t(1) << n_) - 1);
      out |= uint64_t(__builtin_popcountll(row & u) & 1) << i;
    }
    return out ^ offset;
  }

  size_t in_bits() const { return n_; }
  size_t out_bits() const { return m_; }

 private:
  size_t n_, m_;
};

// mean preimage size of z over every seed (exhaustive)
inline double preimage_mean(const ToeplitzFamily& fam, uint64_t z) {
  uint64_t total = 0;
  for (uint64_t seed = 0; seed < fam.seed_count(); ++seed)
    for (uint64_t u = 0; u < (uint64_t(1) << fam.in_bits()); ++u)
      if (fam.apply(seed, u) == z) total++;
  return double(total) / double(fam.seed_count());
}

// ---------------------------------------------------------------------------
// The protocol.

struct NlTranscript {
  uint64_t a = 0;
  bool accepted = false;
  std::optional<uint64_t> prover_c, verifier_c;
};

// `announced_x` lets a dishonest prover claim a codeword other than the one
// it fed into the boxes
inline NlTranscript protocol_run(const LinearCode& code, const ToeplitzFamily& fam, uint64_t seed, uint64_t a,
                                 RngStream& rng, std::optional<uint64_t> announced_x = std::nullopt) {
  size_t nbox = code.length();
  NlBoxBank bank(nbox);
  NlTranscript t;
  t.a = a;
  uint64_t x = code.encode(a);
  uint64_t u = 0;
  for (size_t i = 0; i < nbox; ++i) u |= uint64_t(bank.fire(0, i, int((x >> i) & 1), rng)) << i;
  uint64_t claimed = announced_x.value_or(x);
  // verifier: check the codeword, fire with fresh bits, check the box law
  if (code.encode(a) != claimed) return t;
  uint64_t y = rng.next_u64() & ((uint64_t(1) << nbox) - 1);
  uint64_t v = 0;
  for (size_t i = 0; i < nbox; ++i) v |= uint64_t(bank.fire(1, i, int((y >> i) & 1), rng)) << i;
  if ((u ^ v) != (claimed & y)) return t;
  t.accepted = true;
  t.prover_c = fam.apply(seed, u);
  t.verifier_c = fam.apply(seed, (claimed & y) ^ v);
  return t;
}

struct NlAttackReport {
  uint64_t trials = 0;
  uint64_t accepted = 0;
  uint64_t hits = 0;  // accepted and challenge on target
  double accept_rate = 0;
  double hit_given_accept = 0;
};

// The flip adversary feeds the boxes x-hat differing from the announced
// codeword on |S| positions; each flipped position survives the verifier's
// check with probability 1/2.
inline NlAttackReport flip_attack_audit(const LinearCode& code, const ToeplitzFamily& fam, uint64_t flip_mask,
                                        const std::vector<uint64_t>& target, uint64_t trials, RngStream& rng) {
  size_t nbox = code.length();
  NlAttackReport rep;
  rep.trials = trials;
  for (uint64_t t = 0; t < trials; ++t) {
    uint64_t seed = rng.below(fam.seed_count());
    uint64_t a = rng.below(uint64_t(1) << code.dimension());
    uint64_t x = code.encode(a);
    uint64_t xhat = x ^ flip_mask;
    NlBoxBank bank(nbox);
    uint64_t uhat = 0;
    for (size_t i = 0; i < nbox; ++i) uhat |= uint64_t(bank.fire(0, i, int((xhat >> i) & 1), rng)) << i;
    uint64_t u = uhat;  // best strategy: reuse outputs on agreeing positions
    uint64_t y = rng.next_u64() & ((uint64_t(1) << nbox) - 1);
    uint64_t v = 0;
    for (size_t i = 0; i < nbox; ++i) v |= uint64_t(bank.fire(1, i, int((y >> i) & 1), rng)) << i;
    if ((u ^ v) != (x & y)) continue;
    rep.accepted++;
    if (fam.apply(seed, (x & y) ^ v) == target[a]) rep.hits++;
  }
  rep.accept_rate = trials ? double(rep.accepted) / double(trials) : 0;
  rep.hit_given_accept = rep.accepted ? double(rep.hits) / double(rep.accepted) : 0;
  return rep;
}

}  // namespace wotrolab::nlbox
