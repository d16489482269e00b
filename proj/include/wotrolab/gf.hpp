#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "wotrolab/common.hpp"

// Exact arithmetic in F_p and F_{p^n}.  Elements are degree-<n polynomials
// over F_p reduced modulo a fixed monic irreducible; they are canonical at
// all times and equality is coefficient equality.  No floating point here.
namespace wotrolab::gf {

using Coeffs = std::vector<int64_t>;

inline bool is_prime(uint64_t p) {
  if (p < 2) return false;
  for (uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

namespace detail {

inline int poly_deg(const Coeffs& a) {
  int d = int(a.size()) - 1;
  while (d >= 0 && a[size_t(d)] == 0) --d;
  return d;
}

inline Coeffs poly_mod(Coeffs a, const Coeffs& f, int64_t p) {
  size_t deg_f = f.size() - 1;
  while (a.size() > deg_f) {
    int64_t c = a.back();
    if (c != 0) {
      size_t off = a.size() - f.size();
      for (size_t i = 0; i < f.size(); ++i) a[off + i] = ((a[off + i] - c * f[i]) % p + p) % p;
    }
    a.pop_back();
  }
  a.resize(deg_f, 0);
  return a;
}

inline Coeffs poly_mul_mod(const Coeffs& a, const Coeffs& b, const Coeffs& f, int64_t p) {
  Coeffs r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  }
  return poly_mod(std::move(r), f, p);
}

inline int64_t inv_mod_p(int64_t a, int64_t p) {
  int64_t r = 1, b = a % p, e = p - 2;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

inline Coeffs poly_gcd(Coeffs a, Coeffs b, int64_t p) {
  while (poly_deg(b) >= 0) {
    int da = poly_deg(a), db = poly_deg(b);
    if (da < db) {
      std::swap(a, b);
      continue;
    }
    int64_t c = a[size_t(da)] * inv_mod_p(b[size_t(db)], p) % p;
    for (int i = 0; i <= db; ++i) {
      size_t ai = size_t(da - db + i);
      a[ai] = ((a[ai] - c * b[size_t(i)]) % p + p) % p;
    }
    if (poly_deg(a) < poly_deg(b)) std::swap(a, b);
  }
  int d = poly_deg(a);
  Coeffs g(a.begin(), a.begin() + d + 1);
  if (d >= 0) {
    int64_t inv = inv_mod_p(g[size_t(d)], p);
    for (auto& c : g) c = c * inv % p;
  }
  return g;
}

// Irreducibility of a monic degree-n polynomial over F_p: a root check for
// n <= 3 (any factorization then has a linear factor), and in general
// gcd(f, x^{p^k} - x) = 1 for all k <= n/2, since every irreducible factor
// of degree k divides x^{p^k} - x.
inline bool is_irreducible(const Coeffs& f, int64_t p) {
  size_t n = f.size() - 1;
  if (n == 0) return false;
  if (n == 1) return true;
  for (int64_t x = 0; x < p; ++x) {
    int64_t v = 0;
    for (size_t i = f.size(); i-- > 0;) v = (v * x + f[i]) % p;
    if (v == 0) return false;
  }
  if (n <= 3) return true;
  Coeffs xp = {0, 1};  // x
  for (size_t k = 1; k <= n / 2; ++k) {
    // xp <- xp^p mod f
    Coeffs acc = {1};
    Coeffs base = xp;
    int64_t e = p;
    while (e) {
      if (e & 1) acc = poly_mul_mod(acc, base, f, p);
      base = poly_mul_mod(base, base, f, p);
      e >>= 1;
    }
    xp = acc;
    Coeffs diff = xp;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = ((diff[1] - 1) % p + p) % p;
    // diff == 0 means f divides x^{p^k} - x outright, so f splits into
    // factors of degree <= k < n
    if (poly_deg(diff) < 0) return false;
    if (poly_deg(poly_gcd(diff, f, p)) != 0) return false;
  }
  return true;
}

struct FieldData {
  int64_t p;
  size_t n;
  Coeffs modulus;  // length n+1, constant term first, monic
};

}  // namespace detail

class FieldElem;

class Field {
 public:
  // The default modulus is the lexicographically smallest monic irreducible
  // (by coefficient list, constant term first), so builds are reproducible.
  static Field make(uint64_t p, size_t n, std::optional<Coeffs> modulus = std::nullopt) {
    if (p == 2) fail(Err::EvenCharacteristic, "field characteristic 2 rejected");
    if (!is_prime(p)) fail(Err::NonPrime, "field characteristic must be prime");
    return make_any(p, n, std::move(modulus));
  }

  // Characteristic-2 fields are carved out for the polynomial-evaluation hash
  // family; the MUB construction and everything downstream of it never sees
  // them.
  static Field binary(size_t n, std::optional<Coeffs> modulus = std::nullopt) {
    return make_any(2, n, std::move(modulus));
  }

  int64_t p() const { return d_->p; }
  size_t n() const { return d_->n; }
  const Coeffs& modulus() const { return d_->modulus; }
  uint64_t order() const { return ipow(uint64_t(d_->p), d_->n); }
  bool same_as(const Field& o) const {
    return d_ == o.d_ || (d_->p == o.d_->p && d_->n == o.d_->n && d_->modulus == o.d_->modulus);
  }

  FieldElem from_index(uint64_t idx) const;
  FieldElem from_coeffs(Coeffs c) const;
  FieldElem zero() const;
  FieldElem one() const;

  // all p^n elements in lexicographic coefficient order (constant term fastest)
  std::vector<FieldElem> enumerate(uint64_t cap = 1000000) const;

 private:
  static Field make_any(uint64_t p, size_t n, std::optional<Coeffs> modulus) {
    if (n < 1) fail(Err::BadParams, "extension degree must be >= 1");
    auto d = std::make_shared<detail::FieldData>();
    d->p = int64_t(p);
    d->n = n;
    if (modulus) {
      Coeffs m = std::move(*modulus);
      if (m.size() != n + 1 || m.back() != 1) fail(Err::BadParams, "modulus must be monic of degree n");
      for (auto& c : m) c = ((c % d->p) + d->p) % d->p;
      m.back() = 1;
      if (!detail::is_irreducible(m, d->p)) fail(Err::ReducibleModulus, "modulus is reducible");
      d->modulus = std::move(m);
    } else {
      uint64_t total = ipow(p, n);
      for (uint64_t idx = 0;; ++idx) {
        if (idx >= total) fail(Err::ReducibleModulus, "no irreducible modulus found");
        Coeffs m(n + 1, 0);
        uint64_t t = idx;
        for (size_t i = 0; i < n; ++i, t /= p) m[i] = int64_t(t % p);
        m[n] = 1;
        if (detail::is_irreducible(m, d->p)) {
          d->modulus = std::move(m);
          break;
        }
      }
    }
    Field f;
    f.d_ = std::move(d);
    return f;
  }

  std::shared_ptr<const detail::FieldData> d_;
};

class FieldElem {
 public:
  FieldElem() = default;
  FieldElem(Field field, Coeffs coeffs) : field_(std::move(field)), coeffs_(std::move(coeffs)) {}

  const Field& field() const { return field_; }
  const Coeffs& coeffs() const { return coeffs_; }
  bool is_zero() const {
    for (auto c : coeffs_)
      if (c) return false;
    return true;
  }

  uint64_t index() const {
    uint64_t idx = 0;
    for (size_t i = coeffs_.size(); i-- > 0;) idx = idx * uint64_t(field_.p()) + uint64_t(coeffs_[i]);
    return idx;
  }

  friend bool operator==(const FieldElem& a, const FieldElem& b) {
    return a.field_.same_as(b.field_) && a.coeffs_ == b.coeffs_;
  }

  friend FieldElem operator+(const FieldElem& a, const FieldElem& b) {
    a.check_same(b);
    Coeffs r(a.coeffs_.size());
    for (size_t i = 0; i < r.size(); ++i) r[i] = (a.coeffs_[i] + b.coeffs_[i]) % a.field_.p();
    return {a.field_, std::move(r)};
  }

  friend FieldElem operator-(const FieldElem& a, const FieldElem& b) { return a + (-b); }

  FieldElem operator-() const {
    Coeffs r(coeffs_.size());
    for (size_t i = 0; i < r.size(); ++i) r[i] = (field_.p() - coeffs_[i]) % field_.p();
    return {field_, std::move(r)};
  }

  friend FieldElem operator*(const FieldElem& a, const FieldElem& b) {
    a.check_same(b);
    return {a.field_, detail::poly_mul_mod(a.coeffs_, b.coeffs_, a.field_.modulus(), a.field_.p())};
  }

  FieldElem pow(uint64_t e) const {
    FieldElem r = field_.one();
    FieldElem b = *this;
    while (e) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

  FieldElem inv() const {
    if (is_zero()) fail(Err::ZeroInverse, "inverse of zero");
    return pow(field_.order() - 2);
  }

  // field trace x + x^p + ... + x^{p^{n-1}}, always in the prime subfield
  int64_t trace() const {
    FieldElem t = field_.zero();
    FieldElem x = *this;
    for (size_t i = 0; i < field_.n(); ++i) {
      t = t + x;
      x = x.pow(uint64_t(field_.p()));
    }
    for (size_t i = 1; i < t.coeffs_.size(); ++i)
      if (t.coeffs_[i] != 0) fail(Err::BadParams, "trace left the prime subfield");
    return t.coeffs_[0];
  }

 private:
  void check_same(const FieldElem& o) const {
    if (!field_.same_as(o.field_)) fail(Err::FieldMismatch, "elements from different fields");
  }

  Field field_;
  Coeffs coeffs_;
};

inline FieldElem Field::from_index(uint64_t idx) const {
  Coeffs c(d_->n);
  for (size_t i = 0; i < d_->n; ++i, idx /= uint64_t(d_->p)) c[i] = int64_t(idx % uint64_t(d_->p));
  return {*this, std::move(c)};
}

inline FieldElem Field::from_coeffs(Coeffs c) const {
  if (c.size() != d_->n) fail(Err::BadParams, "coefficient list has wrong length");
  for (auto& x : c) x = ((x % d_->p) + d_->p) % d_->p;
  return {*this, std::move(c)};
}

inline FieldElem Field::zero() const { return from_index(0); }
inline FieldElem Field::one() const { return from_index(1); }

inline std::vector<FieldElem> Field::enumerate(uint64_t cap) const {
  uint64_t total = order();
  if (total > cap) fail(Err::TooLarge, "field too large to enumerate");
  std::vector<FieldElem> out;
  out.reserve(total);
  for (uint64_t i = 0; i < total; ++i) out.push_back(from_index(i));
  return out;
}

}  // namespace wotrolab::gf
