#pragma once

// Prime field arithmetic over 64-bit moduli with 128-bit intermediates.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mobdisj/error.hpp"

namespace mobdisj {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

namespace detail {

constexpr u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

constexpr u64 addmod(u64 a, u64 b, u64 m) {
  u64 s = a + b;  // a, b < m < 2^63, no overflow
  return s >= m ? s - m : s;
}

constexpr u64 submod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + (m - b); }

constexpr u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Deterministic Miller-Rabin; the first twelve prime bases cover all of 64 bits.
constexpr bool is_prime(u64 n) {
  if (n < 2) return false;
  constexpr u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 q : small) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : small) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// Trial-division factorization as (prime, exponent) pairs, ascending.
inline std::vector<std::pair<u64, int>> factorize(u64 n) {
  std::vector<std::pair<u64, int>> out;
  auto take = [&](u64 q) {
    int e = 0;
    while (n % q == 0) {
      n /= q;
      ++e;
    }
    if (e > 0) out.emplace_back(q, e);
  };
  take(2);
  take(3);
  for (u64 q = 5; q <= n / q; q += 6) {
    take(q);
    take(q + 2);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

/// Inverse of a modulo m (gcd(a, m) = 1 assumed) by the extended Euclidean algorithm.
constexpr u64 invmod(u64 a, u64 m) {
  i128 r0 = m, r1 = a % m, s0 = 0, s1 = 1;
  while (r1 != 0) {
    i128 q = r0 / r1;
    i128 t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  if (s0 < 0) s0 += m;
  return static_cast<u64>(s0);
}

}  // namespace detail

/// An odd prime 3 <= p < 2^63, checked at construction.
class PrimeModulus {
 public:
  explicit PrimeModulus(u64 p) : p_(p) {
    if (p < 3 || p >= (u64{1} << 63) || !detail::is_prime(p)) {
      fail(ErrorCode::InvalidModulus, "modulus " + std::to_string(p) + " is not an odd prime below 2^63");
    }
  }

  u64 value() const noexcept { return p_; }
  friend bool operator==(PrimeModulus, PrimeModulus) = default;

 private:
  u64 p_;
};

class FpElem {
 public:
  FpElem(PrimeModulus p, u64 v) : p_(p), v_(v % p.value()) {}

  static FpElem from_signed(PrimeModulus p, i64 v) {
    i64 m = static_cast<i64>(p.value());
    i64 r = v % m;
    return FpElem(p, static_cast<u64>(r < 0 ? r + m : r));
  }
  static FpElem zero(PrimeModulus p) { return FpElem(p, 0); }
  static FpElem one(PrimeModulus p) { return FpElem(p, 1); }

  u64 value() const noexcept { return v_; }
  PrimeModulus modulus() const noexcept { return p_; }
  u64 p() const noexcept { return p_.value(); }
  bool is_zero() const noexcept { return v_ == 0; }

  friend FpElem operator+(const FpElem& a, const FpElem& b) {
    check(a, b);
    return raw(a.p_, detail::addmod(a.v_, b.v_, a.p()));
  }
  friend FpElem operator-(const FpElem& a, const FpElem& b) {
    check(a, b);
    return raw(a.p_, detail::submod(a.v_, b.v_, a.p()));
  }
  friend FpElem operator*(const FpElem& a, const FpElem& b) {
    check(a, b);
    return raw(a.p_, detail::mulmod(a.v_, b.v_, a.p()));
  }
  friend FpElem operator/(const FpElem& a, const FpElem& b);
  FpElem operator-() const { return raw(p_, v_ == 0 ? 0 : p() - v_); }

  FpElem& operator+=(const FpElem& o) { return *this = *this + o; }
  FpElem& operator-=(const FpElem& o) { return *this = *this - o; }
  FpElem& operator*=(const FpElem& o) { return *this = *this * o; }

  friend bool operator==(const FpElem& a, const FpElem& b) { return a.p_ == b.p_ && a.v_ == b.v_; }

  friend std::ostream& operator<<(std::ostream& os, const FpElem& a) { return os << a.v_; }

 private:
  static FpElem raw(PrimeModulus p, u64 v) {
    FpElem e(p, 0);
    e.v_ = v;
    return e;
  }
  static void check(const FpElem& a, const FpElem& b) {
    if (!(a.p_ == b.p_)) {
      fail(ErrorCode::ModulusMismatch,
           "operands mod " + std::to_string(a.p()) + " and " + std::to_string(b.p()));
    }
  }

  PrimeModulus p_;
  u64 v_;
};

inline FpElem inverse(const FpElem& a) {
  if (a.is_zero()) fail(ErrorCode::ZeroInverse, "0 has no inverse mod " + std::to_string(a.p()));
  return FpElem(a.modulus(), detail::invmod(a.value(), a.p()));
}

inline FpElem operator/(const FpElem& a, const FpElem& b) { return a * inverse(b); }

/// Square-and-multiply; 0^0 = 1.
inline FpElem pow(const FpElem& a, u64 n) { return FpElem(a.modulus(), detail::powmod(a.value(), n, a.p())); }

/// Euler's criterion: 1 for nonzero squares, -1 for non-squares, 0 at 0.
inline int legendre(const FpElem& a) {
  if (a.is_zero()) return 0;
  return pow(a, (a.p() - 1) / 2).value() == 1 ? 1 : -1;
}

inline FpElem smallest_nonresidue(PrimeModulus p) {
  for (u64 z = 2;; ++z) {
    FpElem c(p, z);
    if (legendre(c) == -1) return c;
  }
}

/// Tonelli-Shanks. Returns the smaller of the two roots, or nothing for non-residues.
inline std::optional<FpElem> sqrt_mod_p(const FpElem& a) {
  const PrimeModulus pm = a.modulus();
  const u64 p = pm.value();
  if (a.is_zero()) return a;
  if (legendre(a) != 1) return std::nullopt;

  u64 q = p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  FpElem z = smallest_nonresidue(pm);
  FpElem c = pow(z, q);
  FpElem t = pow(a, q);
  FpElem r = pow(a, (q + 1) / 2);
  int m = s;
  while (t.value() != 1) {
    int i = 0;
    FpElem t2 = t;
    while (t2.value() != 1) {
      t2 = t2 * t2;
      ++i;
    }
    FpElem b = c;
    for (int j = 0; j < m - i - 1; ++j) b = b * b;
    m = i;
    c = b * b;
    t = t * c;
    r = r * b;
  }
  FpElem other = -r;
  return other.value() < r.value() ? other : r;
}

}  // namespace mobdisj
