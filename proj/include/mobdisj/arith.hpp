#pragma once

// Arithmetic functions and characters: exact-phase unit-circle evaluation, the
// Mobius function (sieved, persisted, and a trial-division oracle), additive
// and multiplicative characters, and interval prime enumeration.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <span>
#include <vector>

#include "mobdisj/group.hpp"
#include "mobdisj/parallel.hpp"

namespace mobdisj {

using cplx = std::complex<double>;

/// exp(2 pi i num/den). The phase is reduced mod 1 in integers and split into
/// a quarter-turn count plus a remainder in [0, 1/4), so quarter points are exact.
inline cplx unit_circle(i64 num, u64 den) {
  if (den == 0) fail(ErrorCode::InvalidArgument, "zero denominator in phase");
  const i128 d = den;
  i128 r = static_cast<i128>(num) % d;
  if (r < 0) r += d;
  const i128 four_r = 4 * r;
  const int quarter = static_cast<int>(four_r / d);
  const i128 rem = four_r - static_cast<i128>(quarter) * d;
  const double angle = (std::numbers::pi / 2) * (static_cast<double>(rem) / static_cast<double>(den));
  const double c = std::cos(angle), s = std::sin(angle);
  switch (quarter) {
    case 0: return {c, s};
    case 1: return {-s, c};
    case 2: return {-c, -s};
    default: return {s, -c};
  }
}

// ---------------------------------------------------------------------------
// Mobius function

inline constexpr u64 kMobiusLimitMax = 1'000'000'000;
inline constexpr u64 kMobiusLinearMax = 100'000'000;

/// mu(1..N) as signed bytes.
class MobiusTable {
 public:
  MobiusTable() = default;
  MobiusTable(u64 limit, std::vector<std::int8_t> values) : limit_(limit), mu_(std::move(values)) {
    if (mu_.size() != limit_ + 1) throw std::logic_error("mobius table size mismatch");
  }

  u64 limit() const noexcept { return limit_; }
  int operator[](u64 n) const { return mu_[n]; }
  int at(u64 n) const {
    if (n == 0 || n > limit_) fail(ErrorCode::TableTooSmall, "mu(" + std::to_string(n) + ") outside table");
    return mu_[n];
  }
  /// Values for n = 1..limit.
  std::span<const std::int8_t> values() const { return {mu_.data() + 1, limit_}; }

 private:
  u64 limit_ = 0;
  std::vector<std::int8_t> mu_;  // index 0 unused
};

namespace detail {

inline void check_mobius_limit(u64 limit) {
  if (limit < 1) fail(ErrorCode::InvalidArgument, "mobius limit must be at least 1");
  if (limit > kMobiusLimitMax) fail(ErrorCode::RangeGuard, "mobius limit above 10^9");
}

inline std::vector<u64> small_primes(u64 bound) {
  std::vector<bool> composite(bound + 1, false);
  std::vector<u64> primes;
  for (u64 i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (u64 j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return primes;
}

inline u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace detail

/// Linear sieve.
inline MobiusTable mobius_sieve_linear(u64 limit) {
  detail::check_mobius_limit(limit);
  std::vector<std::int8_t> mu(limit + 1, 0);
  std::vector<bool> composite(limit + 1, false);
  std::vector<u64> primes;
  mu[1] = 1;
  for (u64 i = 2; i <= limit; ++i) {
    if (!composite[i]) {
      primes.push_back(i);
      mu[i] = -1;
    }
    for (u64 q : primes) {
      const u64 iq = i * q;
      if (iq > limit) break;
      composite[iq] = true;
      if (i % q == 0) {
        mu[iq] = 0;
        break;
      }
      mu[iq] = static_cast<std::int8_t>(-mu[i]);
    }
  }
  return MobiusTable(limit, std::move(mu));
}

/// Segmented sieve: each segment [lo, hi) tracks the sign and the product of
/// small prime factors; a leftover cofactor above sqrt(limit) flips the sign.
inline MobiusTable mobius_sieve_segmented(u64 limit, u64 segment = u64{1} << 22, unsigned threads = 1) {
  detail::check_mobius_limit(limit);
  if (segment == 0) fail(ErrorCode::InvalidArgument, "segment size 0");
  const std::vector<u64> primes = detail::small_primes(detail::isqrt(limit));
  std::vector<std::int8_t> mu(limit + 1, 0);
  const u64 segments = (limit + segment - 1) / segment;
  parallel_for(segments, threads, [&](std::size_t s) {
    const u64 lo = 1 + s * segment;
    const u64 hi = std::min(limit + 1, lo + segment);
    const u64 len = hi - lo;
    std::vector<u64> prod(len, 1);
    std::vector<std::int8_t> sign(len, 1);
    for (u64 q : primes) {
      for (u64 n = (lo + q - 1) / q * q; n < hi; n += q) {
        sign[n - lo] = static_cast<std::int8_t>(-sign[n - lo]);
        prod[n - lo] *= q;
      }
      const u64 q2 = q * q;
      for (u64 n = (lo + q2 - 1) / q2 * q2; n < hi; n += q2) sign[n - lo] = 0;
    }
    for (u64 i = 0; i < len; ++i) {
      std::int8_t v = sign[i];
      if (v != 0 && prod[i] != lo + i) v = static_cast<std::int8_t>(-v);
      mu[lo + i] = v;
    }
  });
  return MobiusTable(limit, std::move(mu));
}

/// Linear sieve up to 10^8, segmented above.
inline MobiusTable mobius_sieve(u64 limit, unsigned threads = 1) {
  detail::check_mobius_limit(limit);
  if (limit <= kMobiusLinearMax) return mobius_sieve_linear(limit);
  return mobius_sieve_segmented(limit, u64{1} << 22, threads);
}

/// Trial division; the independent reference for the sieves.
inline int mobius_oracle(u64 n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "mu(0) undefined");
  int sign = 1;
  for (u64 q = 2; q * q <= n; ++q) {
    if (n % q != 0) continue;
    n /= q;
    if (n % q == 0) return 0;
    sign = -sign;
  }
  if (n > 1) sign = -sign;
  return sign;
}

// Flat file: "MUTB", u32 version, u64 N, then mu(1..N) as signed bytes.
// Integers are little-endian.
inline constexpr char kMobiusMagic[4] = {'M', 'U', 'T', 'B'};
inline constexpr std::uint32_t kMobiusFileVersion = 1;

inline void save_mobius_table(const std::filesystem::path& path, const MobiusTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  unsigned char header[16];
  std::memcpy(header, kMobiusMagic, 4);
  for (int i = 0; i < 4; ++i) header[4 + i] = static_cast<unsigned char>(kMobiusFileVersion >> (8 * i));
  for (int i = 0; i < 8; ++i) header[8 + i] = static_cast<unsigned char>(table.limit() >> (8 * i));
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  auto vals = table.values();
  out.write(reinterpret_cast<const char*>(vals.data()), static_cast<std::streamsize>(vals.size()));
  if (!out) fail(ErrorCode::Io, "short write to " + path.string());
}

inline MobiusTable load_mobius_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  unsigned char header[16];
  if (!in.read(reinterpret_cast<char*>(header), sizeof header)) fail(ErrorCode::Io, "truncated header");
  if (std::memcmp(header, kMobiusMagic, 4) != 0) fail(ErrorCode::Io, "bad magic in " + path.string());
  std::uint32_t version = 0;
  for (int i = 0; i < 4; ++i) version |= std::uint32_t{header[4 + i]} << (8 * i);
  if (version != kMobiusFileVersion) fail(ErrorCode::Io, "unsupported table version " + std::to_string(version));
  u64 limit = 0;
  for (int i = 0; i < 8; ++i) limit |= u64{header[8 + i]} << (8 * i);
  detail::check_mobius_limit(limit);
  std::vector<std::int8_t> mu(limit + 1, 0);
  if (!in.read(reinterpret_cast<char*>(mu.data() + 1), static_cast<std::streamsize>(limit))) {
    fail(ErrorCode::Io, "truncated table body");
  }
  for (u64 n = 1; n <= limit; ++n) {
    if (mu[n] < -1 || mu[n] > 1) fail(ErrorCode::Io, "corrupt value in table");
  }
  return MobiusTable(limit, std::move(mu));
}

// ---------------------------------------------------------------------------
// Primes

/// Ascending primes in the real interval [lo, hi), segmented Eratosthenes.
inline std::vector<u64> primes_in(double lo, double hi) {
  if (!(hi <= 1e9)) fail(ErrorCode::RangeGuard, "prime range above 10^9");
  std::vector<u64> out;
  if (!(hi > lo)) return out;
  u64 first = lo <= 2.0 ? 2 : static_cast<u64>(std::ceil(lo));
  // largest integer strictly below hi
  double fl = std::floor(hi);
  u64 last = fl == hi ? static_cast<u64>(fl) - 1 : static_cast<u64>(fl);
  if (hi <= 2.0 || last < first) return out;
  const std::vector<u64> base = detail::small_primes(detail::isqrt(last));
  constexpr u64 kSegment = u64{1} << 18;
  for (u64 seg_lo = first; seg_lo <= last; seg_lo += kSegment) {
    const u64 seg_hi = std::min(last, seg_lo + kSegment - 1);
    std::vector<bool> composite(seg_hi - seg_lo + 1, false);
    for (u64 q : base) {
      u64 start = std::max(q * q, (seg_lo + q - 1) / q * q);
      for (u64 n = start; n <= seg_hi; n += q) composite[n - seg_lo] = true;
    }
    for (u64 n = seg_lo; n <= seg_hi; ++n) {
      if (n >= 2 && !composite[n - seg_lo]) out.push_back(n);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Characters

/// psi_u(x) = e(u x / p).
class AdditiveCharacter {
 public:
  AdditiveCharacter(PrimeModulus p, u64 frequency) : p_(p), u_(frequency % p.value()) {}

  PrimeModulus modulus() const noexcept { return p_; }
  u64 frequency() const noexcept { return u_; }
  bool trivial() const noexcept { return u_ == 0; }

  cplx operator()(const FpElem& x) const { return phase(x.value()); }
  /// psi at the residue x (already reduced mod p).
  cplx phase(u64 x) const {
    return unit_circle(static_cast<i64>(detail::mulmod(u_, x, p_.value())), p_.value());
  }
  AdditiveCharacter conjugate() const { return {p_, u_ == 0 ? 0 : p_.value() - u_}; }

 private:
  PrimeModulus p_;
  u64 u_;
};

/// chi(g^n) = e(h n / order) on the cyclic group generated by g.
template <class G>
class MultiplicativeCharacter {
 public:
  MultiplicativeCharacter(G generator, u64 order, u64 multiplier)
      : g_(std::move(generator)), order_(order), h_(multiplier % order) {}

  const G& generator() const noexcept { return g_; }
  u64 order() const noexcept { return order_; }
  u64 multiplier() const noexcept { return h_; }
  bool trivial() const noexcept { return h_ == 0; }

  cplx at_index(u64 ind) const {
    return unit_circle(static_cast<i64>(detail::mulmod(h_, ind % order_, order_)), order_);
  }
  cplx operator()(const G& x) const {
    if (h_ == 0) return 1.0;
    return at_index(discrete_index(x, g_, order_));
  }

 private:
  G g_;
  u64 order_;
  u64 h_;
};

/// The character of F_p^* with chi(g) = e(h/(p-1)) for the canonical primitive root g.
inline MultiplicativeCharacter<FpElem> fp_character(PrimeModulus p, u64 multiplier) {
  return {primitive_root(p), p.value() - 1, multiplier};
}

/// The character of the norm-one group with chi(g) = e(h/(p+1)).
inline MultiplicativeCharacter<Fp2Elem> norm_one_character(const QuadExtension& ext, u64 multiplier) {
  return {norm_group_generator(ext), ext.p() + 1, multiplier};
}

}  // namespace mobdisj
