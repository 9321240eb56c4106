#pragma once

// The quadratic algebra F_p[Z]/(Z^2 - eZ + 1). It is the field F_{p^2} whenever
// e^2 - 4 is a non-residue; otherwise it splits and every element used by the
// library has c1 = 0.

#include <ostream>
#include <utility>

#include "mobdisj/field.hpp"

namespace mobdisj {

class QuadExtension {
 public:
  /// Z^2 - eZ + 1 over F_p. The discriminant e^2 - 4 must be nonzero.
  QuadExtension(PrimeModulus p, u64 e) : p_(p), e_(e % p.value()) {
    if (discriminant().is_zero()) {
      fail(ErrorCode::RepeatedRoot, "Z^2 - " + std::to_string(e_) + "Z + 1 has a repeated root mod " +
                                        std::to_string(p.value()));
    }
  }

  /// Smallest e >= 0 for which Z^2 - eZ + 1 is irreducible over F_p.
  static QuadExtension first_irreducible(PrimeModulus p) {
    for (u64 e = 0;; ++e) {
      FpElem ee(p, e);
      FpElem disc = ee * ee - FpElem(p, 4);
      if (legendre(disc) == -1) return QuadExtension(p, e);
    }
  }

  PrimeModulus modulus() const noexcept { return p_; }
  u64 p() const noexcept { return p_.value(); }
  FpElem trace_coeff() const { return FpElem(p_, e_); }
  u64 e() const noexcept { return e_; }
  FpElem discriminant() const {
    FpElem ee(p_, e_);
    return ee * ee - FpElem(p_, 4);
  }
  bool irreducible() const { return legendre(discriminant()) == -1; }

  friend bool operator==(const QuadExtension&, const QuadExtension&) = default;

 private:
  PrimeModulus p_;
  u64 e_;
};

/// c0 + c1*Z reduced modulo Z^2 - eZ + 1.
class Fp2Elem {
 public:
  Fp2Elem(const QuadExtension& ext, u64 c0, u64 c1) : ext_(ext), c0_(c0 % ext.p()), c1_(c1 % ext.p()) {}
  Fp2Elem(const QuadExtension& ext, const FpElem& base) : Fp2Elem(ext, base.value(), 0) {
    if (!(base.modulus() == ext.modulus())) fail(ErrorCode::ModulusMismatch, "embedding into F_p^2");
  }

  static Fp2Elem zero(const QuadExtension& ext) { return {ext, 0, 0}; }
  static Fp2Elem one(const QuadExtension& ext) { return {ext, 1, 0}; }
  /// The class of Z itself.
  static Fp2Elem generator_z(const QuadExtension& ext) { return {ext, 0, 1}; }

  const QuadExtension& extension() const noexcept { return ext_; }
  PrimeModulus modulus() const noexcept { return ext_.modulus(); }
  u64 p() const noexcept { return ext_.p(); }
  FpElem c0() const { return FpElem(ext_.modulus(), c0_); }
  FpElem c1() const { return FpElem(ext_.modulus(), c1_); }
  bool is_zero() const noexcept { return c0_ == 0 && c1_ == 0; }
  bool in_base_field() const noexcept { return c1_ == 0; }

  friend Fp2Elem operator+(const Fp2Elem& a, const Fp2Elem& b) {
    check(a, b);
    const u64 p = a.p();
    return {a.ext_, detail::addmod(a.c0_, b.c0_, p), detail::addmod(a.c1_, b.c1_, p)};
  }
  friend Fp2Elem operator-(const Fp2Elem& a, const Fp2Elem& b) {
    check(a, b);
    const u64 p = a.p();
    return {a.ext_, detail::submod(a.c0_, b.c0_, p), detail::submod(a.c1_, b.c1_, p)};
  }
  Fp2Elem operator-() const { return zero(ext_) - *this; }

  // Z^2 = eZ - 1
  friend Fp2Elem operator*(const Fp2Elem& a, const Fp2Elem& b) {
    check(a, b);
    using detail::addmod;
    using detail::mulmod;
    using detail::submod;
    const u64 p = a.p();
    const u64 hi = mulmod(a.c1_, b.c1_, p);
    const u64 c0 = submod(mulmod(a.c0_, b.c0_, p), hi, p);
    const u64 c1 = addmod(addmod(mulmod(a.c0_, b.c1_, p), mulmod(a.c1_, b.c0_, p), p),
                          mulmod(a.ext_.e(), hi, p), p);
    return {a.ext_, c0, c1};
  }
  friend Fp2Elem operator/(const Fp2Elem& a, const Fp2Elem& b);

  Fp2Elem& operator+=(const Fp2Elem& o) { return *this = *this + o; }
  Fp2Elem& operator-=(const Fp2Elem& o) { return *this = *this - o; }
  Fp2Elem& operator*=(const Fp2Elem& o) { return *this = *this * o; }

  friend bool operator==(const Fp2Elem& a, const Fp2Elem& b) {
    return a.ext_ == b.ext_ && a.c0_ == b.c0_ && a.c1_ == b.c1_;
  }

  /// The algebra conjugate Z -> e - Z; equals z^p when the extension is a field.
  Fp2Elem conjugate() const {
    const u64 p = this->p();
    return {ext_, detail::addmod(c0_, detail::mulmod(ext_.e(), c1_, p), p), c1_ == 0 ? 0 : p - c1_};
  }

  friend std::ostream& operator<<(std::ostream& os, const Fp2Elem& z) {
    return os << '(' << z.c0_ << " + " << z.c1_ << "Z)";
  }

 private:
  static void check(const Fp2Elem& a, const Fp2Elem& b) {
    if (!(a.ext_ == b.ext_)) fail(ErrorCode::ModulusMismatch, "F_p^2 operands from different extensions");
  }

  QuadExtension ext_;
  u64 c0_;
  u64 c1_;
};

/// Tr(c0 + c1 Z) = 2 c0 + e c1.
inline FpElem trace(const Fp2Elem& z) { return z.c0() + z.c0() + z.extension().trace_coeff() * z.c1(); }

/// Nm(c0 + c1 Z) = c0^2 + e c0 c1 + c1^2.
inline FpElem norm(const Fp2Elem& z) {
  FpElem c0 = z.c0(), c1 = z.c1();
  return c0 * c0 + z.extension().trace_coeff() * c0 * c1 + c1 * c1;
}

inline Fp2Elem inverse(const Fp2Elem& z) {
  FpElem n = norm(z);
  if (n.is_zero()) fail(ErrorCode::ZeroInverse, "element is zero or a zero divisor");
  FpElem ninv = inverse(n);
  Fp2Elem c = z.conjugate();
  return Fp2Elem(z.extension(), (c.c0() * ninv).value(), (c.c1() * ninv).value());
}

inline Fp2Elem operator/(const Fp2Elem& a, const Fp2Elem& b) { return a * inverse(b); }

inline Fp2Elem pow(Fp2Elem base, u64 n) {
  Fp2Elem result = Fp2Elem::one(base.extension());
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

/// Roots (theta, theta^-1) of Z^2 - eZ + 1, theta being the lexicographically
/// smaller one in (c1, c0). For an irreducible polynomial theta is Z itself.
inline std::pair<Fp2Elem, Fp2Elem> char_poly_roots(const QuadExtension& ext) {
  const PrimeModulus pm = ext.modulus();
  auto sq = sqrt_mod_p(ext.discriminant());
  if (!sq) {
    Fp2Elem z = Fp2Elem::generator_z(ext);
    Fp2Elem zinv = z.conjugate();  // e - Z
    return {z, zinv};
  }
  FpElem half = inverse(FpElem(pm, 2));
  FpElem r1 = (ext.trace_coeff() + *sq) * half;
  FpElem r2 = (ext.trace_coeff() - *sq) * half;
  if (r2.value() < r1.value()) std::swap(r1, r2);
  return {Fp2Elem(ext, r1), Fp2Elem(ext, r2)};
}

}  // namespace mobdisj
