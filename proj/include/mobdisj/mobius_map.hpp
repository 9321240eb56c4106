#pragma once

// The Mobius map x -> (ax+b)/(cx+d) over F_p with A in SL_2(F_p) and c != 0.
//
// Two views of an orbit are kept apart:
//  * the scalar view sends the pole -d/c straight to a/c, so the map is a
//    permutation of F_p (this is what `apply` and `TrajectoryStream` produce);
//  * the projective view passes through the point at infinity in between
//    (this is what u_n/v_n and the spectral closed form describe).
// Both agree until the orbit reaches the pole.

#include <cstddef>
#include <optional>
#include <vector>

#include "mobdisj/group.hpp"

namespace mobdisj {

/// A plain 2x2 matrix over F_p, row-major.
struct Mat2 {
  FpElem a, b, c, d;

  FpElem det() const { return a * d - b * c; }
  FpElem trace() const { return a + d; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

inline Mat2 identity_matrix(PrimeModulus p) {
  return {FpElem::one(p), FpElem::zero(p), FpElem::zero(p), FpElem::one(p)};
}

inline Mat2 mat_pow(Mat2 base, u64 k) {
  Mat2 result = identity_matrix(base.a.modulus());
  while (k > 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

/// A in SL_2(F_p) with nonzero lower-left entry.
class MobiusMatrix {
 public:
  /// Validates det = 1 and c != 0 without rescaling.
  static MobiusMatrix from_sl2(const FpElem& a, const FpElem& b, const FpElem& c, const FpElem& d) {
    return MobiusMatrix(Mat2{a, b, c, d});
  }
  static MobiusMatrix from_sl2(PrimeModulus p, u64 a, u64 b, u64 c, u64 d) {
    return from_sl2(FpElem(p, a), FpElem(p, b), FpElem(p, c), FpElem(p, d));
  }
  static MobiusMatrix from_mat(const Mat2& m) { return MobiusMatrix(m); }

  const FpElem& a() const noexcept { return m_.a; }
  const FpElem& b() const noexcept { return m_.b; }
  const FpElem& c() const noexcept { return m_.c; }
  const FpElem& d() const noexcept { return m_.d; }
  const Mat2& mat() const noexcept { return m_; }
  PrimeModulus modulus() const noexcept { return m_.a.modulus(); }
  u64 p() const noexcept { return m_.a.p(); }

  /// e = a + d.
  FpElem trace() const { return m_.trace(); }
  /// -d/c, the point the scalar view redirects.
  FpElem pole() const { return -m_.d / m_.c; }
  /// a/c, the image of the pole (and of infinity).
  FpElem pole_image() const { return m_.a / m_.c; }
  bool has_distinct_roots() const {
    FpElem e = trace();
    return !(e * e - FpElem(modulus(), 4)).is_zero();
  }
  /// F_p[Z]/(Z^2 - eZ + 1); throws RepeatedRoot when e = +-2.
  QuadExtension char_extension() const { return QuadExtension(modulus(), trace().value()); }

  friend bool operator==(const MobiusMatrix&, const MobiusMatrix&) = default;

 private:
  explicit MobiusMatrix(const Mat2& m) : m_(m) {
    if (m.det().is_zero()) fail(ErrorCode::SingularMatrix, "determinant is 0");
    if (m.det().value() != 1) fail(ErrorCode::InvalidArgument, "determinant is not 1");
    if (m.c.is_zero()) fail(ErrorCode::LinearMap, "lower-left entry c is 0");
  }

  Mat2 m_;
};

/// Scales (a,b,c,d) by lambda with lambda^2 = det^-1, lambda the smaller root.
inline MobiusMatrix normalize_to_sl2(const FpElem& a, const FpElem& b, const FpElem& c, const FpElem& d) {
  Mat2 m{a, b, c, d};
  FpElem det = m.det();
  if (det.is_zero()) fail(ErrorCode::SingularMatrix, "determinant is 0");
  if (c.is_zero()) fail(ErrorCode::LinearMap, "lower-left entry c is 0");
  if (det.value() == 1) return MobiusMatrix::from_mat(m);
  auto lambda = sqrt_mod_p(inverse(det));
  if (!lambda) {
    fail(ErrorCode::NonSquareDeterminant,
         "det^-1 = " + std::to_string(inverse(det).value()) + " is not a square mod " + std::to_string(a.p()));
  }
  return MobiusMatrix::from_sl2(*lambda * a, *lambda * b, *lambda * c, *lambda * d);
}

/// The extended map: (ax+b)/(cx+d), and a/c at the pole x = -d/c.
inline FpElem apply(const MobiusMatrix& A, const FpElem& x) {
  FpElem den = A.c() * x + A.d();
  if (den.is_zero()) return A.pole_image();
  return (A.a() * x + A.b()) / den;
}

/// A point of P^1(F_p); nullopt is infinity.
using ProjectivePoint = std::optional<FpElem>;

inline ProjectivePoint apply_projective(const MobiusMatrix& A, const ProjectivePoint& x) {
  if (!x) return A.pole_image();
  FpElem den = A.c() * *x + A.d();
  if (den.is_zero()) return std::nullopt;
  return (A.a() * *x + A.b()) / den;
}

/// Streams xi_1, xi_2, ... of the scalar view.
class TrajectoryStream {
 public:
  TrajectoryStream(const MobiusMatrix& A, const FpElem& seed) : A_(A), cur_(seed) {}

  FpElem next() {
    cur_ = apply(A_, cur_);
    return cur_;
  }
  const FpElem& current() const noexcept { return cur_; }

 private:
  MobiusMatrix A_;
  FpElem cur_;
};

/// [xi_1, ..., xi_N].
inline std::vector<FpElem> trajectory(const MobiusMatrix& A, const FpElem& seed, std::size_t count) {
  if (count == 0) fail(ErrorCode::InvalidArgument, "trajectory length must be positive");
  std::vector<FpElem> out;
  out.reserve(count);
  TrajectoryStream s(A, seed);
  for (std::size_t i = 0; i < count; ++i) out.push_back(s.next());
  return out;
}

/// ord(theta^2) for a root theta of the characteristic polynomial.
inline u64 theta_squared_order(const MobiusMatrix& A) {
  auto [theta, theta_inv] = char_poly_roots(A.char_extension());
  return mult_order(theta * theta);
}

struct Trajectory {
  MobiusMatrix matrix;
  FpElem seed;
  /// Least t >= 1 with xi_t = xi_0 in the scalar view.
  u64 period;
  /// Orbit length on P^1; period + 1 when the orbit passes through the pole.
  u64 projective_period;
  /// Index n in [0, period) with xi_n = -d/c, if any.
  std::optional<u64> pole_hit;
  u64 theta_sq_order;
};

/// Period of the orbit of seed. Requires distinct characteristic roots.
inline Trajectory period(const MobiusMatrix& A, const FpElem& seed) {
  if (!A.has_distinct_roots()) {
    fail(ErrorCode::RepeatedRoot, "trace e = " + std::to_string(A.trace().value()) + " gives a repeated root");
  }
  const u64 ord = theta_squared_order(A);
  const FpElem pole = A.pole();
  std::optional<u64> pole_hit;
  FpElem x = seed;
  u64 t = 0;
  // The scalar period never exceeds ord(theta^2).
  do {
    if (!pole_hit && x == pole) pole_hit = t;
    x = apply(A, x);
    ++t;
    if (t > ord) fail(ErrorCode::InvalidArgument, "orbit longer than ord(theta^2); inconsistent matrix");
  } while (!(x == seed));
  return Trajectory{A, seed, t, pole_hit ? t + 1 : t, pole_hit, ord};
}

/// One step of the matrix rule (u, v) -> A (u, v).
struct RecurrenceTerm {
  u64 n;
  FpElem u;
  FpElem v;
  bool pole() const noexcept { return v.is_zero(); }
};

/// (u_n, v_n) with (u_0, v_0) = (xi_0, 1), advanced by the matrix rule, so
/// u_n / v_n is the projective orbit of xi_0. A term with v_n = 0 is the point
/// at infinity.
class RecurrenceStream {
 public:
  RecurrenceStream(const MobiusMatrix& A, const FpElem& seed)
      : A_(A), term_{0, seed, FpElem::one(seed.modulus())} {}

  const RecurrenceTerm& current() const noexcept { return term_; }

  const RecurrenceTerm& next() {
    FpElem u = A_.a() * term_.u + A_.b() * term_.v;
    FpElem v = A_.c() * term_.u + A_.d() * term_.v;
    term_ = {term_.n + 1, u, v};
    return term_;
  }

 private:
  MobiusMatrix A_;
  RecurrenceTerm term_;
};

/// xi_n = alpha + beta / (theta^(2n) + gamma).
struct SpectralForm {
  Fp2Elem alpha;
  Fp2Elem beta;
  Fp2Elem gamma;
  Fp2Elem theta;
};

inline FpElem eval_spectral(const SpectralForm& form, u64 n) {
  Fp2Elem den = pow(form.theta, 2 * n) + form.gamma;
  if (den.is_zero()) fail(ErrorCode::SpectralPole, "theta^(2n) = -gamma at n = " + std::to_string(n));
  Fp2Elem value = form.alpha + form.beta / den;
  if (!value.in_base_field()) {
    throw std::logic_error("spectral value left F_p at n = " + std::to_string(n));
  }
  return value.c0();
}

/// Writes u_n = P theta^n + Q theta^-n and v_n = R theta^n + S theta^-n, solving
/// both 2x2 systems from the first two terms, then alpha = P/R, gamma = S/R and
/// beta = (QR - PS)/R^2.
inline SpectralForm spectral_form(const MobiusMatrix& A, const FpElem& seed) {
  const QuadExtension ext = A.char_extension();
  auto [theta, theta_inv] = char_poly_roots(ext);

  RecurrenceStream rec(A, seed);
  const RecurrenceTerm t0 = rec.current();
  const RecurrenceTerm t1 = rec.next();

  // [1 1; theta theta^-1] (X, Y)^T = (w0, w1)^T
  const Fp2Elem det = theta_inv - theta;
  auto solve = [&](const FpElem& w0, const FpElem& w1) {
    Fp2Elem x0(ext, w0), x1(ext, w1);
    return std::pair{(x0 * theta_inv - x1) / det, (x1 - x0 * theta) / det};
  };
  auto [P, Q] = solve(t0.u, t1.u);
  auto [R, S] = solve(t0.v, t1.v);
  if (R.is_zero()) fail(ErrorCode::DegenerateSpectral, "v_n has no theta^n component (R = 0)");
  SpectralForm form{P / R, (Q * R - P * S) / (R * R), S / R, theta};
  if (form.beta.is_zero()) fail(ErrorCode::DegenerateSpectral, "beta = 0: seed is a fixed point");

  RecurrenceStream check(A, seed);
  for (u64 n = 0; n <= 2; ++n) {
    const RecurrenceTerm& term = n == 0 ? check.current() : check.next();
    Fp2Elem den = pow(theta, 2 * n) + form.gamma;
    if (term.pole() != den.is_zero()) throw std::logic_error("spectral pole disagrees with u_n/v_n");
    if (!term.pole() && !(eval_spectral(form, n) == term.u / term.v)) {
      throw std::logic_error("spectral form does not reproduce u_n/v_n");
    }
  }
  return form;
}

/// A^k. Throws LinearPower when the result has zero lower-left entry.
inline MobiusMatrix power_matrix(const MobiusMatrix& A, u64 k) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "power must be positive");
  Mat2 m = mat_pow(A.mat(), k);
  if (m.c.is_zero()) fail(ErrorCode::LinearPower, "A^" + std::to_string(k) + " is an affine map");
  return MobiusMatrix::from_mat(m);
}

struct EquivalenceResult {
  u64 checked = 0;
  u64 mismatches = 0;
  std::optional<u64> first_mismatch;
  /// Index of the first pole event that ended the comparison window early.
  std::optional<u64> stopped_at;
};

/// Compares the scalar orbit, u_n/v_n and the spectral form for n = 0..window,
/// stopping before the first n at which the orbit sits on the pole or the
/// projective orbit is at infinity.
inline EquivalenceResult check_three_way(const MobiusMatrix& A, const FpElem& seed, u64 window) {
  EquivalenceResult res;
  const SpectralForm form = spectral_form(A, seed);
  const FpElem pole = A.pole();
  RecurrenceStream rec(A, seed);
  FpElem x = seed;
  for (u64 n = 0; n <= window; ++n) {
    const RecurrenceTerm& term = n == 0 ? rec.current() : rec.next();
    if (n > 0) x = apply(A, x);
    if (term.pole()) {
      res.stopped_at = n;
      break;
    }
    FpElem ratio = term.u / term.v;
    FpElem spec = eval_spectral(form, n);
    ++res.checked;
    if (!(ratio == x) || !(spec == x)) {
      ++res.mismatches;
      if (!res.first_mismatch) res.first_mismatch = n;
    }
    if (x == pole) {
      res.stopped_at = n;
      break;
    }
  }
  return res;
}

}  // namespace mobdisj
