#pragma once

// Reproducible random parameters. Only raw mt19937_64 output is used (its
// sequence is fixed by the standard); the std distributions are not.

#include <limits>
#include <random>

#include "mobdisj/mobius_map.hpp"

namespace mobdisj {

/// Uniform integer in [0, n) by rejection.
inline u64 uniform_below(std::mt19937_64& rng, u64 n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "empty range");
  const u64 limit = std::numeric_limits<u64>::max() - std::numeric_limits<u64>::max() % n;
  for (;;) {
    u64 x = rng();
    if (x < limit) return x % n;
  }
}

/// A uniformly random element of SL_2(F_p) with c != 0.
inline MobiusMatrix random_mobius_matrix(PrimeModulus p, std::mt19937_64& rng) {
  const u64 q = p.value();
  FpElem a(p, uniform_below(rng, q));
  FpElem c(p, 1 + uniform_below(rng, q - 1));
  FpElem d(p, uniform_below(rng, q));
  FpElem b = (a * d - FpElem::one(p)) / c;
  return MobiusMatrix::from_sl2(a, b, c, d);
}

struct SampleRequirements {
  /// Reject seeds whose orbit passes through -d/c.
  bool pole_free_orbit = true;
  /// Require spectral_form to succeed (R != 0 and beta != 0).
  bool spectral = true;
  u64 min_period = 1;
  /// Only accept matrices whose characteristic polynomial is irreducible (1),
  /// split (-1), or either (0).
  int root_field = 0;
  int max_attempts = 100000;
};

struct AdmissibleSample {
  MobiusMatrix matrix;
  FpElem seed;
  Trajectory trajectory;
};

/// Draws (A, xi_0) with distinct characteristic roots meeting the requirements.
inline AdmissibleSample sample_admissible(PrimeModulus p, std::mt19937_64& rng, const SampleRequirements& req = {}) {
  for (int attempt = 0; attempt < req.max_attempts; ++attempt) {
    MobiusMatrix A = random_mobius_matrix(p, rng);
    FpElem seed(p, uniform_below(rng, p.value()));
    if (!A.has_distinct_roots()) continue;
    if (req.root_field != 0) {
      const bool irreducible = A.char_extension().irreducible();
      if (irreducible != (req.root_field > 0)) continue;
    }
    Trajectory traj = period(A, seed);
    if (req.pole_free_orbit && traj.pole_hit) continue;
    if (traj.period < req.min_period) continue;
    if (req.spectral) {
      try {
        (void)spectral_form(A, seed);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::DegenerateSpectral) continue;
        throw;
      }
    }
    return {A, seed, traj};
  }
  fail(ErrorCode::RangeGuard, "no admissible sample found for p = " + std::to_string(p.value()));
}

}  // namespace mobdisj
