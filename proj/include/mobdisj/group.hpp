#pragma once

// Cyclic-group utilities over F_p^* and F_{p^2}^*: element orders, canonical
// generators and baby-step/giant-step discrete indices.

#include <cmath>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mobdisj/fp2.hpp"

namespace mobdisj {

using Factorization = std::vector<std::pair<u64, int>>;

namespace detail {

inline Factorization merge(const Factorization& a, const Factorization& b) {
  std::map<u64, int> acc;
  for (auto [q, e] : a) acc[q] += e;
  for (auto [q, e] : b) acc[q] += e;
  return {acc.begin(), acc.end()};
}

template <class G>
u64 order_dividing(const G& z, u64 exponent, const Factorization& fac) {
  u64 order = exponent;
  for (auto [q, e] : fac) {
    for (int i = 0; i < e; ++i) {
      if (order % q != 0 || !(pow(z, order / q) == pow(z, 0))) break;
      order /= q;
    }
  }
  return order;
}

}  // namespace detail

/// Exponent of the ambient group holding z, together with its factorization.
struct AmbientGroup {
  u64 order;
  Factorization factors;
};

inline AmbientGroup ambient_group(const FpElem& z) {
  const u64 n = z.p() - 1;
  return {n, detail::factorize(n)};
}

/// p+1 for norm-one elements of a field extension, p^2-1 for other field units,
/// p-1 for units of a split algebra.
inline AmbientGroup ambient_group(const Fp2Elem& z) {
  const u64 p = z.p();
  if (!z.extension().irreducible()) return {p - 1, detail::factorize(p - 1)};
  if (norm(z).value() == 1) return {p + 1, detail::factorize(p + 1)};
  if (p >= (u64{1} << 32)) fail(ErrorCode::RangeGuard, "p^2 - 1 does not fit in 64 bits");
  return {(p - 1) * (p + 1), detail::merge(detail::factorize(p - 1), detail::factorize(p + 1))};
}

inline u64 mult_order(const FpElem& z) {
  if (z.is_zero()) fail(ErrorCode::ZeroElement, "order of 0");
  auto g = ambient_group(z);
  return detail::order_dividing(z, g.order, g.factors);
}

inline u64 mult_order(const Fp2Elem& z) {
  if (norm(z).is_zero()) fail(ErrorCode::ZeroElement, "order of a non-unit");
  auto g = ambient_group(z);
  return detail::order_dividing(z, g.order, g.factors);
}

/// Smallest g >= 2 generating F_p^*.
inline FpElem primitive_root(PrimeModulus p) {
  const u64 n = p.value() - 1;
  const auto fac = detail::factorize(n);
  for (u64 g = 2;; ++g) {
    FpElem cand(p, g);
    bool ok = true;
    for (auto [q, e] : fac) {
      if (pow(cand, n / q).value() == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return cand;
  }
}

/// A generator of the norm-one subgroup (order p+1) of F_{p^2}^*. Candidates
/// c0 + c1 Z are scanned with c1 = 1, 2, ... outer and c0 = 0, 1, ... inner and
/// mapped into the subgroup by z -> z^(p-1).
inline Fp2Elem norm_group_generator(const QuadExtension& ext) {
  if (!ext.irreducible()) fail(ErrorCode::ReducibleExtension, "Z^2 - eZ + 1 splits over F_p");
  const u64 p = ext.p();
  const u64 n = p + 1;
  const auto fac = detail::factorize(n);
  const Fp2Elem one = Fp2Elem::one(ext);
  for (u64 c1 = 1; c1 < p; ++c1) {
    for (u64 c0 = 0; c0 < p; ++c0) {
      Fp2Elem w = pow(Fp2Elem(ext, c0, c1), p - 1);
      bool ok = true;
      for (auto [q, e] : fac) {
        if (pow(w, n / q) == one) {
          ok = false;
          break;
        }
      }
      if (ok) return w;
    }
  }
  fail(ErrorCode::ReducibleExtension, "no generator found");
}

inline u64 group_key(const FpElem& x) { return x.value(); }
inline u64 group_key(const Fp2Elem& x) {
  return static_cast<u64>(static_cast<u128>(x.c1().value()) * x.p() + x.c0().value());
}

/// Baby-step/giant-step: the unique ind in [0, order) with g^ind = x.
template <class G>
u64 discrete_index(const G& x, const G& g, u64 order) {
  if (order == 0) fail(ErrorCode::InvalidArgument, "group order 0");
  const u64 m = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(order))));
  std::unordered_map<u64, u64> baby;
  baby.reserve(m * 2);
  G cur = pow(g, 0);
  for (u64 j = 0; j < m; ++j) {
    baby.emplace(group_key(cur), j);
    cur = cur * g;
  }
  const G giant = inverse(pow(g, m));
  G gamma = x;
  for (u64 i = 0; i <= m; ++i) {
    if (auto it = baby.find(group_key(gamma)); it != baby.end()) {
      u64 ind = i * m + it->second;
      if (ind < order) return ind;
    }
    gamma = gamma * giant;
  }
  fail(ErrorCode::NotInGroup, "element is not a power of the generator");
}

}  // namespace mobdisj
