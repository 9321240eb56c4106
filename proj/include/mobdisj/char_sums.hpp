#pragma once

// Exponential sums along Mobius orbits and the hybrid Weil-type sums they are
// reduced to, each reported next to its reference bound (implied constant 1,
// natural logarithm).
//
// Every orbit sum is stated with respect to the standard character
// psi_1(x) = e(x/p): a frequency f is folded into the coefficients, so
// psi_f(u x + v y) is reported with coefficients (f u, f v).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mobdisj/arith.hpp"
#include "mobdisj/mobius_map.hpp"
#include "mobdisj/rational_function.hpp"
#include "mobdisj/summation.hpp"

namespace mobdisj {

enum class SumKind { Twisted, Correlation, Single, Complete, WeilFp, WeilNormOne };

constexpr std::string_view to_string(SumKind k) {
  switch (k) {
    case SumKind::Twisted: return "twisted";
    case SumKind::Correlation: return "correlation";
    case SumKind::Single: return "single";
    case SumKind::Complete: return "complete";
    case SumKind::WeilFp: return "weil_fp";
    case SumKind::WeilNormOne: return "weil_norm_one";
  }
  return "unknown";
}

struct SumReport {
  SumKind kind{};
  u64 p = 0;
  std::optional<u64> a, b, c, d, xi0;
  std::optional<u64> u, v, k, m, h;
  /// Number of terms N.
  u64 terms = 0;
  cplx value{};
  /// Reference bound; unset for the Mobius-twisted sum.
  std::optional<double> bound;
  /// |value| / bound, or |value| / N when no bound is set.
  double ratio = 0.0;

  double magnitude() const { return std::abs(value); }
};

namespace detail {

inline void set_orbit_fields(SumReport& r, const MobiusMatrix& A, const FpElem& seed) {
  r.p = A.p();
  r.a = A.a().value();
  r.b = A.b().value();
  r.c = A.c().value();
  r.d = A.d().value();
  r.xi0 = seed.value();
}

inline void finish_report(SumReport& r, std::optional<double> bound) {
  r.bound = bound;
  const double mag = r.magnitude();
  if (mag > static_cast<double>(r.terms) * (1 + 1e-12) + 1e-9) {
    throw std::logic_error("sum exceeds its trivial bound N");
  }
  if (bound) {
    r.ratio = *bound > 0 ? mag / *bound : (mag == 0 ? 0.0 : std::numeric_limits<double>::infinity());
  } else {
    r.ratio = r.terms > 0 ? mag / static_cast<double>(r.terms) : 0.0;
  }
}

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline constexpr std::string_view kSumCsvHeader = "sum_kind,p,a,b,c,d,xi0,u,v,k,m,h,N,re,im,abs,bound,ratio";

/// One CSV row (no trailing newline); unset fields are empty.
inline std::string to_csv_row(const SumReport& r) {
  auto opt = [](const std::optional<u64>& x) { return x ? std::to_string(*x) : std::string(); };
  std::string row;
  row += to_string(r.kind);
  for (const std::string& f : {std::to_string(r.p), opt(r.a), opt(r.b), opt(r.c), opt(r.d), opt(r.xi0), opt(r.u),
                               opt(r.v), opt(r.k), opt(r.m), opt(r.h), std::to_string(r.terms),
                               detail::format_double(r.value.real()), detail::format_double(r.value.imag()),
                               detail::format_double(r.magnitude()),
                               r.bound ? detail::format_double(*r.bound) : std::string(),
                               detail::format_double(r.ratio)}) {
    row += ',';
    row += f;
  }
  return row;
}

inline std::string to_csv(std::span<const SumReport> reports) {
  std::string out(kSumCsvHeader);
  out += '\n';
  for (const auto& r : reports) {
    out += to_csv_row(r);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orbit sums

inline constexpr u64 kOrbitTableMax = u64{1} << 28;

/// One scalar period xi_0, ..., xi_{t-1}; xi_n is read as values[n mod t].
class OrbitTable {
 public:
  OrbitTable(const MobiusMatrix& A, const FpElem& seed) : A_(A), seed_(seed) {
    FpElem x = seed;
    do {
      values_.push_back(x.value());
      if (values_.size() > kOrbitTableMax) fail(ErrorCode::RangeGuard, "orbit too long to tabulate");
      x = apply(A, x);
    } while (!(x == seed));
  }

  u64 period() const noexcept { return values_.size(); }
  u64 operator[](u64 n) const { return values_[n % values_.size()]; }
  const MobiusMatrix& matrix() const noexcept { return A_; }
  const FpElem& seed() const noexcept { return seed_; }

 private:
  MobiusMatrix A_;
  FpElem seed_;
  std::vector<u64> values_;
};

/// S(N) = sum_{n <= N} mu(n) psi(xi_n), streamed along the orbit.
inline SumReport twisted_sum(const MobiusMatrix& A, const FpElem& seed, const AdditiveCharacter& psi, u64 N,
                             const MobiusTable& mu, unsigned threads = 1) {
  if (N > mu.limit()) {
    fail(ErrorCode::TableTooSmall, "N = " + std::to_string(N) + " exceeds table limit " + std::to_string(mu.limit()));
  }
  if (psi.trivial()) fail(ErrorCode::TrivialCharacter, "psi must be nontrivial");
  if (!(psi.modulus() == A.modulus())) fail(ErrorCode::ModulusMismatch, "psi and A over different fields");

  const std::size_t batch_chunks = std::max(1u, threads);
  const std::size_t batch = batch_chunks * kSumChunk;
  std::vector<u64> xs(batch);
  std::vector<cplx> partial;
  partial.reserve((N + kSumChunk - 1) / kSumChunk);
  TrajectoryStream stream(A, seed);
  for (u64 start = 1; start <= N; start += batch) {
    const std::size_t len = static_cast<std::size_t>(std::min<u64>(batch, N - start + 1));
    for (std::size_t i = 0; i < len; ++i) xs[i] = stream.next().value();
    const std::size_t chunks = (len + kSumChunk - 1) / kSumChunk;
    std::vector<cplx> local(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
      SumAccumulator acc;
      const std::size_t lo = c * kSumChunk, hi = std::min(len, lo + kSumChunk);
      for (std::size_t i = lo; i < hi; ++i) {
        const int m = mu[start + i];
        if (m != 0) acc.add(static_cast<double>(m) * psi.phase(xs[i]));
      }
      local[c] = acc.value();
    });
    partial.insert(partial.end(), local.begin(), local.end());
  }
  SumAccumulator total;
  for (const auto& z : partial) total.add(z);

  SumReport r;
  r.kind = SumKind::Twisted;
  detail::set_orbit_fields(r, A, seed);
  r.u = psi.frequency();
  r.terms = N;
  r.value = total.value();
  detail::finish_report(r, std::nullopt);
  return r;
}

/// sum_{n = first}^{first + count - 1} psi(u xi_{kn} + v xi_{mn}) e(h n / t), no range checks.
inline cplx twisted_correlation_range(const OrbitTable& orbit, const AdditiveCharacter& psi, u64 u, u64 v, u64 k,
                                      u64 m, u64 h, u64 first, u64 count, unsigned threads = 1) {
  const u64 p = psi.modulus().value();
  const u64 t = orbit.period();
  const u64 fu = detail::mulmod(psi.frequency(), u % p, p);
  const u64 fv = detail::mulmod(psi.frequency(), v % p, p);
  return chunked_sum(
      count,
      [&](std::size_t i) {
        const u64 n = first + i;
        const u64 x = orbit[static_cast<u64>(static_cast<u128>(k) * n % t)];
        const u64 y = orbit[static_cast<u64>(static_cast<u128>(m) * n % t)];
        const u64 arg = detail::addmod(detail::mulmod(fu, x, p), detail::mulmod(fv, y, p), p);
        cplx term = unit_circle(static_cast<i64>(arg), p);
        if (h != 0) term *= unit_circle(static_cast<i64>(static_cast<u128>(h) * (n % t) % t), t);
        return term;
      },
      threads);
}

namespace detail {

inline void check_pair(const AdditiveCharacter& psi, u64 u, u64 v, u64 k, u64 m) {
  const u64 p = psi.modulus().value();
  if (psi.trivial()) fail(ErrorCode::TrivialCharacter, "psi must be nontrivial");
  if (u % p == 0 && v % p == 0) fail(ErrorCode::BothFrequenciesZero, "(u, v) = (0, 0)");
  if (k >= m) fail(ErrorCode::BadIndices, "need 0 <= k < m, got k = " + std::to_string(k) + ", m = " + std::to_string(m));
}

inline double log_bound_factor(u64 p) { return std::sqrt(static_cast<double>(p)) * std::log(static_cast<double>(p)); }

}  // namespace detail

/// Q(u, v; k, m, N) = sum_{n <= N} psi(u xi_{kn} + v xi_{mn}); bound m sqrt(p) log p.
inline SumReport correlation_sum(const OrbitTable& orbit, const AdditiveCharacter& psi, u64 u, u64 v, u64 k, u64 m,
                                 u64 N, unsigned threads = 1) {
  detail::check_pair(psi, u, v, k, m);
  if (N > orbit.period()) fail(ErrorCode::InvalidArgument, "N exceeds the period");
  const u64 p = psi.modulus().value();
  SumReport r;
  r.kind = SumKind::Correlation;
  detail::set_orbit_fields(r, orbit.matrix(), orbit.seed());
  r.u = detail::mulmod(psi.frequency(), u % p, p);
  r.v = detail::mulmod(psi.frequency(), v % p, p);
  r.k = k;
  r.m = m;
  r.terms = N;
  r.value = twisted_correlation_range(orbit, psi, u, v, k, m, 0, 1, N, threads);
  detail::finish_report(r, static_cast<double>(m) * detail::log_bound_factor(p));
  return r;
}

inline SumReport correlation_sum(const MobiusMatrix& A, const FpElem& seed, const AdditiveCharacter& psi, u64 u,
                                 u64 v, u64 k, u64 m, u64 N, unsigned threads = 1) {
  detail::check_pair(psi, u, v, k, m);
  return correlation_sum(OrbitTable(A, seed), psi, u, v, k, m, N, threads);
}

/// R(u; m, N) = sum_{n <= N} psi(u xi_{mn}); bound gcd(m, t) sqrt(p) log p.
inline SumReport single_sum(const OrbitTable& orbit, const AdditiveCharacter& psi, u64 u, u64 m, u64 N,
                            unsigned threads = 1) {
  const u64 p = psi.modulus().value();
  if (psi.trivial()) fail(ErrorCode::TrivialCharacter, "psi must be nontrivial");
  if (u % p == 0) fail(ErrorCode::ZeroFrequency, "u = 0");
  if (m == 0) fail(ErrorCode::InvalidArgument, "m must be positive");
  if (N > orbit.period()) fail(ErrorCode::InvalidArgument, "N exceeds the period");
  SumReport r;
  r.kind = SumKind::Single;
  detail::set_orbit_fields(r, orbit.matrix(), orbit.seed());
  r.u = detail::mulmod(psi.frequency(), u % p, p);
  r.m = m;
  r.terms = N;
  r.value = twisted_correlation_range(orbit, psi, 0, u, 0, m, 0, 1, N, threads);
  const double g = static_cast<double>(std::gcd(m, orbit.period()));
  detail::finish_report(r, g * detail::log_bound_factor(p));
  return r;
}

inline SumReport single_sum(const MobiusMatrix& A, const FpElem& seed, const AdditiveCharacter& psi, u64 u, u64 m,
                            u64 N, unsigned threads = 1) {
  return single_sum(OrbitTable(A, seed), psi, u, m, N, threads);
}

/// Q_h = sum_{n=1}^{t} psi(u xi_{kn} + v xi_{mn}) e(h n / t); bound m sqrt(p).
inline SumReport complete_twisted_sum(const OrbitTable& orbit, const AdditiveCharacter& psi, u64 u, u64 v, u64 k,
                                      u64 m, u64 h, unsigned threads = 1) {
  detail::check_pair(psi, u, v, k, m);
  const u64 t = orbit.period();
  if (h >= t) fail(ErrorCode::InvalidArgument, "need 0 <= h < t");
  const u64 p = psi.modulus().value();
  SumReport r;
  r.kind = SumKind::Complete;
  detail::set_orbit_fields(r, orbit.matrix(), orbit.seed());
  r.u = detail::mulmod(psi.frequency(), u % p, p);
  r.v = detail::mulmod(psi.frequency(), v % p, p);
  r.k = k;
  r.m = m;
  r.h = h;
  r.terms = t;
  r.value = twisted_correlation_range(orbit, psi, u, v, k, m, h, 1, t, threads);
  detail::finish_report(r, static_cast<double>(m) * std::sqrt(static_cast<double>(p)));
  return r;
}

/// Rebuilds sum_{n=1}^{N} F(n) from the complete sums Q_h = sum_{n=1}^{t} F(n) e(hn/t),
/// h = 0..t-1, through F(n) = (1/t) sum_h Q_h e(-hn/t) and the geometric kernel
/// K_h(N) = sum_{n=1}^{N} e(-hn/t).
inline cplx incomplete_from_complete(std::span<const cplx> complete, u64 N) {
  const u64 t = complete.size();
  if (t == 0) fail(ErrorCode::InvalidArgument, "no complete sums");
  SumAccumulator acc;
  acc.add(complete[0] * static_cast<double>(N));
  for (u64 h = 1; h < t; ++h) {
    const cplx w = unit_circle(-static_cast<i64>(h), t);
    const cplx wN = unit_circle(-static_cast<i64>(static_cast<u128>(h) * N % t), t);
    acc.add(complete[h] * (w * (1.0 - wN) / (1.0 - w)));
  }
  return acc.value() / static_cast<double>(t);
}

// ---------------------------------------------------------------------------
// Weil-type sums, by exhaustion

/// sum over x in F_p with g(x) != 0 of psi(h(x)/g(x)) chi(x); bound max(deg g, deg h) sqrt(p).
/// A trivial chi weights every x (0 included) by 1; a nontrivial chi vanishes at 0.
inline SumReport weil_sum_fp(const RationalFunction<FpElem>& rf, const AdditiveCharacter& psi,
                             const MultiplicativeCharacter<FpElem>& chi) {
  const PrimeModulus pm = psi.modulus();
  const u64 p = pm.value();
  if (p > 100'000) fail(ErrorCode::RangeGuard, "exhaustive F_p sum limited to p <= 10^5");
  if (psi.trivial()) fail(ErrorCode::TrivialCharacter, "psi must be nontrivial");
  SumAccumulator acc;
  u64 terms = 0;
  auto term = [&](const FpElem& x, cplx weight) {
    FpElem den = rf.denominator()(x);
    if (den.is_zero()) return;
    acc.add(psi(rf.numerator()(x) / den) * weight);
    ++terms;
  };
  if (chi.trivial()) {
    for (u64 x = 0; x < p; ++x) term(FpElem(pm, x), 1.0);
  } else {
    FpElem x = FpElem::one(pm);
    for (u64 n = 0; n < chi.order(); ++n) {
      term(x, chi.at_index(n));
      x = x * chi.generator();
    }
  }
  SumReport r;
  r.kind = SumKind::WeilFp;
  r.p = p;
  r.u = psi.frequency();
  r.h = chi.multiplier();
  r.terms = terms;
  r.value = acc.value();
  detail::finish_report(r, std::max(0, rf.max_degree()) * std::sqrt(static_cast<double>(p)));
  return r;
}

/// sum over x with Nm(x) = 1 and g(x) != 0 of psi(Tr(h(x)/g(x))) chi(x), chi a
/// character of the norm-one group; bound max(deg g, deg h) sqrt(p).
inline SumReport weil_sum_fp2_norm_one(const RationalFunction<Fp2Elem>& rf, const AdditiveCharacter& psi,
                                       const MultiplicativeCharacter<Fp2Elem>& chi) {
  const QuadExtension& ext = chi.generator().extension();
  const u64 p = ext.p();
  if (!ext.irreducible()) fail(ErrorCode::ReducibleExtension, "norm-one sums need a field extension");
  if (p > 3000) fail(ErrorCode::RangeGuard, "exhaustive norm-one sum limited to p <= 3000");
  if (psi.trivial()) fail(ErrorCode::TrivialCharacter, "psi must be nontrivial");
  if (chi.order() != p + 1) fail(ErrorCode::InvalidArgument, "chi must live on the full norm-one group");
  SumAccumulator acc;
  u64 terms = 0;
  Fp2Elem x = Fp2Elem::one(ext);
  for (u64 n = 0; n < chi.order(); ++n) {
    Fp2Elem den = rf.denominator()(x);
    if (!den.is_zero()) {
      acc.add(psi(trace(rf.numerator()(x) / den)) * chi.at_index(n));
      ++terms;
    }
    x = x * chi.generator();
  }
  SumReport r;
  r.kind = SumKind::WeilNormOne;
  r.p = p;
  r.u = psi.frequency();
  r.h = chi.multiplier();
  r.terms = terms;
  r.value = acc.value();
  detail::finish_report(r, std::max(0, rf.max_degree()) * std::sqrt(static_cast<double>(p)));
  return r;
}

// ---------------------------------------------------------------------------
// Parameter scans

/// One grid point. Fields not used by `kind` are ignored.
struct ScanPoint {
  SumKind kind = SumKind::Correlation;
  MobiusMatrix matrix;
  FpElem seed;
  u64 frequency = 1;
  u64 u = 1, v = 1, k = 0, m = 1, h = 0;
  /// 0 means one full period.
  u64 N = 0;
};

/// One report per point, in input order.
inline std::vector<SumReport> bound_ratio_scan(std::span<const ScanPoint> points, const MobiusTable* mu = nullptr,
                                               unsigned threads = 1) {
  std::vector<SumReport> out;
  out.reserve(points.size());
  for (const ScanPoint& pt : points) {
    AdditiveCharacter psi(pt.matrix.modulus(), pt.frequency);
    if (pt.kind == SumKind::Twisted) {
      if (!mu) fail(ErrorCode::TableTooSmall, "twisted scan point without a mobius table");
      out.push_back(twisted_sum(pt.matrix, pt.seed, psi, pt.N, *mu, threads));
      continue;
    }
    OrbitTable orbit(pt.matrix, pt.seed);
    const u64 N = pt.N == 0 ? orbit.period() : pt.N;
    switch (pt.kind) {
      case SumKind::Correlation: out.push_back(correlation_sum(orbit, psi, pt.u, pt.v, pt.k, pt.m, N, threads)); break;
      case SumKind::Single: out.push_back(single_sum(orbit, psi, pt.u, pt.m, N, threads)); break;
      case SumKind::Complete:
        out.push_back(complete_twisted_sum(orbit, psi, pt.u, pt.v, pt.k, pt.m, pt.h, threads));
        break;
      default: fail(ErrorCode::InvalidArgument, "scan points cannot request Weil sums");
    }
  }
  return out;
}

struct RatioSummary {
  std::size_t count = 0;
  double min = 0, median = 0, q90 = 0, max = 0;
};

/// Nearest-rank quantiles of the report ratios.
inline RatioSummary summarize_ratios(std::span<const SumReport> reports) {
  RatioSummary s;
  s.count = reports.size();
  if (reports.empty()) return s;
  std::vector<double> r;
  r.reserve(reports.size());
  for (const auto& rep : reports) r.push_back(rep.ratio);
  std::sort(r.begin(), r.end());
  auto rank = [&](double q) {
    std::size_t idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(r.size())));
    return r[std::clamp<std::size_t>(idx, 1, r.size()) - 1];
  };
  s.min = r.front();
  s.median = rank(0.5);
  s.q90 = rank(0.9);
  s.max = r.back();
  return s;
}

}  // namespace mobdisj
