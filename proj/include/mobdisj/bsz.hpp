#pragma once

// Executable form of the prime-block decomposition behind the bilinear
// criterion for orthogonality to bounded multiplicative functions:
//   R_j = (1 + alpha)^j, M_j = N / R_{j+1},
//   P_j = primes in [R_j, R_{j+1}),
//   Q_j = { m <= M_j : m has no prime factor in P_{j_first} u ... u P_j },
//   W_j = sum_{m in Q_j} | sum_{r in P_j} nu(r) F(m r) |,
// evaluated on concrete (nu, F, N, alpha).

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

#include "mobdisj/arith.hpp"
#include "mobdisj/summation.hpp"

namespace mobdisj {

using ArithmeticFunction = std::function<cplx(u64)>;

class BszParams {
 public:
  /// The schedule j0 = log(1/alpha)^3 / alpha, j1 = j0^2, for 0 < alpha < 1/2.
  static BszParams make(double alpha, u64 N) {
    if (!(alpha > 0.0 && alpha < 0.5)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1/2)");
    if (N == 0) fail(ErrorCode::InvalidArgument, "N must be positive");
    const double l = std::log(1.0 / alpha);
    const double j0 = l * l * l / alpha;
    const double j1 = j0 * j0;
    return BszParams(alpha, N, j0, j1, static_cast<i64>(std::ceil(j0)), static_cast<i64>(std::floor(j1)));
  }

  /// Explicit integer j-range with any alpha > 0; for small hand-checkable schedules.
  static BszParams with_range(double alpha, u64 N, i64 j_first, i64 j_last) {
    if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "alpha must be positive");
    if (N == 0) fail(ErrorCode::InvalidArgument, "N must be positive");
    return BszParams(alpha, N, static_cast<double>(j_first), static_cast<double>(j_last), j_first, j_last);
  }

  double alpha() const noexcept { return alpha_; }
  u64 N() const noexcept { return N_; }
  double j0() const noexcept { return j0_; }
  double j1() const noexcept { return j1_; }
  /// Integers in [j0, j1].
  i64 j_first() const noexcept { return j_first_; }
  i64 j_last() const noexcept { return j_last_; }

  double R(i64 j) const { return std::pow(1.0 + alpha_, static_cast<double>(j)); }
  double M(i64 j) const { return static_cast<double>(N_) / R(j + 1); }

 private:
  BszParams(double alpha, u64 N, double j0, double j1, i64 jf, i64 jl)
      : alpha_(alpha), N_(N), j0_(j0), j1_(j1), j_first_(jf), j_last_(jl) {}

  double alpha_;
  u64 N_;
  double j0_, j1_;
  i64 j_first_, j_last_;
};

inline BszParams make_params(double alpha, u64 N) { return BszParams::make(alpha, N); }

struct PrimeBlock {
  i64 j;
  std::vector<u64> primes;
};

/// P_j for j = j_first, ... while R_j <= N. Blocks past that point have
/// M_j < 1, hence empty Q_j, and never contribute to any product m r <= N.
inline std::vector<PrimeBlock> prime_blocks(const BszParams& params) {
  std::vector<PrimeBlock> blocks;
  for (i64 j = params.j_first(); j <= params.j_last(); ++j) {
    const double lo = params.R(j);
    if (lo > static_cast<double>(params.N())) break;
    const double hi = params.R(j + 1);
    if (hi > 1e9) fail(ErrorCode::RangeGuard, "prime block beyond 10^9");
    blocks.push_back({j, primes_in(lo, hi)});
  }
  return blocks;
}

struct SieveSet {
  i64 j;
  std::vector<u64> members;
};

inline constexpr u64 kSieveSetMax = 100'000'000;

/// Q_j for every block, from one smallest-prime-factor sieve up to M_{j_first}:
/// each m records the least block index among its prime factors, and belongs
/// to Q_j iff m <= M_j and that index exceeds j.
inline std::vector<SieveSet> sieve_sets(const BszParams& params, const std::vector<PrimeBlock>& blocks) {
  std::vector<SieveSet> sets;
  if (blocks.empty()) return sets;
  const double mmax_real = params.M(blocks.front().j);
  const u64 mmax = mmax_real < 1.0 ? 0 : static_cast<u64>(std::floor(mmax_real));
  if (mmax > kSieveSetMax) fail(ErrorCode::RangeGuard, "sieve sets beyond 10^8");

  constexpr i64 kNone = std::numeric_limits<i64>::max();
  std::vector<i64> block_of(mmax + 1, kNone);
  for (const auto& b : blocks) {
    for (u64 q : b.primes) {
      if (q <= mmax) block_of[q] = b.j;
    }
  }
  std::vector<u64> spf(mmax + 1, 0);
  for (u64 i = 2; i <= mmax; ++i) {
    if (spf[i] != 0) continue;
    for (u64 j = i; j <= mmax; j += i) {
      if (spf[j] == 0) spf[j] = i;
    }
  }
  std::vector<i64> least(mmax + 1, kNone);
  for (u64 m = 2; m <= mmax; ++m) {
    const u64 q = spf[m];
    least[m] = std::min(block_of[q], least[m / q]);
  }
  sets.reserve(blocks.size());
  for (const auto& b : blocks) {
    SieveSet s{b.j, {}};
    const double Mj = params.M(b.j);
    for (u64 m = 1; m <= mmax && static_cast<double>(m) <= Mj; ++m) {
      if (least[m] > b.j) s.members.push_back(m);
    }
    sets.push_back(std::move(s));
  }
  return sets;
}

struct ProductsReport {
  u64 sum_pq = 0;
  u64 N = 0;
  u64 collisions = 0;
  u64 max_product = 0;
};

/// Checks that the products m r (r in P_j, m in Q_j) are pairwise distinct and
/// at most N, so that sum #P_j #Q_j <= N.
inline ProductsReport distinct_products_check(const std::vector<PrimeBlock>& blocks,
                                              const std::vector<SieveSet>& sets, u64 N) {
  if (blocks.size() != sets.size()) fail(ErrorCode::InvalidArgument, "blocks and sieve sets differ in length");
  ProductsReport rep;
  rep.N = N;
  std::unordered_set<u64> seen;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    rep.sum_pq += blocks[i].primes.size() * sets[i].members.size();
  }
  seen.reserve(rep.sum_pq);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (u64 m : sets[i].members) {
      for (u64 r : blocks[i].primes) {
        const u64 prod = m * r;
        rep.max_product = std::max(rep.max_product, prod);
        if (!seen.insert(prod).second) ++rep.collisions;
      }
    }
  }
  if (rep.collisions > 0) {
    fail(ErrorCode::CollisionFound, std::to_string(rep.collisions) + " repeated products m r");
  }
  if (rep.max_product > N) fail(ErrorCode::CollisionFound, "product m r exceeds N");
  if (rep.sum_pq > N) fail(ErrorCode::CollisionFound, "sum #P_j #Q_j exceeds N");
  return rep;
}

/// W_j for every block, blocks in parallel.
inline std::vector<double> wj_sums(const ArithmeticFunction& nu, const ArithmeticFunction& F,
                                   const std::vector<PrimeBlock>& blocks, const std::vector<SieveSet>& sets,
                                   unsigned threads = 1) {
  if (blocks.size() != sets.size()) fail(ErrorCode::InvalidArgument, "blocks and sieve sets differ in length");
  std::vector<double> w(blocks.size(), 0.0);
  parallel_for(blocks.size(), threads, [&](std::size_t i) {
    const auto& primes = blocks[i].primes;
    std::vector<cplx> nu_r;
    nu_r.reserve(primes.size());
    for (u64 r : primes) nu_r.push_back(nu(r));
    SumAccumulator outer;
    for (u64 m : sets[i].members) {
      SumAccumulator inner;
      for (std::size_t k = 0; k < primes.size(); ++k) inner.add(nu_r[k] * F(m * primes[k]));
      outer.add(std::abs(inner.value()));
    }
    w[i] = outer.value().real();
  });
  return w;
}

struct BszDecomposition {
  BszParams params;
  u64 period = 0;
  std::vector<PrimeBlock> blocks{};
  std::vector<SieveSet> sets{};
  std::vector<double> w{};
  /// sum_{n <= N} nu(n) F(n).
  cplx lhs{};
  double sum_w = 0.0;
  double alpha_n = 0.0;
  /// |lhs| / (sum_w + alpha N).
  double quotient = 0.0;
  u64 sum_p = 0;
  u64 sum_pq = 0;
  u64 collisions = 0;
};

inline BszDecomposition decomposition_report(const ArithmeticFunction& nu, const ArithmeticFunction& F,
                                             const BszParams& params, u64 period, unsigned threads = 1) {
  BszDecomposition out{.params = params};
  out.period = period;
  out.blocks = prime_blocks(params);
  out.sets = sieve_sets(params, out.blocks);
  const ProductsReport prod = distinct_products_check(out.blocks, out.sets, params.N());
  out.sum_pq = prod.sum_pq;
  out.collisions = prod.collisions;
  for (const auto& b : out.blocks) out.sum_p += b.primes.size();
  out.w = wj_sums(nu, F, out.blocks, out.sets, threads);
  SumAccumulator sw;
  for (double x : out.w) sw.add(x);
  out.sum_w = sw.value().real();
  out.lhs = chunked_sum(
      params.N(), [&](std::size_t i) { return nu(i + 1) * F(i + 1); }, threads);
  out.alpha_n = params.alpha() * static_cast<double>(params.N());
  out.quotient = std::abs(out.lhs) / (out.sum_w + out.alpha_n);
  return out;
}

inline BszDecomposition decomposition_report(const ArithmeticFunction& nu, const ArithmeticFunction& F, u64 N,
                                             double alpha, u64 period, unsigned threads = 1) {
  return decomposition_report(nu, F, make_params(alpha, N), period, threads);
}

struct PjCardinality {
  i64 j;
  u64 count;
  double r_over_j;
  /// #P_j * j / R_j.
  double ratio;
};

inline std::vector<PjCardinality> pj_cardinality_check(const BszParams& params,
                                                        const std::vector<PrimeBlock>& blocks) {
  std::vector<PjCardinality> rows;
  rows.reserve(blocks.size());
  for (const auto& b : blocks) {
    const double rj = params.R(b.j);
    const double jd = static_cast<double>(b.j);
    rows.push_back({b.j, b.primes.size(), rj / jd, static_cast<double>(b.primes.size()) * jd / rj});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Parameter conditions, implied constants set to 1, compared in log space.

struct Condition {
  std::string name;
  std::string relation;  // ">=" or "<="
  double log_lhs;
  double log_rhs;
  bool holds;

  double lhs() const { return std::exp(log_lhs); }
  double rhs() const { return std::exp(log_rhs); }
};

struct ConditionReport {
  double alpha, p, t, epsilon;
  double N;
  /// t^-1 p^(1/2) log p.
  double rho;
  /// 3 (log log p)^6 / (epsilon log p): the least alpha the main theorem admits.
  double alpha_min;
  /// True when alpha_min >= 1, i.e. no usable alpha exists at this p.
  bool theorem_range_empty;
  std::vector<Condition> conditions;
};

inline ConditionReport theorem_conditions(double alpha, u64 N, u64 p, u64 t, double epsilon) {
  if (!(alpha > 0.0 && alpha < 1.0) || N == 0 || p < 3 || t == 0 || !(epsilon > 0.0)) {
    fail(ErrorCode::InvalidArgument, "theorem_conditions needs 0 < alpha < 1 and positive N, p, t, epsilon");
  }
  ConditionReport rep{};
  rep.alpha = alpha;
  rep.N = static_cast<double>(N);
  rep.p = static_cast<double>(p);
  rep.t = static_cast<double>(t);
  rep.epsilon = epsilon;
  const double lp = std::log(rep.p);
  const double llp = std::log(lp);
  const double la = std::log(1.0 / alpha);
  const double la6 = std::pow(la, 6);
  rep.rho = std::sqrt(rep.p) * lp / rep.t;
  rep.alpha_min = 3.0 * std::pow(llp, 6) / (epsilon * lp);
  rep.theorem_range_empty = rep.alpha_min >= 1.0;

  auto ge = [](std::string name, double l, double r) { return Condition{std::move(name), ">=", l, r, l >= r}; };
  auto le = [](std::string name, double l, double r) { return Condition{std::move(name), "<=", l, r, l <= r}; };
  rep.conditions.push_back(ge("period_large", std::log(rep.t), (0.5 + epsilon) * lp));
  rep.conditions.push_back(ge("alpha_lower", std::log(alpha), std::log(rep.alpha_min)));
  rep.conditions.push_back(ge("n_lower", std::log(rep.N), 0.5 * lp + 5.0 / alpha * la6 + llp));
  rep.conditions.push_back(le("rho_cond", -2.0 * std::log(alpha) + 2.0 / alpha * la6, -std::log(rep.rho)));
  rep.conditions.push_back(ge("n_cond", std::log(rep.N), std::log(rep.t * rep.rho) + 4.0 / alpha * la6));
  return rep;
}

}  // namespace mobdisj
