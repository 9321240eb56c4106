#include <gtest/gtest.h>

#include <random>

#include "mobdisj/char_sums.hpp"
#include "mobdisj/sampling.hpp"

using namespace mobdisj;

namespace {

// Direct recomputation with plain accumulation and libm phases.
cplx e_of(u64 num, u64 den) {
  const double a = 2 * std::numbers::pi * static_cast<double>(num % den) / static_cast<double>(den);
  return {std::cos(a), std::sin(a)};
}

std::vector<u64> orbit_values(const MobiusMatrix& A, const FpElem& seed, u64 count) {
  std::vector<u64> xs{seed.value()};
  FpElem x = seed;
  for (u64 n = 1; n <= count; ++n) {
    x = apply(A, x);
    xs.push_back(x.value());
  }
  return xs;
}

cplx naive_correlation(const std::vector<u64>& xs, u64 p, u64 u, u64 v, u64 k, u64 m, u64 first, u64 N, u64 h = 0,
                       u64 t = 1) {
  cplx s = 0;
  for (u64 n = first; n < first + N; ++n) {
    s += e_of((u * xs[k * n] + v * xs[m * n]) % p, p) * e_of(h * n % t, t);
  }
  return s;
}

AdmissibleSample sample(u64 p, u64 seed, u64 min_period = 1) {
  std::mt19937_64 rng(seed);
  SampleRequirements req;
  req.min_period = min_period;
  return sample_admissible(PrimeModulus(p), rng, req);
}

}  // namespace

TEST(TwistedSum, SmallCases) {
  AdmissibleSample s = sample(101, 1);
  MobiusTable mu = mobius_sieve(100);
  AdditiveCharacter psi(PrimeModulus(101), 1);
  auto xs = orbit_values(s.matrix, s.seed, 4);

  SumReport r1 = twisted_sum(s.matrix, s.seed, psi, 1, mu);
  EXPECT_LT(std::abs(r1.value - psi.phase(xs[1])), 1e-15);
  EXPECT_NEAR(std::abs(r1.value), 1.0, 1e-15);
  EXPECT_FALSE(r1.bound.has_value());

  SumReport r4 = twisted_sum(s.matrix, s.seed, psi, 4, mu);
  EXPECT_LT(std::abs(r4.value - (psi.phase(xs[1]) - psi.phase(xs[2]) - psi.phase(xs[3]))), 1e-14);
  EXPECT_DOUBLE_EQ(r4.ratio, std::abs(r4.value) / 4);

  try {
    (void)twisted_sum(s.matrix, s.seed, psi, 101, mu);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TableTooSmall);
  }
  EXPECT_THROW((void)twisted_sum(s.matrix, s.seed, AdditiveCharacter(PrimeModulus(101), 0), 3, mu), Error);
}

TEST(TwistedSum, MatchesDirectRecomputationAtP10007) {
  AdmissibleSample s = sample(10007, 77, 160);
  const u64 N = 10'000;
  MobiusTable mu = mobius_sieve(N);
  AdditiveCharacter psi(PrimeModulus(10007), 3);
  auto xs = orbit_values(s.matrix, s.seed, N);
  cplx direct = 0;
  for (u64 n = 1; n <= N; ++n) direct += static_cast<double>(mobius_oracle(n)) * e_of(3 * xs[n], 10007);
  SumReport r = twisted_sum(s.matrix, s.seed, psi, N, mu);
  EXPECT_LT(std::abs(r.value - direct), 1e-9);
}

TEST(TwistedSum, ThreadCountDoesNotChangeBits) {
  AdmissibleSample s = sample(10007, 78, 160);
  const u64 N = 400'000;
  MobiusTable mu = mobius_sieve(N);
  AdditiveCharacter psi(PrimeModulus(10007), 1);
  SumReport a = twisted_sum(s.matrix, s.seed, psi, N, mu, 1);
  for (unsigned th : {2u, 4u, 5u}) {
    SumReport b = twisted_sum(s.matrix, s.seed, psi, N, mu, th);
    EXPECT_EQ(to_csv_row(a), to_csv_row(b));
  }
}

TEST(CorrelationSum, MatchesDirectAndContracts) {
  AdmissibleSample s = sample(1009, 2, 40);
  const u64 t = s.trajectory.period;
  auto xs = orbit_values(s.matrix, s.seed, 8 * t);
  OrbitTable orbit(s.matrix, s.seed);
  ASSERT_EQ(orbit.period(), t);
  PrimeModulus p(1009);
  AdditiveCharacter psi(p, 5);
  for (auto [u, v, k, m] : std::vector<std::array<u64, 4>>{{1, 1, 0, 1}, {2, 7, 1, 3}, {0, 1, 0, 2}, {3, 0, 1, 4}}) {
    SumReport r = correlation_sum(orbit, psi, u, v, k, m, t);
    EXPECT_LT(std::abs(r.value - naive_correlation(xs, 1009, 5 * u, 5 * v, k, m, 1, t)), 1e-9);
    ASSERT_TRUE(r.bound.has_value());
    EXPECT_DOUBLE_EQ(*r.bound, m * std::sqrt(1009.0) * std::log(1009.0));
    EXPECT_LE(std::abs(r.value), static_cast<double>(t));
  }
  // N = 1: one term.
  SumReport one = correlation_sum(orbit, psi, 2, 3, 1, 2, 1);
  EXPECT_NEAR(std::abs(one.value), 1.0, 1e-15);
  // u = 0 collapses to the single sum.
  SumReport q = correlation_sum(orbit, psi, 0, 4, 0, 3, t);
  SumReport rr = single_sum(orbit, psi, 4, 3, t);
  EXPECT_EQ(q.value, rr.value);

  auto code_of = [&](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Config;
  };
  EXPECT_EQ(code_of([&] { correlation_sum(orbit, psi, 0, 0, 0, 1, 1); }), ErrorCode::BothFrequenciesZero);
  EXPECT_EQ(code_of([&] { correlation_sum(orbit, psi, 1, 1, 2, 2, 1); }), ErrorCode::BadIndices);
  EXPECT_EQ(code_of([&] { correlation_sum(orbit, AdditiveCharacter(p, 0), 1, 1, 0, 1, 1); }),
            ErrorCode::TrivialCharacter);
  EXPECT_EQ(code_of([&] { single_sum(orbit, psi, 0, 1, 1); }), ErrorCode::ZeroFrequency);
  EXPECT_EQ(code_of([&] { correlation_sum(orbit, psi, 1, 1, 0, 1, t + 1); }), ErrorCode::InvalidArgument);
}

TEST(CorrelationSum, PeriodicityAndConjugation) {
  AdmissibleSample s = sample(1009, 3, 40);
  OrbitTable orbit(s.matrix, s.seed);
  const u64 t = orbit.period();
  PrimeModulus p(1009);
  for (u64 f : {1ULL, 17ULL}) {
    AdditiveCharacter psi(p, f);
    const cplx base = twisted_correlation_range(orbit, psi, 2, 5, 1, 3, 0, 1, t);
    const cplx shifted = twisted_correlation_range(orbit, psi, 2, 5, 1, 3, 0, t + 1, t);
    EXPECT_LT(std::abs(base - shifted), 1e-9);
    SumReport a = correlation_sum(orbit, psi, 2, 5, 1, 3, t);
    SumReport b = correlation_sum(orbit, psi.conjugate(), 2, 5, 1, 3, t);
    EXPECT_LT(std::abs(b.value - std::conj(a.value)), 1e-12);
  }
}

TEST(SingleSum, DecimationProperties) {
  AdmissibleSample s = sample(1009, 4, 40);
  OrbitTable orbit(s.matrix, s.seed);
  const u64 t = orbit.period();
  PrimeModulus p(1009);
  AdditiveCharacter psi(p, 1);
  // m = t: constant terms psi(u xi_0).
  SumReport r = single_sum(orbit, psi, 3, t, t);
  EXPECT_NEAR(std::abs(r.value), static_cast<double>(t), 1e-9);
  EXPECT_LT(std::abs(r.value - static_cast<double>(t) * psi.phase(3 * s.seed.value() % 1009)), 1e-9);
  ASSERT_TRUE(r.bound.has_value());
  EXPECT_GE(*r.bound, static_cast<double>(t));
  // m and m + t agree.
  for (u64 m : {1ULL, 2ULL, 5ULL}) {
    for (u64 N : {t / 2, t}) {
      EXPECT_EQ(single_sum(orbit, psi, 2, m, N).value, single_sum(orbit, psi, 2, m + t, N).value);
    }
  }
  // m = 1, u = 1 is the plain trajectory sum.
  auto xs = orbit_values(s.matrix, s.seed, t);
  cplx plain = 0;
  for (u64 n = 1; n <= t; ++n) plain += e_of(xs[n], 1009);
  EXPECT_LT(std::abs(single_sum(orbit, psi, 1, 1, t).value - plain), 1e-9);
}

TEST(SingleSum, DecimationAgreesWithPowerMatrix) {
  AdmissibleSample s = sample(1009, 5, 40);
  OrbitTable orbit(s.matrix, s.seed);
  PrimeModulus p(1009);
  AdditiveCharacter psi(p, 2);
  for (u64 m : {2ULL, 3ULL}) {
    MobiusMatrix Am = power_matrix(s.matrix, m);
    cplx direct = 0;
    FpElem x = s.seed;
    for (u64 n = 1; n <= orbit.period(); ++n) {
      x = apply(Am, x);
      direct += e_of(2 * x.value(), 1009);
    }
    EXPECT_LT(std::abs(single_sum(orbit, psi, 1, m, orbit.period()).value - direct), 1e-9);
  }
}

TEST(CompleteSum, HZeroAndCompletionIdentity) {
  std::mt19937_64 rng(9);
  PrimeModulus p(101);
  for (int c = 0; c < 5; ++c) {
    SampleRequirements req;
    req.min_period = 11;
    AdmissibleSample s = sample_admissible(p, rng, req);
    OrbitTable orbit(s.matrix, s.seed);
    const u64 t = orbit.period();
    AdditiveCharacter psi(p, 1 + c);
    const u64 u = 1, v = 3, k = 1, m = 2;
    SumReport h0 = complete_twisted_sum(orbit, psi, u, v, k, m, 0);
    EXPECT_EQ(h0.value, correlation_sum(orbit, psi, u, v, k, m, t).value);
    ASSERT_TRUE(h0.bound.has_value());
    EXPECT_DOUBLE_EQ(*h0.bound, 2 * std::sqrt(101.0));

    auto xs = orbit_values(s.matrix, s.seed, 2 * t + 2);
    std::vector<cplx> complete;
    for (u64 h = 0; h < t; ++h) {
      SumReport q = complete_twisted_sum(orbit, psi, u, v, k, m, h);
      EXPECT_LT(std::abs(q.value - naive_correlation(xs, 101, (1 + c) * u, (1 + c) * v, k, m, 1, t, h, t)), 1e-9);
      complete.push_back(q.value);
    }
    for (u64 N = 1; N <= t; ++N) {
      const cplx direct = correlation_sum(orbit, psi, u, v, k, m, N).value;
      EXPECT_LT(std::abs(incomplete_from_complete(complete, N) - direct), 1e-8) << N;
    }
    EXPECT_THROW((void)complete_twisted_sum(orbit, psi, u, v, k, m, t), Error);
  }
}

TEST(WeilSum, ExactValues) {
  PrimeModulus p(101);
  AdditiveCharacter psi(p, 1);
  auto chi0 = fp_character(p, 0);
  auto X = Polynomial<FpElem>({FpElem(p, 0), FpElem(p, 1)});
  auto X2 = Polynomial<FpElem>({FpElem(p, 0), FpElem(p, 0), FpElem(p, 1)});
  auto one = Polynomial<FpElem>({FpElem(p, 1)});
  // Quadratic Gauss sum: |sum psi(x^2)| = sqrt(p).
  SumReport g = weil_sum_fp(RationalFunction<FpElem>(X2, one), psi, chi0);
  EXPECT_NEAR(std::abs(g.value), std::sqrt(101.0), 1e-10);
  EXPECT_NEAR(g.ratio, 1.0 / 2.0, 1e-10);
  // Linear: full orthogonality.
  SumReport lin = weil_sum_fp(RationalFunction<FpElem>(X, one), psi, chi0);
  EXPECT_LT(std::abs(lin.value), 1e-10);
  // h = 0: count of non-poles of g = X^2 - 1.
  auto g2 = Polynomial<FpElem>({FpElem(p, 100), FpElem(p, 0), FpElem(p, 1)});
  SumReport zero = weil_sum_fp(RationalFunction<FpElem>(Polynomial<FpElem>(), g2), psi, chi0);
  EXPECT_NEAR(zero.value.real(), 99.0, 1e-12);
  EXPECT_EQ(zero.terms, 99u);
}

TEST(WeilSum, AgainstDirectEnumeration) {
  std::mt19937_64 rng(10);
  PrimeModulus p(293);
  for (int c = 0; c < 20; ++c) {
    std::vector<FpElem> hc, gc;
    for (int i = 0; i < 4; ++i) hc.push_back(FpElem(p, uniform_below(rng, 293)));
    for (int i = 0; i < 3; ++i) gc.push_back(FpElem(p, uniform_below(rng, 293)));
    gc.back() = FpElem(p, 1);
    RationalFunction<FpElem> rf{Polynomial<FpElem>(hc), Polynomial<FpElem>(gc)};
    const u64 hmult = c % 3;
    auto chi = fp_character(p, hmult);
    AdditiveCharacter psi(p, 1 + c);
    cplx direct = 0;
    const FpElem g = primitive_root(p);
    for (u64 x = 0; x < 293; ++x) {
      FpElem X(p, x);
      FpElem den = rf.denominator()(X);
      if (den.is_zero()) continue;
      if (hmult != 0 && x == 0) continue;
      cplx w = 1;
      if (hmult != 0) {
        u64 ind = 0;
        while (!(pow(g, ind) == X)) ++ind;
        w = e_of(hmult * ind, 292);
      }
      direct += e_of((1 + c) * (rf.numerator()(X) / den).value(), 293) * w;
    }
    SumReport r = weil_sum_fp(rf, psi, chi);
    EXPECT_LT(std::abs(r.value - direct), 1e-9);
    EXPECT_LE(r.ratio, 10.0);
  }
}

TEST(WeilSum, NormOneGroup) {
  for (u64 pv : {13ULL, 101ULL}) {
    PrimeModulus p(pv);
    QuadExtension ext = QuadExtension::first_irreducible(p);
    auto chi0 = norm_one_character(ext, 0);
    AdditiveCharacter psi(p, 1);
    auto one = Polynomial<Fp2Elem>({Fp2Elem::one(ext)});
    // h = 0: p + 1 norm-one elements, none a pole.
    SumReport cnt = weil_sum_fp2_norm_one(RationalFunction<Fp2Elem>(Polynomial<Fp2Elem>(), one), psi, chi0);
    EXPECT_EQ(cnt.terms, pv + 1);
    EXPECT_NEAR(cnt.value.real(), static_cast<double>(pv + 1), 1e-9);
    EXPECT_NEAR(cnt.value.imag(), 0.0, 1e-9);
    // h/g = X against brute force over all of F_{p^2}.
    auto X = Polynomial<Fp2Elem>({Fp2Elem::zero(ext), Fp2Elem::one(ext)});
    SumReport r = weil_sum_fp2_norm_one(RationalFunction<Fp2Elem>(X, one), psi, chi0);
    cplx direct = 0;
    u64 count = 0;
    for (u64 c0 = 0; c0 < pv; ++c0) {
      for (u64 c1 = 0; c1 < pv; ++c1) {
        Fp2Elem z(ext, c0, c1);
        if (norm(z).value() != 1) continue;
        ++count;
        direct += e_of(trace(z).value(), pv);
      }
    }
    EXPECT_EQ(count, pv + 1);
    EXPECT_LT(std::abs(r.value - direct), 1e-9);
    EXPECT_LE(r.ratio, 10.0);
  }
  EXPECT_THROW((void)weil_sum_fp2_norm_one(
                   RationalFunction<Fp2Elem>(Polynomial<Fp2Elem>(),
                                             Polynomial<Fp2Elem>({Fp2Elem::one(QuadExtension(PrimeModulus(5), 0))})),
                   AdditiveCharacter(PrimeModulus(5), 1), norm_one_character(QuadExtension(PrimeModulus(7), 0), 0)),
               Error);
}

TEST(Scan, GridAndSummary) {
  EXPECT_TRUE(bound_ratio_scan(std::vector<ScanPoint>{}).empty());
  AdmissibleSample s = sample(1009, 6, 40);
  ScanPoint pt{SumKind::Correlation, s.matrix, s.seed, 3, 1, 2, 0, 1, 0, 0};
  auto one = bound_ratio_scan(std::vector<ScanPoint>{pt});
  ASSERT_EQ(one.size(), 1u);
  SumReport direct = correlation_sum(s.matrix, s.seed, AdditiveCharacter(PrimeModulus(1009), 3), 1, 2, 0, 1,
                                     s.trajectory.period);
  EXPECT_EQ(to_csv_row(one[0]), to_csv_row(direct));

  std::vector<SumReport> reps(10);
  for (int i = 0; i < 10; ++i) reps[i].ratio = i + 1;
  RatioSummary sum = summarize_ratios(reps);
  EXPECT_EQ(sum.count, 10u);
  EXPECT_EQ(sum.min, 1);
  EXPECT_EQ(sum.median, 5);
  EXPECT_EQ(sum.q90, 9);
  EXPECT_EQ(sum.max, 10);
}

TEST(Csv, Format) {
  EXPECT_EQ(std::string(kSumCsvHeader), "sum_kind,p,a,b,c,d,xi0,u,v,k,m,h,N,re,im,abs,bound,ratio");
  EXPECT_EQ(to_csv(std::vector<SumReport>{}), std::string(kSumCsvHeader) + "\n");
  EXPECT_EQ(detail::format_double(0.1), "0.10000000000000001");
  AdmissibleSample s = sample(101, 7);
  MobiusTable mu = mobius_sieve(10);
  SumReport r = twisted_sum(s.matrix, s.seed, AdditiveCharacter(PrimeModulus(101), 1), 1, mu);
  const std::string row = to_csv_row(r);
  EXPECT_EQ(row.rfind("twisted,101,", 0), 0u);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 17);
}
