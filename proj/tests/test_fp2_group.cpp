#include <gtest/gtest.h>

#include <random>
#include <set>

#include "mobdisj/group.hpp"
#include "mobdisj/sampling.hpp"

using namespace mobdisj;

namespace {

Fp2Elem random_fp2(const QuadExtension& ext, std::mt19937_64& rng) {
  return Fp2Elem(ext, uniform_below(rng, ext.p()), uniform_below(rng, ext.p()));
}

// Order by brute-force multiplication.
template <class G>
u64 naive_order(const G& z) {
  G x = z;
  u64 n = 1;
  while (!(x == pow(z, 0))) {
    x = x * z;
    ++n;
  }
  return n;
}

}  // namespace

TEST(Fp2, ReductionRule) {
  QuadExtension ext(PrimeModulus(5), 0);
  Fp2Elem z = Fp2Elem::generator_z(ext);
  EXPECT_EQ(z * z, Fp2Elem(ext, 4, 0));
  EXPECT_EQ(z * inverse(z), Fp2Elem::one(ext));
}

TEST(Fp2, BaseFieldEmbedding) {
  PrimeModulus p(11);
  QuadExtension ext(p, 3);
  for (u64 a = 0; a < 11; ++a) {
    for (u64 b = 1; b < 11; ++b) {
      FpElem x(p, a), y(p, b);
      Fp2Elem X(ext, x), Y(ext, y);
      EXPECT_EQ(X + Y, Fp2Elem(ext, x + y));
      EXPECT_EQ(X - Y, Fp2Elem(ext, x - y));
      EXPECT_EQ(X * Y, Fp2Elem(ext, x * y));
      EXPECT_EQ(X / Y, Fp2Elem(ext, x / y));
      EXPECT_EQ(trace(X), x + x);
      EXPECT_EQ(norm(X), x * x);
    }
  }
}

TEST(Fp2, TraceAndNormFormulasAgainstFrobenius) {
  std::mt19937_64 rng(11);
  for (u64 pv : {7ULL, 101ULL, 1009ULL}) {
    PrimeModulus p(pv);
    for (u64 e : {0ULL, 1ULL, 3ULL, 5ULL}) {
      if ((e * e + pv - 4) % pv == 0) continue;
      QuadExtension ext(p, e);
      for (int i = 0; i < 50; ++i) {
        Fp2Elem z = random_fp2(ext, rng);
        Fp2Elem zp = pow(z, pv);
        // In the field case Tr(z) = z + z^p and Nm(z) = z z^p, both in F_p.
        // In the split algebra Frobenius is the identity.
        if (!ext.irreducible()) {
          EXPECT_EQ(zp, z);
        } else {
          EXPECT_TRUE((z + zp).in_base_field());
          EXPECT_TRUE((z * zp).in_base_field());
          EXPECT_EQ(zp, z.conjugate());
          EXPECT_EQ((z + zp).c0(), trace(z));
          EXPECT_EQ((z * zp).c0(), norm(z));
          EXPECT_EQ(pow(z, pv * pv), z);
        }
        FpElem c0 = z.c0(), c1 = z.c1(), ee(p, e);
        EXPECT_EQ(trace(z), c0 + c0 + ee * c1);
        EXPECT_EQ(norm(z), c0 * c0 + ee * c0 * c1 + c1 * c1);
        EXPECT_EQ(z * z.conjugate(), Fp2Elem(ext, norm(z)));
      }
    }
  }
}

TEST(Fp2, TraceLinearNormMultiplicative) {
  std::mt19937_64 rng(12);
  PrimeModulus p(1009);
  QuadExtension ext = QuadExtension::first_irreducible(p);
  for (int i = 0; i < 500; ++i) {
    Fp2Elem z = random_fp2(ext, rng), w = random_fp2(ext, rng);
    FpElem s(p, uniform_below(rng, 1009));
    EXPECT_EQ(trace(z + w), trace(z) + trace(w));
    EXPECT_EQ(trace(Fp2Elem(ext, s) * z), s * trace(z));
    EXPECT_EQ(norm(z * w), norm(z) * norm(w));
  }
}

TEST(Fp2, RootsOfCharacteristicPolynomial) {
  PrimeModulus p5(5);
  auto [theta, inv] = char_poly_roots(QuadExtension(p5, 0));
  EXPECT_EQ(theta, Fp2Elem(QuadExtension(p5, 0), 2, 0));
  EXPECT_EQ(inv, Fp2Elem(QuadExtension(p5, 0), 3, 0));
  EXPECT_TRUE((theta + inv).is_zero());
  EXPECT_EQ(theta * inv, Fp2Elem::one(QuadExtension(p5, 0)));

  // Field case: Tr(theta) = e and Nm(theta) = 1.
  for (u64 e : {0ULL, 3ULL, 4ULL}) {
    QuadExtension ext7(PrimeModulus(7), e);
    ASSERT_TRUE(ext7.irreducible());
    auto [t7, t7inv] = char_poly_roots(ext7);
    EXPECT_EQ(trace(t7).value(), e);
    EXPECT_EQ(norm(t7).value(), 1u);
  }

  for (u64 pv : {7ULL, 13ULL, 101ULL}) {
    PrimeModulus p(pv);
    for (u64 e = 0; e < pv; ++e) {
      if (e == 2 || e == pv - 2) {
        try {
          QuadExtension bad(p, e);
          FAIL();
        } catch (const Error& err) {
          EXPECT_EQ(err.code(), ErrorCode::RepeatedRoot);
        }
        continue;
      }
      QuadExtension ext(p, e);
      auto [t, ti] = char_poly_roots(ext);
      Fp2Elem ee(ext, e, 0), one = Fp2Elem::one(ext);
      EXPECT_TRUE((t * t - ee * t + one).is_zero());
      EXPECT_TRUE((ti * ti - ee * ti + one).is_zero());
      EXPECT_EQ(t * ti, one);
      EXPECT_EQ(t + ti, ee);
      EXPECT_EQ(t.in_base_field(), !ext.irreducible());
      // Lexicographic tie-break on (c1, c0).
      EXPECT_LT(std::pair(t.c1().value(), t.c0().value()), std::pair(ti.c1().value(), ti.c0().value()));
    }
  }
}

TEST(Group, Orders) {
  PrimeModulus p7(7);
  EXPECT_EQ(mult_order(FpElem(p7, 1)), 1u);
  EXPECT_EQ(mult_order(FpElem(p7, 6)), 2u);
  EXPECT_EQ(mult_order(FpElem(p7, 3)), 6u);
  EXPECT_EQ(mult_order(FpElem(p7, 2)), 3u);
  EXPECT_THROW((void)mult_order(FpElem::zero(p7)), Error);

  for (u64 pv : {13ULL, 101ULL}) {
    PrimeModulus p(pv);
    for (u64 a = 1; a < pv; ++a) {
      const u64 o = mult_order(FpElem(p, a));
      EXPECT_EQ(o, naive_order(FpElem(p, a)));
      EXPECT_EQ((pv - 1) % o, 0u);
    }
    for (u64 e : {0ULL, 1ULL, 3ULL}) {
      QuadExtension ext(p, e);
      for (u64 c0 = 0; c0 < pv; c0 += 3) {
        for (u64 c1 = 0; c1 < pv; c1 += 5) {
          Fp2Elem z(ext, c0, c1);
          if (norm(z).is_zero()) continue;
          EXPECT_EQ(mult_order(z), naive_order(z)) << pv << " " << e << " " << c0 << " " << c1;
        }
      }
    }
  }
}

TEST(Group, PrimitiveRoot) {
  EXPECT_EQ(primitive_root(PrimeModulus(7)).value(), 3u);
  EXPECT_EQ(primitive_root(PrimeModulus(5)).value(), 2u);
  for (u64 pv : {3ULL, 11ULL, 101ULL, 1009ULL, 10007ULL}) {
    PrimeModulus p(pv);
    const FpElem g = primitive_root(p);
    EXPECT_EQ(naive_order(g), pv - 1);
    for (u64 h = 2; h < g.value(); ++h) EXPECT_LT(naive_order(FpElem(p, h)), pv - 1);
  }
}

TEST(Group, NormGroupGenerator) {
  // p = 3, Z^2 + 1: exhaustive enumeration of all 9 elements.
  QuadExtension ext3(PrimeModulus(3), 0);
  ASSERT_TRUE(ext3.irreducible());
  int count = 0;
  for (u64 c0 = 0; c0 < 3; ++c0) {
    for (u64 c1 = 0; c1 < 3; ++c1) count += norm(Fp2Elem(ext3, c0, c1)).value() == 1;
  }
  EXPECT_EQ(count, 4);

  for (u64 pv : {3ULL, 13ULL, 101ULL, 199ULL, 1009ULL}) {
    QuadExtension ext = QuadExtension::first_irreducible(PrimeModulus(pv));
    Fp2Elem g = norm_group_generator(ext);
    EXPECT_EQ(norm(g).value(), 1u);
    EXPECT_EQ(mult_order(g), pv + 1);
  }
  // p = 13: powers of the generator enumerate exactly the norm-one elements.
  QuadExtension ext13 = QuadExtension::first_irreducible(PrimeModulus(13));
  Fp2Elem g = norm_group_generator(ext13);
  std::set<u64> from_powers, from_norm;
  Fp2Elem x = Fp2Elem::one(ext13);
  for (u64 n = 0; n < 14; ++n, x = x * g) from_powers.insert(group_key(x));
  for (u64 c0 = 0; c0 < 13; ++c0) {
    for (u64 c1 = 0; c1 < 13; ++c1) {
      Fp2Elem z(ext13, c0, c1);
      if (norm(z).value() == 1) from_norm.insert(group_key(z));
    }
  }
  EXPECT_EQ(from_powers.size(), 14u);
  EXPECT_EQ(from_powers, from_norm);

  try {
    (void)norm_group_generator(QuadExtension(PrimeModulus(5), 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ReducibleExtension);
  }
}

TEST(Group, DiscreteIndex) {
  PrimeModulus p7(7);
  FpElem g(p7, 3);
  EXPECT_EQ(discrete_index(FpElem(p7, 1), g, 6), 0u);
  EXPECT_EQ(discrete_index(g, g, 6), 1u);
  EXPECT_EQ(discrete_index(FpElem(p7, 4), g, 6), 4u);

  for (u64 pv : {101ULL, 10007ULL}) {
    PrimeModulus p(pv);
    FpElem r = primitive_root(p);
    for (u64 k = 0; k < pv - 1; k += (pv > 1000 ? 97 : 1)) {
      EXPECT_EQ(discrete_index(pow(r, k), r, pv - 1), k);
    }
    for (u64 a = 1; a < pv; a += (pv > 1000 ? 101 : 1)) {
      FpElem x(p, a);
      EXPECT_EQ(pow(r, discrete_index(x, r, pv - 1)), x);
    }
  }
  // Subgroup of index 2: non-residues are not in it.
  PrimeModulus p11(11);
  FpElem sq = pow(primitive_root(p11), 2);
  try {
    (void)discrete_index(FpElem(p11, 2), sq, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInGroup);
  }

  QuadExtension ext = QuadExtension::first_irreducible(PrimeModulus(199));
  Fp2Elem ng = norm_group_generator(ext);
  for (u64 k = 0; k < 200; ++k) EXPECT_EQ(discrete_index(pow(ng, k), ng, 200), k);
}
