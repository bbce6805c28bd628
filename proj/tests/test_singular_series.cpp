#include <gtest/gtest.h>

#include <random>

#include "cubic/singular_series.hpp"
#include "support.hpp"

using namespace cubic;
using namespace cubic::testing;

namespace {

CubicPolynomial sum_of_cubes_plus(int n, long long c) {
  IntPoly p(n);
  for (int i = 0; i < n; ++i) p.add_term({i, i, i}, 1);
  p.add_term({}, BigInt(c));
  return CubicPolynomial(p);
}

}  // namespace

TEST(SeriesPartial, FirstTermIsOne) {
  auto r = series_partial(sum_of_cubes_plus(3, 2), 1);
  EXPECT_DOUBLE_EQ(r.value(), 1.0);
}

TEST(SeriesPartial, RealAndPositiveForFourCubes) {
  auto g = sum_of_cubes_plus(4, 2);
  auto r = series_partial(g, 30);
  EXPECT_GT(r.value(), 0);
  EXPECT_LE(r.max_imag, 1e-6);
  // Per-prime factors equal local densities at the largest power below Qmax.
  for (i64 p : {2, 3, 5}) {
    int k = 0;
    for (i64 pd = p; pd <= 30; pd *= p) ++k;
    EXPECT_NEAR(r.per_prime.at(p), local_density(g, p, k).convert_to<double>(), 1e-9) << p;
  }
}

TEST(SeriesPartial, PrimePowerBlocksAreLocalDensities) {
  // Exact version: sum_{d<=k} p^{-dn} S_0(p^d; 0) against zero counts mod p^k.
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 3; ++trial) {
    auto g = random_cubic(3, rng, 3);
    const int n = 3;
    for (i64 p : {2, 3, 5}) {
      Rational lhs = 1;
      for (int k = 1; k <= 3; ++k) {
        ExpSumSpec s{g, 0, std::vector<BigInt>(n, 0), ipow(p, k)};
        ExpSum e = k == 1 ? complete_sum(s) : prime_power_sum(s);
        auto exact = e.exact();
        ASSERT_TRUE(exact.has_value());
        lhs += Rational(*exact, bigpow(BigInt(p), k * n));
        EXPECT_EQ(lhs, local_density(g, p, k)) << trial << " p=" << p << " k=" << k;
      }
    }
  }
}

TEST(SeriesPartial, TailDecaysForTenCubes) {
  auto r = series_partial(sum_of_cubes_plus(10, 2), 30);
  EXPECT_GT(r.slope_points, 3);
  EXPECT_LE(r.convergence_slope, -1.5);
}

TEST(TailSlope, RecoversPowerLaw) {
  std::map<i64, double> t;
  for (i64 q = 1; q <= 40; ++q) t[q] = 3.0 * std::pow(static_cast<double>(q), -2.5);
  auto [slope, m] = tail_slope(t);
  EXPECT_NEAR(slope, -2.5, 1e-9);
  EXPECT_EQ(m, 39);
}

TEST(Positivity, TenCubesPositive) {
  auto rep = positivity_certificate(sum_of_cubes_plus(10, 2), 50);
  EXPECT_EQ(rep.verdict, Positivity::POSITIVE) << rep.reason;
  EXPECT_EQ(rep.s, -1);
}

TEST(Positivity, FailingPrimeIsNotPositive) {
  auto rep = positivity_certificate(make_cubic(1, {{{3}, 1}, {{0}, 49}}), 20);
  EXPECT_EQ(rep.verdict, Positivity::NOT_POSITIVE);
  EXPECT_EQ(rep.congruence.overall, Overall::FAILS);
}

TEST(Positivity, LargeSingularLocusInconclusive) {
  // Four cubes in ten variables: the gradient vanishes on a 5-dimensional space.
  IntPoly p(10);
  for (int i = 0; i < 4; ++i) p.add_term({i, i, i}, 1);
  p.add_term({}, 2);
  auto rep = positivity_certificate(CubicPolynomial(p), 20);
  EXPECT_EQ(rep.verdict, Positivity::INCONCLUSIVE);
  EXPECT_GE(rep.s, 1);
}
