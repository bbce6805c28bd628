#include <gtest/gtest.h>

#include <random>

#include "cubic/poly_json.hpp"
#include "cubic/polynomial.hpp"
#include "support.hpp"

using namespace cubic;
using namespace cubic::testing;

namespace {

// Derivative of a cubic along a coordinate from five integer samples; exact for
// polynomials of degree <= 4.
BigInt derivative_oracle(const CubicPolynomial& g, std::vector<BigInt> x, int i) {
  auto at = [&](int t) {
    auto y = x;
    y[i] += t;
    return g.eval(y);
  };
  BigInt num = 8 * (at(1) - at(-1)) - (at(2) - at(-2));
  return num / 12;
}

// Central second differences; exact for cubics.
BigInt second_oracle(const CubicPolynomial& g, const std::vector<BigInt>& x, int i, int j) {
  auto at = [&](int di, int dj) {
    auto y = x;
    y[i] += di;
    y[j] += dj;
    return g.eval(y);
  };
  if (i == j) return at(1, 0) - 2 * g.eval(x) + at(-1, 0);
  return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / 4;
}

CubicPolynomial watson(int n) {
  // (2 x1 - 1)(1 + x1^2 + ... + xn^2) + x1 x2
  IntPoly x1 = IntPoly::variable(n, 0);
  IntPoly s = IntPoly::constant(n, 1);
  for (int i = 0; i < n; ++i) s = s + IntPoly::variable(n, i) * IntPoly::variable(n, i);
  IntPoly p = (x1 * BigInt(2) - IntPoly::constant(n, 1)) * s + x1 * IntPoly::variable(n, 1);
  return CubicPolynomial(p);
}

}  // namespace

TEST(PolyCoreEval, AntisymmetricVanishesOnDiagonal) {
  auto g = make_cubic(2, {{{3, 0}, 1}, {{0, 3}, -1}});
  EXPECT_EQ(g.eval(std::vector<i64>{1, 1}), 0);
}

TEST(PolyCoreEval, ConstantTermAtOrigin) {
  auto g = make_cubic(2, {{{3, 0}, 1}, {{0, 3}, 1}, {{1, 1}, 1}, {{0, 0}, 1}});
  EXPECT_EQ(g.eval(std::vector<i64>{0, 0}), 1);
}

TEST(PolyCoreEval, WatsonPolynomialByHand) {
  EXPECT_EQ(watson(2).eval(std::vector<i64>{1, -1}), 2);
}

TEST(PolyCoreEval, DimensionMismatchThrows) {
  auto g = make_cubic(2, {{{3, 0}, 1}});
  EXPECT_THROW(g.eval(std::vector<i64>{1}), InputError);
  EXPECT_THROW(g.gradient({BigInt(1), BigInt(2), BigInt(3)}), InputError);
  EXPECT_THROW(g.hessian({BigInt(1)}), InputError);
}

TEST(PolyCoreEval, RejectsWrongDegree) {
  EXPECT_THROW(CubicPolynomial(make_poly(2, {{{2, 0}, 1}})), InputError);
  EXPECT_THROW(HomogeneousCubic(make_poly(2, {{{3, 0}, 1}, {{1, 0}, 1}})), InputError);
}

TEST(PolyCoreGradient, DiagonalForm) {
  auto g = make_cubic(2, {{{3, 0}, 1}, {{0, 3}, 1}});
  auto d = g.gradient({BigInt(1), BigInt(2)});
  EXPECT_EQ(d, (std::vector<BigInt>{3, 12}));
}

TEST(PolyCoreGradient, VanishesAtOriginForForms) {
  auto g = make_form(3, {{{1, 1, 1}, 5}, {{2, 1, 0}, -3}, {{0, 0, 3}, 2}}).as_polynomial();
  for (const auto& v : g.gradient({BigInt(0), BigInt(0), BigInt(0)})) EXPECT_EQ(v, 0);
}

TEST(PolyCoreGradient, MatchesFiniteDifferenceOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_cubic(3, rng);
    auto x = random_point(3, rng);
    auto d = g.gradient(x);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(d[i], derivative_oracle(g, x, i));
  }
}

TEST(PolyCoreGradient, EulerIdentity) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_cubic(4, rng);
    auto g0 = g.homogeneous_part().as_polynomial();
    auto x = random_point(4, rng, 20);
    auto d = g0.gradient(x);
    BigInt dot = 0;
    for (int i = 0; i < 4; ++i) dot += x[i] * d[i];
    EXPECT_EQ(dot, 3 * g0.eval(x));
  }
}

TEST(PolyCoreHessian, DiagonalCubes) {
  auto g = fermat(4).as_polynomial();
  auto h = g.hessian(std::vector<BigInt>(4, 1));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(h.entries[i][j], i == j ? 6 : 0);
}

TEST(PolyCoreHessian, QuadraticPartIsConstant) {
  auto g = make_cubic(2, {{{3, 0}, 1}, {{1, 1}, 1}});
  for (int a = -2; a <= 2; ++a) {
    auto h = g.hessian({BigInt(a), BigInt(3 - a)});
    EXPECT_EQ(h.quadratic_part, (IntMatrix{{0, 1}, {1, 0}}));
  }
}

TEST(PolyCoreHessian, MixedCubicAgainstDifferences) {
  auto g = make_cubic(3, {{{2, 1, 0}, 1}, {{0, 1, 2}, 1}});
  std::vector<BigInt> h{1, 2, 3};
  auto m = g.hessian(h);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(m.entries[i][j], second_oracle(g, h, i, j));
}

TEST(PolyCoreHessian, RandomConsistencyAndSymmetry) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_cubic(3, rng);
    auto h = random_point(3, rng);
    auto m = g.hessian(h);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        EXPECT_EQ(m.entries[i][j], second_oracle(g, h, i, j));
        EXPECT_EQ(m.entries[i][j], m.entries[j][i]);
        EXPECT_EQ(m.entries[i][j], m.cubic_part[i][j] + m.quadratic_part[i][j]);
      }
    // M0 is linear in h.
    auto doubled = h;
    for (auto& v : doubled) v *= 2;
    auto m2 = g.hessian(doubled);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_EQ(m2.cubic_part[i][j], 2 * m.cubic_part[i][j]);
  }
}

TEST(PolyCoreHomogenize, SimpleCases) {
  auto g = make_cubic(1, {{{3}, 1}, {{0}, 1}});
  EXPECT_EQ(g.homogenize(), make_form(2, {{{0, 3}, 1}, {{3, 0}, 1}}));
  auto g2 = make_cubic(1, {{{3}, 1}, {{1}, 1}, {{0}, 5}});
  EXPECT_EQ(g2.homogenize(), make_form(2, {{{0, 3}, 1}, {{2, 1}, 1}, {{3, 0}, 5}}));
}

TEST(PolyCoreHomogenize, RationalOracle) {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> zd(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_cubic(3, rng);
    auto gt = g.homogenize();
    BigInt z = zd(rng) * (trial % 2 ? 1 : -1);
    auto x = random_point(3, rng);
    std::vector<BigInt> zx{z};
    zx.insert(zx.end(), x.begin(), x.end());
    // z^3 g(x / z) evaluated term by term in rationals.
    Rational expect = 0;
    for (const auto& [m, c] : g.terms()) {
      Rational t(c);
      for (int i : m) t *= Rational(x[i]) / Rational(z);
      expect += t;
    }
    expect *= Rational(z * z * z);
    EXPECT_EQ(Rational(gt.eval(zx)), expect);
    // z = 0 gives g0.
    zx[0] = 0;
    EXPECT_EQ(gt.eval(zx), g.homogeneous_part().eval(x));
  }
}

TEST(PolyCoreTransform, IdentityAndSwap) {
  auto g = make_cubic(2, {{{3, 0}, 1}, {{1, 1}, 2}, {{0, 0}, -4}});
  EXPECT_EQ(g.transform(identity_matrix(2)), g);
  auto x13 = make_cubic(2, {{{3, 0}, 1}});
  EXPECT_EQ(x13.transform({{0, 1}, {1, 0}}), make_cubic(2, {{{0, 3}, 1}}));
}

TEST(PolyCoreTransform, RejectsNonUnimodular) {
  auto g = make_cubic(2, {{{3, 0}, 1}});
  EXPECT_THROW(g.transform({{2, 0}, {0, 1}}), InputError);
}

TEST(PolyCoreTransform, RoundTripAndGroupAction) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_cubic(3, rng);
    auto M = random_unimodular(3, rng);
    auto N = random_unimodular(3, rng);
    EXPECT_EQ(g.transform(M).transform(inverse_unimodular(M)), g);
    // r(y) = g(M N y): substitute N first, then M.
    EXPECT_EQ(g.transform(multiply(M, N)), g.transform(M).transform(N));
    auto y = random_point(3, rng);
    std::vector<BigInt> My(3, 0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) My[i] += M[i][j] * y[j];
    EXPECT_EQ(g.transform(M).eval(y), g.eval(My));
  }
}

TEST(PolyCoreSlice, Examples) {
  auto h = make_cubic(2, {{{3, 0}, 1}, {{0, 3}, 1}});
  EXPECT_EQ(h.slice(0), make_cubic(1, {{{3}, 1}}));
  auto h2 = make_cubic(2, {{{3, 0}, 1}, {{0, 3}, 1}, {{1, 1}, 1}});
  EXPECT_EQ(h2.slice(1), make_cubic(1, {{{3}, 1}, {{1}, 1}, {{0}, 1}}));
  auto h3 = make_cubic(3, {{{1, 1, 1}, 1}, {{0, 3, 0}, 1}});
  EXPECT_EQ(h3.slice(2), make_cubic(2, {{{1, 1}, 2}, {{3, 0}, 1}}));
}

TEST(PolyCoreSlice, DegenerateAndPrecondition) {
  auto h = make_cubic(2, {{{3, 0}, 1}, {{1, 1}, 1}});
  EXPECT_THROW(h.slice(1), DegeneracyError);
  EXPECT_THROW(make_cubic(1, {{{3}, 1}}).slice(1), PreconditionError);
}

TEST(PolyCoreSlice, CommutesWithEvalAndTopFormIndependentOfC) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 30; ++trial) {
    auto h = random_cubic(3, rng);
    std::optional<IntPoly> top;
    for (int c = -3; c <= 3; ++c) {
      CubicPolynomial s;
      try {
        s = h.slice(c);
      } catch (const DegeneracyError&) {
        continue;
      }
      auto u = random_point(2, rng);
      std::vector<BigInt> cu{BigInt(c), u[0], u[1]};
      EXPECT_EQ(s.eval(u), h.eval(cu));
      auto h0 = s.poly().homogeneous_component(3);
      if (!top) top = h0;
      EXPECT_EQ(h0, *top);
      EXPECT_EQ(h0, h.poly().homogeneous_component(3).fix_variable(0, 0));
    }
  }
}

TEST(PolyCoreTensor, SymmetricCoefficients) {
  auto g = make_cubic(3, {{{1, 1, 1}, 6}, {{2, 1, 0}, 3}, {{3, 0, 0}, 5}});
  EXPECT_EQ(g.symmetric_coefficient(0, 1, 2), Rational(1));
  EXPECT_EQ(g.symmetric_coefficient(2, 0, 1), Rational(1));
  EXPECT_EQ(g.symmetric_coefficient(1, 0, 0), Rational(1));
  EXPECT_EQ(g.symmetric_coefficient(0, 0, 0), Rational(5));
  // Reassembling the form from the tensor recovers it.
  std::mt19937_64 rng(17);
  auto h = random_cubic(3, rng);
  auto x = random_point(3, rng);
  Rational total = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) total += h.symmetric_coefficient(i, j, k) * Rational(x[i] * x[j] * x[k]);
  EXPECT_EQ(total, Rational(h.homogeneous_part().eval(x)));
}

TEST(PolyCoreJson, RoundTripIsExact) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_cubic(4, rng, 1000);
    json j = poly_to_json(g);
    auto back = poly_from_json(json::parse(j.dump()));
    EXPECT_EQ(back, g);
    EXPECT_EQ(poly_to_json(back).dump(), j.dump());
  }
  IntPoly big(1);
  big.add_term({0, 0, 0}, BigInt("123456789012345678901234567890"));
  auto g = CubicPolynomial(big);
  EXPECT_EQ(poly_from_json(poly_to_json(g)), g);
}

TEST(PolyCoreJson, RejectsMalformedInput) {
  EXPECT_THROW(poly_from_json(json::parse(R"({"n":2,"terms":[{"e":[4,0],"c":1}]})")), InputError);
  EXPECT_THROW(poly_from_json(json::parse(R"({"n":2,"terms":[{"e":[3],"c":1}]})")), InputError);
  EXPECT_THROW(poly_from_json(json::parse(R"({"n":2,"terms":[{"e":[3,0],"c":1},{"e":[3,0],"c":2}]})")),
               InputError);
  EXPECT_THROW(poly_from_json(json::parse(R"({"n":2,"terms":[{"e":[-1,0],"c":1}]})")), InputError);
  EXPECT_THROW(poly_from_json(json::parse(R"({"terms":[]})")), InputError);
}

TEST(PolyCoreForms, NondegeneracyIsExact) {
  EXPECT_TRUE(fermat(3).is_nondegenerate());
  // x1^3 + x2^3 in three variables misses x3 entirely.
  EXPECT_FALSE(diagonal_form({1, 1, 0}).is_nondegenerate());
  // (x1 + x2)^3 only depends on one linear form.
  EXPECT_FALSE(make_form(2, {{{3, 0}, 1}, {{2, 1}, 3}, {{1, 2}, 3}, {{0, 3}, 1}}).is_nondegenerate());
}
