#include <gtest/gtest.h>

#include <random>

#include "cubic/slicing.hpp"
#include "support.hpp"

using namespace cubic;
using namespace cubic::testing;

namespace {

std::vector<BigInt> bigs(std::initializer_list<long long> v) { return {v.begin(), v.end()}; }

// x1^3 + ... + x5^3 + x6^2 + x6 + x7 in seven variables; the cubic part has a
// one-dimensional vertex.
CubicPolynomial five_cubes_in_seven() {
  IntPoly p(7);
  for (int i = 0; i < 5; ++i) p.add_term({i, i, i}, 1);
  p.add_term({5, 5}, 1);
  p.add_term({5}, 1);
  p.add_term({6}, 1);
  return CubicPolynomial(p);
}

// #{x in F_p^m : F(x) = 0} by direct enumeration.
i64 brute_zeros(const IntPoly& F, i64 p) {
  const int m = F.vars();
  std::vector<i64> x(m, 0);
  i64 count = 0;
  while (true) {
    if (F.eval_mod(x, p) == 0) ++count;
    int pos = m - 1;
    while (pos >= 0 && ++x[pos] == p) x[pos--] = 0;
    if (pos < 0) break;
  }
  return count;
}

SliceConfig fast_config() {
  SliceConfig cfg;
  cfg.pmax = 30;
  return cfg;
}

}  // namespace

TEST(CompleteUnimodular, FirstRowAndDeterminant) {
  for (auto a : {bigs({1, 0, 0}), bigs({2, 3}), bigs({6, 10, 15}), bigs({-1, 0}), bigs({0, -1, 4}),
                 bigs({-7, 12, 0, 5}), bigs({1}), bigs({0, 0, 1})}) {
    IntMatrix M = complete_unimodular(a);
    EXPECT_EQ(M[0], a);
    EXPECT_EQ(determinant(M), 1);
  }
}

TEST(CompleteUnimodular, RandomPrimitiveVectors) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(-40, 40);
  int done = 0;
  while (done < 200) {
    const int n = 2 + done % 4;
    std::vector<BigInt> a(n);
    for (auto& x : a) x = d(rng);
    BigInt g = 0;
    for (const auto& x : a) g = gcd(g, x);
    if (g != 1) continue;
    IntMatrix M = complete_unimodular(a);
    ASSERT_EQ(M[0], a);
    ASSERT_EQ(determinant(M), 1);
    ++done;
  }
}

TEST(CompleteUnimodular, RejectsBadInput) {
  EXPECT_THROW(complete_unimodular(bigs({2, 4})), InputError);
  EXPECT_THROW(complete_unimodular(bigs({0, 0})), InputError);
  EXPECT_THROW(complete_unimodular(bigs({-1})), InputError);
  EXPECT_THROW(complete_unimodular({}), InputError);
}

TEST(ChangeVariables, FirstCoordinateIsTheLinearForm) {
  // h(M x) = g(x), so h(a.x, ...) recovers g.
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    auto g = random_cubic(3, rng);
    auto a = bigs({2, -3, 5});
    IntMatrix M = complete_unimodular(a);
    auto h = change_variables(g, M);
    auto x = random_point(3, rng);
    std::vector<BigInt> y(3, 0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) y[i] += M[i][j] * x[j];
    EXPECT_EQ(h.eval(y), g.eval(x));
    EXPECT_EQ(y[0], 2 * x[0] - 3 * x[1] + 5 * x[2]);
  }
}

TEST(SectionForm, DegenerateSectionsDetected) {
  // x1^3 + x2^3 in three variables: the hyperplane x3 = 0 keeps both cubes.
  auto g0 = make_form(3, {{{3, 0, 0}, 1}, {{0, 3, 0}, 1}});
  auto H = section_form(change_variables(g0.as_polynomial(), complete_unimodular(bigs({0, 0, 1}))));
  EXPECT_TRUE(section_nondegenerate(H));
  EXPECT_EQ(variables_used(H), 2);
  // Cutting x2 = 0 leaves x1^3, a cube of a linear form.
  auto cube = section_form(change_variables(g0.as_polynomial(), complete_unimodular(bigs({0, 1, 0}))));
  EXPECT_FALSE(section_nondegenerate(cube));
  // x1 x2 x3 cut by x1 = 0 vanishes.
  auto xyz = make_form(3, {{{1, 1, 1}, 1}});
  EXPECT_TRUE(section_form(xyz.as_polynomial()).is_zero());
}

TEST(FindGoodHyperplane, DropsTheSingularLocus) {
  IntPoly p(3);
  p.add_term({0, 0, 0}, 1);
  p.add_term({0, 1, 2}, 1);
  const HomogeneousCubic g0(p);
  SliceConfig cfg;
  auto choice = find_good_hyperplane(g0, cfg);
  EXPECT_EQ(choice.s_before, 0);
  EXPECT_EQ(choice.s_section, -1);
  BigInt g = 0;
  for (const auto& x : choice.a) g = gcd(g, x);
  EXPECT_EQ(g, 1);
  // Deterministic in the seed.
  EXPECT_EQ(find_good_hyperplane(g0, cfg).a, choice.a);
}

TEST(FindGoodHyperplane, NonsingularFormRejected) {
  EXPECT_THROW(find_good_hyperplane(fermat(3), SliceConfig{}), PreconditionError);
}

TEST(ChooseC, CrtOfWitnessCoordinates) {
  auto g = make_cubic(3, {{{3, 0, 0}, 1}, {{0, 3, 0}, 1}, {{0, 0, 1}, 1}, {{0, 0, 0}, 1}});
  auto r = choose_c(g, 7);
  ASSERT_EQ(r.per_prime.size(), 4u);
  BigInt L = 1;
  for (const auto& sp : r.per_prime) {
    EXPECT_EQ(sp.modulus, bigpow(BigInt(sp.p), 2 * sp.k + 1));
    EXPECT_EQ((r.c - sp.y.x[0]) % sp.modulus, 0);
    L *= sp.modulus;
  }
  EXPECT_GE(r.c, 0);
  EXPECT_LT(r.c, L);
  // Independent check: the least such c by scanning.
  BigInt least = -1;
  for (BigInt c = 0; c < L; ++c) {
    bool all = true;
    for (const auto& sp : r.per_prime)
      if ((c - sp.y.x[0]) % sp.modulus != 0) {
        all = false;
        break;
      }
    if (all) {
      least = c;
      break;
    }
  }
  EXPECT_EQ(least, r.c);
}

TEST(ChooseC, SectionWitnessesAreLiftable) {
  auto g = make_cubic(3, {{{3, 0, 0}, 1}, {{0, 3, 0}, 2}, {{0, 0, 3}, 3}, {{0, 0, 0}, 5}});
  auto r = choose_c(g, 20);
  auto hc = g.slice(r.c);
  for (const auto& sp : r.per_prime) {
    EXPECT_TRUE(verify_witness(hc, sp.section)) << sp.p;
    EXPECT_EQ(sp.section.grad_val, sp.k) << sp.p;
    auto l = hensel_lift(hc, sp.section, sp.section.k + 4);
    EXPECT_TRUE(verify_witness(hc, l));
  }
}

TEST(SectionCounts, IdentityAgainstEnumeration) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 6; ++t) {
    auto h = random_cubic(2 + t % 2, rng);
    for (i64 p : {5, 7, 11}) {
      auto s = section_counts(h, p);
      EXPECT_EQ(s.N, brute_zeros(h.poly(), p));
      EXPECT_EQ(s.N1, brute_zeros(h.poly().homogenize(3), p));
      EXPECT_TRUE(s.identity_holds()) << h.to_string() << " p=" << p;
      EXPECT_TRUE(s.singular_bound_holds()) << h.to_string() << " p=" << p;
    }
  }
}

TEST(SliceStep, FiveCubesInSevenVariables) {
  const auto g = five_cubes_in_seven();
  const auto cfg = fast_config();
  const auto cert = slice_step(g, cfg);
  EXPECT_EQ(cert.s_before, 1);
  EXPECT_EQ(cert.s_after, 0);
  EXPECT_EQ(cert.result.dimension(), 6);
  auto rep = verify_certificate(cert, g);
  EXPECT_TRUE(rep.ok) << (rep.reasons.empty() ? "" : rep.reasons.front());
  for (i64 p : {7, 11, 13}) EXPECT_TRUE(section_counts(cert.result, p).identity_holds()) << p;
  // Integer zeros of the slice map to integer zeros of g.
  const IntMatrix Minv = inverse_unimodular(cert.M);
  std::vector<BigInt> u(6, 0);
  std::vector<BigInt> y{cert.c};
  y.insert(y.end(), u.begin(), u.end());
  std::vector<BigInt> x(7, 0);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) x[i] += Minv[i][j] * y[j];
  EXPECT_EQ(g.eval(x), cert.result.eval(u));
}

TEST(VerifyCertificate, DetectsTampering) {
  const auto g = make_cubic(3, {{{3, 0, 0}, 1}, {{1, 1, 1}, 1}, {{0, 0, 1}, 1}, {{0, 0, 0}, 2}});
  const auto cert = slice_step(g, fast_config());
  ASSERT_TRUE(verify_certificate(cert, g).ok);

  auto bad_c = cert;
  bad_c.c += 1;
  EXPECT_FALSE(verify_certificate(bad_c, g).ok);

  auto bad_m = cert;
  bad_m.M[1][0] += 1;
  EXPECT_FALSE(verify_certificate(bad_m, g).ok);

  auto bad_w = cert;
  bad_w.per_prime[0].section.x[0] += 1;
  EXPECT_FALSE(verify_certificate(bad_w, g).ok);

  auto bad_s = cert;
  bad_s.s_after = cert.s_before;
  EXPECT_FALSE(verify_certificate(bad_s, g).ok);

  auto short_list = cert;
  short_list.per_prime.pop_back();
  EXPECT_FALSE(verify_certificate(short_list, g).ok);
}

TEST(SliceToNonsingular, EndsNonsingular) {
  const auto g = make_cubic(3, {{{3, 0, 0}, 1}, {{1, 1, 1}, 1}, {{0, 0, 1}, 1}, {{0, 0, 0}, 2}});
  auto chain = slice_to_nonsingular(g, fast_config());
  ASSERT_EQ(chain.size(), 1u);
  EXPECT_EQ(chain.back().s_after, -1);
}
