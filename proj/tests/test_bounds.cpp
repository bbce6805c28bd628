#include <gtest/gtest.h>

#include <random>

#include "cubic/bounds.hpp"
#include "support.hpp"

using namespace cubic;
using namespace cubic::testing;

TEST(NtildePrime, MatchesKernelCounts) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 6; ++t) {
    auto g = random_cubic(2 + t % 2, rng);
    for (i64 p : {5, 7, 11}) EXPECT_EQ(ntilde_prime(g, p), ntilde(g, p)) << g.to_string() << " p=" << p;
  }
}

TEST(NtildeSweep, MultiplicativeOnSquarefreeModuli) {
  std::mt19937_64 rng(22);
  auto g = random_cubic(2, rng);
  auto sweep = ntilde_sweep(g, 80);
  int checked = 0;
  for (const auto& row : sweep.rows)
    if (row.q == 35 || row.q == 55 || row.q == 77) {
      EXPECT_EQ(row.value, ntilde(g, row.q)) << row.q;
      ++checked;
    }
  EXPECT_EQ(checked, 3);
  for (const auto& row : sweep.rows) {
    EXPECT_TRUE(std::gcd(row.q, i64{6}) == 1 && is_squarefree(row.q));
    EXPECT_LE(row.A_needed, sweep.A_emp);
  }
}

TEST(SquarefullSweep, IndependentRule) {
  auto s = squarefull_sweep(13, 14);
  EXPECT_EQ(s.violations, 0);
  for (const auto& row : s.rows) {
    const bool odd = row.e % 2 == 1;
    EXPECT_EQ(row.parts.q2, odd ? row.p : 1);
    EXPECT_EQ(row.parts.q4, odd && row.e >= 13 ? row.p : 1);
    EXPECT_EQ(row.parts.q1, ipow(row.p, row.e / 2));
    EXPECT_EQ(row.parts.theta.at(row.p), odd && row.e >= 13 ? 1 : 0);
  }
}

TEST(KatzSweep, SmallSweepIsBounded) {
  auto s = katz_sweep(diagonal_form({1, 2, 3}), 13, {1, 2}, 10, 3);
  EXPECT_EQ(s.rows.size(), 4u * 2u);  // p in {5, 7, 11, 13}, u in {1, 2}
  EXPECT_LE(s.max_ratio, 10);
}

TEST(HooleySweep, CountsSmoothSections) {
  auto s = hooley_sweep(fermat(3), 13, 10, 4);
  EXPECT_EQ(s.checked, 4 * 10);
  EXPECT_GT(s.smooth, 0);
  EXPECT_EQ(s.counterexamples, 0);
}
