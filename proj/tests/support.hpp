#pragma once

#include <random>
#include <utility>
#include <vector>

#include "cubic/polynomial.hpp"

namespace cubic::testing {

/// Builds a polynomial from (exponent vector, coefficient) pairs.
inline IntPoly make_poly(int n, const std::vector<std::pair<std::vector<int>, long long>>& terms) {
  IntPoly p(n);
  for (const auto& [e, c] : terms) {
    Monomial m;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < e[i]; ++k) m.push_back(i);
    p.add_term(m, BigInt(c));
  }
  return p;
}

inline CubicPolynomial make_cubic(int n,
                                  const std::vector<std::pair<std::vector<int>, long long>>& terms) {
  return CubicPolynomial(make_poly(n, terms));
}

inline HomogeneousCubic make_form(int n,
                                  const std::vector<std::pair<std::vector<int>, long long>>& terms) {
  return HomogeneousCubic(make_poly(n, terms));
}

/// Sum of a_i x_i^3.
inline HomogeneousCubic diagonal_form(const std::vector<long long>& a) {
  const int n = static_cast<int>(a.size());
  IntPoly p(n);
  for (int i = 0; i < n; ++i) p.add_term({i, i, i}, BigInt(a[i]));
  return HomogeneousCubic(p);
}

inline HomogeneousCubic fermat(int n) { return diagonal_form(std::vector<long long>(n, 1)); }

/// Random dense polynomial of degree <= 3 with a guaranteed cubic term.
inline CubicPolynomial random_cubic(int n, std::mt19937_64& rng, int range = 4) {
  std::uniform_int_distribution<int> coeff(-range, range);
  std::uniform_int_distribution<int> keep(0, 2);
  IntPoly p(n);
  for (int a = -1; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = b; c < n; ++c) {
        if (keep(rng) == 0) continue;
        Monomial m;
        for (int i : {a, b, c})
          if (i >= 0) m.push_back(i);
        p.add_term(m, BigInt(coeff(rng)));
      }
  p.add_term({0, 0, n - 1}, BigInt(1 + keep(rng)));
  if (p.degree() != 3) p.add_term({0, 0, 0}, BigInt(1));
  return CubicPolynomial(p);
}

inline std::vector<BigInt> random_point(int n, std::mt19937_64& rng, int range = 5) {
  std::uniform_int_distribution<int> d(-range, range);
  std::vector<BigInt> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

/// Random product of elementary SL_n(Z) moves.
inline IntMatrix random_unimodular(int n, std::mt19937_64& rng, int moves = 6) {
  IntMatrix m = identity_matrix(n);
  std::uniform_int_distribution<int> idx(0, n - 1), f(-2, 2);
  for (int k = 0; k < moves; ++k) {
    int i = idx(rng), j = idx(rng);
    if (i == j) continue;
    int s = f(rng);
    for (int c = 0; c < n; ++c) m[i][c] += s * m[j][c];
  }
  return m;
}

}  // namespace cubic::testing
