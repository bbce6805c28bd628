#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "cubic/error.hpp"
#include "cubic/expsums.hpp"
#include "cubic/ff_geometry.hpp"
#include "cubic/integer.hpp"
#include "cubic/polynomial.hpp"

namespace cubic {

namespace detail {

inline std::vector<BigInt> random_vector(int n, i64 p, std::mt19937_64& rng) {
  std::uniform_int_distribution<i64> d(0, p - 1);
  std::vector<BigInt> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline std::vector<i64> sweep_primes(i64 pmax) {
  std::vector<i64> out;
  for (i64 p : primes_up_to(pmax))
    if (p > 3) out.push_back(p);
  return out;
}

}  // namespace detail

/// |S_u(p; v)| / p^{(n+1)/2} over sampled v, for g = g0.
struct KatzSweep {
  struct Row {
    i64 p = 0;
    i64 u = 0;
    double max_ratio = 0;
  };
  std::vector<Row> rows;
  std::map<i64, double> per_prime_max;
  double max_ratio = 0;
  bool non_exploding = true;  // the three largest primes do not show strictly increasing maxima
};

inline KatzSweep katz_sweep(const HomogeneousCubic& g0, i64 pmax, const std::vector<i64>& us, int samples,
                            std::uint64_t seed = 0, long double budget = kDefaultBudget) {
  const int n = g0.dimension();
  const CubicPolynomial g = g0.as_polynomial();
  KatzSweep out;
  for (i64 p : detail::sweep_primes(pmax)) {
    if (g0.content() % p == 0) continue;
    std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(p));
    for (i64 u : us) {
      KatzSweep::Row row{p, u, 0};
      for (int s = 0; s < samples; ++s) {
        const ExpSum e = complete_sum({g, u, detail::random_vector(n, p, rng), p}, budget);
        row.max_ratio = std::max(row.max_ratio, std::abs(e.value) / std::pow(static_cast<double>(p), (n + 1) / 2.0));
      }
      out.rows.push_back(row);
      out.per_prime_max[p] = std::max(out.per_prime_max[p], row.max_ratio);
      out.max_ratio = std::max(out.max_ratio, row.max_ratio);
    }
  }
  if (out.per_prime_max.size() >= 3) {
    auto it = out.per_prime_max.rbegin();
    const double c = (it++)->second, b = (it++)->second, a = it->second;
    out.non_exploding = !(a < b && b < c);
  }
  return out;
}

/// At u = 0: |S_0(p; v)| against C p^{(n+1)/2} whenever the section by v is smooth.
struct HooleySweep {
  int checked = 0;
  int smooth = 0;
  int counterexamples = 0;
  double max_smooth_ratio = 0;
  double max_singular_ratio = 0;
  double C = 10;
};

inline HooleySweep hooley_sweep(const HomogeneousCubic& g0, i64 pmax, int samples, std::uint64_t seed = 0,
                                double C = 10, long double budget = kDefaultBudget) {
  const int n = g0.dimension();
  const CubicPolynomial g = g0.as_polynomial();
  HooleySweep out;
  out.C = C;
  for (i64 p : detail::sweep_primes(pmax)) {
    if (g0.content() % p == 0) continue;
    std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(p) ^ 0x5eedULL);
    for (int s = 0; s < samples; ++s) {
      const auto v = detail::random_vector(n, p, rng);
      const double ratio =
          std::abs(complete_sum({g, 0, v, p}, budget).value) / std::pow(static_cast<double>(p), (n + 1) / 2.0);
      ++out.checked;
      // v = 0 defines no hyperplane and counts as singular.
      const bool nonzero = std::any_of(v.begin(), v.end(), [](const BigInt& x) { return x != 0; });
      if (nonzero && section_smooth(g0, v, p, 1, budget)) {
        ++out.smooth;
        out.max_smooth_ratio = std::max(out.max_smooth_ratio, ratio);
        if (ratio > C) ++out.counterexamples;
      } else {
        out.max_singular_ratio = std::max(out.max_singular_ratio, ratio);
      }
    }
  }
  return out;
}

/// Ntilde(p) = sum over h mod p of p^{n - rank M(h)}, with ranks mod p in
/// machine integers. Agrees with ntilde(g, p).
inline BigInt ntilde_prime(const CubicPolynomial& g, i64 p, long double budget = kDefaultBudget) {
  if (!is_prime(p) || p <= 3) throw PreconditionError("ntilde_prime: p must be a prime >= 5");
  const int n = g.dimension();
  check_budget("ntilde_prime", ipow_ld(static_cast<long double>(p), n) * n * n * n, budget);
  std::vector<BigInt> zero(n, 0);
  const IntMatrix M0 = g.hessian(zero).entries;
  std::vector<std::vector<std::vector<i64>>> basis(n, std::vector<std::vector<i64>>(n, std::vector<i64>(n)));
  std::vector<std::vector<i64>> base(n, std::vector<i64>(n));
  for (int k = 0; k < n; ++k) {
    auto ek = zero;
    ek[k] = 1;
    const IntMatrix Mk = g.hessian(ek).entries;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) basis[k][i][j] = mod(BigInt(Mk[i][j] - M0[i][j]), p);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) base[i][j] = mod(M0[i][j], p);
  std::vector<i64> inv(p, 0);
  for (i64 x = 1; x < p; ++x) inv[x] = inverse_mod(x, p);
  std::vector<i64> by_rank(n + 1, 0);
  std::vector<i64> h(n, 0);
  std::vector<std::vector<i64>> a(n, std::vector<i64>(n));
  // M(h) mod p, updated as the odometer moves (a wrap is also a step of +1 mod p).
  std::vector<std::vector<i64>> cur = base;
  while (true) {
    a = cur;
    // The unit 1/6 does not change the rank.
    int rank = 0;
    for (int col = 0; col < n && rank < n; ++col) {
      int piv = -1;
      for (int r = rank; r < n; ++r)
        if (a[r][col] != 0) {
          piv = r;
          break;
        }
      if (piv < 0) continue;
      std::swap(a[piv], a[rank]);
      const i64 pinv = inv[a[rank][col]];
      for (int r = rank + 1; r < n; ++r) {
        if (a[r][col] == 0) continue;
        const i64 f = a[r][col] * pinv % p;
        for (int c = col; c < n; ++c) a[r][c] = ((a[r][c] - f * a[rank][c]) % p + p) % p;
      }
      ++rank;
    }
    by_rank[rank] += 1;
    int pos = n - 1;
    while (pos >= 0) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cur[i][j] = (cur[i][j] + basis[pos][i][j]) % p;
      if (++h[pos] < p) break;
      h[pos--] = 0;
    }
    if (pos < 0) break;
  }
  BigInt total = 0;
  for (int r = 0; r <= n; ++r) total += BigInt(by_rank[r]) * bigpow(BigInt(p), static_cast<unsigned>(n - r));
  return total;
}

/// Ntilde(q) <= A^{omega(q)} q^n over square-free q <= qmax coprime to 6.
/// Ntilde is multiplicative on coprime moduli (the condition q | X splits by CRT).
struct NtildeSweep {
  struct Row {
    i64 q = 0;
    int omega = 0;
    BigInt value;
    double ratio = 0;     // Ntilde(q) / q^n
    double A_needed = 0;  // ratio^{1/omega}
  };
  std::vector<Row> rows;
  double A_emp = 0;
  double A_bound = 0;  // 2 n^2
};

inline NtildeSweep ntilde_sweep(const CubicPolynomial& g, i64 qmax, long double budget = kDefaultBudget) {
  const int n = g.dimension();
  NtildeSweep out;
  out.A_bound = 2.0 * n * n;
  std::map<i64, BigInt> at_prime;
  for (i64 q = 5; q <= qmax; ++q) {
    if (std::gcd(q, i64{6}) != 1 || !is_squarefree(q)) continue;
    NtildeSweep::Row row;
    row.q = q;
    row.value = 1;
    for (const auto& pp : factorize(q)) {
      if (!at_prime.count(pp.p)) at_prime[pp.p] = ntilde_prime(g, pp.p, budget);
      row.value *= at_prime[pp.p];
      ++row.omega;
    }
    row.ratio = (Rational(row.value, bigpow(BigInt(q), static_cast<unsigned>(n)))).convert_to<double>();
    row.A_needed = std::pow(row.ratio, 1.0 / row.omega);
    out.A_emp = std::max(out.A_emp, row.A_needed);
    out.rows.push_back(std::move(row));
  }
  return out;
}

/// q2^3 q4^6 <= q and theta_p(e) over prime powers q = p^e.
struct SquarefullSweep {
  struct Row {
    i64 p = 0;
    int e = 0;
    SquarefullParts parts;
    bool inequality = true;
  };
  std::vector<Row> rows;
  int violations = 0;
};

inline SquarefullSweep squarefull_sweep(i64 pmax, int emax) {
  SquarefullSweep out;
  for (i64 p : primes_up_to(pmax))
    for (int e = 2; e <= emax; ++e) {
      const BigInt q = bigpow(BigInt(p), static_cast<unsigned>(e));
      if (q > BigInt(std::numeric_limits<i64>::max())) throw InputError("squarefull_sweep: p^e exceeds 64 bits");
      SquarefullSweep::Row row;
      row.p = p;
      row.e = e;
      row.parts = squarefull_parts(q.convert_to<i64>());
      row.inequality = bigpow(BigInt(row.parts.q2), 3) * bigpow(BigInt(row.parts.q4), 6) <= q;
      if (!row.inequality) ++out.violations;
      out.rows.push_back(std::move(row));
    }
  return out;
}

}  // namespace cubic
