#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cubic/error.hpp"

namespace cubic {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

/// Least non-negative residue of a mod m, m > 0.
inline i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline i64 mod(const BigInt& a, i64 m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r.convert_to<i64>();
}

inline i64 mulmod(i64 a, i64 b, i64 m) {
  return static_cast<i64>(static_cast<i128>(a) * b % m);
}

inline i64 powmod(i64 base, u64 exp, i64 m) {
  if (m == 1) return 0;
  i64 result = 1;
  base = mod(base, m);
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

inline i64 ipow(i64 base, int exp) {
  i64 r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline long double ipow_ld(long double base, int exp) {
  long double r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline BigInt bigpow(const BigInt& base, unsigned exp) {
  return boost::multiprecision::pow(base, exp);
}

/// Returns (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0.
inline std::tuple<i64, i64, i64> extended_gcd(i64 a, i64 b) {
  i64 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    i64 q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

inline std::tuple<BigInt, BigInt, BigInt> extended_gcd(const BigInt& a, const BigInt& b) {
  BigInt old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    BigInt q = old_r / r;
    BigInt tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

/// Inverse of a modulo m; requires gcd(a, m) = 1.
inline i64 inverse_mod(i64 a, i64 m) {
  if (m == 1) return 0;
  auto [g, x, y] = extended_gcd(mod(a, m), m);
  (void)y;
  if (g != 1) throw PreconditionError("inverse_mod: " + std::to_string(a) + " not invertible mod " +
                                      std::to_string(m));
  return mod(x, m);
}

inline bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<i64> primes_up_to(i64 bound) {
  std::vector<i64> out;
  if (bound < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(bound) + 1, false);
  for (i64 i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (i64 j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return out;
}

struct PrimePower {
  i64 p;
  int e;
  i64 value() const { return ipow(p, e); }
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Trial-division factorization, primes in increasing order.
inline std::vector<PrimePower> factorize(i64 n) {
  if (n < 1) throw InputError("factorize: argument must be positive");
  std::vector<PrimePower> out;
  for (i64 d = 2; d * d <= n; ++d) {
    if (n % d != 0) continue;
    int e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    out.push_back({d, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

inline i64 euler_phi(i64 n) {
  i64 r = n;
  for (const auto& pp : factorize(n)) r = r / pp.p * (pp.p - 1);
  return r;
}

inline int omega(i64 n) { return static_cast<int>(factorize(n).size()); }

inline bool is_squarefree(i64 n) {
  for (const auto& pp : factorize(n))
    if (pp.e > 1) return false;
  return true;
}

inline bool is_squarefull(i64 n) {
  for (const auto& pp : factorize(n))
    if (pp.e < 2) return false;
  return true;
}

/// p-adic valuation of x, capped at `cap` (x = 0 gives cap).
inline int valuation(BigInt x, i64 p, int cap) {
  if (x == 0) return cap;
  int v = 0;
  while (v < cap && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

inline int valuation(i64 x, i64 p, int cap) {
  if (x == 0) return cap;
  int v = 0;
  while (v < cap && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

/// Solves x = r_i mod m_i for pairwise coprime moduli; returns the least x >= 0.
inline BigInt crt(const std::vector<std::pair<BigInt, BigInt>>& congruences) {
  BigInt x = 0, m = 1;
  for (const auto& [r, mi] : congruences) {
    auto [g, s, t] = extended_gcd(m, mi);
    (void)t;
    if (g != 1) throw PreconditionError("crt: moduli not coprime");
    // x' = x + m * ((r - x) * s mod mi)
    BigInt k = ((r - x) * s) % mi;
    if (k < 0) k += mi;
    x += m * k;
    m *= mi;
    x %= m;
  }
  return x;
}

inline std::string to_string(const BigInt& x) { return x.str(); }

}  // namespace cubic
