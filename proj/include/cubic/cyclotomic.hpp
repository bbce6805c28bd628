#pragma once

#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "cubic/error.hpp"
#include "cubic/integer.hpp"

namespace cubic {

/// Integer coefficients, low degree first.
using ZPoly = std::vector<BigInt>;

namespace detail {

inline void trim(ZPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Quotient of a by a monic divisor; the remainder must vanish.
inline ZPoly exact_divide(ZPoly a, const ZPoly& b) {
  trim(a);
  if (a.size() < b.size()) return {};
  ZPoly quot(a.size() - b.size() + 1, 0);
  const auto top = static_cast<std::ptrdiff_t>(b.size()) - 1;
  for (auto i = static_cast<std::ptrdiff_t>(a.size()) - 1; i >= top; --i) {
    const BigInt c = a[i];
    if (c == 0) continue;
    const std::size_t shift = static_cast<std::size_t>(i - top);
    quot[shift] = c;
    for (std::size_t k = 0; k < b.size(); ++k) a[shift + k] -= c * b[k];
  }
  trim(a);
  if (!a.empty()) throw Error("cyclotomic: inexact division");
  return quot;
}

}  // namespace detail

/// The m-th cyclotomic polynomial, via x^m - 1 = prod_{d | m} Phi_d(x).
inline ZPoly cyclotomic_poly(i64 m) {
  static thread_local std::map<i64, ZPoly> cache;
  if (auto it = cache.find(m); it != cache.end()) return it->second;
  if (m < 1) throw InputError("cyclotomic_poly: m must be positive");
  ZPoly num(m + 1, 0);
  num[0] = -1;
  num[m] = 1;
  for (i64 d = 1; d < m; ++d)
    if (m % d == 0) num = detail::exact_divide(num, cyclotomic_poly(d));
  cache[m] = num;
  return num;
}

/// Reduces sum_r hist[r] x^r (indices mod m) modulo Phi_m. The reduced
/// polynomial has degree < phi(m) and represents the same element of Z[zeta_m].
inline ZPoly reduce_cyclotomic(const std::vector<BigInt>& hist) {
  const i64 m = static_cast<i64>(hist.size());
  if (m == 0) throw InputError("reduce_cyclotomic: empty histogram");
  ZPoly a = hist;
  const auto factors = factorize(m);
  if (factors.size() == 1) {
    // Phi_{p^e}(x) = sum_{i<p} x^{i p^{e-1}}: fold each top coefficient down.
    const i64 p = factors[0].p;
    const i64 step = m / p;
    const i64 deg = m - step;  // phi(m)
    for (i64 r = m - 1; r >= deg; --r) {
      if (a[r] == 0) continue;
      const BigInt c = a[r];
      a[r] = 0;
      for (i64 i = 0; i < p - 1; ++i) a[r - deg + i * step] -= c;
    }
    a.resize(deg);
  } else if (m == 1) {
    // Phi_1 = x - 1: the value is the sum.
  } else {
    const ZPoly phi = cyclotomic_poly(m);
    const std::size_t deg = phi.size() - 1;
    for (std::size_t r = a.size(); r-- > deg;) {
      if (a[r] == 0) continue;
      const BigInt c = a[r];
      for (std::size_t k = 0; k <= deg; ++k) a[r - deg + k] -= c * phi[k];
    }
    a.resize(deg);
  }
  detail::trim(a);
  return a;
}

/// The exact value of sum_r hist[r] e(r / m) when it is an integer, else nullopt.
inline std::optional<BigInt> exact_integer_value(const std::vector<BigInt>& hist) {
  if (hist.size() == 1) return hist[0];
  ZPoly red = reduce_cyclotomic(hist);
  if (red.empty()) return BigInt(0);
  if (red.size() == 1) return red[0];
  return std::nullopt;
}

/// sum_r hist[r] e(r / m) in floating point.
template <typename Count>
std::complex<double> contract_roots(const std::vector<Count>& hist) {
  const std::size_t m = hist.size();
  long double re = 0, im = 0;
  for (std::size_t r = 0; r < m; ++r) {
    if (hist[r] == 0) continue;
    long double c;
    if constexpr (std::is_same_v<Count, BigInt>)
      c = hist[r].template convert_to<long double>();
    else
      c = static_cast<long double>(hist[r]);
    const long double ang = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(r) / m;
    re += c * std::cos(ang);
    im += c * std::sin(ang);
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

}  // namespace cubic
