#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cubic/error.hpp"
#include "cubic/expsums.hpp"
#include "cubic/ff_geometry.hpp"
#include "cubic/integer.hpp"
#include "cubic/padic.hpp"
#include "cubic/parallel.hpp"

namespace cubic {

struct SeriesReport {
  i64 Qmax = 0;
  std::map<i64, double> terms;         // q^{-n} Re S_0(q; 0)
  std::map<i64, double> partial_sums;  // sum over q' <= Q
  std::map<i64, double> per_prime;     // sum over p^d <= Qmax of p^{-dn} S_0(p^d; 0)
  double max_imag = 0;                 // largest |Im| among the terms
  double convergence_slope = 0;        // least-squares slope of log|term| against log q
  int slope_points = 0;
  double value() const { return partial_sums.empty() ? 0.0 : partial_sums.rbegin()->second; }
};

/// Least-squares slope of log|t_q| against log q over q >= 2 with |t_q| above
/// the noise floor. Returns {slope, points used}.
inline std::pair<double, int> tail_slope(const std::map<i64, double>& terms, double floor = 1e-12) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& [q, t] : terms) {
    if (q < 2 || std::abs(t) <= floor) continue;
    const double x = std::log(static_cast<double>(q)), y = std::log(std::abs(t));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return {0.0, m};
  const double den = m * sxx - sx * sx;
  return {den == 0 ? 0.0 : (m * sxy - sx * sy) / den, m};
}

/// Truncated singular series sum_{q <= Qmax} q^{-n} S_0(q; 0) in increasing q.
inline SeriesReport series_partial(const CubicPolynomial& g, i64 Qmax, long double budget = kDefaultBudget) {
  if (Qmax < 1) throw InputError("series_partial: Qmax must be >= 1");
  const int n = g.dimension();
  SeriesReport rep;
  rep.Qmax = Qmax;
  std::vector<i64> qs;
  for (i64 q = 1; q <= Qmax; ++q) qs.push_back(q);
  auto values = parallel_chunks(qs.size(), [&](std::size_t i) {
    ExpSumSpec s{g, 0, std::vector<BigInt>(n, 0), qs[i]};
    return crt_sum(s, budget).value;
  });
  double running = 0;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const double scale = std::pow(static_cast<double>(qs[i]), -n);
    const double re = values[i].real() * scale;
    rep.max_imag = std::max(rep.max_imag, std::abs(values[i].imag()) * scale);
    rep.terms[qs[i]] = re;
    running += re;
    rep.partial_sums[qs[i]] = running;
  }
  for (i64 p : primes_up_to(Qmax)) {
    double f = 1;
    for (i64 pd = p; pd <= Qmax; pd *= p) f += rep.terms[pd];
    rep.per_prime[p] = f;
  }
  std::tie(rep.convergence_slope, rep.slope_points) = tail_slope(rep.terms);
  return rep;
}

enum class Positivity { POSITIVE, NOT_POSITIVE, INCONCLUSIVE };

inline std::string to_string(Positivity p) {
  switch (p) {
    case Positivity::POSITIVE:
      return "POSITIVE";
    case Positivity::NOT_POSITIVE:
      return "NOT_POSITIVE";
    case Positivity::INCONCLUSIVE:
      return "INCONCLUSIVE";
  }
  return "?";
}

struct PositivityReport {
  Positivity verdict = Positivity::INCONCLUSIVE;
  int s = -1;
  bool s_heuristic = true;
  CongruenceVerdict congruence;
  std::vector<i64> blocking_primes;
  std::string reason;
};

/// POSITIVE when every prime up to pmax has a liftable nonsingular zero and
/// the singular locus of the cubic part satisfies s < n - 9. A prime with no
/// zero modulo some p^k gives NOT_POSITIVE, since its local factor vanishes.
inline PositivityReport positivity_certificate(const CubicPolynomial& g, i64 pmax = 50,
                                               const std::vector<i64>& s_primes = {5, 7, 11}, int kmax = 6,
                                               long double budget = kDefaultBudget) {
  PositivityReport rep;
  rep.congruence = congruence_condition(g, pmax, kmax, std::min<long double>(budget, 1e8L));
  for (const auto& pv : rep.congruence.per_prime)
    if (pv.result.status != LocalStatus::NONSINGULAR_ZERO) rep.blocking_primes.push_back(pv.p);
  if (rep.congruence.overall == Overall::FAILS) {
    rep.verdict = Positivity::NOT_POSITIVE;
    rep.reason = "a local factor vanishes: no zero modulo a prime power";
    return rep;
  }
  const auto sdim = singular_locus_dim_Q(g.homogeneous_part(), s_primes, 3, budget);
  rep.s = sdim.value;
  rep.s_heuristic = sdim.heuristic;
  const int n = g.dimension();
  if (rep.s >= n - 9) {
    rep.verdict = Positivity::INCONCLUSIVE;
    rep.reason = "singular locus too large: s = " + std::to_string(rep.s) + " >= n - 9";
    return rep;
  }
  if (!rep.blocking_primes.empty()) {
    rep.verdict = Positivity::INCONCLUSIVE;
    rep.reason = "no nonsingular zero certified at some primes";
    return rep;
  }
  rep.verdict = Positivity::POSITIVE;
  rep.reason = "nonsingular zeros at every p <= " + std::to_string(pmax) + " and s < n - 9";
  return rep;
}

}  // namespace cubic
