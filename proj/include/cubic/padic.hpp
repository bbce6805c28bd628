#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cubic/error.hpp"
#include "cubic/expsums.hpp"
#include "cubic/integer.hpp"
#include "cubic/parallel.hpp"
#include "cubic/polynomial.hpp"

namespace cubic {

/// A zero of g modulo p^k together with the p-adic valuations of its gradient.
/// Valuations equal to k mean "at least k" (the component vanishes mod p^k).
struct PAdicWitness {
  i64 p = 0;
  int k = 0;
  std::vector<BigInt> x;
  int grad_val = 0;
  int grad_prime_val = 0;  // over the partials in variables 2..n
};

enum class LocalStatus { NONSINGULAR_ZERO, FAILS, UNKNOWN };

inline std::string to_string(LocalStatus s) {
  switch (s) {
    case LocalStatus::NONSINGULAR_ZERO:
      return "NONSINGULAR_ZERO";
    case LocalStatus::FAILS:
      return "FAILS_AT";
    case LocalStatus::UNKNOWN:
      return "UNKNOWN";
  }
  return "?";
}

struct ZeroSearchResult {
  LocalStatus status = LocalStatus::UNKNOWN;
  std::optional<PAdicWitness> witness;
  int fail_k = 0;               // first k with no zero mod p^k (FAILS)
  long double evaluations = 0;  // polynomial evaluations spent
  std::string note;
};

namespace detail {

inline int min_valuation(const std::vector<BigInt>& values, i64 p, int cap) {
  int v = cap;
  for (const auto& x : values) v = std::min(v, valuation(x, p, cap));
  return v;
}

inline BigInt bigmod(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

// Gradient valuations of g at x, capped at k: (all partials, partials 2..n).
inline std::pair<int, int> gradient_valuations(const CubicPolynomial& g, const std::vector<BigInt>& x, i64 p,
                                               int k) {
  const auto grad = g.gradient(x);
  const int all = min_valuation(grad, p, k);
  const int tail = min_valuation(std::vector<BigInt>(grad.begin() + 1, grad.end()), p, k);
  return {all, tail};
}

// Visits points of (Z/p)^n ordered by support size, then support set, then
// values, all lexicographically. fn returns true to stop.
template <typename Fn>
bool scan_by_support(int n, i64 p, Fn&& fn) {
  std::vector<i64> x(n, 0);
  for (int s = 0; s <= n; ++s) {
    std::vector<int> support(s);
    for (int i = 0; i < s; ++i) support[i] = i;
    while (true) {
      std::vector<i64> vals(s, 1);
      while (true) {
        std::fill(x.begin(), x.end(), 0);
        for (int i = 0; i < s; ++i) x[support[i]] = vals[i];
        if (fn(x)) return true;
        int pos = s - 1;
        while (pos >= 0 && ++vals[pos] == p) vals[pos--] = 1;
        if (pos < 0) break;
      }
      // Next s-subset of {0..n-1} in lexicographic order.
      int i = s - 1;
      while (i >= 0 && support[i] == n - s + i) --i;
      if (i < 0) break;
      ++support[i];
      for (int j = i + 1; j < s; ++j) support[j] = support[j - 1] + 1;
    }
  }
  return false;
}

}  // namespace detail

/// Re-evaluates a witness: g(x) = 0 mod p^k and the recorded valuations.
inline bool verify_witness(const CubicPolynomial& g, const PAdicWitness& w) {
  if (static_cast<int>(w.x.size()) != g.dimension() || w.k < 1) return false;
  const BigInt pk = bigpow(BigInt(w.p), static_cast<unsigned>(w.k));
  if (detail::bigmod(g.eval(w.x), pk) != 0) return false;
  const auto [all, tail] = detail::gradient_valuations(g, w.x, w.p, w.k);
  return all == w.grad_val && tail == w.grad_prime_val;
}

/// Newton lifting along the coordinate of least gradient valuation v. Requires
/// g(x) = 0 mod p^{2v+1}; the result is congruent to x mod p^{k-v}.
inline PAdicWitness hensel_lift(const CubicPolynomial& g, const PAdicWitness& w, int target_k) {
  if (target_k < w.k) throw InputError("hensel_lift: target precision below current");
  const int v = w.grad_val;
  if (v >= w.k || w.k < 2 * v + 1) throw PreconditionError("hensel_lift: witness is not liftable (k < 2v+1)");
  const BigInt pk0 = bigpow(BigInt(w.p), static_cast<unsigned>(w.k));
  if (detail::bigmod(g.eval(w.x), pk0) != 0) throw PreconditionError("hensel_lift: point is not a zero mod p^k");
  const BigInt p = w.p;
  std::vector<BigInt> x = w.x;
  const auto grad0 = g.gradient(x);
  int idx = 0;
  while (valuation(grad0[idx], w.p, w.k) != v) ++idx;
  int K = w.k;
  const BigInt pv = bigpow(p, static_cast<unsigned>(v));
  while (K < target_k) {
    // g(x) = p^K c, d = p^v e with e a unit: x_idx -= p^{K-v} c e^{-1}.
    const int next = std::min(target_k, 2 * K - 2 * v);
    const BigInt pn = bigpow(p, static_cast<unsigned>(next));
    const BigInt pK = bigpow(p, static_cast<unsigned>(K));
    const BigInt d = g.gradient(x)[idx];
    const BigInt modulus = bigpow(p, static_cast<unsigned>(next - K));
    const BigInt c = detail::bigmod(g.eval(x) / pK, modulus);
    const BigInt e = detail::bigmod(d / pv, modulus);
    const auto [gcd, inv, unused] = extended_gcd(e, modulus);
    (void)unused;
    if (gcd != 1) throw Error("hensel_lift: lost the unit derivative");
    x[idx] = detail::bigmod(x[idx] - bigpow(p, static_cast<unsigned>(K - v)) * detail::bigmod(c * inv, modulus), pn);
    K = next;
  }
  PAdicWitness out = w;
  out.k = target_k;
  const BigInt pt = bigpow(p, static_cast<unsigned>(target_k));
  for (auto& xi : x) xi = detail::bigmod(xi, pt);
  out.x = x;
  std::tie(out.grad_val, out.grad_prime_val) = detail::gradient_valuations(g, out.x, w.p, target_k);
  if (out.grad_val != v) throw Error("hensel_lift: gradient valuation changed");
  return out;
}

namespace detail {

// A zero mod p^k is a witness once k >= 2v+1 (v = gradient valuation < k),
// and, when require_prime is set, the partials in variables 2..n keep a
// valuation below k - v so lifting cannot kill them.
inline std::optional<PAdicWitness> as_witness(const CubicPolynomial& g, const std::vector<BigInt>& x, i64 p,
                                              int k, bool require_prime) {
  const auto [v, vp] = gradient_valuations(g, x, p, k);
  if (v >= k || k < 2 * v + 1) return std::nullopt;
  if (require_prime && vp >= k - v) return std::nullopt;
  return PAdicWitness{p, k, x, v, vp};
}

inline std::vector<BigInt> to_big(const std::vector<i64>& x) { return {x.begin(), x.end()}; }

// Witness search shared by nonsingular_zero_search and grad_prime_zero_search.
inline ZeroSearchResult zero_search(const CubicPolynomial& g, i64 p, int kmax, bool require_prime,
                                    long double budget) {
  if (!is_prime(p)) throw InputError("zero search: p must be prime");
  if (kmax < 1) throw InputError("zero search: kmax must be >= 1");
  const int n = g.dimension();
  ZeroSearchResult res;
  ModEval gp(g.poly(), p);
  // Level 1, in support order with early exit.
  std::vector<std::vector<i64>> frontier;
  bool any_zero = false;
  bool exhausted = true;
  detail::scan_by_support(n, p, [&](const std::vector<i64>& x) {
    if (res.evaluations >= budget) {
      exhausted = false;
      return true;
    }
    res.evaluations += 1;
    if (gp.eval(x) != 0) return false;
    any_zero = true;
    auto w = as_witness(g, to_big(x), p, 1, require_prime);
    if (w) {
      res.witness = w;
      return true;
    }
    frontier.push_back(x);
    return false;
  });
  if (res.witness) {
    res.status = LocalStatus::NONSINGULAR_ZERO;
    return res;
  }
  if (!exhausted) {
    res.note = "budget exhausted during the residue scan mod p";
    return res;
  }
  if (!any_zero) {
    res.status = LocalStatus::FAILS;
    res.fail_k = 1;
    return res;
  }
  // Deeper levels, depth first: children of a zero x mod p^{k-1} are the
  // x + p^{k-1} t, visited in support order of t. An exhausted tree whose
  // deepest zeros sit at level K proves that nothing survives mod p^{K+1}.
  int deepest = 1;
  bool out_of_budget = false;
  std::vector<std::vector<i64>> path;
  std::function<bool(const std::vector<i64>&, int)> descend = [&](const std::vector<i64>& x, int k) {
    if (k > kmax) return false;
    const BigInt pk = bigpow(BigInt(p), static_cast<unsigned>(k));
    const i64 step = ipow(p, k - 1);
    std::vector<i64> y(n);
    return detail::scan_by_support(n, p, [&](const std::vector<i64>& t) {
      if (res.evaluations >= budget) {
        out_of_budget = true;
        return true;
      }
      res.evaluations += 1;
      for (int i = 0; i < n; ++i) y[i] = x[i] + step * t[i];
      const auto yb = to_big(y);
      if (bigmod(g.eval(yb), pk) != 0) return false;
      deepest = std::max(deepest, k);
      if (auto w = as_witness(g, yb, p, k, require_prime)) {
        res.witness = w;
        return true;
      }
      return descend(y, k + 1);
    });
  };
  for (const auto& x : frontier)
    if (descend(x, 2)) break;
  if (res.witness) {
    res.status = LocalStatus::NONSINGULAR_ZERO;
    return res;
  }
  if (out_of_budget) {
    res.note = "budget exhausted while lifting";
    return res;
  }
  if (deepest < kmax) {
    res.status = LocalStatus::FAILS;
    res.fail_k = deepest + 1;
    return res;
  }
  res.note = "zeros exist mod p^" + std::to_string(kmax) + " but none is liftable at that precision";
  return res;
}

}  // namespace detail

/// Searches for a zero of g mod p^k (k <= kmax) with k >= 2v+1. FAILS means no
/// zero exists mod p^fail_k at all; UNKNOWN means zeros exist but every one
/// seen is too singular, or the budget ran out.
inline ZeroSearchResult nonsingular_zero_search(const CubicPolynomial& g, i64 p, int kmax = 6,
                                                long double budget = 1e8L) {
  return detail::zero_search(g, p, kmax, false, budget);
}

/// Full enumeration of (Z/p^k)^n confirming that g has no zero mod p^k.
inline bool replay_failure(const CubicPolynomial& g, i64 p, int k, long double budget = 1e8L) {
  const int n = g.dimension();
  const long double size = ipow_ld(static_cast<long double>(p), k * n);
  check_budget("replay_failure", size, budget);
  const i64 pk = ipow(p, k);
  detail::ModEval ge(g.poly(), pk);
  const auto chunks = static_cast<std::size_t>(std::min<i64>(pk, 64));
  auto found = parallel_chunks(chunks, [&](std::size_t c) {
    std::vector<i64> x(n, 0);
    const i64 lo = static_cast<i64>(c) * pk / static_cast<i64>(chunks);
    const i64 hi = static_cast<i64>(c + 1) * pk / static_cast<i64>(chunks);
    for (i64 x0 = lo; x0 < hi; ++x0) {
      std::fill(x.begin(), x.end(), 0);
      x[0] = x0;
      while (true) {
        if (ge.eval(x) == 0) return true;
        int pos = n - 1;
        while (pos >= 1 && ++x[pos] == pk) x[pos--] = 0;
        if (pos < 1) break;
      }
    }
    return false;
  });
  for (bool f : found)
    if (f) return false;
  return true;
}

enum class Overall { HOLDS, FAILS, UNKNOWN };

inline std::string to_string(Overall o) {
  switch (o) {
    case Overall::HOLDS:
      return "HOLDS";
    case Overall::FAILS:
      return "FAILS";
    case Overall::UNKNOWN:
      return "UNKNOWN";
  }
  return "?";
}

struct PrimeVerdict {
  i64 p = 0;
  ZeroSearchResult result;
};

struct CongruenceVerdict {
  i64 pmax = 0;
  int kmax = 0;
  std::vector<PrimeVerdict> per_prime;
  Overall overall = Overall::UNKNOWN;
  std::vector<PAdicWitness> witnesses;
  std::string caveat;
};

/// Witness search at every prime p <= pmax. HOLDS needs a liftable zero at
/// each of them; a single FAILS decides FAILS.
inline CongruenceVerdict congruence_condition(const CubicPolynomial& g, i64 pmax = 50, int kmax = 6,
                                              long double budget = 1e8L) {
  CongruenceVerdict v;
  v.pmax = pmax;
  v.kmax = kmax;
  bool all = true, failed = false;
  for (i64 p : primes_up_to(pmax)) {
    PrimeVerdict pv{p, nonsingular_zero_search(g, p, kmax, budget)};
    if (pv.result.status == LocalStatus::FAILS) failed = true;
    if (pv.result.status != LocalStatus::NONSINGULAR_ZERO) all = false;
    if (pv.result.witness) v.witnesses.push_back(*pv.result.witness);
    v.per_prime.push_back(std::move(pv));
  }
  v.overall = failed ? Overall::FAILS : (all ? Overall::HOLDS : Overall::UNKNOWN);
  v.caveat = "primes above " + std::to_string(pmax) +
             " are not tested; for absolutely irreducible g of small singular locus, nonsingular zeros "
             "mod p exist for all sufficiently large p by point-count estimates";
  return v;
}

/// p^{-k(n-1)} #{x mod p^k : g(x) = 0 mod p^k}. Zeros nonsingular mod p have
/// exactly p^{(k-1)(n-1)} lifts; singular ones are lifted explicitly, and since
/// g(x + p^j t) = g(x) mod p^{j+1} there, either all of their lifts are zeros or none.
inline Rational local_density(const CubicPolynomial& g, i64 p, int k, long double budget = kDefaultBudget) {
  if (!is_prime(p)) throw InputError("local_density: p must be prime");
  if (k < 1) throw InputError("local_density: k must be >= 1");
  const int n = g.dimension();
  check_budget("local_density", ipow_ld(static_cast<long double>(p), n), budget);
  detail::ModEval gp(g.poly(), p);
  std::vector<detail::ModEval> grad;
  for (int i = 0; i < n; ++i) grad.emplace_back(g.poly().derivative(i), p);
  const auto chunks = static_cast<std::size_t>(p);
  struct Level1 {
    u64 nonsingular = 0;
    std::vector<std::vector<i64>> singular;
  };
  auto parts = parallel_chunks(chunks, [&](std::size_t c) {
    Level1 out;
    std::vector<i64> x(n, 0);
    x[0] = static_cast<i64>(c);
    while (true) {
      if (gp.eval(x) == 0) {
        bool sing = true;
        for (const auto& d : grad)
          if (d.eval(x) != 0) {
            sing = false;
            break;
          }
        if (sing)
          out.singular.push_back(x);
        else
          ++out.nonsingular;
      }
      int pos = n - 1;
      while (pos >= 1 && ++x[pos] == p) x[pos--] = 0;
      if (pos < 1) break;
    }
    return out;
  });
  u64 nonsingular = 0;
  std::vector<std::vector<i64>> frontier;
  for (auto& part : parts) {
    nonsingular += part.nonsingular;
    for (auto& s : part.singular) frontier.push_back(std::move(s));
  }
  BigInt count = BigInt(nonsingular) * bigpow(BigInt(p), static_cast<unsigned>((k - 1) * (n - 1)));
  long double work = ipow_ld(static_cast<long double>(p), n);
  for (int j = 1; j < k; ++j) {
    // frontier: singular zeros mod p^j. Keep those with g = 0 mod p^{j+1}, then
    // expand to their p^n lifts mod p^{j+1} unless this is the last level.
    const BigInt pj1 = bigpow(BigInt(p), static_cast<unsigned>(j + 1));
    std::vector<std::vector<i64>> alive;
    for (const auto& x : frontier)
      if (detail::bigmod(g.eval(detail::to_big(x)), pj1) == 0) alive.push_back(x);
    if (j + 1 == k) {
      frontier = std::move(alive);
      count += BigInt(frontier.size()) * bigpow(BigInt(p), static_cast<unsigned>(n));
      frontier.clear();
      break;
    }
    work += static_cast<long double>(alive.size()) * ipow_ld(static_cast<long double>(p), n);
    check_budget("local_density lifting", work, budget);
    const i64 step = ipow(p, j);
    std::vector<std::vector<i64>> next;
    std::vector<i64> t(n, 0), y(n);
    for (const auto& x : alive) {
      std::fill(t.begin(), t.end(), 0);
      while (true) {
        for (int i = 0; i < n; ++i) y[i] = x[i] + step * t[i];
        next.push_back(y);
        int pos = n - 1;
        while (pos >= 0 && ++t[pos] == p) t[pos--] = 0;
        if (pos < 0) break;
      }
    }
    frontier = std::move(next);
  }
  if (k == 1) count += BigInt(frontier.size());
  return Rational(count, bigpow(BigInt(p), static_cast<unsigned>(k * (n - 1))));
}

/// Exact number of zeros of g mod p^k implied by local_density.
inline BigInt zero_count_mod_pk(const CubicPolynomial& g, i64 p, int k, long double budget = kDefaultBudget) {
  const Rational d = local_density(g, p, k, budget);
  const Rational c = d * Rational(bigpow(BigInt(p), static_cast<unsigned>(k * (g.dimension() - 1))));
  return numerator(c) / denominator(c);
}

/// A liftable zero with a nonvanishing partial in one of the variables 2..n.
/// Requires that y1 does not divide the cubic part and that g has some
/// nonsingular zero at p. Throws SearchFailure with a trace when the budget
/// runs out first.
inline PAdicWitness grad_prime_zero_search(const CubicPolynomial& h, i64 p, int kmax = 6,
                                           long double budget = 1e8L) {
  if (h.dimension() < 2) throw InputError("grad_prime_zero_search: needs n >= 2");
  bool divisible = true;
  const HomogeneousCubic top = h.homogeneous_part();
  for (const auto& [m, c] : top.poly().terms())
    if (std::find(m.begin(), m.end(), 0) == m.end()) divisible = false;
  if (divisible) throw PreconditionError("grad_prime_zero_search: y1 divides the cubic part (reducible)");
  const auto base = nonsingular_zero_search(h, p, kmax, budget);
  if (base.status == LocalStatus::FAILS)
    throw PreconditionError("grad_prime_zero_search: no zero mod p^" + std::to_string(base.fail_k));
  if (base.witness) {
    auto w = *base.witness;
    if (w.grad_prime_val < w.k - w.grad_val) return w;
  }
  const auto res = detail::zero_search(h, p, kmax, true, budget);
  if (res.witness) return *res.witness;
  throw SearchFailure("grad_prime_zero_search: no witness with nonzero partials in y2..yn at p = " +
                          std::to_string(p),
                      {"evaluations: " + std::to_string(static_cast<double>(res.evaluations)),
                       "base search: " + to_string(base.status), res.note});
}

}  // namespace cubic
