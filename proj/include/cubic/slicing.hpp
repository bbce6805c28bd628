#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cubic/error.hpp"
#include "cubic/ff_geometry.hpp"
#include "cubic/finite_field.hpp"
#include "cubic/integer.hpp"
#include "cubic/matrix.hpp"
#include "cubic/padic.hpp"
#include "cubic/polynomial.hpp"

namespace cubic {

/// A matrix in SL_n(Z) with first row a, by column reduction of a to e_1.
/// If a V = e_1 for unimodular V then V^{-1} has first row a.
inline IntMatrix complete_unimodular(const std::vector<BigInt>& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) throw InputError("complete_unimodular: empty vector");
  BigInt g = 0;
  for (const auto& x : a) g = gcd(g, x);
  if (g != 1) throw InputError("complete_unimodular: vector is not primitive");
  std::vector<BigInt> r = a;
  IntMatrix W = identity_matrix(n);  // running V^{-1}
  // Column op col_i += f col_j on r corresponds to row op row_j -= f row_i on W.
  auto add_col = [&](int i, int j, const BigInt& f) {
    r[i] += f * r[j];
    for (int c = 0; c < n; ++c) W[j][c] -= f * W[i][c];
  };
  auto swap_col = [&](int i, int j) {
    std::swap(r[i], r[j]);
    std::swap(W[i], W[j]);
  };
  for (int j = 1; j < n; ++j) {
    while (r[j] != 0) {
      add_col(0, j, -(r[0] / r[j]));
      swap_col(0, j);
    }
  }
  if (r[0] == -1) {
    // Negate column 0 (row 0 of W), then fix the determinant with another row.
    r[0] = 1;
    for (auto& x : W[0]) x = -x;
    if (n == 1) throw InputError("complete_unimodular: (-1) has no completion in SL_1");
    for (auto& x : W[1]) x = -x;
  }
  if (determinant(W) == -1) {
    if (n == 1) throw InputError("complete_unimodular: no completion in SL_1");
    for (auto& x : W[1]) x = -x;
  }
  return W;
}

/// h(y) = g(M^{-1} y), so that y_1 = a.x.
inline CubicPolynomial change_variables(const CubicPolynomial& g, const IntMatrix& M) {
  return g.transform(inverse_unimodular(M));
}

/// H_1(u) = h_0(0, u): the cubic part of every slice h^{(c)}.
inline IntPoly section_form(const CubicPolynomial& h) {
  const int n = h.dimension();
  IntPoly out(n - 1);
  const HomogeneousCubic top = h.homogeneous_part();
  for (const auto& [m, c] : top.poly().terms()) {
    if (std::find(m.begin(), m.end(), 0) != m.end()) continue;
    Monomial shifted;
    for (int i : m) shifted.push_back(i - 1);
    out.add_term(shifted, c);
  }
  return out;
}

/// A cubic form whose zero set spans its ambient space: not a multiple of a
/// cube of a linear form, i.e. its partials span at least two dimensions.
inline bool section_nondegenerate(const IntPoly& p) {
  if (p.is_zero()) return false;
  std::map<Monomial, int> column;
  std::vector<IntPoly> partials;
  for (int i = 0; i < p.vars(); ++i) {
    partials.push_back(p.derivative(i));
    for (const auto& [m, c] : partials.back().terms()) column.emplace(m, 0);
  }
  int k = 0;
  for (auto& [m, idx] : column) idx = k++;
  IntMatrix rows(partials.size(), std::vector<BigInt>(column.size(), 0));
  for (std::size_t i = 0; i < partials.size(); ++i)
    for (const auto& [m, c] : partials[i].terms()) rows[i][column[m]] = c;
  return rank(rows) >= 2;
}

inline int variables_used(const IntPoly& H) {
  std::vector<bool> used(H.vars(), false);
  for (const auto& [m, c] : H.terms())
    for (int i : m) used[i] = true;
  return static_cast<int>(std::count(used.begin(), used.end(), true));
}

struct SliceConfig {
  std::vector<i64> s_primes{5, 7, 11};
  int jmax = 2;
  i64 pmax = 100;
  int kmax = 6;
  int trials = 200;
  std::uint64_t seed = 1;
  int box = 10;
  long double budget = 1e8L;
};

struct HyperplaneChoice {
  std::vector<BigInt> a;
  int s_before = -1;
  int s_section = -1;
  int trial = 0;
  int variables_used = 0;
};

/// First primitive a in a seeded stream over [-B, B]^n whose section
/// g0 = a.x = 0 has singular-locus dimension s - 1 at every sampled prime and
/// is nondegenerate.
inline HyperplaneChoice find_good_hyperplane(const HomogeneousCubic& g0, const SliceConfig& cfg) {
  const int n = g0.dimension();
  if (n < 3) throw PreconditionError("find_good_hyperplane: needs n >= 3");
  const auto sd = singular_locus_dim_Q(g0, cfg.s_primes, cfg.jmax, cfg.budget);
  if (sd.value < 0) throw PreconditionError("find_good_hyperplane: g0 is already nonsingular (s = -1)");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> coord(-cfg.box, cfg.box);
  std::vector<std::string> trace;
  const CubicPolynomial g0p = g0.as_polynomial();
  for (int t = 0; t < cfg.trials; ++t) {
    std::vector<BigInt> a(n);
    for (auto& x : a) x = coord(rng);
    BigInt content = 0;
    for (const auto& x : a) content = gcd(content, x);
    if (content == 0) continue;
    for (auto& x : a) x /= content;
    const IntMatrix M = complete_unimodular(a);
    const IntPoly H1poly = section_form(change_variables(g0p, M));
    if (!section_nondegenerate(H1poly)) {
      trace.push_back("trial " + std::to_string(t) + ": degenerate section");
      continue;
    }
    const HomogeneousCubic H1(H1poly);
    bool ok = true;
    int s_sec = -1;
    try {
      for (i64 p : cfg.s_primes) {
        if (H1.content() % p == 0) {
          ok = false;
          break;
        }
        const auto rep = singular_locus_dim_mod_p(H1, p, affordable_degree(H1, p, cfg.jmax, cfg.budget), cfg.budget);
        if (rep.dim_estimate != sd.value - 1) {
          ok = false;
          trace.push_back("trial " + std::to_string(t) + ": section dimension " + std::to_string(rep.dim_estimate) +
                          " at p = " + std::to_string(p));
          break;
        }
        s_sec = rep.dim_estimate;
      }
    } catch (const BudgetError& e) {
      ok = false;
      trace.push_back("trial " + std::to_string(t) + ": " + e.what());
    }
    if (ok) return {a, sd.value, s_sec, t, variables_used(H1poly)};
  }
  throw SearchFailure("find_good_hyperplane: no acceptable hyperplane in " + std::to_string(cfg.trials) + " trials",
                      trace);
}

/// Per-prime data for the slicing constant: a zero y of h with
/// p^k || grad' h(y), the modulus p^{2k+1}, and the induced liftable zero of h^{(c)}.
struct SlicePrime {
  i64 p = 0;
  int k = 0;
  BigInt modulus;
  PAdicWitness y;        // zero of h
  PAdicWitness section;  // zero of h^{(c)} at u = (y_2, ..., y_n) mod p^{2k+1}
};

struct ChooseCResult {
  BigInt c;
  std::vector<SlicePrime> per_prime;
};

/// The least c >= 0 with c = y_1 mod p^{2k(p)+1} for every p <= pmax, where y
/// is a zero of h with grad' h(y) of exact valuation k(p).
inline ChooseCResult choose_c(const CubicPolynomial& h, i64 pmax, int kmax = 6, long double budget = 1e8L) {
  const int n = h.dimension();
  if (n < 2) throw InputError("choose_c: needs n >= 2");
  ChooseCResult out;
  std::vector<std::pair<BigInt, BigInt>> congruences;
  for (i64 p : primes_up_to(pmax)) {
    PAdicWitness w = grad_prime_zero_search(h, p, kmax, budget);
    const int k = w.grad_prime_val;
    if (w.k < 2 * k + 1) w = hensel_lift(h, w, 2 * k + 1);
    SlicePrime sp;
    sp.p = p;
    sp.k = k;
    sp.modulus = bigpow(BigInt(p), static_cast<unsigned>(2 * k + 1));
    sp.y = w;
    congruences.emplace_back(detail::bigmod(w.x[0], sp.modulus), sp.modulus);
    out.per_prime.push_back(std::move(sp));
  }
  out.c = congruences.empty() ? BigInt(0) : crt(congruences);
  const CubicPolynomial hc = h.slice(out.c);
  for (auto& sp : out.per_prime) {
    std::vector<BigInt> u;
    for (int i = 1; i < n; ++i) u.push_back(detail::bigmod(sp.y.x[i], sp.modulus));
    const int prec = 2 * sp.k + 1;
    const auto [v, vp] = detail::gradient_valuations(hc, u, sp.p, prec);
    sp.section = PAdicWitness{sp.p, prec, u, v, vp};
    if (!verify_witness(hc, sp.section) || v != sp.k)
      throw Error("choose_c: section witness failed at p = " + std::to_string(sp.p));
  }
  return out;
}

struct SliceCertificate {
  std::vector<BigInt> a;
  IntMatrix M;
  BigInt c;
  int s_before = -1;
  int s_after = -1;
  std::vector<i64> s_primes;
  int jmax = 2;
  i64 pmax = 0;
  std::vector<SlicePrime> per_prime;
  CubicPolynomial result;
  std::string note;
};

/// One induction step: hyperplane, unimodular completion, CRT constant, slice.
inline SliceCertificate slice_step(const CubicPolynomial& g, const SliceConfig& cfg = {}) {
  const auto choice = find_good_hyperplane(g.homogeneous_part(), cfg);
  SliceCertificate cert;
  cert.a = choice.a;
  cert.M = complete_unimodular(choice.a);
  cert.s_before = choice.s_before;
  cert.s_primes = cfg.s_primes;
  cert.jmax = cfg.jmax;
  cert.pmax = cfg.pmax;
  const CubicPolynomial h = change_variables(g, cert.M);
  auto cc = choose_c(h, cfg.pmax, cfg.kmax, cfg.budget);
  cert.c = cc.c;
  cert.per_prime = std::move(cc.per_prime);
  cert.result = h.slice(cert.c);
  cert.s_after = singular_locus_dim_Q(cert.result.homogeneous_part(), cfg.s_primes, cfg.jmax, cfg.budget).value;
  cert.note =
      "singular-locus dimensions are sampled at the listed primes (heuristic); primes above pmax rely on "
      "point-count estimates for nonsingular zeros; distinct integer zeros of the slice give distinct zeros of g";
  return cert;
}

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> reasons;
  void fail(std::string why) {
    ok = false;
    reasons.push_back(std::move(why));
  }
};

/// Replays every claim of a certificate against g.
inline VerifyReport verify_certificate(const SliceCertificate& cert, const CubicPolynomial& g,
                                       long double budget = 1e8L) {
  VerifyReport rep;
  const int n = g.dimension();
  BigInt content = 0;
  for (const auto& x : cert.a) content = gcd(content, x);
  if (static_cast<int>(cert.a.size()) != n || content != 1) rep.fail("a is not a primitive vector of length n");
  if (!is_square(cert.M) || static_cast<int>(cert.M.size()) != n) {
    rep.fail("M has the wrong shape");
    return rep;
  }
  if (determinant(cert.M) != 1) rep.fail("det M != 1");
  if (cert.M[0] != cert.a) rep.fail("first row of M differs from a");
  if (!rep.ok) return rep;
  const CubicPolynomial h = change_variables(g, cert.M);
  CubicPolynomial hc;
  try {
    hc = h.slice(cert.c);
  } catch (const Error& e) {
    rep.fail(std::string("slice failed: ") + e.what());
    return rep;
  }
  if (!(hc == cert.result)) rep.fail("recorded slice differs from h(c, u)");
  std::vector<i64> expected = primes_up_to(cert.pmax);
  if (cert.per_prime.size() != expected.size()) rep.fail("per-prime data does not cover all p <= pmax");
  for (std::size_t i = 0; i < cert.per_prime.size(); ++i) {
    const auto& sp = cert.per_prime[i];
    const std::string at = " at p = " + std::to_string(sp.p);
    if (i < expected.size() && sp.p != expected[i]) rep.fail("unexpected prime" + at);
    if (sp.modulus != bigpow(BigInt(sp.p), static_cast<unsigned>(2 * sp.k + 1))) rep.fail("modulus mismatch" + at);
    if (detail::bigmod(cert.c - sp.y.x.at(0), sp.modulus) != 0) rep.fail("c does not match y_1" + at);
    if (!verify_witness(h, sp.y)) rep.fail("zero of h does not replay" + at);
    if (sp.y.grad_prime_val != sp.k) rep.fail("recorded k differs from the valuation of grad' h" + at);
    if (!verify_witness(hc, sp.section)) rep.fail("zero of the slice does not replay" + at);
    if (sp.section.k < 2 * sp.section.grad_val + 1) rep.fail("slice zero is not liftable" + at);
  }
  try {
    const int before = singular_locus_dim_Q(g.homogeneous_part(), cert.s_primes, cert.jmax, budget).value;
    const int after = singular_locus_dim_Q(hc.homogeneous_part(), cert.s_primes, cert.jmax, budget).value;
    if (before != cert.s_before) rep.fail("s_before does not replay");
    if (after != cert.s_after) rep.fail("s_after does not replay");
    if (after != before - 1) rep.fail("singular locus did not drop by one");
  } catch (const Error& e) {
    rep.fail(std::string("singular locus check failed: ") + e.what());
  }
  return rep;
}

/// Repeated slicing until the cubic part is nonsingular at the sampled primes.
inline std::vector<SliceCertificate> slice_to_nonsingular(const CubicPolynomial& g, const SliceConfig& cfg = {}) {
  std::vector<SliceCertificate> out;
  CubicPolynomial cur = g;
  while (singular_locus_dim_Q(cur.homogeneous_part(), cfg.s_primes, cfg.jmax, cfg.budget).value >= 0) {
    out.push_back(slice_step(cur, cfg));
    cur = out.back().result;
  }
  return out;
}

/// Point counts behind the identity N = (N1 - N2)/(p - 1) for a slice h^{(c)}:
/// N counts zeros of h^{(c)}, N1 zeros of H(t, u) = t^3 h^{(c)}(u/t) and N2
/// zeros of H_1 = H(0, u), all over F_p.
struct SectionCounts {
  i64 p = 0;
  BigInt N, N1, N2;
  BigInt S, S1;  // singular zeros of h^{(c)}, and common zeros of H and its u-partials
  bool identity_holds() const { return N * (p - 1) == N1 - N2; }
  bool singular_bound_holds() const { return S * (p - 1) <= S1; }
};

inline SectionCounts section_counts(const CubicPolynomial& hc, i64 p, long double budget = kDefaultBudget) {
  ExtField f(p, 1);
  SectionCounts s;
  s.p = p;
  const IntPoly& poly = hc.poly();
  const int m = poly.vars();
  const IntPoly H = poly.homogenize(3);
  s.N = count_affine_zeros(poly, f, budget);
  s.N1 = count_affine_zeros(H, f, budget);
  s.N2 = count_affine_zeros(hc.homogeneous_part().poly(), f, budget);
  std::vector<IntPoly> sing{poly};
  for (int i = 0; i < m; ++i) sing.push_back(poly.derivative(i));
  s.S = count_common_zeros(sing, m, f, budget);
  std::vector<IntPoly> sys{H};
  for (int i = 1; i <= m; ++i) sys.push_back(H.derivative(i));
  s.S1 = count_common_zeros(sys, m + 1, f, budget);
  return s;
}

}  // namespace cubic
