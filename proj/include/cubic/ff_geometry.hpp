#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cubic/error.hpp"
#include "cubic/finite_field.hpp"
#include "cubic/integer.hpp"
#include "cubic/parallel.hpp"
#include "cubic/polynomial.hpp"

namespace cubic {

using Elem = ExtField::Elem;

namespace detail {

// A polynomial in k variables split by the power of its last variable, so that
// for a fixed choice of the first k - 1 coordinates it becomes a univariate
// cubic evaluated by Horner's rule.
struct SplitPoly {
  struct Term {
    Elem coeff;
    int power;
    std::vector<int> others;
  };
  std::vector<Term> terms;
  int degree = 0;
};

inline SplitPoly split_last(const IntPoly& poly, const ExtField& f) {
  SplitPoly s;
  const int last = poly.vars() - 1;
  for (const auto& [m, c] : poly.terms()) {
    Elem e = f.from_int(c);
    if (e == 0) continue;
    SplitPoly::Term t{e, 0, {}};
    for (int i : m) {
      if (i == last)
        ++t.power;
      else
        t.others.push_back(i);
    }
    s.degree = std::max(s.degree, t.power);
    s.terms.push_back(std::move(t));
  }
  return s;
}

using Coeffs = std::array<Elem, 4>;

inline Coeffs specialize(const SplitPoly& s, const std::vector<Elem>& x, const ExtField& f) {
  Coeffs c{0, 0, 0, 0};
  for (const auto& t : s.terms) {
    Elem v = t.coeff;
    for (int i : t.others) {
      v = f.mul(v, x[i]);
      if (v == 0) break;
    }
    c[t.power] = f.add(c[t.power], v);
  }
  return c;
}

inline Elem horner(const Coeffs& c, Elem t, const ExtField& f) {
  return f.add(f.mul(f.add(f.mul(f.add(f.mul(c[3], t), c[2]), t), c[1]), t), c[0]);
}

// Splits [0, q) into contiguous chunks so that chunks * q_entries stays bounded.
inline std::vector<std::pair<i64, i64>> value_chunks(i64 q, std::size_t per_chunk_memory) {
  i64 chunks = std::min<i64>(q, 256);
  const std::size_t cap = std::size_t{1} << 26;
  if (per_chunk_memory > 0) chunks = std::max<i64>(1, std::min<i64>(chunks, cap / per_chunk_memory));
  std::vector<std::pair<i64, i64>> out;
  for (i64 c = 0; c < chunks; ++c) out.emplace_back(c * q / chunks, (c + 1) * q / chunks);
  return out;
}

// Runs inner(acc, coeffs) once per assignment of the first k - 1 coordinates,
// where coeffs[i] are the last-variable coefficients of polys[i]. Work is
// chunked on the first coordinate; per-chunk accumulators come back in chunk
// order.
template <typename Acc, typename Inner>
std::vector<Acc> specialized_scan(const std::vector<IntPoly>& polys, int k, const ExtField& f,
                                  const Acc& init, std::size_t acc_memory, Inner inner) {
  std::vector<SplitPoly> split;
  for (const auto& p : polys) split.push_back(split_last(p, f));
  const i64 q = f.size();
  if (k <= 1) {
    Acc acc = init;
    std::vector<Elem> x(std::max(k, 1), 0);
    std::vector<Coeffs> cs;
    for (const auto& s : split) cs.push_back(specialize(s, x, f));
    inner(acc, cs);
    return {acc};
  }
  auto ranges = value_chunks(q, acc_memory);
  return parallel_chunks(ranges.size(), [&](std::size_t chunk) {
    Acc acc = init;
    std::vector<Elem> x(k, 0);
    std::vector<Coeffs> cs(split.size());
    for (i64 x0 = ranges[chunk].first; x0 < ranges[chunk].second; ++x0) {
      x.assign(k, 0);
      x[0] = static_cast<Elem>(x0);
      while (true) {
        for (std::size_t i = 0; i < split.size(); ++i) cs[i] = specialize(split[i], x, f);
        inner(acc, cs);
        int pos = k - 2;
        while (pos >= 1 && ++x[pos] == q) x[pos--] = 0;
        if (pos < 1) break;
      }
    }
    return acc;
  });
}

inline long double component_cost(const std::vector<std::vector<int>>& comps, i64 q) {
  long double total = 0;
  for (const auto& c : comps) total += ipow_ld(static_cast<long double>(q), static_cast<int>(c.size()));
  return total;
}

// Variable components of a polynomial that actually carry terms, plus the
// number of variables that appear in no term.
inline std::pair<std::vector<std::vector<int>>, int> active_components(const IntPoly& poly) {
  std::vector<bool> used(poly.vars(), false);
  for (const auto& [m, c] : poly.terms())
    for (int i : m) used[i] = true;
  std::vector<std::vector<int>> comps;
  int free_vars = 0;
  for (auto& c : poly.variable_components()) {
    if (c.size() == 1 && !used[c[0]])
      ++free_vars;
    else
      comps.push_back(std::move(c));
  }
  return {comps, free_vars};
}

using Hist = std::vector<u128>;

inline Hist value_histogram(const IntPoly& poly, const ExtField& f) {
  const i64 q = f.size();
  const int k = poly.vars();
  auto parts = specialized_scan<Hist>(
      {poly}, k, f, Hist(q, 0), static_cast<std::size_t>(q),
      [&](Hist& h, const std::vector<Coeffs>& cs) {
        const Coeffs& c = cs[0];
        for (i64 t = 0; t < q; ++t) ++h[horner(c, static_cast<Elem>(t), f)];
      });
  Hist total(q, 0);
  for (const auto& h : parts)
    for (i64 a = 0; a < q; ++a) total[a] += h[a];
  return total;
}

inline Hist convolve(const Hist& a, const Hist& b, const ExtField& f) {
  const i64 q = f.size();
  Hist out(q, 0);
  for (i64 x = 0; x < q; ++x) {
    if (a[x] == 0) continue;
    for (i64 y = 0; y < q; ++y)
      if (b[y] != 0) out[f.add(static_cast<Elem>(x), static_cast<Elem>(y))] += a[x] * b[y];
  }
  return out;
}

inline BigInt to_bigint(u128 v) {
  BigInt r = static_cast<u64>(v >> 64);
  r <<= 64;
  r += static_cast<u64>(v);
  return r;
}

}  // namespace detail

/// Histogram of the values of poly over F_q^m, indexed by element encoding.
/// Variables that share no monomial are enumerated separately and combined by
/// additive convolution, so the cost is the sum of q^{|component|}.
inline std::vector<BigInt> value_distribution(const IntPoly& poly, const ExtField& field,
                                              long double budget = kDefaultBudget) {
  const i64 q = field.size();
  auto [comps, free_vars] = detail::active_components(poly);
  long double cost = detail::component_cost(comps, q);
  if (comps.size() > 1) cost += static_cast<long double>(comps.size() - 1) * q * q;
  check_budget("value_distribution", cost, budget);
  if (ipow_ld(static_cast<long double>(q), poly.vars()) > 1e36L)
    throw BudgetError("value_distribution: counts exceed 128-bit range",
                      ipow_ld(static_cast<long double>(q), poly.vars()), 1e36L);
  detail::Hist h(q, 0);
  const Elem c0 = field.from_int(poly.coefficient({}));
  h[c0] = 1;
  for (const auto& comp : comps) {
    IntPoly r = poly.restrict_to(comp);
    // The constant term is already accounted for in the seed histogram.
    IntPoly stripped(r.vars());
    for (const auto& [m, c] : r.terms())
      if (!m.empty()) stripped.add_term(m, c);
    h = detail::convolve(h, detail::value_histogram(stripped, field), field);
  }
  std::vector<BigInt> out(q);
  BigInt scale = bigpow(BigInt(q), free_vars);
  for (i64 a = 0; a < q; ++a) out[a] = detail::to_bigint(h[a]) * scale;
  return out;
}

/// #{x in F_q^m : F(x) = 0}.
inline BigInt count_affine_zeros(const IntPoly& F, const ExtField& field,
                                 long double budget = kDefaultBudget) {
  if (F.vars() < 1) throw InputError("count_affine_zeros: need at least one variable");
  return value_distribution(F, field, budget)[0];
}

/// Number of common zeros of a family of polynomials in the same k variables,
/// by full enumeration with last-variable specialization.
inline BigInt count_common_zeros(const std::vector<IntPoly>& polys, int k, const ExtField& f,
                                 long double budget = kDefaultBudget) {
  const i64 q = f.size();
  check_budget("count_common_zeros", ipow_ld(static_cast<long double>(q), k), budget);
  auto parts = detail::specialized_scan<u64>(
      polys, k, f, u64{0}, 1, [&](u64& acc, const std::vector<detail::Coeffs>& cs) {
        for (i64 t = 0; t < q; ++t) {
          bool zero = true;
          for (const auto& c : cs)
            if (detail::horner(c, static_cast<Elem>(t), f) != 0) {
              zero = false;
              break;
            }
          acc += zero;
        }
      });
  BigInt total = 0;
  for (u64 v : parts) total += v;
  return total;
}

/// Dimension of the singular locus of a cubic form over F_p, estimated from
/// projective point counts over F_{p^j}, j = 1..jmax.
struct LocusDimReport {
  i64 p = 0;
  std::map<int, BigInt> counts;             // affine zeros of the gradient
  std::map<int, BigInt> projective_counts;  // (affine - 1) / (q - 1)
  int dim_estimate = -1;
  bool certified_nonsingular = false;
  bool heuristic = true;
};

/// Affine zeros of the gradient of g0 over F_q, by components.
inline BigInt gradient_zero_count(const HomogeneousCubic& g0, const ExtField& f,
                                  long double budget = kDefaultBudget) {
  const IntPoly& poly = g0.poly();
  auto [comps, free_vars] = detail::active_components(poly);
  check_budget("gradient_zero_count", detail::component_cost(comps, f.size()), budget);
  BigInt total = bigpow(BigInt(f.size()), free_vars);
  for (const auto& comp : comps) {
    IntPoly r = poly.restrict_to(comp);
    std::vector<IntPoly> partials;
    for (int i = 0; i < r.vars(); ++i) partials.push_back(r.derivative(i));
    total *= count_common_zeros(partials, r.vars(), f, budget);
  }
  return total;
}

/// Least-squares d in sum_j (log_p count_j - j d)^2, rounded; zero counts are
/// skipped and -1 is returned when every count vanishes.
inline int fit_dimension(const std::map<int, BigInt>& projective, i64 p) {
  long double num = 0, den = 0;
  for (const auto& [j, c] : projective) {
    if (c == 0) continue;
    num += j * (std::log(c.convert_to<long double>()) / std::log(static_cast<long double>(p)));
    den += static_cast<long double>(j) * j;
  }
  if (den == 0) return -1;
  return static_cast<int>(std::lround(num / den));
}

inline LocusDimReport singular_locus_dim_mod_p(const HomogeneousCubic& g0, i64 p, int jmax = 3,
                                               long double budget = kDefaultBudget) {
  if (!is_prime(p)) throw InputError("singular_locus_dim_mod_p: p must be prime");
  if (jmax < 1) throw InputError("singular_locus_dim_mod_p: jmax must be >= 1");
  LocusDimReport r;
  r.p = p;
  for (int j = 1; j <= jmax; ++j) {
    ExtField f(p, j);
    BigInt affine = gradient_zero_count(g0, f, budget);
    BigInt q = f.size();
    if ((affine - 1) % (q - 1) != 0)
      throw Error("singular_locus_dim_mod_p: affine count not of projective shape");
    r.counts[j] = affine;
    r.projective_counts[j] = (affine - 1) / (q - 1);
  }
  r.dim_estimate = fit_dimension(r.projective_counts, p);
  r.certified_nonsingular = r.dim_estimate == -1;
  return r;
}

/// Largest j <= jmax whose enumeration fits the budget (at least 1).
inline int affordable_degree(const HomogeneousCubic& g0, i64 p, int jmax, long double budget) {
  auto [comps, free_vars] = detail::active_components(g0.poly());
  int j = 1;
  while (j < jmax &&
         detail::component_cost(comps, static_cast<i64>(ipow_ld(static_cast<long double>(p), j + 1))) <= budget &&
         ipow_ld(static_cast<long double>(p), j + 1) <= 4e6L)
    ++j;
  return j;
}

struct SingularDimQ {
  int value = -1;
  std::vector<std::pair<i64, int>> per_prime;
  std::vector<LocusDimReport> reports;
  bool heuristic = true;
};

/// s(g0) sampled at several primes; the minimum of the per-prime estimates.
/// Extension degrees are lowered per prime to fit the budget.
inline SingularDimQ singular_locus_dim_Q(const HomogeneousCubic& g0, const std::vector<i64>& primes,
                                         int jmax = 3, long double budget = kDefaultBudget) {
  if (primes.empty()) throw InputError("singular_locus_dim_Q: no primes given");
  const BigInt content = g0.content();
  SingularDimQ out;
  for (i64 p : primes) {
    if (p < 5 || !is_prime(p)) throw PreconditionError("singular_locus_dim_Q: primes must be >= 5");
    if (content % p == 0)
      throw PreconditionError("singular_locus_dim_Q: " + std::to_string(p) + " divides the content");
    auto rep = singular_locus_dim_mod_p(g0, p, affordable_degree(g0, p, jmax, budget), budget);
    out.per_prime.emplace_back(p, rep.dim_estimate);
    out.reports.push_back(std::move(rep));
  }
  if (out.per_prime.size() >= 2) {
    std::vector<int> vals;
    for (const auto& [p, d] : out.per_prime) vals.push_back(d);
    std::sort(vals.begin(), vals.end());
    if (std::adjacent_find(vals.begin(), vals.end()) == vals.end())
      throw AmbiguityError("singular_locus_dim_Q: sampled primes disagree", out.per_prime);
  }
  out.value = out.per_prime.front().second;
  for (const auto& [p, d] : out.per_prime) out.value = std::min(out.value, d);
  return out;
}

/// Enumerates P^{r-1}(F_q) in normalized form (first nonzero coordinate 1),
/// chunked on the pivot position and the coordinate after it. fn(point) returns
/// false to stop early; the scan result is false iff some call returned false.
template <typename Fn>
bool projective_scan(int r, const ExtField& f, Fn fn) {
  const i64 q = f.size();
  struct Chunk {
    int lead;
    i64 next;  // value of coordinate lead + 1, or -1 when lead is last
  };
  std::vector<Chunk> chunks;
  for (int l = 0; l < r; ++l) {
    if (l == r - 1)
      chunks.push_back({l, -1});
    else
      for (i64 v = 0; v < q; ++v) chunks.push_back({l, v});
  }
  std::atomic<bool> stop{false};
  auto results = parallel_chunks(chunks.size(), [&](std::size_t ci) -> char {
    const Chunk ch = chunks[ci];
    std::vector<Elem> x(r, 0);
    x[ch.lead] = 1;
    const int first_free = ch.next >= 0 ? ch.lead + 2 : r;
    if (ch.next >= 0) x[ch.lead + 1] = static_cast<Elem>(ch.next);
    while (true) {
      if (stop.load(std::memory_order_relaxed)) return 1;
      if (!fn(x)) {
        stop = true;
        return 0;
      }
      int pos = r - 1;
      while (pos >= first_free && ++x[pos] == q) x[pos--] = 0;
      if (pos < first_free) break;
    }
    return 1;
  });
  for (char c : results)
    if (!c) return false;
  return true;
}

/// Smoothness of the projective intersection {g0 = 0, v.x = 0} over F_{p^j}.
/// A point of the hyperplane is singular on the intersection iff grad g0 is a
/// multiple of v there; by Euler's identity such a point lies on g0 = 0.
inline bool section_smooth(const HomogeneousCubic& g0, const std::vector<BigInt>& v, i64 p, int j = 1,
                           long double budget = kDefaultBudget) {
  const int n = g0.dimension();
  if (static_cast<int>(v.size()) != n) throw InputError("section_smooth: dimension mismatch");
  if (p < 5 || !is_prime(p)) throw PreconditionError("section_smooth: p must be a prime >= 5");
  ExtField f(p, j);
  std::vector<Elem> ve(n);
  int pivot = -1;
  for (int i = 0; i < n; ++i) {
    ve[i] = f.from_int(v[i]);
    if (ve[i] != 0 && pivot < 0) pivot = i;
  }
  if (pivot < 0) throw PreconditionError("section_smooth: v vanishes mod p");
  if (n == 1) return true;  // the intersection is empty
  const long double q = static_cast<long double>(f.size());
  check_budget("section_smooth", ipow_ld(q, n - 1) / (q - 1), budget);
  std::vector<FieldPoly> grad;
  for (int i = 0; i < n; ++i) grad.emplace_back(g0.poly().derivative(i), f);
  const Elem inv_pivot = f.inv(ve[pivot]);
  return projective_scan(n - 1, f, [&](const std::vector<Elem>& free) {
    std::vector<Elem> x(n);
    Elem s = 0;
    for (int i = 0, k = 0; i < n; ++i) {
      if (i == pivot) continue;
      x[i] = free[k++];
      s = f.add(s, f.mul(ve[i], x[i]));
    }
    x[pivot] = f.neg(f.mul(s, inv_pivot));
    const Elem gp = grad[pivot].eval(x);
    for (int i = 0; i < n; ++i) {
      if (i == pivot) continue;
      // grad parallel to v iff grad_i v_pivot = grad_pivot v_i for all i.
      if (f.mul(grad[i].eval(x), ve[pivot]) != f.mul(gp, ve[i])) return true;
    }
    return false;
  });
}

/// N_j(tau) = #{x : G(x) = 0, F(x) = tau} for every tau in F_q.
inline std::vector<BigInt> fiber_counts(const IntPoly& F, const IntPoly& G, const ExtField& f,
                                        long double budget = kDefaultBudget) {
  if (F.vars() != G.vars()) throw InputError("fiber_counts: polynomials differ in dimension");
  const int m = F.vars();
  const i64 q = f.size();
  check_budget("fiber_counts", ipow_ld(static_cast<long double>(q), m), budget);
  using H = std::vector<u64>;
  auto parts = detail::specialized_scan<H>(
      {G, F}, m, f, H(q, 0), static_cast<std::size_t>(q),
      [&](H& h, const std::vector<detail::Coeffs>& cs) {
        for (i64 t = 0; t < q; ++t) {
          const Elem e = static_cast<Elem>(t);
          if (detail::horner(cs[0], e, f) == 0) ++h[detail::horner(cs[1], e, f)];
        }
      });
  std::vector<BigInt> out(q, 0);
  for (const auto& h : parts)
    for (i64 a = 0; a < q; ++a) out[a] += h[a];
  return out;
}

/// sum_tau |N(tau) - reference|^2.
inline BigInt fiber_variance(const std::vector<BigInt>& counts, const BigInt& reference) {
  BigInt s = 0;
  for (const auto& c : counts) s += (c - reference) * (c - reference);
  return s;
}

/// The pair F(a, b, x) = u b + a g(x) - v.x, G = a b - 1 in variables
/// (a, b, x_1, ..., x_n), whose fibers encode the complete sum S_u(p; v).
inline std::pair<IntPoly, IntPoly> katz_configuration(const IntPoly& g, const BigInt& u,
                                                      const std::vector<BigInt>& v) {
  const int n = g.vars();
  if (static_cast<int>(v.size()) != n) throw InputError("katz_configuration: dimension mismatch");
  const int m = n + 2;
  IntPoly F(m), G(m);
  F.add_term({1}, u);
  for (const auto& [mono, c] : g.terms()) {
    Monomial shifted{0};
    for (int i : mono) shifted.push_back(i + 2);
    F.add_term(shifted, c);
  }
  for (int i = 0; i < n; ++i) F.add_term({i + 2}, -v[i]);
  G.add_term({0, 1}, 1);
  G.add_term({}, -1);
  return {F, G};
}

/// |count - q^{m-1}| / q^{(m+1+s)/2} for a homogeneous F of degree d, p not dividing d.
inline double deligne_defect(const IntPoly& F, i64 p, int j, int s, long double budget = kDefaultBudget) {
  if (F.is_zero() || !F.is_homogeneous()) throw InputError("deligne_defect: F must be a nonzero form");
  const int d = F.degree();
  if (d % p == 0) throw PreconditionError("deligne_defect: p divides the degree");
  ExtField f(p, j);
  const int m = F.vars();
  BigInt count = count_affine_zeros(F, f, budget);
  BigInt main = bigpow(BigInt(f.size()), m - 1);
  BigInt diff = count - main;
  if (diff < 0) diff = -diff;
  const long double q = static_cast<long double>(f.size());
  return static_cast<double>(diff.convert_to<long double>() / std::pow(q, (m + 1 + s) / 2.0L));
}

}  // namespace cubic
