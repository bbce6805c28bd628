#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cubic/archimedean.hpp"
#include "cubic/cyclotomic.hpp"
#include "cubic/error.hpp"
#include "cubic/integer.hpp"
#include "cubic/matrix.hpp"
#include "cubic/parallel.hpp"
#include "cubic/polynomial.hpp"

namespace cubic {

/// Parameters of S_u(q; v) = sum_{a mod q, (a,q)=1} e_q(abar u) sum_{y mod q} e_q(a g(y) - v.y).
struct ExpSumSpec {
  CubicPolynomial g;
  BigInt u = 0;
  std::vector<BigInt> v;
  i64 q = 1;

  /// u and v reduced into [0, q).
  ExpSumSpec normalized() const {
    if (q < 1) throw InputError("ExpSumSpec: q must be >= 1");
    if (static_cast<int>(v.size()) != g.dimension()) throw InputError("ExpSumSpec: v has wrong dimension");
    ExpSumSpec s = *this;
    s.u = mod(u, q);
    for (auto& x : s.v) x = mod(x, q);
    return s;
  }
};

/// Value of a complete sum. When present, histogram[r] counts the terms of
/// phase e_q(r) (weighted by multiplicity on reduced paths), so the sum equals
/// sum_r histogram[r] e_q(r) exactly.
struct ExpSum {
  ExpSumSpec spec;
  std::vector<BigInt> histogram;
  cplx value;
  std::string method;
  long double terms = 0;

  std::optional<BigInt> exact() const {
    if (histogram.empty()) return std::nullopt;
    return exact_integer_value(histogram);
  }
};

namespace detail {

// Polynomial over Z/m with terms split on the power of the last variable.
struct ModSplit {
  struct Term {
    i64 coeff;
    int power;
    std::vector<int> others;
  };
  std::vector<Term> terms;
};

inline ModSplit mod_split(const IntPoly& p, i64 m) {
  ModSplit s;
  const int last = p.vars() - 1;
  for (const auto& [mono, c] : p.terms()) {
    ModSplit::Term t{mod(c, m), 0, {}};
    if (t.coeff == 0) continue;
    for (int i : mono) {
      if (i == last)
        ++t.power;
      else
        t.others.push_back(i);
    }
    s.terms.push_back(std::move(t));
  }
  return s;
}

// Compiled polynomial over Z/m for pointwise evaluation.
struct ModEval {
  struct Term {
    i64 coeff;
    std::vector<int> idx;
  };
  std::vector<Term> terms;
  i64 m = 1;

  ModEval(const IntPoly& p, i64 modulus) : m(modulus) {
    for (const auto& [mono, c] : p.terms()) {
      i64 r = mod(c, m);
      if (r) terms.push_back({r, mono});
    }
  }
  i64 eval(const std::vector<i64>& x) const {
    i64 s = 0;
    for (const auto& t : terms) {
      i64 v = t.coeff;
      for (int i : t.idx) v = mulmod(v, x[i], m);
      s += v;
      if (s >= m) s -= m;
    }
    return s;
  }
};

// Joint distribution of (g_c(y) mod q, v_c.y mod q) over y in (Z/q)^k, as a
// sparse list of (s, t, count).
struct PairEntry {
  i64 s, t;
  u64 count;
};

inline std::vector<PairEntry> pair_distribution(const IntPoly& gc, const std::vector<i64>& vc, i64 q) {
  const int k = gc.vars();
  const ModSplit split = mod_split(gc, q);
  if (k == 1) {
    std::vector<PairEntry> out;
    std::array<i64, 4> c{0, 0, 0, 0};
    for (const auto& t : split.terms) c[t.power] = (c[t.power] + t.coeff) % q;
    for (i64 y = 0; y < q; ++y) {
      i64 s = (mulmod((mulmod((mulmod(c[3], y, q) + c[2]) % q, y, q) + c[1]) % q, y, q) + c[0]) % q;
      out.push_back({s, mulmod(vc[0], y, q), 1});
    }
    return out;
  }
  const std::size_t cells = static_cast<std::size_t>(q) * static_cast<std::size_t>(q);
  if (cells > (std::size_t{1} << 26)) throw BudgetError("pair_distribution: modulus too large", cells, 1 << 26);
  const i64 chunks = std::max<i64>(1, std::min<i64>(q, static_cast<i64>((std::size_t{1} << 24) / cells)));
  auto parts = parallel_chunks(static_cast<std::size_t>(chunks), [&](std::size_t ch) {
    std::vector<u64> dense(cells, 0);
    std::vector<i64> x(k, 0);
    const i64 lo = static_cast<i64>(ch) * q / chunks, hi = static_cast<i64>(ch + 1) * q / chunks;
    for (i64 x0 = lo; x0 < hi; ++x0) {
      std::fill(x.begin(), x.end(), 0);
      x[0] = x0;
      while (true) {
        std::array<i64, 4> c{0, 0, 0, 0};
        for (const auto& t : split.terms) {
          i64 v = t.coeff;
          for (int i : t.others) v = mulmod(v, x[i], q);
          c[t.power] = (c[t.power] + v) % q;
        }
        i64 t0 = 0;
        for (int i = 0; i < k - 1; ++i) t0 = (t0 + mulmod(vc[i], x[i], q)) % q;
        const i64 vl = vc[k - 1];
        i64 t = t0;
        for (i64 y = 0; y < q; ++y) {
          i64 s = (mulmod((mulmod((mulmod(c[3], y, q) + c[2]) % q, y, q) + c[1]) % q, y, q) + c[0]) % q;
          ++dense[static_cast<std::size_t>(s * q + t)];
          t += vl;
          if (t >= q) t -= q;
        }
        int pos = k - 2;
        while (pos >= 1 && ++x[pos] == q) x[pos--] = 0;
        if (pos < 1) break;
      }
    }
    return dense;
  });
  std::vector<PairEntry> out;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    u64 total = 0;
    for (const auto& d : parts) total += d[cell];
    if (total) out.push_back({static_cast<i64>(cell) / q, static_cast<i64>(cell) % q, total});
  }
  return out;
}

inline std::vector<i64> units_mod(i64 q) {
  std::vector<i64> out;
  if (q == 1) return {0};
  for (i64 a = 1; a < q; ++a)
    if (std::gcd(a, q) == 1) out.push_back(a);
  return out;
}

struct Component {
  IntPoly poly;           // restricted, constant removed
  std::vector<int> vars;  // original indices
};

inline std::vector<Component> components_of(const IntPoly& g) {
  std::vector<Component> out;
  for (auto& c : g.variable_components()) out.push_back({g.restrict_to(c), c});
  return out;
}

inline std::vector<BigInt> to_bigints(const std::vector<u128>& h) {
  std::vector<BigInt> out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    BigInt r = static_cast<u64>(h[i] >> 64);
    r <<= 64;
    r += static_cast<u64>(h[i]);
    out[i] = r;
  }
  return out;
}

// Sparse histogram over Z/q backed by a dense scratch array.
struct SparseHist {
  std::vector<u128> dense;
  std::vector<i64> touched;

  explicit SparseHist(i64 q) : dense(static_cast<std::size_t>(q), 0) {}
  void add(i64 r, u128 c) {
    if (dense[r] == 0) touched.push_back(r);
    dense[r] += c;
  }
  void drain(std::vector<std::pair<i64, u128>>& out) {
    out.clear();
    for (i64 r : touched) {
      out.emplace_back(r, dense[r]);
      dense[r] = 0;
    }
    touched.clear();
  }
};

// Combines per-component phase histograms for each unit a and accumulates the
// outer phase abar u + a c0. phase_of(comp, a, abar, sink) adds the phases of
// one component for the given a into sink (positive counts only).
template <typename PhaseFn>
std::vector<u128> accumulate_over_units(std::size_t ncomp, i64 q, i64 u, i64 c0, PhaseFn phase_of) {
  const auto units = units_mod(q);
  const std::size_t chunks = std::min<std::size_t>(units.size(), 64);
  auto parts = parallel_chunks(chunks, [&](std::size_t ch) {
    std::vector<u128> total(q, 0);
    const std::size_t lo = ch * units.size() / chunks, hi = (ch + 1) * units.size() / chunks;
    SparseHist comp(q), prod(q);
    std::vector<std::pair<i64, u128>> cur, ent;
    for (std::size_t ui = lo; ui < hi; ++ui) {
      const i64 a = units[ui];
      const i64 abar = q == 1 ? 0 : inverse_mod(a, q);
      cur.assign(1, {(mulmod(abar, u, q) + mulmod(a, c0, q)) % q, 1});
      for (std::size_t c = 0; c < ncomp && !cur.empty(); ++c) {
        phase_of(c, a, abar, comp);
        comp.drain(ent);
        for (const auto& [x, cx] : cur)
          for (const auto& [y, cy] : ent) {
            i64 r = x + y;
            if (r >= q) r -= q;
            prod.add(r, cx * cy);
          }
        prod.drain(cur);
      }
      for (const auto& [r, c] : cur) total[r] += c;
    }
    return total;
  });
  std::vector<u128> total(q, 0);
  for (const auto& p : parts)
    for (i64 r = 0; r < q; ++r) total[r] += p[r];
  return total;
}

inline std::vector<i64> reduced_v(const ExpSumSpec& s, const std::vector<int>& vars, i64 m) {
  std::vector<i64> out;
  for (int i : vars) out.push_back(mod(s.v[i], m));
  return out;
}

}  // namespace detail

/// Dry-run term estimate for complete_sum: the per-component residue scans plus,
/// per unit, each component's merged phase list convolved into a running
/// histogram of at most q phases.
inline long double complete_sum_cost(const ExpSumSpec& spec) {
  const long double q = static_cast<long double>(spec.q);
  long double enumerate = 0, per_unit = 0, running = 1;
  for (const auto& c : spec.g.poly().variable_components()) {
    const long double pts = ipow_ld(q, static_cast<int>(c.size()));
    enumerate += pts;
    const long double entries = std::min(pts, q * q);
    per_unit += entries + running * std::min(entries, q);
    running = std::min(q, running * entries);
  }
  return enumerate + static_cast<long double>(euler_phi(spec.q)) * per_unit;
}

/// Exact phase histogram of S_u(q; v) by enumeration of y mod q, one variable
/// component at a time.
inline ExpSum complete_sum(const ExpSumSpec& raw, long double budget = kDefaultBudget) {
  const ExpSumSpec spec = raw.normalized();
  const i64 q = spec.q;
  if (q > (i64{1} << 31)) throw InputError("complete_sum: modulus too large");
  const long double cost = complete_sum_cost(spec);
  check_budget("complete_sum", cost, budget);
  const i64 u = mod(spec.u, q);
  const i64 c0 = mod(spec.g.constant_term(), q);
  std::vector<std::vector<detail::PairEntry>> pairs;
  for (const auto& comp : detail::components_of(spec.g.poly()))
    pairs.push_back(detail::pair_distribution(comp.poly, detail::reduced_v(spec, comp.vars, q), q));
  auto hist = detail::accumulate_over_units(pairs.size(), q, u, c0,
                                            [&](std::size_t c, i64 a, i64, detail::SparseHist& h) {
                                              for (const auto& e : pairs[c]) {
                                                i64 r = mulmod(a, e.s, q) - e.t;
                                                if (r < 0) r += q;
                                                h.add(r, e.count);
                                              }
                                            });
  ExpSum out;
  out.spec = spec;
  out.histogram = detail::to_bigints(hist);
  out.value = contract_roots(out.histogram);
  out.method = "direct";
  out.terms = cost;
  return out;
}

/// Dry-run term estimate for prime_power_sum at q = p^d: the residue scan mod
/// p^m plus, per unit, the expected stationary group of each component
/// convolved into a running histogram of at most q phases.
inline long double prime_power_sum_cost(const ExpSumSpec& spec, i64 p, int d) {
  const int m = (d + 1) / 2, r = d - m;
  const long double pl = static_cast<long double>(p);
  const long double q = ipow_ld(pl, d);
  long double enumerate = 0, per_unit = 0, running = 1;
  for (const auto& c : spec.g.poly().variable_components()) {
    const int k = static_cast<int>(c.size());
    const long double pts = ipow_ld(pl, m * k);
    enumerate += pts * (1 + k);
    const long double group = pts / ipow_ld(pl, r * k) + 1;
    per_unit += running * group;
    running = std::min(q, running * group);
  }
  return enumerate + static_cast<long double>(euler_phi(static_cast<i64>(q))) * per_unit;
}

/// S_u(p^d; v) for d >= 2 by stationary phase: writing y = x + p^m z with
/// m = ceil(d/2), the sum over z is p^{(d-m)k} when a grad g(x) = v mod p^{d-m}
/// and vanishes otherwise.
inline ExpSum prime_power_sum(const ExpSumSpec& raw, long double budget = kDefaultBudget) {
  const ExpSumSpec spec = raw.normalized();
  const i64 q = spec.q;
  const auto f = factorize(q);
  if (f.size() != 1 || f[0].e < 2) throw PreconditionError("prime_power_sum: q must be p^d with d >= 2");
  const i64 p = f[0].p;
  const int d = f[0].e;
  const int m = (d + 1) / 2, r = d - m;
  const i64 pm = ipow(p, m), pr = ipow(p, r);
  const long double cost = prime_power_sum_cost(spec, p, d);
  check_budget("prime_power_sum", cost, budget);
  const i64 u = mod(spec.u, q);
  const i64 c0 = mod(spec.g.constant_term(), q);

  struct Group {
    std::vector<std::pair<i64, i64>> st;
  };
  struct CompData {
    std::vector<i64> v_r;                 // v_c mod p^r
    std::map<std::vector<i64>, Group> by_key;
    u128 weight;                          // p^{r k}
  };
  std::vector<CompData> data;
  for (const auto& comp : detail::components_of(spec.g.poly())) {
    const int k = comp.poly.vars();
    CompData cd;
    cd.v_r = detail::reduced_v(spec, comp.vars, pr);
    cd.weight = 1;
    for (int i = 0; i < r * k; ++i) cd.weight *= static_cast<u128>(p);
    const std::vector<i64> vq = detail::reduced_v(spec, comp.vars, q);
    // Keys that can match some unit multiple of v_c.
    std::set<std::vector<i64>> admissible;
    for (i64 lam : detail::units_mod(pr)) {
      std::vector<i64> key(k);
      for (int i = 0; i < k; ++i) key[i] = mulmod(lam, cd.v_r[i], pr);
      admissible.insert(key);
    }
    detail::ModEval gq(comp.poly, q);
    std::vector<detail::ModEval> grad;
    for (int i = 0; i < k; ++i) grad.emplace_back(comp.poly.derivative(i), pr);
    std::vector<i64> x(k, 0);
    while (true) {
      std::vector<i64> key(k);
      for (int i = 0; i < k; ++i) key[i] = grad[i].eval(x);
      if (admissible.count(key)) {
        i64 t = 0;
        for (int i = 0; i < k; ++i) t = (t + mulmod(vq[i], x[i], q)) % q;
        cd.by_key[key].st.emplace_back(gq.eval(x), t);
      }
      int pos = k - 1;
      while (pos >= 0 && ++x[pos] == pm) x[pos--] = 0;
      if (pos < 0) break;
    }
    data.push_back(std::move(cd));
  }
  auto hist = detail::accumulate_over_units(
      data.size(), q, u, c0, [&](std::size_t c, i64 a, i64 abar, detail::SparseHist& h) {
        const CompData& cd = data[c];
        std::vector<i64> target(cd.v_r.size());
        const i64 abar_r = mod(abar, pr);
        for (std::size_t i = 0; i < target.size(); ++i) target[i] = mulmod(abar_r, cd.v_r[i], pr);
        auto it = cd.by_key.find(target);
        if (it == cd.by_key.end()) return;
        for (const auto& [s, t] : it->second.st) {
          i64 ph = mulmod(a, s, q) - t;
          if (ph < 0) ph += q;
          h.add(ph, cd.weight);
        }
      });
  ExpSum out;
  out.spec = spec;
  out.histogram = detail::to_bigints(hist);
  out.value = contract_roots(out.histogram);
  out.method = "stationary-phase";
  out.terms = cost;
  return out;
}

/// S_u(q; v) through S_u(rs; v) = S_{sbar^2 u}(r; sbar v) S_{rbar^2 u}(s; rbar v)
/// over the prime-power factorization of q, with r rbar + s sbar = 1. Only the
/// complex value is returned.
inline ExpSum crt_sum(const ExpSumSpec& raw, long double budget = kDefaultBudget) {
  const ExpSumSpec spec = raw.normalized();
  const i64 q = spec.q;
  const auto factors = factorize(q);
  if (factors.size() <= 1) {
    if (q > 1 && factors[0].e >= 2) {
      // The stationary-phase histogram carries multiplicities, not term counts.
      ExpSum s = prime_power_sum(spec, budget);
      s.histogram.clear();
      s.method = "crt";
      return s;
    }
    ExpSum s = complete_sum(spec, budget);
    s.method = "crt";
    return s;
  }
  const i64 r = factors[0].value();
  const i64 s = q / r;
  const i64 sbar = inverse_mod(s, r);  // s sbar = 1 mod r
  const i64 rbar = inverse_mod(r, s);  // r rbar = 1 mod s
  ExpSumSpec left = spec, right = spec;
  left.q = r;
  left.u = spec.u * sbar * sbar;
  for (auto& x : left.v) x *= sbar;
  right.q = s;
  right.u = spec.u * rbar * rbar;
  for (auto& x : right.v) x *= rbar;
  ExpSum a = crt_sum(left, budget);
  ExpSum b = crt_sum(right, budget);
  ExpSum out;
  out.spec = spec;
  out.value = a.value * b.value;
  out.method = "crt";
  out.terms = a.terms + b.terms;
  return out;
}

// ---------------------------------------------------------------------------
// Weighted sums over the integer box around P x0.

/// Integer points of the truncation box with their weight and exact g value.
struct BoxSample {
  std::vector<double> weights;
  std::vector<i128> values;
  std::vector<std::vector<i64>> points;
};

inline BoxSample sample_box(const CubicPolynomial& g, const ArchContext& ctx, bool keep_points = false,
                            long double budget = kDefaultBudget) {
  if (g.dimension() != ctx.dimension()) throw InputError("weighted sum: dimension mismatch");
  const auto box = integer_box(ctx);
  check_budget("weighted sum box", box_volume(box), budget);
  const int n = ctx.dimension();
  FastPoly fp(g.poly());
  BoxSample out;
  std::vector<i64> x(n);
  for (int i = 0; i < n; ++i) x[i] = box[i].first;
  while (true) {
    const double w = weight(ctx, x);
    if (w > 0) {
      out.weights.push_back(w);
      out.values.push_back(fp.eval(x.data()));
      if (keep_points) out.points.push_back(x);
    }
    int pos = n - 1;
    while (pos >= 0 && ++x[pos] > box[pos].second) {
      x[pos] = box[pos].first;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

/// S(alpha) = sum_x w(x) e(alpha g(x)).
inline cplx weighted_sum_S(const CubicPolynomial& g, double alpha, const ArchContext& ctx,
                           long double budget = kDefaultBudget) {
  const BoxSample b = sample_box(g, ctx, false, budget);
  cplx s = 0;
  for (std::size_t i = 0; i < b.weights.size(); ++i) {
    // Reduce alpha g mod 1 with the integer part of alpha removed exactly.
    const double ia = std::floor(alpha);
    const long double frac = static_cast<long double>(alpha - ia) * static_cast<long double>(b.values[i]);
    s += b.weights[i] * expi2pi(static_cast<double>(frac - std::floor(frac)));
  }
  return s;
}

/// sum_x w(x) e_q(a g(x)) e(z g(x)), with the rational phase reduced exactly.
inline cplx weighted_sum_rational(const BoxSample& b, i64 a, i64 q, double z) {
  cplx s = 0;
  for (std::size_t i = 0; i < b.weights.size(); ++i) {
    const i128 v = b.values[i];
    i128 r = (static_cast<i128>(a) * (v % q)) % q;
    if (r < 0) r += q;
    const long double zg = static_cast<long double>(z) * static_cast<long double>(v);
    const long double ph = static_cast<long double>(r) / q + (zg - std::floor(zg));
    s += b.weights[i] * expi2pi(static_cast<double>(ph));
  }
  return s;
}

/// S_u(q; z) = sum_{a mod q, (a,q)=1} e_q(abar u) S(a/q + z).
inline cplx su_qz(const CubicPolynomial& g, const BigInt& u, i64 q, double z, const ArchContext& ctx,
                  long double budget = kDefaultBudget) {
  if (q < 1) throw InputError("su_qz: q must be >= 1");
  const BoxSample b = sample_box(g, ctx, false, budget);
  check_budget("su_qz", static_cast<long double>(b.weights.size()) * euler_phi(q), budget);
  const i64 ur = mod(u, q);
  cplx total = 0;
  for (i64 a : detail::units_mod(q)) {
    const i64 abar = q == 1 ? 0 : inverse_mod(a, q);
    total += expi2pi(static_cast<double>(mulmod(abar, ur, q)) / static_cast<double>(q)) *
             weighted_sum_rational(b, a, q, z);
  }
  return total;
}

struct PoissonReport {
  cplx lhs, rhs;
  double abs_err = 0;
  i64 V = 0;
  i64 guided_V = 0;
  std::size_t frequencies = 0;
};

/// A truncation radius for the dual sum: frequencies beyond q times the
/// phase-gradient scale of z g plus a few Gaussian widths contribute nothing.
inline i64 guided_V(const CubicPolynomial& g, i64 q, double z, const ArchContext& ctx) {
  double radius = 0;
  for (int i = 0; i < ctx.dimension(); ++i) radius = std::max(radius, std::abs(ctx.center(i)) + ctx.truncation_radius);
  long double coeff = 0;
  for (const auto& [m, c] : g.terms())
    if (!m.empty()) coeff += abs(c).convert_to<long double>() * m.size();
  const double grad = static_cast<double>(coeff) * std::max(1.0, radius * radius);
  return static_cast<i64>(std::ceil(q * (std::abs(z) * grad + 3.0 / ctx.P0))) + 1;
}

/// Both sides of the Poisson identity
///   S_u(q; z) = q^{-n} sum_{v in Z^n} S_u(q; v) I(z; v / q)
/// with the dual sum cut at |v_i| <= V and I by deterministic quadrature.
inline PoissonReport poisson_check(const CubicPolynomial& g, const BigInt& u, i64 q, double z,
                                   const ArchContext& ctx, i64 V, long double budget = kDefaultBudget) {
  const int n = g.dimension();
  PoissonReport rep;
  rep.V = V;
  rep.guided_V = guided_V(g, q, z, ctx);
  rep.lhs = su_qz(g, u, q, z, ctx, budget);
  std::vector<double> freqs;
  for (i64 v = -V; v <= V; ++v) freqs.push_back(static_cast<double>(v) / static_cast<double>(q));
  rep.frequencies = freqs.size();
  const auto integrals = osc_integral_grid(ctx, g, z, freqs, budget);
  std::map<std::vector<i64>, cplx> cache;
  const std::size_t nf = freqs.size();
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= nf;
  cplx rhs = 0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<i64> key(n);
    std::size_t rest = idx;
    for (int i = n - 1; i >= 0; --i) {
      key[i] = mod(static_cast<i64>(rest % nf) - V, q);
      rest /= nf;
    }
    auto it = cache.find(key);
    if (it == cache.end()) {
      ExpSumSpec s{g, u, std::vector<BigInt>(key.begin(), key.end()), q};
      it = cache.emplace(key, crt_sum(s, budget).value).first;
    }
    rhs += it->second * integrals[idx];
  }
  rep.rhs = rhs / std::pow(static_cast<double>(q), n);
  rep.abs_err = std::abs(rep.lhs - rep.rhs);
  return rep;
}

// ---------------------------------------------------------------------------
// Counting quantities for square-full moduli.

/// #{j mod q : M j = 0 mod q} by elimination over each prime power of q.
inline BigInt kernel_count(const IntMatrix& M, i64 q) {
  if (q < 1) throw InputError("kernel_count: q must be >= 1");
  if (M.empty()) return 1;
  const std::size_t cols = M[0].size();
  for (const auto& row : M)
    if (row.size() != cols) throw InputError("kernel_count: ragged matrix");
  BigInt total = 1;
  for (const auto& pp : factorize(q)) {
    const i64 pe = pp.value();
    std::vector<std::vector<i64>> a;
    for (const auto& row : M) {
      std::vector<i64> r;
      for (const auto& x : row) r.push_back(mod(x, pe));
      a.push_back(std::move(r));
    }
    const std::size_t rows = a.size();
    BigInt count = 1;
    std::size_t pivots = 0;
    std::vector<bool> row_used(rows, false), col_used(cols, false);
    while (true) {
      // Pivot of least valuation among unused rows and columns.
      int best_v = pp.e;
      std::size_t bi = 0, bj = 0;
      for (std::size_t i = 0; i < rows; ++i) {
        if (row_used[i]) continue;
        for (std::size_t j = 0; j < cols; ++j) {
          if (col_used[j] || a[i][j] == 0) continue;
          const int v = valuation(a[i][j], pp.p, pp.e);
          if (v < best_v) {
            best_v = v;
            bi = i;
            bj = j;
          }
        }
      }
      if (best_v >= pp.e) break;
      // pivot = p^v * unit; clear its column among the other rows and its row
      // among the other columns (both are divisible by p^v).
      const i64 pv = ipow(pp.p, best_v);
      const i64 unit_inv = inverse_mod(a[bi][bj] / pv, pe);
      for (std::size_t i = 0; i < rows; ++i) {
        if (i == bi || row_used[i] || a[i][bj] == 0) continue;
        const i64 f = mulmod(a[i][bj] / pv, unit_inv, pe);
        for (std::size_t j = 0; j < cols; ++j) a[i][j] = mod(a[i][j] - mulmod(f, a[bi][j], pe), pe);
      }
      for (std::size_t j = 0; j < cols; ++j) {
        if (j == bj || col_used[j] || a[bi][j] == 0) continue;
        const i64 f = mulmod(a[bi][j] / pv, unit_inv, pe);
        for (std::size_t i = 0; i < rows; ++i) a[i][j] = mod(a[i][j] - mulmod(f, a[i][bj], pe), pe);
      }
      row_used[bi] = true;
      col_used[bj] = true;
      count *= pv;
      ++pivots;
    }
    count *= bigpow(BigInt(pe), static_cast<unsigned>(cols - pivots));
    total *= count;
  }
  return total;
}

/// Ntilde(q) = #{h, j mod q : q | (1/6) M(h) j} for gcd(q, 6) = 1, summing
/// kernel counts of 6^{-1} M(h) over h mod q.
inline BigInt ntilde(const CubicPolynomial& g, i64 q, long double budget = kDefaultBudget) {
  if (q < 1) throw InputError("ntilde: q must be >= 1");
  if (std::gcd(q, i64{6}) != 1) throw PreconditionError("ntilde: modulus must be coprime to 6");
  const int n = g.dimension();
  check_budget("ntilde", ipow_ld(static_cast<long double>(q), n) * n * n * n, budget);
  // M(h) = M(0) + sum_k h_k (M(e_k) - M(0)), reduced mod q and scaled by 6^{-1}.
  const i64 inv6 = q == 1 ? 0 : inverse_mod(6, q);
  std::vector<BigInt> zero(n, 0);
  const IntMatrix M0 = g.hessian(zero).entries;
  std::vector<std::vector<std::vector<i64>>> basis(n);
  for (int k = 0; k < n; ++k) {
    auto ek = zero;
    ek[k] = 1;
    const IntMatrix Mk = g.hessian(ek).entries;
    basis[k].assign(n, std::vector<i64>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) basis[k][i][j] = mod(BigInt(Mk[i][j] - M0[i][j]), q);
  }
  std::vector<std::vector<i64>> base(n, std::vector<i64>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) base[i][j] = mod(M0[i][j], q);
  std::vector<i64> h(n, 0);
  BigInt total = 0;
  while (true) {
    IntMatrix B(n, std::vector<BigInt>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        i64 e = base[i][j];
        for (int k = 0; k < n; ++k) e = (e + mulmod(h[k], basis[k][i][j], q)) % q;
        B[i][j] = mulmod(e, inv6, q);
      }
    total += kernel_count(B, q);
    int pos = n - 1;
    while (pos >= 0 && ++h[pos] == q) h[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

/// M(p^f; k) = #{h mod p^f : h = k mod p, p^f | g(h)}.
inline BigInt count_M(const CubicPolynomial& g, i64 p, int f, const std::vector<i64>& k,
                      long double budget = kDefaultBudget) {
  if (!is_prime(p)) throw InputError("count_M: p must be prime");
  if (f < 1) throw InputError("count_M: f must be >= 1");
  const int n = g.dimension();
  if (static_cast<int>(k.size()) != n) throw InputError("count_M: k has wrong dimension");
  check_budget("count_M", ipow_ld(static_cast<long double>(p), (f - 1) * n), budget);
  const i64 pf = ipow(p, f), lifts = ipow(p, f - 1);
  detail::ModEval ge(g.poly(), pf);
  std::vector<i64> t(n, 0), h(n);
  BigInt count = 0;
  while (true) {
    for (int i = 0; i < n; ++i) h[i] = mod(k[i], p) + p * t[i];
    if (ge.eval(h) == 0) ++count;
    int pos = n - 1;
    while (pos >= 0 && ++t[pos] == lifts) t[pos--] = 0;
    if (pos < 0) break;
  }
  return count;
}

struct MSplitReport {
  BigInt telescoped;    // p^{(f - l)(n - 1)} M(p^l; k)
  BigInt exponential;   // p^{-f} sum_{g <= l} sum_t sum_h e_{p^g}(t g(h)), exactly
  BigInt difference;
  BigInt M_l, M_f;
};

/// Evaluates M_1(p^f) = p^{-f} sum_{0<=g<=l} sum_{t mod p^g, p∤t} sum_{h = k (p)} e_{p^g}(t g(h))
/// both by telescoping to p^{(f-l)(n-1)} M(p^l; k) and by an exact phase
/// histogram over Z/p^l reduced modulo the cyclotomic polynomial.
inline MSplitReport M_split_identity_check(const CubicPolynomial& g, i64 p, int f, const std::vector<i64>& k,
                                           int l, long double budget = kDefaultBudget) {
  if (l < 1 || l > f) throw InputError("M_split_identity_check: need 1 <= l <= f");
  const int n = g.dimension();
  MSplitReport rep;
  rep.M_l = count_M(g, p, l, k, budget);
  rep.M_f = count_M(g, p, f, k, budget);
  rep.telescoped = bigpow(BigInt(p), static_cast<unsigned>((f - l) * (n - 1))) * rep.M_l;
  // Distribution of g(h) mod p^l over h mod p^f with h = k mod p.
  const i64 pl = ipow(p, l), lifts = ipow(p, f - 1);
  check_budget("M_split_identity_check", ipow_ld(static_cast<long double>(p), (f - 1) * n) +
                                             static_cast<long double>(pl) * pl, budget);
  detail::ModEval ge(g.poly(), pl);
  std::vector<u64> values(pl, 0);
  std::vector<i64> t(n, 0), h(n);
  while (true) {
    for (int i = 0; i < n; ++i) h[i] = mod(k[i], p) + p * t[i];
    ++values[ge.eval(h)];
    int pos = n - 1;
    while (pos >= 0 && ++t[pos] == lifts) t[pos--] = 0;
    if (pos < 0) break;
  }
  std::vector<BigInt> hist(pl, 0);
  for (i64 N = 0; N < pl; ++N) {
    if (!values[N]) continue;
    for (int gg = 0; gg <= l; ++gg) {
      const i64 pg = ipow(p, gg), scale = ipow(p, l - gg);
      for (i64 tt : detail::units_mod(pg)) hist[mulmod(mulmod(tt, N, pl), scale, pl)] += values[N];
    }
  }
  auto exact = exact_integer_value(hist);
  if (!exact) throw Error("M_split_identity_check: exponential side is not an integer");
  const BigInt pfb = bigpow(BigInt(p), static_cast<unsigned>(f));
  if (*exact % pfb != 0) throw Error("M_split_identity_check: exponential side not divisible by p^f");
  rep.exponential = *exact / pfb;
  rep.difference = rep.exponential - rep.telescoped;
  return rep;
}

struct SquarefullParts {
  i64 q = 1, q1 = 1, q2 = 1, q4 = 1;
  std::map<i64, int> theta;  // theta_p(e) per prime p^e || q
};

inline int theta(int e) { return (e % 2 == 1 && e >= 13) ? 1 : 0; }

/// q1 = prod p^{floor(u/2)}, q2 = prod over odd u of p, q4 = prod over odd u >= 13 of p.
inline SquarefullParts squarefull_parts(i64 q) {
  if (q < 1) throw InputError("squarefull_parts: q must be >= 1");
  SquarefullParts s;
  s.q = q;
  for (const auto& f : factorize(q)) {
    s.q1 *= ipow(f.p, f.e / 2);
    if (f.e % 2 == 1) s.q2 *= f.p;
    if (f.e % 2 == 1 && f.e >= 13) s.q4 *= f.p;
    s.theta[f.p] = theta(f.e);
  }
  return s;
}

struct BoxSumReport {
  double sum = 0;
  double envelope = 0;
  double ratio = 0;
  std::size_t count = 0;
  double A = 1;
};

/// sum_{|v - v0| <= V} |S_u(q; v)| against A^{omega(q)} (log(q+1))^{2n} q^{n/2+1} (V^n + q^{n/3}).
inline BoxSumReport box_sum_diagnostic(const CubicPolynomial& g, const BigInt& u, i64 q,
                                       const std::vector<BigInt>& v0, i64 V, double A = 1.0,
                                       long double budget = kDefaultBudget) {
  if (!is_squarefull(q)) throw PreconditionError("box_sum_diagnostic: q must be square-full");
  const int n = g.dimension();
  if (static_cast<int>(v0.size()) != n) throw InputError("box_sum_diagnostic: v0 has wrong dimension");
  BoxSumReport rep;
  rep.A = A;
  std::map<std::vector<i64>, double> cache;
  std::vector<i64> off(n, -V);
  while (true) {
    std::vector<i64> key(n);
    for (int i = 0; i < n; ++i) key[i] = mod(v0[i] + off[i], q);
    auto it = cache.find(key);
    if (it == cache.end()) {
      ExpSumSpec s{g, u, std::vector<BigInt>(key.begin(), key.end()), q};
      it = cache.emplace(key, std::abs(crt_sum(s, budget).value)).first;
    }
    rep.sum += it->second;
    ++rep.count;
    int pos = n - 1;
    while (pos >= 0 && ++off[pos] > V) off[pos--] = -V;
    if (pos < 0) break;
  }
  const double lq = std::log(static_cast<double>(q) + 1);
  rep.envelope = std::pow(A, omega(q)) * std::pow(lq, 2 * n) * std::pow(static_cast<double>(q), n / 2.0 + 1) *
                 (std::pow(static_cast<double>(V), n) + std::pow(static_cast<double>(q), n / 3.0));
  rep.ratio = rep.sum / rep.envelope;
  return rep;
}

}  // namespace cubic
