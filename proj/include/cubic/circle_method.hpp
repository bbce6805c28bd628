#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cubic/archimedean.hpp"
#include "cubic/error.hpp"
#include "cubic/integer.hpp"
#include "cubic/parallel.hpp"
#include "cubic/polynomial.hpp"
#include "cubic/singular_series.hpp"

namespace cubic {

namespace detail {

/// Real roots in [lo, hi] of c0 + c1 t + c2 t^2 + c3 t^3 (not all zero), by
/// bisection on the monotone pieces between critical points. Double roots are
/// returned as the critical point.
inline std::vector<long double> real_roots(const std::array<long double, 4>& c, long double lo, long double hi) {
  auto f = [&](long double t) { return c[0] + t * (c[1] + t * (c[2] + t * c[3])); };
  std::vector<long double> cuts{lo};
  // Critical points: roots of c1 + 2 c2 t + 3 c3 t^2.
  const long double a = 3 * c[3], b = 2 * c[2], d = c[1];
  std::vector<long double> crit;
  if (a != 0) {
    const long double disc = b * b - 4 * a * d;
    if (disc >= 0) {
      const long double s = std::sqrt(disc);
      crit = {(-b - s) / (2 * a), (-b + s) / (2 * a)};
    }
  } else if (b != 0) {
    crit = {-d / b};
  }
  std::sort(crit.begin(), crit.end());
  for (long double t : crit)
    if (t > lo && t < hi) cuts.push_back(t);
  cuts.push_back(hi);
  std::vector<long double> roots;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    long double l = cuts[i], r = cuts[i + 1];
    long double fl = f(l), fr = f(r);
    if (fl == 0) {
      roots.push_back(l);
      continue;
    }
    if ((fl < 0) == (fr < 0)) continue;
    for (int it = 0; it < 200 && r - l > 0; ++it) {
      const long double m = (l + r) / 2;
      if (m == l || m == r) break;
      if ((f(m) < 0) == (fl < 0))
        l = m;
      else
        r = m;
    }
    roots.push_back((l + r) / 2);
  }
  if (f(hi) == 0) roots.push_back(hi);
  for (long double t : crit)
    if (t >= lo && t <= hi && std::abs(f(t)) <= 1e-12L * (std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]) + std::abs(c[3])))
      roots.push_back(t);
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Integer roots in [lo, hi] of an integer cubic in one variable. Every
/// candidate near a real root or critical point is checked exactly.
inline std::vector<i64> integer_roots(const std::array<i128, 4>& c, i64 lo, i64 hi) {
  auto exact = [&](i64 t) {
    const i128 x = t;
    return c[0] + x * (c[1] + x * (c[2] + x * c[3])) == 0;
  };
  std::vector<i64> out;
  if (c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0) {
    for (i64 t = lo; t <= hi; ++t) out.push_back(t);
    return out;
  }
  std::array<long double, 4> cl{};
  for (int k = 0; k < 4; ++k) cl[k] = static_cast<long double>(c[k]);
  std::vector<long double> cand = real_roots(cl, static_cast<long double>(lo), static_cast<long double>(hi));
  const long double a = 3 * cl[3], b = 2 * cl[2], d = cl[1];
  if (a != 0) {
    const long double disc = b * b - 4 * a * d;
    if (disc >= 0) {
      cand.push_back((-b - std::sqrt(disc)) / (2 * a));
      cand.push_back((-b + std::sqrt(disc)) / (2 * a));
    }
  } else if (b != 0) {
    cand.push_back(-d / b);
  }
  for (long double r : cand) {
    if (!std::isfinite(r)) continue;
    const i64 f = static_cast<i64>(std::floor(r));
    for (i64 t : {f - 1, f, f + 1})
      if (t >= lo && t <= hi && exact(t)) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double sin2pi(double t) { return std::sin(2.0 * std::numbers::pi * (t - std::floor(t))); }

}  // namespace detail

enum class EnumerationOrder { ROW_MAJOR, COLUMN_MAJOR };

struct WeightedCount {
  double value = 0;        // sum of w(x) over integer zeros in the box
  i64 zeros = 0;           // zeros with nonzero weight
  long double fibers = 0;  // enumerated values of the first n - 1 coordinates
};

/// N(g; P) = sum of w(x) over integer zeros of g. The first n - 1 coordinates
/// range over the truncation box and the last is solved exactly. Zeros are
/// summed in lexicographic order, so the result does not depend on the
/// enumeration order or the thread count.
inline WeightedCount count_N(const CubicPolynomial& g, const ArchContext& ctx, long double budget = kDefaultBudget,
                             EnumerationOrder order = EnumerationOrder::ROW_MAJOR) {
  const int n = g.dimension();
  if (ctx.dimension() != n) throw InputError("count_N: dimension mismatch");
  const auto box = integer_box(ctx);
  std::vector<std::pair<i64, i64>> free(box.begin(), box.end() - 1);
  const long double fibers = box_volume(free);
  check_budget("count_N", fibers, budget);
  const FastPoly fp(g.poly());
  const auto [tlo, thi] = box.back();
  // Enumeration axes from slowest to fastest.
  std::vector<int> axes;
  for (int i = 0; i < n - 1; ++i) axes.push_back(i);
  if (order == EnumerationOrder::COLUMN_MAJOR) std::reverse(axes.begin(), axes.end());
  const std::size_t chunks = n == 1 ? 1 : static_cast<std::size_t>(free[axes[0]].second - free[axes[0]].first + 1);
  using Zero = std::pair<std::vector<i64>, double>;
  auto per_chunk = parallel_chunks(chunks, [&](std::size_t chunk) {
    std::vector<Zero> found;
    std::vector<i64> x(n, 0);
    for (int i = 0; i < n - 1; ++i) x[i] = free[i].first;
    if (n > 1) x[axes[0]] = free[axes[0]].first + static_cast<i64>(chunk);
    while (true) {
      for (i64 t : detail::integer_roots(fp.last_variable_coeffs(x.data()), tlo, thi)) {
        x[n - 1] = t;
        const double w = weight(ctx, x);
        if (w > 0) found.emplace_back(x, w);
      }
      // Advance the inner axes (all but the chunk axis), last listed fastest.
      int pos = n - 2;
      while (pos >= 1) {
        const int ax = axes[pos];
        if (++x[ax] <= free[ax].second) break;
        x[ax] = free[ax].first;
        --pos;
      }
      if (pos < 1) break;
    }
    return found;
  });
  std::vector<Zero> all;
  for (auto& v : per_chunk) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end(), [](const Zero& a, const Zero& b) { return a.first < b.first; });
  WeightedCount out;
  out.fibers = fibers;
  for (const auto& z : all) out.value += z.second;
  out.zeros = static_cast<i64>(all.size());
  return out;
}

struct MonteCarloConfig {
  std::size_t samples = std::size_t{1} << 20;
  std::uint64_t seed = 0;
};

struct MCEstimate {
  cplx value;
  double std_error = 0;
  std::size_t samples = 0;
};

namespace detail {

inline constexpr std::size_t kChunkSamples = std::size_t{1} << 14;

/// Mean and standard error of f(X) for X with density proportional to w: the
/// coordinates are independent normals with mean P x0_i and deviation P0/sqrt(2).
template <typename F>
MCEstimate gaussian_mean(const ArchContext& ctx, const MonteCarloConfig& mc, F f) {
  if (mc.samples < 2) throw InputError("Monte Carlo: need at least two samples");
  const int n = ctx.dimension();
  const std::size_t chunks = (mc.samples + kChunkSamples - 1) / kChunkSamples;
  struct Sums {
    cplx sum = 0;
    double sq = 0;
  };
  auto parts = parallel_chunks(chunks, [&](std::size_t c) {
    std::mt19937_64 rng(splitmix64(mc.seed ^ splitmix64(c + 1)));
    std::normal_distribution<double> normal(0.0, ctx.P0 / std::numbers::sqrt2);
    const std::size_t count = std::min(kChunkSamples, mc.samples - c * kChunkSamples);
    std::vector<double> x(n);
    Sums s;
    for (std::size_t k = 0; k < count; ++k) {
      for (int i = 0; i < n; ++i) x[i] = ctx.center(i) + normal(rng);
      const cplx v = f(x.data());
      s.sum += v;
      s.sq += std::norm(v);
    }
    return s;
  });
  Sums total;
  for (const auto& s : parts) {
    total.sum += s.sum;
    total.sq += s.sq;
  }
  const double N = static_cast<double>(mc.samples);
  MCEstimate out;
  out.samples = mc.samples;
  out.value = total.sum / N;
  const double var = std::max(0.0, (total.sq - N * std::norm(out.value)) / (N - 1));
  out.std_error = std::sqrt(var / N);
  return out;
}

/// Total mass of w: pi^{n/2} P0^n.
inline double weight_mass(const ArchContext& ctx) {
  return std::pow(std::numbers::pi, ctx.dimension() / 2.0) * std::pow(ctx.P0, ctx.dimension());
}

}  // namespace detail

/// I(z; beta) = int w(x) e(z g(x) + beta.x) dx by Monte Carlo with w as the
/// sampling density.
inline MCEstimate osc_integral_I(const ArchContext& ctx, const CubicPolynomial& g, double z,
                                 const std::vector<double>& beta, const MonteCarloConfig& mc = {}) {
  const int n = ctx.dimension();
  if (g.dimension() != n || static_cast<int>(beta.size()) != n)
    throw InputError("osc_integral_I: dimension mismatch");
  const FastPoly fp(g.poly());
  auto est = detail::gaussian_mean(ctx, mc, [&](const double* x) {
    double phase = z * fp.eval_real(x);
    for (int i = 0; i < n; ++i) phase += beta[i] * x[i];
    return expi2pi(phase);
  });
  const double mass = detail::weight_mass(ctx);
  est.value *= mass;
  est.std_error *= mass;
  return est;
}

/// J(z) = int w(x) e(z g0(x)) dx.
inline MCEstimate osc_integral_J(const ArchContext& ctx, const HomogeneousCubic& g0, double z,
                                 const MonteCarloConfig& mc = {}) {
  return osc_integral_I(ctx, g0.as_polynomial(), z, std::vector<double>(ctx.dimension(), 0.0), mc);
}

struct SingularIntegral {
  double value = 0;
  double std_error = 0;
  std::size_t samples = 0;
  std::optional<double> surface;  // deterministic cross-check, when affordable
};

/// Deterministic estimate of int w(x) delta(g(x)) dx: a trapezoid grid of step
/// P0/8 over the first n - 1 coordinates and exact real roots in the last.
inline std::optional<double> surface_integral(const ArchContext& ctx, const CubicPolynomial& g,
                                              long double budget = 2e7L) {
  const int n = ctx.dimension();
  const double L = 7.0 * ctx.P0;
  const double h = ctx.P0 / 8.0;
  const auto steps = static_cast<i64>(std::ceil(2 * L / h));
  if (ipow_ld(static_cast<long double>(steps + 1), n - 1) > budget) return std::nullopt;
  const FastPoly fp(g.poly());
  const IntPoly dlast = g.poly().derivative(n - 1);
  const FastPoly fd(dlast);
  std::vector<double> x(n);
  std::vector<i64> idx(n - 1, 0);
  double total = 0;
  while (true) {
    for (int i = 0; i < n - 1; ++i) x[i] = ctx.center(i) - L + h * static_cast<double>(idx[i]);
    // The cubic in the last coordinate, by interpolation at 0, 1, -1, 2.
    std::array<long double, 4> v{};
    const double ts[4] = {0, 1, -1, 2};
    for (int k = 0; k < 4; ++k) {
      x[n - 1] = ts[k];
      v[k] = fp.eval_real(x.data());
    }
    const long double c0 = v[0];
    const long double c2 = (v[1] + v[2]) / 2 - c0;
    const long double c3 = (v[3] - 2 * v[1] + v[0] - 2 * c2) / 6;
    const long double c1 = v[1] - c0 - c2 - c3;
    const double tc = ctx.center(n - 1);
    if (c1 != 0 || c2 != 0 || c3 != 0) {
      for (long double t : detail::real_roots({c0, c1, c2, c3}, tc - L, tc + L)) {
        x[n - 1] = static_cast<double>(t);
        const double d = std::abs(fd.eval_real(x.data()));
        if (d == 0) continue;
        double d2 = 0;
        for (int i = 0; i < n; ++i) d2 += (x[i] - ctx.center(i)) * (x[i] - ctx.center(i));
        total += std::exp(-d2 / (ctx.P0 * ctx.P0)) / d;
      }
    }
    int pos = n - 2;
    while (pos >= 0 && ++idx[pos] > steps) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return total * std::pow(h, n - 1);
}

/// The singular integral int_{-1}^{1} I(z; 0) dz. The z-integral is taken in
/// closed form per sample: int_{-1}^{1} e(z y) dz = sin(2 pi y) / (pi y).
inline SingularIntegral singular_integral(const ArchContext& ctx, const CubicPolynomial& g,
                                          const MonteCarloConfig& mc = {}) {
  if (g.dimension() != ctx.dimension()) throw InputError("singular_integral: dimension mismatch");
  const FastPoly fp(g.poly());
  auto est = detail::gaussian_mean(ctx, mc, [&](const double* x) {
    const double y = fp.eval_real(x);
    if (std::abs(y) < 1e-9) return cplx(2.0, 0.0);
    return cplx(detail::sin2pi(y) / (std::numbers::pi * y), 0.0);
  });
  const double mass = detail::weight_mass(ctx);
  SingularIntegral out;
  out.value = est.value.real() * mass;
  out.std_error = est.std_error * mass;
  out.samples = est.samples;
  out.surface = surface_integral(ctx, g);
  return out;
}

/// Least-squares slope of log y against log P.
inline double log_log_slope(const std::vector<double>& P, const std::vector<double>& y) {
  if (P.size() != y.size() || P.size() < 2) throw InputError("log_log_slope: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (!(y[i] > 0)) throw InputError("log_log_slope: values must be positive");
    mx += std::log(P[i]);
    my += std::log(y[i]);
  }
  mx /= P.size();
  my /= P.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    num += (std::log(P[i]) - mx) * (std::log(y[i]) - my);
    den += (std::log(P[i]) - mx) * (std::log(P[i]) - mx);
  }
  return num / den;
}

/// Growth exponent e in J(g; P) ~ C P^e (log P)^{2 - 2n}; the expected value is n - 3.
inline double integral_growth(const std::vector<double>& P, const std::vector<double>& J, int n) {
  std::vector<double> adj(J.size());
  for (std::size_t i = 0; i < J.size(); ++i) adj[i] = J[i] * std::pow(std::log(P[i]), 2.0 * n - 2.0);
  return log_log_slope(P, adj);
}

struct CircleConfig {
  MonteCarloConfig mc;
  std::optional<std::vector<double>> x0;
  std::uint64_t x0_seed = 0;
  long double budget = kDefaultBudget;
};

struct CountReport {
  double P = 0;
  double N_weighted = 0;
  i64 zeros = 0;
  double series_partial = 0;
  i64 Qmax = 0;
  double integral_estimate = 0;
  double integral_std_error = 0;
  std::optional<double> integral_surface;
  double main_term = 0;
  double ratio = 0;
  std::optional<double> growth_fit;       // exponent of N over the P list
  std::optional<double> integral_growth;  // exponent of the integral after the (log P)^{2-2n} factor
  bool caveat = true;
  std::string label;
};

/// N(g; P) against the series times the integral for each P.
inline std::vector<CountReport> main_term_report(const CubicPolynomial& g, const std::vector<double>& Ps, i64 Qmax,
                                                 const CircleConfig& cfg = {}) {
  std::vector<CountReport> out;
  if (Ps.empty()) return out;
  const int n = g.dimension();
  const double series = series_partial(g, Qmax, cfg.budget).value();
  for (double P : Ps) {
    const ArchContext ctx = make_context(g.homogeneous_part(), P, cfg.x0, cfg.x0_seed);
    CountReport r;
    r.P = P;
    const auto count = count_N(g, ctx, cfg.budget);
    r.N_weighted = count.value;
    r.zeros = count.zeros;
    r.series_partial = series;
    r.Qmax = Qmax;
    const auto J = singular_integral(ctx, g, cfg.mc);
    r.integral_estimate = J.value;
    r.integral_std_error = J.std_error;
    r.integral_surface = J.surface;
    r.main_term = series * J.value;
    r.ratio = r.main_term != 0 ? r.N_weighted / r.main_term : std::numeric_limits<double>::quiet_NaN();
    r.caveat = n < 10;
    r.label = "identity holds asymptotically for n >= 10; desk runs are diagnostic";
    out.push_back(r);
  }
  if (out.size() >= 2) {
    std::vector<double> P, N, J;
    for (const auto& r : out) {
      P.push_back(r.P);
      N.push_back(r.N_weighted);
      J.push_back(r.integral_estimate);
    }
    const bool n_ok = std::all_of(N.begin(), N.end(), [](double v) { return v > 0; });
    const bool j_ok = std::all_of(J.begin(), J.end(), [](double v) { return v > 0; });
    const std::optional<double> gn = n_ok ? std::optional<double>(log_log_slope(P, N)) : std::nullopt;
    const std::optional<double> gj = j_ok ? std::optional<double>(integral_growth(P, J, n)) : std::nullopt;
    for (auto& r : out) {
      r.growth_fit = gn;
      r.integral_growth = gj;
    }
  }
  return out;
}

}  // namespace cubic
