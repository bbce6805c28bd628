#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cubic/error.hpp"
#include "cubic/integer.hpp"
#include "cubic/polynomial.hpp"

namespace cubic {

using cplx = std::complex<double>;

inline cplx expi2pi(double t) {
  const double ang = 2.0 * std::numbers::pi * (t - std::floor(t));
  return {std::cos(ang), std::sin(ang)};
}

/// A polynomial with 64-bit coefficients evaluated exactly in 128-bit
/// arithmetic at integer points and in double precision at real points.
class FastPoly {
 public:
  struct Term {
    i64 coeff;
    std::array<int, 3> idx;
    int deg;
  };

  FastPoly() = default;
  explicit FastPoly(const IntPoly& p) : vars_(p.vars()) {
    for (const auto& [m, c] : p.terms()) {
      if (c > std::numeric_limits<i64>::max() / 8 || c < std::numeric_limits<i64>::min() / 8)
        throw InputError("coefficient too large for fast evaluation");
      Term t{c.convert_to<i64>(), {0, 0, 0}, static_cast<int>(m.size())};
      for (std::size_t k = 0; k < m.size(); ++k) t.idx[k] = m[k];
      terms_.push_back(t);
    }
  }

  int vars() const { return vars_; }

  i128 eval(const i64* x) const {
    i128 s = 0;
    for (const auto& t : terms_) {
      i128 v = t.coeff;
      for (int k = 0; k < t.deg; ++k) v *= x[t.idx[k]];
      s += v;
    }
    return s;
  }

  double eval_real(const double* x) const {
    double s = 0;
    for (const auto& t : terms_) {
      double v = static_cast<double>(t.coeff);
      for (int k = 0; k < t.deg; ++k) v *= x[t.idx[k]];
      s += v;
    }
    return s;
  }

  /// Coefficients of the last variable as a cubic, for fixed values of the
  /// others (entries of x at the last index are ignored).
  std::array<i128, 4> last_variable_coeffs(const i64* x) const {
    std::array<i128, 4> c{0, 0, 0, 0};
    const int last = vars_ - 1;
    for (const auto& t : terms_) {
      i128 v = t.coeff;
      int power = 0;
      for (int k = 0; k < t.deg; ++k) {
        if (t.idx[k] == last)
          ++power;
        else
          v *= x[t.idx[k]];
      }
      c[power] += v;
    }
    return c;
  }

 private:
  int vars_ = 0;
  std::vector<Term> terms_;
};

/// Scale, base point and truncation for the Gaussian weight
/// w(x) = exp(-|x - P x0|^2 / P0^2) with P0 = P / (log P)^2.
struct ArchContext {
  double P = 0;
  double P0 = 0;
  std::vector<double> x0;
  int hessian_rank = 0;
  double truncation_radius = 0;

  int dimension() const { return static_cast<int>(x0.size()); }
  double center(int i) const { return P * x0[i]; }
};

/// Radius multiple r (in units of P0) with Gaussian tail mass below tol: the
/// fraction of mass of w outside radius r P0 is Q(n/2, r^2).
inline double truncation_multiple(int n, double tol = 1e-12) {
  double r = 6.0;
  while (boost::math::gamma_q(n / 2.0, r * r) > tol) r += 0.25;
  return r;
}

/// Numerical rank with pivot threshold rel_tol * max |entry|.
inline int numerical_rank(std::vector<std::vector<double>> a, double rel_tol = 1e-8) {
  const int rows = static_cast<int>(a.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(a[0].size());
  double scale = 0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0) return 0;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = r;
    for (int i = r + 1; i < rows; ++i)
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    if (std::abs(a[piv][c]) <= rel_tol * scale) continue;
    std::swap(a[piv], a[r]);
    for (int i = r + 1; i < rows; ++i) {
      const double f = a[i][c] / a[r][c];
      for (int j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return r;
}

inline std::vector<std::vector<double>> real_hessian(const HomogeneousCubic& g0, const std::vector<double>& x) {
  const int n = g0.dimension();
  std::vector<long double> xl(x.begin(), x.end());
  std::vector<std::vector<double>> h(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    IntPoly di = g0.poly().derivative(i);
    for (int j = 0; j < n; ++j) h[i][j] = static_cast<double>(di.derivative(j).eval_real(xl));
  }
  return h;
}

/// A real unit vector x0 with g0(x0) = 0 and Hessian rank >= n - 1, found by
/// solving g0 along seeded random lines.
inline std::vector<double> find_x0(const HomogeneousCubic& g0, std::uint64_t seed = 0, int trials = 200,
                                   int* rank_out = nullptr) {
  const int n = g0.dimension();
  if (n < 2) throw SearchFailure("find_x0: a cubic form in one variable has no nonzero real zero");
  long double coeff_scale = 0;
  for (const auto& [m, c] : g0.poly().terms()) coeff_scale += abs(c).convert_to<long double>();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::string> trace;
  auto eval = [&](const std::vector<long double>& x) { return g0.poly().eval_real(x); };
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<long double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = normal(rng);
      b[i] = normal(rng);
    }
    auto line = [&](long double t) {
      std::vector<long double> x(n);
      for (int i = 0; i < n; ++i) x[i] = a[i] + t * b[i];
      return x;
    };
    // Bracket a sign change of the cubic t -> g0(a + t b).
    long double lo = -1, hi = 1;
    long double flo = eval(line(lo)), fhi = eval(line(hi));
    int expand = 0;
    while (flo * fhi > 0 && expand < 60) {
      lo *= 2;
      hi *= 2;
      flo = eval(line(lo));
      fhi = eval(line(hi));
      ++expand;
    }
    if (flo * fhi > 0) {
      trace.push_back("trial " + std::to_string(trial) + ": no sign change");
      continue;
    }
    for (int it = 0; it < 200; ++it) {
      const long double mid = (lo + hi) / 2;
      const long double fm = eval(line(mid));
      if ((fm < 0) == (flo < 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    std::vector<long double> x = line((lo + hi) / 2);
    long double norm = 0;
    for (auto v : x) norm += v * v;
    norm = std::sqrt(norm);
    if (norm < 1e-6L) {
      trace.push_back("trial " + std::to_string(trial) + ": root near origin");
      continue;
    }
    for (auto& v : x) v /= norm;
    // Newton polish along the gradient direction.
    for (int it = 0; it < 5; ++it) {
      long double gx = eval(x);
      std::vector<long double> grad(n);
      long double gg = 0;
      for (int i = 0; i < n; ++i) {
        grad[i] = g0.poly().derivative(i).eval_real(x);
        gg += grad[i] * grad[i];
      }
      if (gg == 0) break;
      for (int i = 0; i < n; ++i) x[i] -= gx * grad[i] / gg;
      norm = 0;
      for (auto v : x) norm += v * v;
      norm = std::sqrt(norm);
      for (auto& v : x) v /= norm;
    }
    if (std::abs(eval(x)) > 1e-10L * std::max<long double>(1, coeff_scale)) {
      trace.push_back("trial " + std::to_string(trial) + ": residual too large");
      continue;
    }
    std::vector<double> xd(x.begin(), x.end());
    const int rank = numerical_rank(real_hessian(g0, xd));
    if (rank < n - 1) {
      trace.push_back("trial " + std::to_string(trial) + ": hessian rank " + std::to_string(rank));
      continue;
    }
    if (rank_out) *rank_out = rank;
    return xd;
  }
  throw SearchFailure("find_x0: no admissible real zero found", trace);
}

/// Builds the context. An explicit x0 (normalized here) bypasses the search,
/// which is how one-variable polynomials get a base point.
inline ArchContext make_context(const HomogeneousCubic& g0, double P,
                                std::optional<std::vector<double>> x0 = std::nullopt, std::uint64_t seed = 0) {
  if (!(P > 1.0)) throw InputError("make_context: P must exceed 1");
  ArchContext ctx;
  ctx.P = P;
  const double lp = std::log(P);
  ctx.P0 = P / (lp * lp);
  const int n = g0.dimension();
  if (x0) {
    if (static_cast<int>(x0->size()) != n) throw InputError("make_context: x0 has wrong dimension");
    double norm = 0;
    for (double v : *x0) norm += v * v;
    if (norm == 0) throw InputError("make_context: x0 must be nonzero");
    ctx.x0 = *x0;
    for (auto& v : ctx.x0) v /= std::sqrt(norm);
    ctx.hessian_rank = numerical_rank(real_hessian(g0, ctx.x0));
  } else {
    ctx.x0 = find_x0(g0, seed, 200, &ctx.hessian_rank);
  }
  ctx.truncation_radius = truncation_multiple(n) * ctx.P0;
  return ctx;
}

/// Gaussian weight; zero outside the truncation ball or below 1e-300.
inline double weight(const ArchContext& ctx, const std::vector<i64>& x) {
  double d2 = 0;
  for (int i = 0; i < ctx.dimension(); ++i) {
    const double d = static_cast<double>(x[i]) - ctx.center(i);
    d2 += d * d;
  }
  if (d2 > ctx.truncation_radius * ctx.truncation_radius) return 0.0;
  const double w = std::exp(-d2 / (ctx.P0 * ctx.P0));
  return w < 1e-300 ? 0.0 : w;
}

/// Integer box [ceil(P x0_i - R), floor(P x0_i + R)] per coordinate.
inline std::vector<std::pair<i64, i64>> integer_box(const ArchContext& ctx) {
  std::vector<std::pair<i64, i64>> box;
  for (int i = 0; i < ctx.dimension(); ++i)
    box.emplace_back(static_cast<i64>(std::ceil(ctx.center(i) - ctx.truncation_radius)),
                     static_cast<i64>(std::floor(ctx.center(i) + ctx.truncation_radius)));
  return box;
}

inline long double box_volume(const std::vector<std::pair<i64, i64>>& box) {
  long double v = 1;
  for (auto [lo, hi] : box) v *= static_cast<long double>(hi - lo + 1);
  return v;
}

/// I(z; beta) = int w(x) e(z g(x) + beta.x) dx for every beta in freqs^n, by a
/// tensor trapezoid rule on the cube |x_i - P x0_i| <= 7 P0. The result is
/// flattened with the first coordinate's frequency varying slowest. At z = 0 the
/// Gaussian Fourier transform is used in closed form.
inline std::vector<cplx> osc_integral_grid(const ArchContext& ctx, const CubicPolynomial& g, double z,
                                           const std::vector<double>& freqs,
                                           long double budget = kDefaultBudget) {
  const int n = ctx.dimension();
  if (g.dimension() != n) throw InputError("osc_integral_grid: dimension mismatch");
  const std::size_t nf = freqs.size();
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= nf;
  std::vector<cplx> out(total);
  const double pi = std::numbers::pi;
  if (z == 0.0) {
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rest = idx;
      cplx v = 1.0;
      for (int i = n - 1; i >= 0; --i) {
        const double b = freqs[rest % nf];
        rest /= nf;
        v *= std::sqrt(pi) * ctx.P0 * std::exp(-pi * pi * ctx.P0 * ctx.P0 * b * b) * expi2pi(b * ctx.center(i));
      }
      out[idx] = v;
    }
    return out;
  }
  const double L = 7.0 * ctx.P0;
  // Largest phase frequency on the cube bounds the step.
  double fmax = 0;
  for (double b : freqs) fmax = std::max(fmax, std::abs(b));
  {
    double radius = 0;
    for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(ctx.center(i)) + L);
    long double coeff_sum = 0;
    for (const auto& [m, c] : g.terms())
      if (!m.empty()) coeff_sum += abs(c).convert_to<long double>() * m.size();
    fmax += std::abs(z) * static_cast<double>(coeff_sum) * std::max(1.0, radius * radius);
  }
  const double h = std::min(ctx.P0 / 16.0, 1.0 / (8.0 * std::max(fmax, 1e-12)));
  const auto N = static_cast<std::size_t>(std::ceil(2 * L / h)) + 1;
  const double step = 2 * L / static_cast<double>(N - 1);
  check_budget("osc_integral_grid", ipow_ld(static_cast<long double>(N), n), std::min<long double>(budget, 2e8L));
  std::vector<std::vector<double>> nodes(n, std::vector<double>(N));
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < N; ++k) nodes[i][k] = ctx.center(i) - L + step * static_cast<double>(k);
  FastPoly fp(g.poly());
  std::size_t grid = 1;
  for (int i = 0; i < n; ++i) grid *= N;
  std::vector<cplx> t(grid);
  {
    std::vector<double> x(n);
    for (std::size_t idx = 0; idx < grid; ++idx) {
      std::size_t rest = idx;
      double d2 = 0;
      for (int i = n - 1; i >= 0; --i) {
        x[i] = nodes[i][rest % N];
        rest /= N;
        const double d = x[i] - ctx.center(i);
        d2 += d * d;
      }
      const double w = std::exp(-d2 / (ctx.P0 * ctx.P0));
      // Trapezoid end weights are negligible against the Gaussian decay at 7 P0.
      t[idx] = w * expi2pi(z * fp.eval_real(x.data()));
    }
  }
  // Contract the last remaining grid axis against e(beta x) at each stage.
  std::size_t suffix = 1;
  for (int d = n - 1; d >= 0; --d) {
    std::vector<std::vector<cplx>> phase(nf, std::vector<cplx>(N));
    for (std::size_t f = 0; f < nf; ++f)
      for (std::size_t k = 0; k < N; ++k) phase[f][k] = step * expi2pi(freqs[f] * nodes[d][k]);
    std::size_t prefix = 1;
    for (int i = 0; i < d; ++i) prefix *= N;
    std::vector<cplx> next(prefix * nf * suffix);
    for (std::size_t pi_ = 0; pi_ < prefix; ++pi_)
      for (std::size_t f = 0; f < nf; ++f)
        for (std::size_t s = 0; s < suffix; ++s) {
          cplx acc = 0;
          for (std::size_t k = 0; k < N; ++k) acc += t[(pi_ * N + k) * suffix + s] * phase[f][k];
          next[(pi_ * nf + f) * suffix + s] = acc;
        }
    t = std::move(next);
    suffix *= nf;
  }
  return t;
}

/// Single-frequency convenience wrapper.
inline cplx osc_integral_quadrature(const ArchContext& ctx, const CubicPolynomial& g, double z,
                                    const std::vector<double>& beta) {
  const int n = ctx.dimension();
  if (static_cast<int>(beta.size()) != n) throw InputError("osc_integral_quadrature: dimension mismatch");
  // The distinct entries of beta serve as the shared per-axis frequency list.
  std::vector<double> freqs;
  for (double b : beta)
    if (std::find(freqs.begin(), freqs.end(), b) == freqs.end()) freqs.push_back(b);
  auto grid = osc_integral_grid(ctx, g, z, freqs);
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i)
    idx = idx * freqs.size() + static_cast<std::size_t>(std::find(freqs.begin(), freqs.end(), beta[i]) - freqs.begin());
  return grid[idx];
}

}  // namespace cubic
