#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cubic/error.hpp"
#include "cubic/integer.hpp"
#include "cubic/polynomial.hpp"

namespace cubic {

namespace fp_poly {

// Dense univariate polynomials over F_p, coefficients low to high, trimmed.
using Poly = std::vector<i64>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly sub(Poly a, const Poly& b, i64 p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = mod(a[i] - b[i], p);
  trim(a);
  return a;
}

inline Poly mul(const Poly& a, const Poly& b, i64 p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) r[i + k] = (r[i + k] + a[i] * b[k]) % p;
  trim(r);
  return r;
}

inline Poly rem(Poly a, const Poly& m, i64 p) {
  trim(a);
  const i64 lead_inv = inverse_mod(m.back(), p);
  while (a.size() >= m.size()) {
    const i64 f = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) a[shift + i] = mod(a[shift + i] - f * m[i], p);
    trim(a);
  }
  return a;
}

inline Poly gcd(Poly a, Poly b, i64 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

inline Poly powmod(Poly base, u64 e, const Poly& m, i64 p) {
  Poly result{1};
  base = rem(base, m, p);
  while (e > 0) {
    if (e & 1) result = rem(mul(result, base, p), m, p);
    base = rem(mul(base, base, p), m, p);
    e >>= 1;
  }
  return result;
}

/// x^(p^k) mod m by k successive p-th powers.
inline Poly frobenius_x(int k, const Poly& m, i64 p) {
  Poly x = rem(Poly{0, 1}, m, p);
  for (int i = 0; i < k; ++i) x = powmod(x, static_cast<u64>(p), m, p);
  return x;
}

/// Rabin's test: m (monic, degree j) is irreducible iff x^(p^j) = x mod m and
/// gcd(x^(p^(j/r)) - x, m) = 1 for every prime r dividing j.
inline bool is_irreducible(const Poly& m, i64 p) {
  const int j = static_cast<int>(m.size()) - 1;
  if (j < 1) return false;
  if (j == 1) return true;
  const Poly x{0, 1};
  if (sub(frobenius_x(j, m, p), rem(x, m, p), p).size() != 0) return false;
  for (const auto& r : factorize(j)) {
    Poly h = sub(frobenius_x(j / static_cast<int>(r.p), m, p), rem(x, m, p), p);
    if (gcd(h, m, p).size() != 1) return false;
  }
  return true;
}

}  // namespace fp_poly

/// F_{p^j} realized as F_p[t]/(modulus). Elements are encoded as integers in
/// [0, q) whose base-p digits are the coefficients of 1, t, t^2, ... The
/// modulus is the first monic irreducible in lexicographic order of its
/// coefficient vector (c_0, ..., c_{j-1}), so every (p, j) names one canonical
/// field.
class ExtField {
 public:
  using Elem = std::int32_t;

  ExtField(i64 p, int j) : p_(p), j_(j) {
    if (!is_prime(p)) throw InputError("ExtField: " + std::to_string(p) + " is not prime");
    if (j < 1) throw InputError("ExtField: degree must be >= 1");
    long double q = ipow_ld(static_cast<long double>(p), j);
    if (q > 4e6L) throw BudgetError("ExtField: field too large for table arithmetic", q, 4e6L);
    q_ = ipow(p, j);
    modulus_ = find_modulus();
    build_tables();
  }

  i64 characteristic() const { return p_; }
  int degree() const { return j_; }
  i64 size() const { return q_; }
  const fp_poly::Poly& modulus() const { return modulus_; }

  Elem from_int(i64 c) const { return static_cast<Elem>(mod(c, p_)); }
  Elem from_int(const BigInt& c) const { return static_cast<Elem>(mod(c, p_)); }

  Elem add(Elem a, Elem b) const {
    if (j_ == 1) {
      Elem s = a + b;
      return s >= p_ ? static_cast<Elem>(s - p_) : s;
    }
    if (!add_table_.empty()) return add_table_[static_cast<std::size_t>(a) * q_ + b];
    return add_digits(a, b);
  }
  Elem neg(Elem a) const { return neg_[a]; }
  Elem sub(Elem a, Elem b) const { return add(a, neg_[b]); }
  Elem mul(Elem a, Elem b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  Elem inv(Elem a) const {
    if (a == 0) throw PreconditionError("ExtField: inverse of zero");
    return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
  }
  Elem pow(Elem a, u64 e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    return exp_[static_cast<std::size_t>((static_cast<u64>(log_[a]) * (e % (q_ - 1))) % (q_ - 1))];
  }
  /// Trace to F_p (sum of Frobenius conjugates), returned as residue in [0, p).
  i64 trace(Elem a) const {
    Elem s = 0, x = a;
    for (int k = 0; k < j_; ++k) {
      s = add(s, x);
      x = pow(x, static_cast<u64>(p_));
    }
    return s;  // lies in the prime field, encoded as its residue
  }

 private:
  fp_poly::Poly find_modulus() const {
    if (j_ == 1) return {0, 1};
    fp_poly::Poly m(j_ + 1, 0);
    m[j_] = 1;
    const i64 count = q_;
    for (i64 idx = 0; idx < count; ++idx) {
      // idx enumerates (c_0, ..., c_{j-1}) lexicographically.
      i64 rest = idx;
      for (int k = j_ - 1; k >= 0; --k) {
        m[k] = rest % p_;
        rest /= p_;
      }
      if (m[0] == 0) continue;
      if (fp_poly::is_irreducible(m, p_)) return m;
    }
    throw Error("ExtField: no irreducible polynomial found");
  }

  fp_poly::Poly to_poly(i64 a) const {
    fp_poly::Poly r(j_, 0);
    for (int k = 0; k < j_; ++k) {
      r[k] = a % p_;
      a /= p_;
    }
    fp_poly::trim(r);
    return r;
  }
  i64 from_poly(const fp_poly::Poly& r) const {
    i64 a = 0;
    for (int k = static_cast<int>(r.size()) - 1; k >= 0; --k) a = a * p_ + r[k];
    return a;
  }
  Elem add_digits(Elem a, Elem b) const {
    i64 out = 0, scale = 1;
    for (int k = 0; k < j_; ++k) {
      out += ((a % p_ + b % p_) % p_) * scale;
      a /= static_cast<Elem>(p_);
      b /= static_cast<Elem>(p_);
      scale *= p_;
    }
    return static_cast<Elem>(out);
  }

  void build_tables() {
    neg_.resize(q_);
    for (i64 a = 0; a < q_; ++a) {
      i64 out = 0, scale = 1, x = a;
      for (int k = 0; k < j_; ++k) {
        out += mod(-(x % p_), p_) * scale;
        x /= p_;
        scale *= p_;
      }
      neg_[a] = static_cast<Elem>(out);
    }
    if (j_ > 1 && q_ <= 2048) {
      add_table_.resize(static_cast<std::size_t>(q_ * q_));
      for (i64 a = 0; a < q_; ++a)
        for (i64 b = 0; b < q_; ++b)
          add_table_[static_cast<std::size_t>(a * q_ + b)] =
              add_digits(static_cast<Elem>(a), static_cast<Elem>(b));
    }
    // Find a generator of the multiplicative group.
    const auto order_factors = factorize(q_ - 1 > 0 ? q_ - 1 : 1);
    for (i64 cand = (q_ == 2 ? 1 : 2); cand < q_; ++cand) {
      fp_poly::Poly g = to_poly(cand);
      bool generator = true;
      for (const auto& f : order_factors) {
        fp_poly::Poly r = fp_poly::powmod(g, static_cast<u64>((q_ - 1) / f.p), modulus_, p_);
        if (r.size() == 1 && r[0] == 1) {
          generator = false;
          break;
        }
      }
      if (q_ == 2) generator = true;
      if (!generator) continue;
      exp_.assign(static_cast<std::size_t>(2 * (q_ - 1)), 0);
      log_.assign(static_cast<std::size_t>(q_), 0);
      fp_poly::Poly x{1};
      for (i64 k = 0; k < q_ - 1; ++k) {
        const i64 v = from_poly(x);
        exp_[k] = exp_[k + q_ - 1] = static_cast<Elem>(v);
        log_[v] = static_cast<std::int32_t>(k);
        x = fp_poly::rem(fp_poly::mul(x, g, p_), modulus_, p_);
      }
      return;
    }
    throw Error("ExtField: no generator found");
  }

  i64 p_;
  int j_;
  i64 q_;
  fp_poly::Poly modulus_;
  std::vector<Elem> neg_;
  std::vector<Elem> add_table_;
  std::vector<Elem> exp_;
  std::vector<std::int32_t> log_;
};

/// An integer polynomial reduced into a field, compiled for repeated evaluation.
class FieldPoly {
 public:
  using Elem = ExtField::Elem;
  struct Term {
    Elem coeff;
    std::vector<int> vars;
  };

  FieldPoly(const IntPoly& poly, const ExtField& field) : field_(&field), vars_(poly.vars()) {
    for (const auto& [m, c] : poly.terms()) {
      Elem e = field.from_int(c);
      if (e != 0) terms_.push_back({e, m});
    }
  }

  int vars() const { return vars_; }
  const std::vector<Term>& terms() const { return terms_; }

  Elem eval(std::span<const Elem> x) const {
    const ExtField& f = *field_;
    Elem total = 0;
    for (const auto& t : terms_) {
      Elem v = t.coeff;
      for (int i : t.vars) {
        v = f.mul(v, x[i]);
        if (v == 0) break;
      }
      total = f.add(total, v);
    }
    return total;
  }

 private:
  const ExtField* field_;
  int vars_;
  std::vector<Term> terms_;
};

}  // namespace cubic
