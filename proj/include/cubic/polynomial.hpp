#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cubic/error.hpp"
#include "cubic/integer.hpp"
#include "cubic/matrix.hpp"

namespace cubic {

/// A monomial as the sorted list of its (0-based) variable indices with
/// repetition, so x1^2*x3 is {0, 0, 2}. Its length is the degree.
using Monomial = std::vector<int>;

/// Sparse multivariate polynomial with integer coefficients and no degree cap.
/// Terms are kept canonical: sorted keys, no zero coefficients.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(int vars) : vars_(vars) {
    if (vars < 0) throw InputError("IntPoly: negative variable count");
  }
  IntPoly(int vars, const std::map<Monomial, BigInt>& terms) : IntPoly(vars) {
    for (const auto& [m, c] : terms) add_term(m, c);
  }

  static IntPoly constant(int vars, const BigInt& c) {
    IntPoly p(vars);
    p.add_term({}, c);
    return p;
  }
  static IntPoly variable(int vars, int i) {
    IntPoly p(vars);
    p.add_term({i}, 1);
    return p;
  }

  int vars() const { return vars_; }
  const std::map<Monomial, BigInt>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.size()));
    return d;
  }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    const std::size_t d = terms_.begin()->first.size();
    return std::all_of(terms_.begin(), terms_.end(),
                       [d](const auto& t) { return t.first.size() == d; });
  }

  BigInt coefficient(Monomial m) const {
    std::sort(m.begin(), m.end());
    auto it = terms_.find(m);
    return it == terms_.end() ? BigInt(0) : it->second;
  }

  void add_term(Monomial m, const BigInt& c) {
    if (c == 0) return;
    std::sort(m.begin(), m.end());
    for (int i : m)
      if (i < 0 || i >= vars_) throw InputError("IntPoly: variable index out of range");
    auto [it, inserted] = terms_.emplace(std::move(m), c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  IntPoly homogeneous_component(int d) const {
    IntPoly out(vars_);
    for (const auto& [m, c] : terms_)
      if (static_cast<int>(m.size()) == d) out.terms_.emplace(m, c);
    return out;
  }

  template <typename T>
  BigInt eval(std::span<const T> x) const {
    if (static_cast<int>(x.size()) != vars_)
      throw InputError("eval: expected " + std::to_string(vars_) + " coordinates, got " +
                       std::to_string(x.size()));
    BigInt total = 0;
    for (const auto& [m, c] : terms_) {
      BigInt t = c;
      for (int i : m) t *= BigInt(x[i]);
      total += t;
    }
    return total;
  }
  BigInt eval(const std::vector<BigInt>& x) const { return eval(std::span<const BigInt>(x)); }
  BigInt eval(const std::vector<i64>& x) const { return eval(std::span<const i64>(x)); }

  /// Value mod m for a point given by residues; m must fit comfortably in 62 bits.
  i64 eval_mod(std::span<const i64> x, i64 m) const {
    i64 total = 0;
    for (const auto& [mono, c] : terms_) {
      i64 t = mod(c, m);
      for (int i : mono) t = mulmod(t, mod(x[i], m), m);
      total += t;
      if (total >= m) total -= m;
    }
    return total;
  }

  long double eval_real(std::span<const long double> x) const {
    long double total = 0;
    for (const auto& [m, c] : terms_) {
      long double t = c.convert_to<long double>();
      for (int i : m) t *= x[i];
      total += t;
    }
    return total;
  }

  IntPoly derivative(int var) const {
    if (var < 0 || var >= vars_) throw InputError("derivative: variable out of range");
    IntPoly out(vars_);
    for (const auto& [m, c] : terms_) {
      auto first = std::find(m.begin(), m.end(), var);
      if (first == m.end()) continue;
      const auto mult = std::count(m.begin(), m.end(), var);
      Monomial reduced = m;
      reduced.erase(reduced.begin() + (first - m.begin()));
      out.add_term(std::move(reduced), c * mult);
    }
    return out;
  }

  IntPoly operator+(const IntPoly& o) const {
    IntPoly out = *this;
    out.vars_ = std::max(vars_, o.vars_);
    for (const auto& [m, c] : o.terms_) out.add_term(m, c);
    return out;
  }
  IntPoly operator-(const IntPoly& o) const { return *this + o * BigInt(-1); }
  IntPoly operator*(const BigInt& s) const {
    IntPoly out(vars_);
    if (s == 0) return out;
    for (const auto& [m, c] : terms_) out.terms_.emplace(m, c * s);
    return out;
  }
  IntPoly operator*(const IntPoly& o) const {
    IntPoly out(std::max(vars_, o.vars_));
    for (const auto& [m1, c1] : terms_)
      for (const auto& [m2, c2] : o.terms_) {
        Monomial m = m1;
        m.insert(m.end(), m2.begin(), m2.end());
        out.add_term(std::move(m), c1 * c2);
      }
    return out;
  }

  /// Substitution x = M y (M is n x n, this polynomial is in x).
  IntPoly substitute_linear(const IntMatrix& M) const {
    if (static_cast<int>(M.size()) != vars_ || !is_square(M))
      throw InputError("substitute_linear: matrix shape does not match dimension");
    std::vector<IntPoly> forms;
    forms.reserve(vars_);
    for (int i = 0; i < vars_; ++i) {
      IntPoly f(vars_);
      for (int j = 0; j < vars_; ++j) f.add_term({j}, M[i][j]);
      forms.push_back(std::move(f));
    }
    IntPoly out(vars_);
    for (const auto& [m, c] : terms_) {
      IntPoly t = IntPoly::constant(vars_, c);
      for (int i : m) t = t * forms[i];
      out = out + t;
    }
    return out;
  }

  /// Substitutes x_var := value and removes that variable (later indices shift down).
  IntPoly fix_variable(int var, const BigInt& value) const {
    IntPoly out(vars_ - 1);
    for (const auto& [m, c] : terms_) {
      BigInt coeff = c;
      Monomial rest;
      for (int i : m) {
        if (i == var)
          coeff *= value;
        else
          rest.push_back(i > var ? i - 1 : i);
      }
      out.add_term(std::move(rest), coeff);
    }
    return out;
  }

  /// z^D * f(x / z) with the new variable z placed at index 0.
  IntPoly homogenize(int total_degree) const {
    IntPoly out(vars_ + 1);
    for (const auto& [m, c] : terms_) {
      Monomial h(total_degree - static_cast<int>(m.size()), 0);
      for (int i : m) h.push_back(i + 1);
      out.add_term(std::move(h), c);
    }
    return out;
  }

  /// Connected components of variables, joined whenever two variables share a
  /// monomial. Variables absent from every monomial form singleton components.
  std::vector<std::vector<int>> variable_components() const {
    std::vector<int> parent(vars_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (const auto& [m, c] : terms_)
      for (std::size_t k = 1; k < m.size(); ++k) parent[find(m[k])] = find(m[0]);
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < vars_; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& [root, vs] : groups) out.push_back(std::move(vs));
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Restriction to a subset of variables (re-indexed in the given order);
  /// only monomials entirely inside the subset are kept.
  IntPoly restrict_to(const std::vector<int>& subset) const {
    std::vector<int> index(vars_, -1);
    for (std::size_t k = 0; k < subset.size(); ++k) index[subset[k]] = static_cast<int>(k);
    IntPoly out(static_cast<int>(subset.size()));
    for (const auto& [m, c] : terms_) {
      if (m.empty()) continue;
      Monomial r;
      bool inside = true;
      for (int i : m) {
        if (index[i] < 0) {
          inside = false;
          break;
        }
        r.push_back(index[i]);
      }
      if (inside) out.add_term(std::move(r), c);
    }
    return out;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [m, c] = *it;
      std::string cs = c.str();
      if (!s.empty()) s += (c < 0) ? " - " : " + ";
      else if (c < 0) s += "-";
      if (c < 0) cs = cs.substr(1);
      std::string mono;
      for (std::size_t k = 0; k < m.size();) {
        std::size_t e = k;
        while (e < m.size() && m[e] == m[k]) ++e;
        if (!mono.empty()) mono += "*";
        mono += "x" + std::to_string(m[k] + 1);
        if (e - k > 1) mono += "^" + std::to_string(e - k);
        k = e;
      }
      if (mono.empty()) s += cs;
      else if (cs == "1") s += mono;
      else s += cs + "*" + mono;
    }
    return s;
  }

  friend bool operator==(const IntPoly& a, const IntPoly& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

 private:
  int vars_ = 0;
  std::map<Monomial, BigInt> terms_;
};

/// Matrix of second partial derivatives at a point, split into the part
/// coming from the cubic terms (linear in the point) and the constant part
/// coming from the quadratic terms.
struct HessianMatrix {
  IntMatrix entries;
  std::vector<BigInt> base_point;
  IntMatrix cubic_part;      // M0(h)
  IntMatrix quadratic_part;  // M1
};

class HomogeneousCubic;

/// Integer polynomial of degree exactly three.
class CubicPolynomial {
 public:
  CubicPolynomial() = default;
  explicit CubicPolynomial(IntPoly poly) : poly_(std::move(poly)) {
    if (poly_.vars() < 1) throw InputError("CubicPolynomial: need at least one variable");
    if (poly_.degree() != 3)
      throw InputError("CubicPolynomial: degree must be exactly 3, got " +
                       std::to_string(poly_.degree()));
  }

  int dimension() const { return poly_.vars(); }
  const IntPoly& poly() const { return poly_; }
  const std::map<Monomial, BigInt>& terms() const { return poly_.terms(); }

  BigInt constant_term() const { return poly_.coefficient({}); }
  BigInt linear_coefficient(int i) const { return poly_.coefficient({i}); }
  IntPoly quadratic_part() const { return poly_.homogeneous_component(2); }
  IntPoly linear_part() const { return poly_.homogeneous_component(1); }
  HomogeneousCubic homogeneous_part() const;

  /// Symmetric tensor entry c_ijk with g0 = sum_{i,j,k} c_ijk x_i x_j x_k.
  Rational symmetric_coefficient(int i, int j, int k) const {
    Monomial m{i, j, k};
    std::sort(m.begin(), m.end());
    int perms = (m[0] == m[2]) ? 1 : (m[0] == m[1] || m[1] == m[2]) ? 3 : 6;
    return Rational(poly_.coefficient(m)) / perms;
  }

  BigInt eval(const std::vector<BigInt>& x) const { return poly_.eval(x); }
  BigInt eval(const std::vector<i64>& x) const { return poly_.eval(x); }

  std::vector<BigInt> gradient(const std::vector<BigInt>& x) const {
    check_dim(x.size());
    std::vector<BigInt> g(dimension());
    for (int i = 0; i < dimension(); ++i) g[i] = poly_.derivative(i).eval(x);
    return g;
  }

  HessianMatrix hessian(const std::vector<BigInt>& h) const {
    check_dim(h.size());
    const int n = dimension();
    IntPoly cubic = poly_.homogeneous_component(3);
    IntPoly quad = poly_.homogeneous_component(2);
    HessianMatrix out;
    out.base_point = h;
    out.entries.assign(n, std::vector<BigInt>(n));
    out.cubic_part.assign(n, std::vector<BigInt>(n));
    out.quadratic_part.assign(n, std::vector<BigInt>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        out.cubic_part[i][j] = cubic.derivative(i).derivative(j).eval(h);
        out.quadratic_part[i][j] = quad.derivative(i).derivative(j).eval(h);
        out.entries[i][j] = out.cubic_part[i][j] + out.quadratic_part[i][j];
      }
    return out;
  }

  /// z^3 g(x / z) in n + 1 variables, z first.
  HomogeneousCubic homogenize() const;

  /// r(y) = g(M y); M must be unimodular.
  CubicPolynomial transform(const IntMatrix& M) const {
    BigInt det = determinant(M);
    if (det != 1 && det != -1) throw InputError("transform: matrix is not unimodular (det " + det.str() + ")");
    return CubicPolynomial(poly_.substitute_linear(M));
  }

  /// h(c, y_2, ..., y_n) as a polynomial in n - 1 variables.
  CubicPolynomial slice(const BigInt& c) const {
    if (dimension() < 2) throw PreconditionError("slice: need at least two variables");
    IntPoly r = poly_.fix_variable(0, c);
    if (r.degree() != 3)
      throw DegeneracyError("slice: cubic part vanishes after fixing the first variable");
    return CubicPolynomial(std::move(r));
  }

  std::string to_string() const { return poly_.to_string(); }

  friend bool operator==(const CubicPolynomial& a, const CubicPolynomial& b) {
    return a.poly_ == b.poly_;
  }

 private:
  void check_dim(std::size_t len) const {
    if (static_cast<int>(len) != dimension())
      throw InputError("dimension mismatch: expected " + std::to_string(dimension()) + ", got " +
                       std::to_string(len));
  }

  IntPoly poly_;
};

/// Nonzero cubic form.
class HomogeneousCubic {
 public:
  HomogeneousCubic() = default;
  explicit HomogeneousCubic(IntPoly poly) : poly_(std::move(poly)) {
    if (poly_.is_zero() || poly_.degree() != 3 || !poly_.is_homogeneous())
      throw InputError("HomogeneousCubic: not a nonzero cubic form");
  }

  int dimension() const { return poly_.vars(); }
  const IntPoly& poly() const { return poly_; }
  BigInt eval(const std::vector<BigInt>& x) const { return poly_.eval(x); }
  BigInt eval(const std::vector<i64>& x) const { return poly_.eval(x); }
  CubicPolynomial as_polynomial() const { return CubicPolynomial(poly_); }

  /// gcd of the coefficients.
  BigInt content() const {
    BigInt g = 0;
    for (const auto& [m, c] : poly_.terms()) g = gcd(g, c);
    return g;
  }

  /// Exact test: the form is degenerate iff its partial derivatives are
  /// linearly dependent over Q (then a rational change of variables removes
  /// one variable).
  bool is_nondegenerate() const {
    const int n = dimension();
    std::map<Monomial, int> column;
    std::vector<IntPoly> partials;
    for (int i = 0; i < n; ++i) {
      partials.push_back(poly_.derivative(i));
      for (const auto& [m, c] : partials.back().terms()) column.emplace(m, 0);
    }
    int k = 0;
    for (auto& [m, idx] : column) idx = k++;
    IntMatrix rows(n, std::vector<BigInt>(column.size(), 0));
    for (int i = 0; i < n; ++i)
      for (const auto& [m, c] : partials[i].terms()) rows[i][column[m]] = c;
    return rank(rows) == n;
  }

  friend bool operator==(const HomogeneousCubic& a, const HomogeneousCubic& b) {
    return a.poly_ == b.poly_;
  }

 private:
  IntPoly poly_;
};

inline HomogeneousCubic CubicPolynomial::homogeneous_part() const {
  return HomogeneousCubic(poly_.homogeneous_component(3));
}

inline HomogeneousCubic CubicPolynomial::homogenize() const {
  return HomogeneousCubic(poly_.homogenize(3));
}

}  // namespace cubic
