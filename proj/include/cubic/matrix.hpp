#pragma once

#include <string>
#include <vector>

#include "cubic/error.hpp"
#include "cubic/integer.hpp"

namespace cubic {

/// Dense integer matrix, row-major.
using IntMatrix = std::vector<std::vector<BigInt>>;

inline IntMatrix identity_matrix(int n) {
  IntMatrix m(n, std::vector<BigInt>(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline bool is_square(const IntMatrix& m) {
  for (const auto& row : m)
    if (row.size() != m.size()) return false;
  return true;
}

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.empty() || a[0].size() != b.size()) throw InputError("multiply: shape mismatch");
  const std::size_t r = a.size(), k = b.size(), c = b[0].size();
  IntMatrix out(r, std::vector<BigInt>(c, 0));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (std::size_t j = 0; j < c; ++j) out[i][j] += a[i][l] * b[l][j];
    }
  return out;
}

/// Exact determinant by Bareiss fraction-free elimination.
inline BigInt determinant(IntMatrix m) {
  if (!is_square(m)) throw InputError("determinant: matrix not square");
  const int n = static_cast<int>(m.size());
  if (n == 0) return 1;
  BigInt sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[k][k] == 0) {
      int swap = -1;
      for (int i = k + 1; i < n; ++i)
        if (m[i][k] != 0) {
          swap = i;
          break;
        }
      if (swap < 0) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

/// Inverse of a matrix with determinant +-1 (integral by Cramer's rule).
inline IntMatrix inverse_unimodular(const IntMatrix& m) {
  if (!is_square(m)) throw InputError("inverse_unimodular: matrix not square");
  const int n = static_cast<int>(m.size());
  BigInt det = determinant(m);
  if (det != 1 && det != -1) throw InputError("inverse_unimodular: determinant is " + det.str());
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n, Rational(0)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = Rational(m[i][j]);
    a[i][n + i] = 1;
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (a[piv][col] == 0) ++piv;
    std::swap(a[piv], a[col]);
    Rational inv = 1 / a[col][col];
    for (auto& x : a[col]) x *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == col || a[i][col] == 0) continue;
      Rational f = a[i][col];
      for (int j = 0; j < 2 * n; ++j) a[i][j] -= f * a[col][j];
    }
  }
  IntMatrix out(n, std::vector<BigInt>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i][j] = boost::multiprecision::numerator(a[i][n + j]);
  return out;
}

/// Rank over Q by fraction-free elimination on a copy.
inline int rank(IntMatrix m) {
  if (m.empty()) return 0;
  const int rows = static_cast<int>(m.size());
  const int cols = static_cast<int>(m[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[piv], m[r]);
    for (int i = r + 1; i < rows; ++i) {
      if (m[i][c] == 0) continue;
      BigInt f = m[i][c], g = m[r][c];
      for (int j = c; j < cols; ++j) m[i][j] = m[i][j] * g - m[r][j] * f;
      BigInt content = 0;
      for (int j = c; j < cols; ++j) content = gcd(content, m[i][j]);
      if (content > 1)
        for (int j = c; j < cols; ++j) m[i][j] /= content;
    }
    ++r;
  }
  return r;
}

inline std::string to_string(const IntMatrix& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    s += i ? ", [" : "[";
    for (std::size_t j = 0; j < m[i].size(); ++j) s += (j ? ", " : "") + m[i][j].str();
    s += "]";
  }
  return s + "]";
}

}  // namespace cubic
