#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cubic/error.hpp"
#include "cubic/polynomial.hpp"

namespace cubic {

using json = nlohmann::json;

/// Integers travel as JSON numbers when they fit in 64 bits, else as decimal strings.
inline json bigint_to_json(const BigInt& x) {
  if (x >= std::numeric_limits<i64>::min() && x <= std::numeric_limits<i64>::max())
    return json(x.convert_to<i64>());
  return json(x.str());
}

inline BigInt bigint_from_json(const json& j) {
  if (j.is_number_integer()) return BigInt(j.get<i64>());
  if (j.is_number_unsigned()) return BigInt(j.get<u64>());
  if (j.is_string()) {
    try {
      return BigInt(j.get<std::string>());
    } catch (const std::exception&) {
      throw InputError("not an integer: " + j.get<std::string>());
    }
  }
  throw InputError("expected an integer, got " + j.dump());
}

inline json bigints_to_json(const std::vector<BigInt>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(bigint_to_json(x));
  return a;
}

inline std::vector<BigInt> bigints_from_json(const json& j) {
  std::vector<BigInt> v;
  for (const auto& x : j) v.push_back(bigint_from_json(x));
  return v;
}

inline json matrix_to_json(const IntMatrix& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(bigints_to_json(row));
  return a;
}

inline IntMatrix matrix_from_json(const json& j) {
  IntMatrix m;
  for (const auto& row : j) m.push_back(bigints_from_json(row));
  return m;
}

/// {"n": int, "terms": [{"e": [e1, ..., en], "c": int}]}
inline json poly_to_json(const IntPoly& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> e(p.vars(), 0);
    for (int i : m) ++e[i];
    terms.push_back({{"e", e}, {"c", bigint_to_json(c)}});
  }
  return {{"n", p.vars()}, {"terms", terms}};
}

inline json poly_to_json(const CubicPolynomial& g) { return poly_to_json(g.poly()); }

inline IntPoly int_poly_from_json(const json& j, int max_degree = 3) {
  if (!j.is_object() || !j.contains("n") || !j.contains("terms"))
    throw InputError("polynomial JSON needs fields \"n\" and \"terms\"");
  const int n = j.at("n").get<int>();
  if (n < 1) throw InputError("polynomial JSON: n must be >= 1");
  IntPoly p(n);
  std::set<std::vector<int>> seen;
  for (const auto& t : j.at("terms")) {
    auto e = t.at("e").get<std::vector<int>>();
    if (static_cast<int>(e.size()) != n)
      throw InputError("polynomial JSON: exponent vector length differs from n");
    int total = 0;
    Monomial m;
    for (int i = 0; i < n; ++i) {
      if (e[i] < 0) throw InputError("polynomial JSON: negative exponent");
      total += e[i];
      for (int k = 0; k < e[i]; ++k) m.push_back(i);
    }
    if (total > max_degree) throw InputError("polynomial JSON: term of degree above 3");
    if (!seen.insert(e).second) throw InputError("polynomial JSON: repeated exponent vector");
    p.add_term(std::move(m), bigint_from_json(t.at("c")));
  }
  return p;
}

inline CubicPolynomial poly_from_json(const json& j) { return CubicPolynomial(int_poly_from_json(j)); }

inline CubicPolynomial read_polynomial_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open polynomial file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("invalid JSON in " + path + ": " + e.what());
  }
  return poly_from_json(j);
}

}  // namespace cubic
