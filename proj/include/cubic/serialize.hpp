#pragma once

#include <string>
#include <vector>

#include "cubic/circle_method.hpp"
#include "cubic/expsums.hpp"
#include "cubic/ff_geometry.hpp"
#include "cubic/padic.hpp"
#include "cubic/poly_json.hpp"
#include "cubic/singular_series.hpp"
#include "cubic/slicing.hpp"

namespace cubic {

inline json complex_to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json to_json(const PAdicWitness& w) {
  return json{{"p", w.p},
              {"k", w.k},
              {"x", bigints_to_json(w.x)},
              {"grad_val", w.grad_val},
              {"grad_prime_val", w.grad_prime_val}};
}

inline PAdicWitness witness_from_json(const json& j) {
  PAdicWitness w;
  w.p = j.at("p").get<i64>();
  w.k = j.at("k").get<int>();
  w.x = bigints_from_json(j.at("x"));
  w.grad_val = j.at("grad_val").get<int>();
  w.grad_prime_val = j.at("grad_prime_val").get<int>();
  return w;
}

inline json to_json(const ZeroSearchResult& r) {
  json j{{"status", to_string(r.status)}, {"evaluations", static_cast<double>(r.evaluations)}};
  if (r.witness) j["witness"] = to_json(*r.witness);
  if (r.status == LocalStatus::FAILS) j["fail_k"] = r.fail_k;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline json to_json(const CongruenceVerdict& v) {
  json per = json::array();
  for (const auto& pv : v.per_prime) {
    json e = to_json(pv.result);
    e["p"] = pv.p;
    per.push_back(e);
  }
  return json{{"pmax", v.pmax}, {"kmax", v.kmax}, {"overall", to_string(v.overall)}, {"per_prime", per},
              {"caveat", v.caveat}};
}

inline json to_json(const ExpSum& e) {
  json j{{"q", e.spec.q},
         {"u", bigint_to_json(e.spec.u)},
         {"v", bigints_to_json(e.spec.v)},
         {"value", complex_to_json(e.value)},
         {"method", e.method},
         {"terms", static_cast<double>(e.terms)}};
  if (auto x = e.exact()) j["exact"] = bigint_to_json(*x);
  return j;
}

inline json to_json(const PoissonReport& r) {
  return json{{"lhs", complex_to_json(r.lhs)}, {"rhs", complex_to_json(r.rhs)}, {"abs_err", r.abs_err},
              {"V", r.V},                      {"guided_V", r.guided_V},        {"frequencies", r.frequencies}};
}

inline json to_json(const SeriesReport& r) {
  json terms = json::array(), per = json::object();
  for (const auto& [q, t] : r.terms) terms.push_back({{"q", q}, {"term", t}, {"partial_sum", r.partial_sums.at(q)}});
  for (const auto& [p, v] : r.per_prime) per[std::to_string(p)] = v;
  return json{{"Qmax", r.Qmax},
              {"value", r.value()},
              {"terms", terms},
              {"per_prime", per},
              {"max_imag", r.max_imag},
              {"convergence_slope", r.convergence_slope},
              {"slope_points", r.slope_points}};
}

inline json to_json(const PositivityReport& r) {
  return json{{"verdict", to_string(r.verdict)}, {"s", r.s},
              {"s_heuristic", r.s_heuristic},   {"blocking_primes", r.blocking_primes},
              {"reason", r.reason},             {"congruence", to_json(r.congruence)}};
}

inline json to_json(const SingularDimQ& s) {
  json per = json::array();
  for (const auto& rep : s.reports) {
    json counts = json::object();
    for (const auto& [j, c] : rep.projective_counts) counts[std::to_string(j)] = bigint_to_json(c);
    per.push_back({{"p", rep.p}, {"dim", rep.dim_estimate}, {"projective_counts", counts}});
  }
  return json{{"s", s.value}, {"heuristic", s.heuristic}, {"per_prime", per}};
}

inline json to_json(const SliceCertificate& c) {
  json per = json::array();
  for (const auto& sp : c.per_prime)
    per.push_back({{"p", sp.p},
                   {"k", sp.k},
                   {"modulus", bigint_to_json(sp.modulus)},
                   {"y", to_json(sp.y)},
                   {"section", to_json(sp.section)}});
  return json{{"a", bigints_to_json(c.a)},
              {"M", matrix_to_json(c.M)},
              {"c", bigint_to_json(c.c)},
              {"s_before", c.s_before},
              {"s_after", c.s_after},
              {"s_primes", c.s_primes},
              {"jmax", c.jmax},
              {"pmax", c.pmax},
              {"per_prime", per},
              {"result", poly_to_json(c.result)},
              {"note", c.note}};
}

inline SliceCertificate certificate_from_json(const json& j) {
  try {
    SliceCertificate c;
    c.a = bigints_from_json(j.at("a"));
    c.M = matrix_from_json(j.at("M"));
    c.c = bigint_from_json(j.at("c"));
    c.s_before = j.at("s_before").get<int>();
    c.s_after = j.at("s_after").get<int>();
    c.s_primes = j.at("s_primes").get<std::vector<i64>>();
    c.jmax = j.at("jmax").get<int>();
    c.pmax = j.at("pmax").get<i64>();
    for (const auto& e : j.at("per_prime")) {
      SlicePrime sp;
      sp.p = e.at("p").get<i64>();
      sp.k = e.at("k").get<int>();
      sp.modulus = bigint_from_json(e.at("modulus"));
      sp.y = witness_from_json(e.at("y"));
      sp.section = witness_from_json(e.at("section"));
      c.per_prime.push_back(std::move(sp));
    }
    c.result = poly_from_json(j.at("result"));
    c.note = j.value("note", "");
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("certificate: ") + e.what());
  }
}

inline json to_json(const VerifyReport& r) { return json{{"ok", r.ok}, {"reasons", r.reasons}}; }

inline json to_json(const CountReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return json{{"P", r.P},
              {"N_weighted", r.N_weighted},
              {"zeros", r.zeros},
              {"series_partial", r.series_partial},
              {"Qmax", r.Qmax},
              {"integral_estimate", r.integral_estimate},
              {"integral_std_error", r.integral_std_error},
              {"integral_surface", opt(r.integral_surface)},
              {"main_term", r.main_term},
              {"ratio", r.ratio},
              {"growth_fit", opt(r.growth_fit)},
              {"integral_growth", opt(r.integral_growth)},
              {"caveat", r.caveat},
              {"label", r.label}};
}

}  // namespace cubic
