// cubic: command-line frontend. Reports are JSON on standard output.
// Exit codes: 0 success, 1 input error, 2 budget exceeded, 3 negative verdict.

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cubic/cubic.hpp"

using namespace cubic;

namespace {

struct RunConfig {
  std::string poly_path;
  i64 pmax = 50;
  int kmax = 6;
  i64 Qmax = 30;
  i64 q = 1;
  i64 u = 0;
  std::vector<long long> v;
  double z = 0;
  std::vector<double> P{8, 16, 32};
  std::vector<double> x0;
  std::uint64_t seed = 0;
  double budget = 1e9;
  std::size_t samples = std::size_t{1} << 20;
  bool csv = false;
  bool deterministic = false;
  std::string verify_path;
  i64 V = -1;
  int jmax = 3;
  std::vector<i64> s_primes{5, 7, 11};
  int trials = 200;
  bool positivity = false;
  int bounds_samples = 50;
  i64 qmax = 210;
};

struct Verdict {
  json report;
  bool negative = false;
  std::string csv;
};

std::optional<std::vector<double>> explicit_x0(const RunConfig& c) {
  if (c.x0.empty()) return std::nullopt;
  return c.x0;
}

ArchContext context_for(const CubicPolynomial& g, double P, const RunConfig& c) {
  auto x0 = explicit_x0(c);
  if (!x0 && g.dimension() == 1) x0 = std::vector<double>{1.0};
  return make_context(g.homogeneous_part(), P, x0, c.seed);
}

// h(g0) = 1 whenever some coordinate divides every monomial of g0.
std::optional<int> coordinate_factor(const HomogeneousCubic& g0) {
  for (int i = 0; i < g0.dimension(); ++i) {
    bool divides = true;
    for (const auto& [m, c] : g0.poly().terms())
      if (std::find(m.begin(), m.end(), i) == m.end()) divides = false;
    if (divides) return i;
  }
  return std::nullopt;
}

Verdict analyze(const CubicPolynomial& g, const RunConfig& c) {
  const HomogeneousCubic g0 = g.homogeneous_part();
  const int n = g.dimension();
  json warnings = json::array();
  json out{{"n", n}, {"polynomial", g.to_string()}, {"nondegenerate", g0.is_nondegenerate()}};
  std::vector<i64> primes;
  for (i64 p : c.s_primes)
    if (g0.content() % p != 0) primes.push_back(p);
  if (primes.empty()) throw InputError("analyze: every sampling prime divides the content of the cubic part");
  const auto s = singular_locus_dim_Q(g0, primes, c.jmax, c.budget);
  out["singular_locus"] = to_json(s);
  if (!g0.is_nondegenerate()) warnings.push_back("the cubic part is degenerate: a linear change of variables removes a variable");
  if (s.value == n - 3)
    warnings.push_back("s(g0) = n - 3: the Congruence Condition can hold while g = 0 has no integer zeros");
  if (n < 11 + s.value)
    warnings.push_back("n = " + std::to_string(n) + " < 11 + s(g0) = " + std::to_string(11 + s.value) +
                       ": outside the range where integer zeros are guaranteed");
  if (auto i = coordinate_factor(g0))
    warnings.push_back("h(g0) = 1 (x" + std::to_string(*i + 1) +
                       " divides the cubic part): insoluble examples of this shape exist, e.g. "
                       "(2x1 - 1)(1 + x1^2 + ... + xn^2) + x1 x2");
  out["warnings"] = warnings;
  return {out};
}

Verdict expsum(const CubicPolynomial& g, const RunConfig& c) {
  std::vector<BigInt> v(c.v.begin(), c.v.end());
  if (v.empty()) v.assign(g.dimension(), 0);
  const ExpSumSpec spec{g, c.u, v, c.q};
  return {to_json(crt_sum(spec, c.budget))};
}

Verdict poisson(const CubicPolynomial& g, const RunConfig& c) {
  const auto ctx = context_for(g, c.P.front(), c);
  const i64 V = c.V >= 0 ? c.V : guided_V(g, c.q, c.z, ctx);
  auto j = to_json(poisson_check(g, c.u, c.q, c.z, ctx, V, c.budget));
  j["P"] = c.P.front();
  return {j};
}

Verdict series(const CubicPolynomial& g, const RunConfig& c) {
  const auto r = series_partial(g, c.Qmax, c.budget);
  Verdict out{to_json(r)};
  std::string csv = "q,term,partial_sum\n";
  for (const auto& [q, t] : r.terms) csv += std::to_string(q) + "," + json(t).dump() + "," + json(r.partial_sums.at(q)).dump() + "\n";
  out.csv = csv;
  if (c.positivity) {
    const auto pos = positivity_certificate(g, c.pmax, c.s_primes, c.kmax, c.budget);
    out.report["positivity"] = to_json(pos);
    out.negative = pos.verdict == Positivity::NOT_POSITIVE;
  }
  return out;
}

Verdict congruence(const CubicPolynomial& g, const RunConfig& c) {
  const auto r = congruence_condition(g, c.pmax, c.kmax, c.budget);
  return {to_json(r), r.overall == Overall::FAILS};
}

Verdict slice(const CubicPolynomial& g, const RunConfig& c) {
  SliceConfig cfg;
  cfg.s_primes = c.s_primes;
  cfg.pmax = c.pmax;
  cfg.kmax = c.kmax;
  cfg.seed = c.seed;
  cfg.trials = c.trials;
  if (!c.verify_path.empty()) {
    std::ifstream in(c.verify_path);
    if (!in) throw InputError("cannot open certificate " + c.verify_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InputError("invalid JSON in " + c.verify_path + ": " + e.what());
    }
    // Accept either the full CLI output or its report object.
    if (j.is_object() && j.contains("report")) j = j.at("report");
    const auto rep = verify_certificate(certificate_from_json(j), g, cfg.budget);
    return {to_json(rep), !rep.ok};
  }
  return {to_json(slice_step(g, cfg))};
}

Verdict count(const CubicPolynomial& g, const RunConfig& c) {
  CircleConfig cfg;
  cfg.mc = {c.samples, c.seed};
  cfg.x0 = explicit_x0(c);
  if (!cfg.x0 && g.dimension() == 1) cfg.x0 = std::vector<double>{1.0};
  cfg.x0_seed = c.seed;
  cfg.budget = c.budget;
  const auto rows = main_term_report(g, c.P, c.Qmax, cfg);
  json arr = json::array();
  std::string csv = "P,N,main_term,ratio\n";
  for (const auto& r : rows) {
    arr.push_back(to_json(r));
    csv += json(r.P).dump() + "," + json(r.N_weighted).dump() + "," + json(r.main_term).dump() + "," +
           json(r.ratio).dump() + "\n";
  }
  return {json{{"reports", arr}}, false, csv};
}

Verdict bounds(const CubicPolynomial& g, const RunConfig& c) {
  const HomogeneousCubic g0 = g.homogeneous_part();
  const auto katz = katz_sweep(g0, c.pmax, {1, 2}, c.bounds_samples, c.seed, c.budget);
  const auto hooley = hooley_sweep(g0, c.pmax, c.bounds_samples, c.seed, 10, c.budget);
  json katz_rows = json::array();
  for (const auto& r : katz.rows) katz_rows.push_back({{"p", r.p}, {"u", r.u}, {"max_ratio", r.max_ratio}});
  json out{{"katz", {{"rows", katz_rows}, {"max_ratio", katz.max_ratio}, {"non_exploding", katz.non_exploding}}},
           {"hooley",
            {{"checked", hooley.checked},
             {"smooth", hooley.smooth},
             {"counterexamples", hooley.counterexamples},
             {"max_smooth_ratio", hooley.max_smooth_ratio},
             {"max_singular_ratio", hooley.max_singular_ratio},
             {"C", hooley.C}}}};
  if (c.qmax >= 5) {
    const auto nt = ntilde_sweep(g, c.qmax, c.budget);
    json rows = json::array();
    for (const auto& r : nt.rows)
      rows.push_back({{"q", r.q}, {"omega", r.omega}, {"ntilde", bigint_to_json(r.value)}, {"ratio", r.ratio}});
    out["ntilde"] = {{"rows", rows}, {"A_emp", nt.A_emp}, {"A_bound", nt.A_bound}};
  }
  const auto sf = squarefull_sweep(13, 14);
  out["squarefull"] = {{"prime_powers", sf.rows.size()}, {"violations", sf.violations}};
  return {out};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cubic: exponential sums, local solubility, slicing and circle-method diagnostics for cubic polynomials"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig c;
  app.add_flag("--deterministic", c.deterministic, "Omit timestamps and timings from the output");
  app.add_option("--seed", c.seed, "Master seed for sampling")->capture_default_str();
  app.add_option("--budget", c.budget, "Work budget (elementary operations)")->capture_default_str();
  app.add_flag("--csv", c.csv, "Emit CSV instead of JSON where supported (series, count)");

  auto poly_opt = [&](CLI::App* sub) { sub->add_option("-f,--poly", c.poly_path, "Polynomial JSON file")->required(); };
  auto x0_opt = [&](CLI::App* sub) {
    sub->add_option("--x0", c.x0, "Explicit real base point (comma separated)")->delimiter(',');
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "Singular locus, non-degeneracy and warnings");
  poly_opt(analyze_cmd);
  analyze_cmd->add_option("--jmax", c.jmax, "Largest extension degree for point counts")->capture_default_str();

  auto* expsum_cmd = app.add_subcommand("expsum", "Complete exponential sum S_u(q; v)");
  poly_opt(expsum_cmd);
  expsum_cmd->add_option("-q", c.q, "Modulus")->capture_default_str();
  expsum_cmd->add_option("-u", c.u, "Multiplier u")->capture_default_str();
  expsum_cmd->add_option("-v", c.v, "Frequency vector (comma separated)")->delimiter(',');

  auto* poisson_cmd = app.add_subcommand("poisson", "Poisson summation check for S_u(q, z)");
  poly_opt(poisson_cmd);
  x0_opt(poisson_cmd);
  poisson_cmd->add_option("-q", c.q, "Modulus")->capture_default_str();
  poisson_cmd->add_option("-u", c.u, "Multiplier u")->capture_default_str();
  poisson_cmd->add_option("-z", c.z, "Offset z")->capture_default_str();
  poisson_cmd->add_option("-P", c.P, "Scale P (first value used)")->delimiter(',');
  poisson_cmd->add_option("--V", c.V, "Frequency truncation (default: guided choice)");

  auto* series_cmd = app.add_subcommand("series", "Partial singular series");
  poly_opt(series_cmd);
  series_cmd->add_option("--Qmax", c.Qmax, "Largest modulus")->capture_default_str();
  series_cmd->add_flag("--positivity", c.positivity, "Also run the positivity certificate");
  series_cmd->add_option("--pmax", c.pmax, "Prime bound for the positivity check")->capture_default_str();
  series_cmd->add_option("--kmax", c.kmax, "Precision bound for the positivity check")->capture_default_str();

  auto* congruence_cmd = app.add_subcommand("congruence", "Congruence Condition for p <= pmax");
  poly_opt(congruence_cmd);
  congruence_cmd->add_option("--pmax", c.pmax, "Prime bound")->capture_default_str();
  congruence_cmd->add_option("--kmax", c.kmax, "Largest precision p^k searched")->capture_default_str();

  auto* slice_cmd = app.add_subcommand("slice", "One slicing step, or replay a certificate with --verify");
  poly_opt(slice_cmd);
  slice_cmd->add_option("--pmax", c.pmax, "Primes receiving CRT witnesses")->capture_default_str();
  slice_cmd->add_option("--kmax", c.kmax, "Largest precision searched per prime")->capture_default_str();
  slice_cmd->add_option("--trials", c.trials, "Hyperplane trials")->capture_default_str();
  slice_cmd->add_option("--verify", c.verify_path, "Certificate JSON to replay against the polynomial");

  auto* count_cmd = app.add_subcommand("count", "Weighted count N(g; P) against the main term");
  poly_opt(count_cmd);
  x0_opt(count_cmd);
  count_cmd->add_option("-P", c.P, "Scales (comma separated)")->delimiter(',');
  count_cmd->add_option("--Qmax", c.Qmax, "Series cutoff")->capture_default_str();
  count_cmd->add_option("--samples", c.samples, "Monte Carlo samples per integral")->capture_default_str();

  auto* bounds_cmd = app.add_subcommand("bounds", "Empirical sweeps of the exponential-sum and counting bounds");
  poly_opt(bounds_cmd);
  bounds_cmd->add_option("--pmax", c.pmax, "Prime bound for the sum sweeps")->capture_default_str();
  bounds_cmd->add_option("--samples", c.bounds_samples, "Sampled v per prime")->capture_default_str();
  bounds_cmd->add_option("--qmax", c.qmax, "Modulus bound for the Ntilde sweep (0 to skip)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (c.budget <= 0 || c.pmax < 2 || c.kmax < 1 || c.Qmax < 1 || c.q < 1 || c.samples < 2)
      throw InputError("bounds, moduli and budgets must be positive");
    const CubicPolynomial g = read_polynomial_file(c.poly_path);
    Verdict out;
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "analyze") out = analyze(g, c);
    else if (name == "expsum") out = expsum(g, c);
    else if (name == "poisson") out = poisson(g, c);
    else if (name == "series") out = series(g, c);
    else if (name == "congruence") out = congruence(g, c);
    else if (name == "slice") out = slice(g, c);
    else if (name == "count") out = count(g, c);
    else out = bounds(g, c);
    if (c.csv && !out.csv.empty()) {
      std::cout << out.csv;
    } else {
      json doc{{"command", name}, {"seed", c.seed}, {"report", out.report}};
      if (!c.deterministic) {
        doc["meta"] = {{"timestamp", static_cast<long long>(std::time(nullptr))},
                       {"elapsed_seconds",
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
      }
      std::cout << doc.dump(2) << "\n";
    }
    return out.negative ? 3 : 0;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const SearchFailure& e) {
    std::cerr << "search failed: " << e.what() << "\n";
    for (const auto& line : e.trace()) std::cerr << "  " << line << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
