#pragma once

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "factorlab/common.hpp"
#include "factorlab/dynamics.hpp"
#include "factorlab/ekstats.hpp"
#include "factorlab/friable.hpp"
#include "factorlab/primeset.hpp"
#include "factorlab/sieve.hpp"

namespace factorlab {

/// Exact split of the restricted weighted sum
///   LHS = sum_{n <= x, P+(n) in S} h(n),  h = f * F(psi)
/// into the friable part S1 (P+ || n, P+ < y), the large-prime part S2
/// (P+ || n, P+ >= y, recombined as sum over primes p of h(np) with
/// P+(n) < p), and the repeated-largest-factor part Q. The identity is
/// exact, so the residual isolates floating-point error and any
/// inconsistency in the recombination n -> np.
struct DecompositionParts {
  double lhs = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double square_part = 0.0;
  double residual_abs = 0.0;
  double residual_rel = 0.0;
};

inline DecompositionParts decomposition_check(const FactorTable& table, const WeightSpec& w,
                                              const PrimeSetSpec& set,
                                              const std::optional<TestFunction>& f,
                                              const NormalizationSpec& norm, int64_t x,
                                              int64_t y) {
  if (norm.kind != NormalizationSpec::Kind::ek)
    throw std::invalid_argument("decomposition_check: needs an ek normalization");
  if (y < 2 || y > x) throw std::invalid_argument("decomposition_check: need 2 <= y <= x");
  if (x > table.limit()) throw std::invalid_argument("decomposition_check: x exceeds table limit");

  // F(psi(k)) only depends on the integer statistic k.
  std::vector<double> fpsi(72);
  for (size_t k = 0; k < fpsi.size(); ++k)
    fpsi[k] = f ? (*f)(ek_psi(norm, static_cast<int64_t>(k))) : 1.0;

  std::vector<double> fw(static_cast<size_t>(x) + 1);
  std::vector<int64_t> pmax(static_cast<size_t>(x) + 1);
  std::vector<unsigned char> bo(static_cast<size_t>(x) + 1), repeated(static_cast<size_t>(x) + 1);
  fw[1] = 1.0;
  pmax[1] = 1;
  for (int64_t n = 1; n <= x; ++n) {
    if (n >= 2) {
      const ArithmeticProfile pr = table.profile(n);
      fw[static_cast<size_t>(n)] = weight_value(w, pr, table);
      pmax[static_cast<size_t>(n)] = pr.pmax;
      bo[static_cast<size_t>(n)] = static_cast<unsigned char>(pr.big_omega);
      repeated[static_cast<size_t>(n)] = pr.pmax_multiplicity() >= 2 ? 1 : 0;
    }
  }

  DecompositionParts out;
  CompensatedSum lhs, s1, square;
  for (int64_t n = 1; n <= x; ++n) {
    const auto i = static_cast<size_t>(n);
    if (!set.admits_pmax(pmax[i])) continue;
    const double h = fw[i] * fpsi[bo[i]];
    lhs.add(h);
    if (repeated[i])
      square.add(h);
    else if (pmax[i] < y)
      s1.add(h);
  }

  // S2 recombined: h(np) = f(n) f(p) F(psi(Omega(n) + 1)) over P+(n) < p.
  CompensatedSum s2;
  const double fp = w.prime_power_value(1);
  for (uint32_t p32 : table.primes()) {
    const auto p = static_cast<int64_t>(p32);
    if (p < y) continue;
    if (p > x) break;
    if (!set.member(p)) continue;
    const int64_t inner = x / p;
    CompensatedSum block;
    for (int64_t n = 1; n <= inner; ++n) {
      const auto i = static_cast<size_t>(n);
      if (pmax[i] < p) block.add(fw[i] * fpsi[bo[i] + 1]);
    }
    s2.add(fp * block.value());
  }

  out.lhs = lhs.value();
  out.s1 = s1.value();
  out.s2 = s2.value();
  out.square_part = square.value();
  out.residual_abs = std::abs(out.lhs - (out.s1 + out.s2 + out.square_part));
  out.residual_rel = out.residual_abs / std::max(1.0, std::abs(out.lhs));
  return out;
}

namespace detail {

template <class F>
double adaptive_simpson_rec(F&& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int depth = 22) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace detail

/// Comparison of the prime sum over S with the density-weighted integral:
///   p_sum   = sum_{y <= p <= x, p in S} Psi_h(x/p, p)
///   delta_i = delta(S) int_y^x Psi_h(x/t, t) dt / log t
///   s3      = p_sum - delta_i  (the error term the density data controls).
struct S2IntegralReport {
  double p_sum = 0.0;
  double delta_integral = 0.0;
  double s3 = 0.0;
};

inline S2IntegralReport s2_integral_report(const FactorTable& table, const WeightSpec& w,
                                           const PrimeSetSpec& set,
                                           const std::optional<TestFunction>& f,
                                           const NormalizationSpec& norm, int64_t x, int64_t y) {
  if (norm.kind != NormalizationSpec::Kind::ek)
    throw std::invalid_argument("s2_integral_report: needs an ek normalization");
  if (y < 2 || y > x) throw std::invalid_argument("s2_integral_report: need 2 <= y <= x");
  if (x > table.limit()) throw std::invalid_argument("s2_integral_report: x exceeds table limit");

  std::vector<double> fpsi(72);
  for (size_t k = 0; k < fpsi.size(); ++k)
    fpsi[k] = f ? (*f)(ek_psi(norm, static_cast<int64_t>(k))) : 1.0;

  const int64_t n_max = x / y;  // the largest inner argument that can occur
  std::vector<double> h(static_cast<size_t>(n_max) + 1);
  std::vector<int64_t> pmax(static_cast<size_t>(n_max) + 1);
  h[1] = fpsi[0];
  pmax[1] = 1;
  for (int64_t n = 2; n <= n_max; ++n) {
    const ArithmeticProfile pr = table.profile(n);
    h[static_cast<size_t>(n)] = weight_value(w, pr, table) * fpsi[pr.big_omega];
    pmax[static_cast<size_t>(n)] = pr.pmax;
  }

  const auto psi_h = [&](double arg_x, double arg_y) {
    const auto bound = std::min(static_cast<int64_t>(arg_x), n_max);
    CompensatedSum acc;
    for (int64_t n = 1; n <= bound; ++n)
      if (static_cast<double>(pmax[static_cast<size_t>(n)]) <= arg_y)
        acc.add(h[static_cast<size_t>(n)]);
    return acc.value();
  };

  S2IntegralReport out;
  CompensatedSum p_sum;
  for (uint32_t p32 : table.primes()) {
    const auto p = static_cast<int64_t>(p32);
    if (p < y) continue;
    if (p > x) break;
    if (!set.member(p)) continue;
    p_sum.add(psi_h(static_cast<double>(x) / static_cast<double>(p), static_cast<double>(p)));
  }
  out.p_sum = p_sum.value();

  const double delta = set.delta();
  if (delta > 0.0) {
    std::map<double, double> cache;
    const auto integrand = [&](double s) {  // t = e^s
      auto it = cache.find(s);
      if (it != cache.end()) return it->second;
      const double t = std::exp(s);
      const double v = psi_h(static_cast<double>(x) / t, t) * t / s;
      cache.emplace(s, v);
      return v;
    };
    const double raw = detail::adaptive_simpson(
        integrand, std::log(static_cast<double>(y)), std::log(static_cast<double>(x)),
        1e-6 * std::max(1.0, std::abs(out.p_sum)));
    out.delta_integral = delta * raw;
  }
  out.s3 = out.p_sum - out.delta_integral;
  return out;
}

// ---------------------------------------------------------------------------
// JSON-configured experiment driver.
// ---------------------------------------------------------------------------

struct ExperimentResult {
  std::string kind;
  std::string output_path;
  std::vector<std::string> extra_outputs;
  uint64_t config_hash = 0;
  int64_t table_limit = 0;
  int64_t rows = 0;
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void config_fail(const std::string& msg) {
  throw std::invalid_argument("config validation failed: " + msg);
}

inline WeightSpec parse_weight(const json& j) {
  if (j.is_null()) return WeightSpec::unit();
  if (!j.is_object() || !j.contains("kind")) config_fail("weight needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "unit") return WeightSpec::unit();
  if (kind == "mu_squared") return WeightSpec::mu_squared();
  const double alpha = j.value("alpha", 1.0);
  if (kind == "d_alpha") return WeightSpec::divisor(alpha);
  if (kind == "alpha_pow_omega") return WeightSpec::alpha_pow_omega(alpha);
  config_fail("unknown weight kind '" + kind + "'");
  return WeightSpec::unit();
}

inline PrimeSetSpec parse_set(const json& j) {
  if (j.is_null()) return PrimeSetSpec::all();
  if (!j.is_object() || !j.contains("kind")) config_fail("set needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "all") return PrimeSetSpec::all();
  if (kind == "residue") {
    if (!j.contains("a") || !j.contains("q")) config_fail("residue set needs fields a and q");
    return PrimeSetSpec::residue(j.at("a").get<int64_t>(), j.at("q").get<int64_t>());
  }
  if (kind == "explicit") {
    if (!j.contains("primes")) config_fail("explicit set needs a primes array");
    return PrimeSetSpec::explicit_list(j.at("primes").get<std::vector<int64_t>>());
  }
  config_fail("unknown set kind '" + kind + "'");
  return PrimeSetSpec::all();
}

inline std::optional<TestFunction> parse_test_function(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) return TestFunction::parse(j.get<std::string>());
  if (j.is_object() && j.contains("triangle")) {
    const auto& t = j.at("triangle");
    if (!t.is_array() || t.size() < 2 || t.size() > 3)
      config_fail("triangle needs [lo, hi] or [lo, hi, peak]");
    return TestFunction::triangle(t[0].get<double>(), t[1].get<double>(),
                                  t.size() == 3 ? t[2].get<double>() : 1.0);
  }
  if (j.is_object() && j.contains("knots")) {
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : j.at("knots")) {
      if (!k.is_array() || k.size() != 2) config_fail("knots must be [t, value] pairs");
      knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    return TestFunction(std::move(knots));
  }
  config_fail("F must be a label string, {triangle: [...]}, or {knots: [...]}");
  return std::nullopt;
}

inline DynSystem parse_system(const json& j) {
  if (!j.is_object() || !j.contains("kind")) config_fail("system needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "finite_rotation") {
    if (!j.contains("m")) config_fail("finite_rotation needs m");
    return DynSystem::finite_rotation(j.at("m").get<int64_t>(), j.value("x0", int64_t(0)));
  }
  if (kind == "circle_rotation") return DynSystem::circle_rotation(j.value("x0", 0.0));
  config_fail("unknown system kind '" + kind + "'");
  return DynSystem::finite_rotation(1, 0);
}

inline Observable parse_observable(const json& j) {
  if (!j.is_object()) config_fail("observable must be an object");
  if (j.contains("values")) return Observable::finite(j.at("values").get<std::vector<double>>());
  if (j.contains("a0"))
    return Observable::fourier(j.at("a0").get<double>(),
                               j.value("cos", std::vector<double>{}),
                               j.value("sin", std::vector<double>{}));
  config_fail("observable needs either values or a0/cos/sin");
  return Observable::constant(0.0);
}

inline std::vector<int64_t> parse_int_list(const json& j, const std::string& field) {
  std::vector<int64_t> out;
  if (j.is_number_integer())
    out.push_back(j.get<int64_t>());
  else if (j.is_array())
    for (const auto& v : j) out.push_back(v.get<int64_t>());
  else
    config_fail(field + " must be an integer or an array of integers");
  if (out.empty()) config_fail(field + " must not be empty");
  return out;
}

inline std::vector<double> parse_double_list(const json& j, const std::string& field) {
  std::vector<double> out;
  if (j.is_number())
    out.push_back(j.get<double>());
  else if (j.is_array())
    for (const auto& v : j) out.push_back(v.get<double>());
  else
    config_fail(field + " must be a number or an array of numbers");
  if (out.empty()) config_fail(field + " must not be empty");
  return out;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw resource_error("cannot open output file " + path);
  return os;
}

inline void write_meta(const std::string& out_path, const json& config, uint64_t hash,
                       int64_t table_limit) {
  json meta;
  std::ostringstream hex;
  hex << std::hex << hash;
  meta["config_hash"] = hex.str();
  meta["kind"] = config.value("kind", "");
  meta["table_limit"] = table_limit;
  meta["tool"] = "factorlab";
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["created"] = stamp;
  auto os = open_output(out_path + ".meta.json");
  os << meta.dump(2) << '\n';
}

inline ExperimentResult run_experiment_impl(const nlohmann::json& config,
                                            const std::string& out_override) {
  using detail::config_fail;
  using nlohmann::json;

  if (!config.is_object()) detail::config_fail("config must be a JSON object");
  const std::string kind = config.value("kind", "");
  if (kind.empty()) detail::config_fail("missing kind");
  std::string out = out_override.empty() ? config.value("out", "") : out_override;
  if (out.empty()) detail::config_fail("missing output path (out)");

  ExperimentResult result;
  result.kind = kind;
  result.output_path = out;
  result.config_hash = fnv1a64(config.dump());

  const auto table_limit_for = [&](int64_t needed) {
    return config.value("table_limit", needed);
  };

  if (kind == "ek" || kind == "ep") {
    const auto ns = detail::parse_int_list(config.value("N", json()), "N");
    const WeightSpec w =
        kind == "ep" ? WeightSpec::unit() : detail::parse_weight(config.value("weight", json()));
    if (kind == "ep" && config.contains("weight") &&
        !(detail::parse_weight(config.at("weight")) == WeightSpec::unit()))
      config_fail("ep runs take the unit weight only");
    const PrimeSetSpec set = detail::parse_set(config.value("set", json()));
    const auto f = detail::parse_test_function(config.value("F", json()));
    const int64_t max_n = *std::max_element(ns.begin(), ns.end());
    const FactorTable table(table_limit_for(max_n));
    result.table_limit = table.limit();

    auto os = detail::open_output(out);
    os << "N,weight,set,delta,terminal_mass,ks\n";
    json functionals = json::array();
    for (int64_t n : ns) {
      const auto norm = kind == "ep"
                            ? NormalizationSpec::ep(static_cast<double>(n))
                            : NormalizationSpec::ek(w.prime_mean(), static_cast<double>(n));
      const EmpiricalCurve curve = restricted_weighted_cdf(table, w, set, norm, n);
      os << n << ',' << w.label() << ',' << set.label() << ',' << format_double(set.delta())
         << ',' << format_double(curve.terminal_mass()) << ','
         << format_double(ks_distance(curve, set.delta())) << '\n';
      ++result.rows;
      if (config.value("curve_out", false)) {
        const std::string cpath = out + ".curve" + std::to_string(n) + ".csv";
        auto cs = detail::open_output(cpath);
        curve.write_csv(cs, set.delta());
        result.extra_outputs.push_back(cpath);
      }
      if (f) {
        const FunctionalResult fr = smooth_functional(curve, *f, set.delta());
        functionals.push_back({{"empirical", fr.empirical},
                               {"target", fr.target},
                               {"delta", set.delta()},
                               {"N", n},
                               {"weight", w.label()},
                               {"set", set.label()}});
      }
    }
    if (f) {
      const std::string fpath = out + ".functional.json";
      auto fs = detail::open_output(fpath);
      fs << functionals.dump(2) << '\n';
      result.extra_outputs.push_back(fpath);
    }
  } else if (kind == "ekpnt") {
    const auto ns = detail::parse_int_list(config.value("N", json()), "N");
    const PrimeSetSpec set = detail::parse_set(config.value("set", json()));
    const auto f = detail::parse_test_function(config.value("F", json()));
    const DynSystem sys = detail::parse_system(config.value("system", json()));
    const Observable g = detail::parse_observable(config.value("observable", json()));
    const std::string norm_kind = config.value("normalization", "ek");
    if (norm_kind != "ek" && norm_kind != "ep")
      config_fail("normalization must be ek or ep");
    const int64_t max_n = *std::max_element(ns.begin(), ns.end());
    const FactorTable table(table_limit_for(max_n));
    result.table_limit = table.limit();

    auto os = detail::open_output(out);
    os << "N,set,weightF,system,empirical,target,abs_err\n";
    for (int64_t n : ns) {
      const auto norm = norm_kind == "ep" ? NormalizationSpec::ep(static_cast<double>(n))
                                          : NormalizationSpec::ek(1.0, static_cast<double>(n));
      const OrbitAverageResult r = orbit_average(table, sys, g, f, set, norm, n);
      os << n << ',' << set.label() << ',' << weight_function_label(f) << ',' << sys.label()
         << "." << g.label() << ',' << format_double(r.empirical) << ','
         << format_double(r.target) << ',' << format_double(r.abs_err()) << '\n';
      ++result.rows;
    }
  } else if (kind == "friable") {
    const auto xs = detail::parse_int_list(config.value("x", json()), "x");
    const auto ys = detail::parse_int_list(config.value("y", json()), "y");
    const WeightSpec w = detail::parse_weight(config.value("weight", json()));
    const int64_t max_x = *std::max_element(xs.begin(), xs.end());
    const FactorTable table(table_limit_for(max_x));
    result.table_limit = table.limit();
    double u_needed = 1.0;
    for (int64_t x : xs)
      for (int64_t y : ys)
        if (y >= 2) u_needed = std::max(u_needed, std::log(double(x)) / std::log(double(y)));
    const double u_max = std::min(64.0, std::ceil(u_needed) + 1.0);
    const RhoGrid rho = dickman_rho(w.prime_mean(), u_max, config.value("step", 1.0 / 1024.0));

    auto os = detail::open_output(out);
    os << "x,y,u,psi,main_term,ratio\n";
    for (int64_t x : xs)
      for (int64_t y : ys) {
        const TwRatioResult r =
            tw_ratio(table, rho, w, x, y, config.value("euler_cutoff", int64_t(100000)));
        os << x << ',' << y << ',' << format_double(r.u) << ',' << format_double(r.psi) << ','
           << format_double(r.main_term) << ',' << format_double(r.ratio) << '\n';
        ++result.rows;
      }
  } else if (kind == "rho") {
    const double alpha = config.value("alpha", 1.0);
    const double u_max = config.value("umax", 20.0);
    const double step = config.value("step", 1.0 / 1024.0);
    const RhoGrid grid = dickman_rho(alpha, u_max, step);
    auto os = detail::open_output(out);
    grid.write_csv(os);
    result.rows = static_cast<int64_t>(grid.nodes().size());
  } else if (kind == "density") {
    const PrimeSetSpec set = detail::parse_set(config.value("set", json()));
    const auto grid = detail::parse_int_list(config.value("grid", json()), "grid");
    const FactorTable table(table_limit_for(grid.back()));
    result.table_limit = table.limit();
    const DensityErrorTable t = build_density_error(table, set, grid);
    auto os = detail::open_output(out);
    t.write_csv(os);
    result.rows = static_cast<int64_t>(t.xs.size());
  } else if (kind == "ivic") {
    const auto xs = detail::parse_int_list(config.value("x", json()), "x");
    const auto rs = detail::parse_double_list(config.value("r", json()), "r");
    const FactorTable table(table_limit_for(*std::max_element(xs.begin(), xs.end())));
    result.table_limit = table.limit();
    auto os = detail::open_output(out);
    os << "x,r,sum,main_term,log_ratio\n";
    for (int64_t x : xs)
      for (double r : rs) {
        const double sum = square_pmax_sum(table, x, r);
        const double main = ivic_main_term(static_cast<double>(x), r);
        os << x << ',' << format_double(r) << ',' << format_double(sum) << ','
           << format_double(main) << ',' << format_double(std::log(sum) / std::log(main)) << '\n';
        ++result.rows;
      }
  } else if (kind == "dynamics") {
    const double rho = config.value("rho", 2.0);
    const double eps = config.value("eps", 1e9);
    const int64_t j_lo = config.value("j_lo", int64_t(0));
    const int64_t j_hi = config.value("j_hi", int64_t(0));
    const int64_t per_block = config.value("per_block", int64_t(3));
    const auto needed =
        static_cast<int64_t>(std::ceil(std::pow(rho, static_cast<double>(j_hi) + 1.0)));
    const FactorTable table(table_limit_for(needed));
    result.table_limit = table.limit();
    const BlockSetPair pair = matched_block_sets(table, rho, eps, j_lo, j_hi, per_block);

    json dump;
    dump["rho"] = pair.rho;
    dump["eps"] = pair.eps;
    dump["blocks"] = json::array();
    for (const auto& b : pair.blocks)
      dump["blocks"].push_back({{"j", b.j}, {"B1", b.b1}, {"B2", b.b2}});
    dump["corr1"] = static_cast<double>(pair.corr1);
    dump["corr2"] = static_cast<double>(pair.corr2);
    dump["corr1_exact"] = pair.corr1.str();
    dump["corr2_exact"] = pair.corr2.str();
    dump["limit_regime"] = pair.limit_regime;
    if (config.contains("br")) {
      const auto& br = config.at("br");
      const std::string which = br.value("B", "b1");
      const int64_t n = br.value("N", int64_t(100000));
      if (n > table.limit()) config_fail("br.N exceeds table_limit");
      const ASequence a = ASequence::liouville();
      const BrInequalityReport rep =
          br_inequality_report(table, which == "b2" ? pair.b2() : pair.b1(), a, n);
      dump["br"] = {{"B", which},
                    {"N", n},
                    {"lhs", rep.lhs},
                    {"rhs", rep.rhs},
                    {"plain", rep.plain_average},
                    {"dilated", rep.dilated_average}};
    }
    auto os = detail::open_output(out);
    os << dump.dump(2) << '\n';
    result.rows = static_cast<int64_t>(pair.blocks.size());
  } else if (kind == "identity") {
    const int64_t m_max = config.value("m_max", int64_t(300));
    const int64_t x = config.value("x", int64_t(100000));
    const FactorTable table(table_limit_for(std::max(m_max * m_max, x)));
    result.table_limit = table.limit();
    int64_t violations = 0;
    for (int64_t m = 1; m <= m_max; ++m)
      for (int64_t n = 1; n <= m_max; ++n)
        if (!phi_identity_check(table, m, n)) ++violations;
    const double sum = omega_phi_prime_sum(table, x);
    const double ll = std::log(std::log(static_cast<double>(x)));
    const double predicted = 0.5 * ll * ll;
    // The ratio to the leading term decays toward 1 only at loglog speed: the
    // positive second-order term keeps it near 2.3 for every sieve-accessible
    // x, so the sanity band has to sit well above 1.
    const double ratio = sum / predicted;
    auto os = detail::open_output(out);
    os << "item,param,value,expected,ok\n";
    os << "phi_identity," << m_max << ',' << violations << ",0," << (violations == 0) << '\n';
    os << "omega_phi_prime_sum," << x << ',' << format_double(sum) << ','
       << format_double(predicted) << ',' << (ratio > 1.0 && ratio < 4.0) << '\n';
    result.rows = 2;
  } else {
    config_fail("unknown kind '" + kind + "'");
  }

  detail::write_meta(out, config, result.config_hash, result.table_limit);
  return result;
}

}  // namespace detail

/// Runs one experiment described by a JSON config and writes deterministic
/// CSV/JSON artifacts (plus a .meta.json provenance sidecar). Recognized
/// kinds: ek, ep, ekpnt, friable, rho, density, ivic, dynamics, identity.
/// Every rejected config surfaces as std::invalid_argument whose message
/// starts with "config validation failed"; IO problems surface as
/// resource_error.
inline ExperimentResult run_experiment(const nlohmann::json& config,
                                       const std::string& out_override = "") {
  try {
    return detail::run_experiment_impl(config, out_override);
  } catch (const nlohmann::json::exception& e) {
    detail::config_fail(std::string("bad field: ") + e.what());
  } catch (const std::logic_error& e) {
    const std::string what = e.what();
    if (what.rfind("config validation failed", 0) == 0) throw;
    detail::config_fail(what);
  }
}

inline ExperimentResult run_experiment_file(const std::string& config_path,
                                            const std::string& out_override = "") {
  std::ifstream is(config_path);
  if (!is) throw resource_error("cannot open config file " + config_path);
  nlohmann::json config;
  try {
    is >> config;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config validation failed: bad JSON in " + config_path + ": " +
                                e.what());
  }
  return run_experiment(config, out_override);
}

}  // namespace factorlab
