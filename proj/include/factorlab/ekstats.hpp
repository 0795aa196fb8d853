#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "factorlab/common.hpp"
#include "factorlab/primeset.hpp"
#include "factorlab/sieve.hpp"

namespace factorlab {

inline double gaussian_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }
inline double gaussian_pdf(double t) {
  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::acos(-1.0));
}

/// Centering/scaling recipe for the prime-factor-count statistics:
///   ek: psi(k) = (k - alpha log log x) / sqrt(alpha log log x), k = Omega(n)
///   ep: psi(k) = (k - (log log x)^2 / 2) / ((log log x)^{3/2} / sqrt 3),
///       k = Omega(phi(n)).
struct NormalizationSpec {
  enum class Kind { ek, ep };

  Kind kind = Kind::ek;
  double alpha = 1.0;
  double x = 0.0;

  static NormalizationSpec ek(double alpha, double x) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw std::invalid_argument("NormalizationSpec: alpha must be positive");
    require_scale(x);
    return {Kind::ek, alpha, x};
  }
  static NormalizationSpec ep(double x) {
    require_scale(x);
    return {Kind::ep, 1.0, x};
  }

  double loglog() const { return std::log(std::log(x)); }

  std::string label() const {
    if (kind == Kind::ek) return "ek(" + format_double(alpha) + ")";
    return "ep";
  }

 private:
  static void require_scale(double x) {
    if (!(x > std::exp(1.0)))
      throw std::invalid_argument("NormalizationSpec: scale x must exceed e");
  }
};

inline double ek_psi(const NormalizationSpec& norm, int64_t big_omega) {
  if (norm.kind != NormalizationSpec::Kind::ek)
    throw std::invalid_argument("ek_psi: normalization is not of ek kind");
  const double mean = norm.alpha * norm.loglog();
  return (static_cast<double>(big_omega) - mean) / std::sqrt(mean);
}

inline double ep_psi(const NormalizationSpec& norm, int64_t omega_of_phi) {
  if (norm.kind != NormalizationSpec::Kind::ep)
    throw std::invalid_argument("ep_psi: normalization is not of ep kind");
  const double ll = norm.loglog();
  return (static_cast<double>(omega_of_phi) - 0.5 * ll * ll) /
         (std::pow(ll, 1.5) / std::sqrt(3.0));
}

inline double statistic_psi(const NormalizationSpec& norm, int64_t k) {
  return norm.kind == NormalizationSpec::Kind::ek ? ek_psi(norm, k) : ep_psi(norm, k);
}

/// The integer statistic the normalization applies to: Omega(n) for ek,
/// Omega(phi(n)) for ep.
inline int64_t statistic_value(const NormalizationSpec& norm, const ArithmeticProfile& pr,
                               const FactorTable& table) {
  if (norm.kind == NormalizationSpec::Kind::ek) return pr.big_omega;
  return table.profile(pr.phi).big_omega;
}

/// Compactly supported piecewise-linear test function: knots with strictly
/// increasing abscissae, zero at both ends.
class TestFunction {
 public:
  explicit TestFunction(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw std::invalid_argument("TestFunction: need at least two knots");
    for (size_t i = 1; i < knots_.size(); ++i)
      if (!(knots_[i].first > knots_[i - 1].first))
        throw std::invalid_argument("TestFunction: knots must be strictly increasing");
    if (knots_.front().second != 0.0 || knots_.back().second != 0.0)
      throw std::invalid_argument("TestFunction: must vanish at the support boundary");
  }

  static TestFunction triangle(double lo, double hi, double peak = 1.0) {
    if (!(hi > lo)) throw std::invalid_argument("TestFunction: empty triangle support");
    return TestFunction({{lo, 0.0}, {0.5 * (lo + hi), peak}, {hi, 0.0}});
  }

  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  double operator()(double t) const {
    if (t <= knots_.front().first || t >= knots_.back().first) return 0.0;
    size_t hi = 1;
    while (knots_[hi].first < t) ++hi;
    const auto& [t0, f0] = knots_[hi - 1];
    const auto& [t1, f1] = knots_[hi];
    return f0 + (t - t0) * (f1 - f0) / (t1 - t0);
  }

  TestFunction scaled(double c) const {
    auto ks = knots_;
    for (auto& [t, v] : ks) v *= c;
    return TestFunction(std::move(ks));
  }

  /// Exact integral of F against the standard Gaussian: on each linear piece
  /// a + b t, int (a + b t) dPhi = a (Phi(t1) - Phi(t0)) + b (pdf(t0) - pdf(t1)).
  double gaussian_integral() const {
    double acc = 0.0;
    for (size_t i = 1; i < knots_.size(); ++i) {
      const auto& [t0, f0] = knots_[i - 1];
      const auto& [t1, f1] = knots_[i];
      const double b = (f1 - f0) / (t1 - t0);
      const double a = f0 - t0 * b;
      acc += a * (gaussian_cdf(t1) - gaussian_cdf(t0)) + b * (gaussian_pdf(t0) - gaussian_pdf(t1));
    }
    return acc;
  }

  std::string label() const {
    std::string s = "pl[";
    for (size_t i = 0; i < knots_.size(); ++i) {
      if (i) s += ';';
      s += format_double(knots_[i].first) + ":" + format_double(knots_[i].second);
    }
    return s + "]";
  }

  /// Inverse of label(); "one" denotes the constant-1 weight (no function).
  static std::optional<TestFunction> parse(const std::string& label) {
    if (label == "one") return std::nullopt;
    if (label.size() < 4 || label.substr(0, 3) != "pl[" || label.back() != ']')
      throw std::invalid_argument("TestFunction: unparseable label " + label);
    std::vector<std::pair<double, double>> knots;
    std::stringstream body(label.substr(3, label.size() - 4));
    std::string piece;
    while (std::getline(body, piece, ';')) {
      const auto colon = piece.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("TestFunction: unparseable label " + label);
      knots.emplace_back(std::stod(piece.substr(0, colon)), std::stod(piece.substr(colon + 1)));
    }
    return TestFunction(std::move(knots));
  }

 private:
  std::vector<std::pair<double, double>> knots_;
};

inline std::string weight_function_label(const std::optional<TestFunction>& f) {
  return f ? f->label() : "one";
}

inline double weight_function_value(const std::optional<TestFunction>& f, double t) {
  return f ? (*f)(t) : 1.0;
}

inline double weight_function_gaussian(const std::optional<TestFunction>& f) {
  return f ? f->gaussian_integral() : 1.0;
}

/// Normalized mass accumulated at each attained value of the statistic.
/// `t` is strictly increasing, `mass` cumulative; the denominator is the
/// unrestricted weighted count, so the terminal mass estimates the density
/// of the restriction set.
struct EmpiricalCurve {
  std::vector<double> t;
  std::vector<double> mass;

  double terminal_mass() const { return mass.empty() ? 0.0 : mass.back(); }

  double value_at(double point) const {
    double v = 0.0;
    for (size_t i = 0; i < t.size() && t[i] <= point; ++i) v = mass[i];
    return v;
  }

  void write_csv(std::ostream& os, double delta) const {
    os << "t,mass,target\n";
    for (size_t i = 0; i < t.size(); ++i)
      os << format_double(t[i]) << ',' << format_double(mass[i]) << ','
         << format_double(delta * gaussian_cdf(t[i])) << '\n';
  }
};

/// Weighted empirical distribution of the normalized statistic over
/// n <= N with P+(n) restricted to the given set:
///   mass(t) = (sum_{n <= N} f(n))^{-1} sum_{n <= N, P+(n) in S, psi(n) <= t} f(n).
inline EmpiricalCurve restricted_weighted_cdf(const FactorTable& table, const WeightSpec& w,
                                              const PrimeSetSpec& set,
                                              const NormalizationSpec& norm, int64_t limit) {
  if (limit < 2 || limit > table.limit())
    throw std::invalid_argument("restricted_weighted_cdf: limit outside table range");
  if (norm.kind == NormalizationSpec::Kind::ep && w.kind != WeightSpec::Kind::unit)
    throw std::invalid_argument("restricted_weighted_cdf: ep statistics take unit weight only");

  std::vector<CompensatedSum> bucket(80);
  std::vector<int64_t> hits(80, 0);
  CompensatedSum denom;
  for (int64_t n = 1; n <= limit; ++n) {
    const ArithmeticProfile pr = table.profile(n);
    const double fn = weight_value(w, pr, table);
    denom.add(fn);
    if (!set.admits_pmax(pr.pmax)) continue;
    const auto k = static_cast<size_t>(statistic_value(norm, pr, table));
    if (k >= bucket.size()) {
      bucket.resize(k + 1);
      hits.resize(k + 1, 0);
    }
    bucket[k].add(fn);
    hits[k] += 1;
  }

  EmpiricalCurve curve;
  const double total = denom.value();
  CompensatedSum running;
  for (size_t k = 0; k < bucket.size(); ++k) {
    if (hits[k] == 0) continue;
    running.add(bucket[k].value());
    curve.t.push_back(statistic_psi(norm, static_cast<int64_t>(k)));
    curve.mass.push_back(running.value() / total);
  }
  return curve;
}

/// Kolmogorov-Smirnov style distance between the curve and delta * Phi,
/// evaluated at the curve's own knots.
inline double ks_distance(const EmpiricalCurve& curve, double delta) {
  if (!(delta >= 0.0) || !(delta <= 1.0))
    throw std::invalid_argument("ks_distance: delta must lie in [0, 1]");
  double worst = 0.0;
  for (size_t i = 0; i < curve.t.size(); ++i)
    worst = std::max(worst, std::abs(curve.mass[i] - delta * gaussian_cdf(curve.t[i])));
  return worst;
}

/// Empirical integral of F against the curve's point masses, next to the
/// limit value delta * int F dPhi.
struct FunctionalResult {
  double empirical = 0.0;
  double target = 0.0;
  double difference() const { return empirical - target; }
};

inline FunctionalResult smooth_functional(const EmpiricalCurve& curve, const TestFunction& f,
                                          double delta) {
  FunctionalResult out;
  CompensatedSum acc;
  double prev = 0.0;
  for (size_t i = 0; i < curve.t.size(); ++i) {
    acc.add((curve.mass[i] - prev) * f(curve.t[i]));
    prev = curve.mass[i];
  }
  out.empirical = acc.value();
  out.target = delta * f.gaussian_integral();
  return out;
}

/// Exact integer check of phi(mn) phi(gcd) == phi(m) phi(n) gcd.
inline bool phi_identity_check(const FactorTable& table, int64_t m, int64_t n) {
  if (m < 1 || n < 1 || m > table.limit() || n > table.limit() || m * n > table.limit())
    throw std::invalid_argument("phi_identity_check: arguments outside table range");
  const int64_t g = std::gcd(m, n);
  const int64_t lhs = table.profile(m * n).phi * table.profile(g).phi;
  const int64_t rhs = table.profile(m).phi * table.profile(n).phi * g;
  return lhs == rhs;
}

/// sum over primes p <= x of Omega(p - 1)/p; grows like (log log x)^2 / 2.
inline double omega_phi_prime_sum(const FactorTable& table, int64_t x) {
  if (x < 2 || x > table.limit())
    throw std::invalid_argument("omega_phi_prime_sum: x outside table range");
  CompensatedSum acc;
  for (uint32_t p : table.primes()) {
    if (static_cast<int64_t>(p) > x) break;
    if (p == 2) continue;  // Omega(1) = 0
    acc.add(static_cast<double>(table.profile(static_cast<int64_t>(p) - 1).big_omega) /
            static_cast<double>(p));
  }
  return acc.value();
}

/// Exact rational version for small ranges.
inline Rational omega_phi_prime_sum_exact(const FactorTable& table, int64_t x) {
  if (x < 2 || x > table.limit())
    throw std::invalid_argument("omega_phi_prime_sum_exact: x outside table range");
  Rational acc(0);
  for (uint32_t p : table.primes()) {
    if (static_cast<int64_t>(p) > x) break;
    if (p == 2) continue;
    acc += Rational(table.profile(static_cast<int64_t>(p) - 1).big_omega, p);
  }
  return acc;
}

}  // namespace factorlab
