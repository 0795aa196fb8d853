#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "factorlab/dynamics.hpp"
#include "factorlab/ekstats.hpp"
#include "factorlab/friable.hpp"
#include "factorlab/harness.hpp"
#include "factorlab/primeset.hpp"
#include "factorlab/sieve.hpp"

// Reference implementations kept deliberately independent of the sieve and
// quadrature machinery: plain trial division, classic series expansions,
// brute-force enumeration, Monte Carlo. The check suites (and the test
// binaries) compare the fast paths against these.
namespace factorlab::selfcheck {

inline ArithmeticProfile trial_division_profile(int64_t n) {
  if (n < 1) throw std::invalid_argument("trial_division_profile: n must be >= 1");
  ArithmeticProfile pr;
  pr.n = n;
  if (n == 1) return pr;
  bool squareful = false;
  int64_t m = n;
  for (int64_t p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    int nu = 0;
    int64_t pk = 1;
    while (m % p == 0) {
      m /= p;
      pk *= p;
      ++nu;
    }
    pr.big_omega += nu;
    pr.small_omega += 1;
    if (nu == 1)
      pr.omega1 += 1;
    else
      squareful = true;
    pr.pmax = p;
    pr.phi *= (pk / p) * (p - 1);
  }
  if (m > 1) {
    pr.big_omega += 1;
    pr.small_omega += 1;
    pr.omega1 += 1;
    pr.pmax = m;
    pr.phi *= m - 1;
  }
  pr.mu = squareful ? 0 : (pr.small_omega % 2 ? -1 : 1);
  pr.liouville = pr.big_omega % 2 ? -1 : 1;
  return pr;
}

inline bool profiles_equal(const ArithmeticProfile& a, const ArithmeticProfile& b) {
  return a.n == b.n && a.big_omega == b.big_omega && a.small_omega == b.small_omega &&
         a.omega1 == b.omega1 && a.pmax == b.pmax && a.phi == b.phi && a.mu == b.mu &&
         a.liouville == b.liouville;
}

/// Offset logarithmic integral by the classic everywhere-positive series
/// li(x) = gamma + log log x + sum_k (log x)^k / (k * k!), minus li(2).
inline double li_series(double x) {
  constexpr double kEulerGamma = 0.5772156649015328606;
  const auto li = [](double v) {
    const double l = std::log(v);
    double sum = kEulerGamma + std::log(l);
    double term = 1.0;
    for (int k = 1; k < 400; ++k) {
      term *= l / k;
      const double add = term / k;
      sum += add;
      if (add < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  };
  return li(x) - li(2.0);
}

/// Brute-force weighted friable sum by trial division.
inline double friable_weighted_brute(int64_t x, int64_t y, const WeightSpec& w) {
  double acc = 1.0;  // n = 1
  for (int64_t n = 2; n <= x; ++n) {
    const ArithmeticProfile pr = trial_division_profile(n);
    if (pr.pmax > y) continue;
    double fn = 1.0;
    int64_t m = n;
    for (int64_t p = 2; m > 1; ++p) {
      if (p * p > m) {
        fn *= w.prime_power_value(1);
        break;
      }
      if (m % p) continue;
      int nu = 0;
      while (m % p == 0) {
        m /= p;
        ++nu;
      }
      fn *= w.prime_power_value(nu);
    }
    acc += fn;
  }
  return acc;
}

inline int64_t friable_count_brute(int64_t x, int64_t y) {
  int64_t count = 1;
  for (int64_t n = 2; n <= x; ++n)
    if (trial_division_profile(n).pmax <= y) ++count;
  return count;
}

inline double square_pmax_sum_brute(int64_t x, double r) {
  double acc = 0.0;
  for (int64_t n = 2; n <= x; ++n) {
    const ArithmeticProfile pr = trial_division_profile(n);
    if (pr.n > 1 && pr.pmax_multiplicity() >= 2)
      acc += std::pow(static_cast<double>(pr.pmax), -r);
  }
  return acc;
}

/// erf by its Maclaurin series (|t| <= 6 is plenty for cdf comparisons).
inline double erf_series(double t) {
  const double z = t;
  double term = z;
  double sum = z;
  for (int k = 1; k < 200; ++k) {
    term *= -z * z / k;
    const double add = term / (2 * k + 1);
    sum += add;
    if (std::abs(add) < 1e-18) break;
  }
  return sum * 2.0 / std::sqrt(std::acos(-1.0));
}

/// Monte Carlo estimate of int F dPhi with a fixed seed.
inline double gaussian_functional_mc(const TestFunction& f, int64_t samples, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CompensatedSum acc;
  for (int64_t i = 0; i < samples; ++i) acc.add(f(normal(rng)));
  return acc.value() / static_cast<double>(samples);
}

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline void push(std::vector<CheckResult>& out, const std::string& name, bool pass,
                 const std::string& detail) {
  out.push_back({name, pass, detail});
}

inline std::string num(double v) { return format_double(v); }

}  // namespace detail

/// Fast paths against independent references.
inline std::vector<CheckResult> run_oracle_suite() {
  std::vector<CheckResult> out;
  const FactorTable table(200000);

  {
    int64_t bad = 0;
    for (int64_t n = 1; n <= 100000; ++n)
      if (!profiles_equal(table.profile(n), trial_division_profile(n))) ++bad;
    detail::push(out, "profile vs trial division (n <= 1e5)", bad == 0,
                 std::to_string(bad) + " mismatches");
  }
  {
    int64_t bad = 0;
    int64_t expect = 1;
    stream_profiles(70000, 65536, [&](const ArithmeticProfile& pr) {
      if (pr.n != expect || !profiles_equal(pr, table.profile(pr.n))) ++bad;
      ++expect;
    });
    detail::push(out, "streamed profiles vs table (boundary-crossing segment)", bad == 0,
                 std::to_string(bad) + " mismatches");
  }
  {
    int64_t primes = 0;
    stream_profiles(1000000, 1 << 17, [&](const ArithmeticProfile& pr) {
      if (pr.is_prime()) ++primes;
    });
    detail::push(out, "streamed prime count at 1e6", primes == 78498,
                 "got " + std::to_string(primes) + ", want 78498");
  }
  {
    const int64_t brute = friable_count_brute(100, 10);
    const double fast = psi_f(table, WeightSpec::unit(), 100, 10).value;
    detail::push(out, "friable count (100, 10)", brute == 46 && fast == 46.0,
                 "brute " + std::to_string(brute) + ", fast " + detail::num(fast));
  }
  {
    const double brute = friable_weighted_brute(3000, 13, WeightSpec::divisor(2.0));
    const double fast = psi_f(table, WeightSpec::divisor(2.0), 3000, 13).value;
    detail::push(out, "weighted friable sum (3000, 13, two-divisor weight)",
                 std::abs(brute - fast) < 1e-9,
                 "brute " + detail::num(brute) + ", fast " + detail::num(fast));
  }
  {
    bool ok = true;
    std::string note;
    for (int64_t x : {2000, 5000}) {
      for (double r : {0.0, 1.0, -0.5}) {
        const double brute = square_pmax_sum_brute(x, r);
        const double fast = square_pmax_sum(table, x, r);
        if (std::abs(brute - fast) > 1e-9) {
          ok = false;
          note = "x=" + std::to_string(x) + " r=" + detail::num(r);
        }
      }
    }
    detail::push(out, "repeated-largest-factor sums vs brute force", ok, ok ? "all match" : note);
  }
  {
    double worst = 0.0;
    for (double x : {10.0, 100.0, 10000.0, 1e6})
      worst = std::max(worst, std::abs(logarithmic_integral(x) - li_series(x)));
    detail::push(out, "logarithmic integral vs series", worst < 1e-9,
                 "max deviation " + detail::num(worst));
  }
  {
    double worst = 0.0;
    for (double t = -6.0; t <= 6.0; t += 0.25)
      worst = std::max(worst,
                       std::abs(gaussian_cdf(t) - 0.5 * (1.0 + erf_series(t / std::sqrt(2.0)))));
    // At t = +-6 the alternating series cancels terms of size ~3e6, so the
    // series itself is only good to ~1e-10 there; the bound reflects that.
    detail::push(out, "gaussian cdf vs erf series", worst < 1e-9,
                 "max deviation " + detail::num(worst));
  }
  {
    // Closed forms on (1, 2]: alpha=1: 1 - log u; alpha=1/2:
    // (1 - atanh(sqrt(w))) / sqrt(pi u); alpha=2: 3u - 2u log u - 2.
    const RhoGrid g1 = dickman_rho(1.0, 4.0);
    const RhoGrid gh = dickman_rho(0.5, 4.0);
    const RhoGrid g2 = dickman_rho(2.0, 4.0);
    double worst = 0.0;
    for (double u = 1.0; u <= 2.0; u += 1.0 / 64) {
      const double w = (u - 1.0) / u;
      worst = std::max(worst, std::abs(g1.value(u) - (1.0 - std::log(u))));
      worst = std::max(worst, std::abs(gh.value(u) - (1.0 - std::atanh(std::sqrt(w))) /
                                                         std::sqrt(std::acos(-1.0) * u)));
      worst = std::max(worst, std::abs(g2.value(u) - (3.0 * u - 2.0 * u * std::log(u) - 2.0)));
    }
    detail::push(out, "rho closed forms on (1, 2]", worst < 1e-12,
                 "max deviation " + detail::num(worst));
  }
  {
    const TestFunction tri = TestFunction::triangle(-1.0, 1.0);
    const double exact = tri.gaussian_integral();
    const double mc = gaussian_functional_mc(tri, 4000000, 0x5eed);
    detail::push(out, "gaussian functional vs Monte Carlo", std::abs(exact - mc) < 2.5e-3,
                 "exact " + detail::num(exact) + ", mc " + detail::num(mc));
  }
  {
    const auto c = euler_constant(WeightSpec::mu_squared(), 200000);
    const double target = 6.0 / (std::acos(-1.0) * std::acos(-1.0));
    detail::push(out, "squarefree density constant vs 6/pi^2",
                 std::abs(c.value - target) <= c.tail_bound + 1e-12,
                 "value " + detail::num(c.value) + ", tail bound " + detail::num(c.tail_bound));
  }
  return out;
}

/// Exact identities and internal consistency.
inline std::vector<CheckResult> run_identity_suite() {
  std::vector<CheckResult> out;
  const FactorTable table(1000000);

  {
    int64_t bad = 0;
    for (int64_t m = 1; m <= 300; ++m)
      for (int64_t n = 1; n <= 300; ++n)
        if (!phi_identity_check(table, m, n)) ++bad;
    detail::push(out, "totient gcd identity (m, n <= 300)", bad == 0,
                 std::to_string(bad) + " violations");
  }
  {
    const Rational c = phi_correlation({2, 3});
    detail::push(out, "gcd correlation of {2, 3} equals 17/25", c == Rational(17, 25),
                 c.str());
  }
  {
    const Rational s = omega_phi_prime_sum_exact(table, 10);
    detail::push(out, "totient factor-count sum at 10 equals 107/105", s == Rational(107, 105),
                 s.str());
  }
  {
    const auto norm = NormalizationSpec::ek(1.0, 12345.0);
    const auto r = orbit_average(table, DynSystem::finite_rotation(1, 0), Observable::constant(1.0),
                                 std::nullopt, PrimeSetSpec::all(), norm, 12345);
    detail::push(out, "unit orbit average is exactly 1", r.empirical == 1.0,
                 detail::num(r.empirical));
  }
  {
    const double gap =
        t_invariance_gap(table, DynSystem::finite_rotation(5, 2), Observable::constant(0.7),
                         std::nullopt, PrimeSetSpec::all(), NormalizationSpec::ek(1.0, 1e5), 100000);
    detail::push(out, "constant observable has zero invariance gap", gap == 0.0,
                 detail::num(gap));
  }
  {
    bool ok = true;
    std::string note = "max rel residual ";
    double worst = 0.0;
    const auto f = TestFunction::triangle(-2.0, 2.0);
    for (const auto& [x, y] : std::vector<std::pair<int64_t, int64_t>>{{100000, 100},
                                                                       {1000000, 1000}}) {
      for (const WeightSpec& w : {WeightSpec::unit(), WeightSpec::divisor(2.0),
                                  WeightSpec::mu_squared()}) {
        for (const PrimeSetSpec& s : {PrimeSetSpec::all(), PrimeSetSpec::residue(1, 4)}) {
          const auto norm = NormalizationSpec::ek(w.prime_mean(), static_cast<double>(x));
          const auto parts = decomposition_check(table, w, s, f, norm, x, y);
          worst = std::max(worst, parts.residual_rel);
          if (parts.residual_rel > 1e-9) ok = false;
        }
      }
    }
    detail::push(out, "restricted-sum decomposition is exact", ok, note + detail::num(worst));
  }
  {
    const auto rep =
        s2_integral_report(table, WeightSpec::unit(), PrimeSetSpec::all(), std::nullopt,
                           NormalizationSpec::ek(1.0, 1e5), 100000, 100);
    const bool ok = std::abs(rep.s3) < 0.05 * std::abs(rep.p_sum);
    detail::push(out, "prime sum tracks the density integral", ok,
                 "p_sum " + detail::num(rep.p_sum) + ", s3 " + detail::num(rep.s3));
  }
  {
    const auto rep = br_inequality_report(table, {2, 3, 5, 7}, ASequence::liouville(), 1000000);
    detail::push(out, "dilation-average distance within the correlation bound",
                 rep.lhs <= rep.rhs + 0.05,
                 "lhs " + detail::num(rep.lhs) + ", rhs " + detail::num(rep.rhs));
  }
  {
    // Residue classes partition the primes (up to the finitely many p | q).
    bool ok = true;
    std::string note;
    for (int64_t q : {3, 4, 5, 8}) {
      int64_t total = 0;
      for (int64_t a = 0; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        total += pi_S(table, PrimeSetSpec::residue(a, q), 1000000);
      }
      int64_t divisors_of_q = 0;
      for (uint32_t p : table.primes()) {
        if (static_cast<int64_t>(p) > 1000000) break;
        if (q % static_cast<int64_t>(p) == 0) ++divisors_of_q;
      }
      if (total + divisors_of_q != table.prime_count(1000000)) {
        ok = false;
        note = "q=" + std::to_string(q);
      }
    }
    detail::push(out, "residue classes partition the primes", ok, ok ? "q in {3,4,5,8}" : note);
  }
  {
    const auto all = build_density_error(table, PrimeSetSpec::all(),
                                         {100, 1000, 10000, 100000, 1000000});
    bool ok = true;
    for (size_t i = 0; i < all.xs.size(); ++i) {
      const double direct = logarithmic_integral(static_cast<double>(all.xs[i]));
      if (std::abs(all.delta_li[i] - direct) > 1e-9 * std::max(1.0, direct)) ok = false;
      if (i && all.v_s[i] > all.v_s[i - 1] + 1e-15) ok = false;  // suffix max non-increasing
    }
    detail::push(out, "density table is internally consistent", ok, "grid to 1e6");
  }
  return out;
}

inline std::vector<CheckResult> run_suite(const std::string& name) {
  if (name == "oracles") return run_oracle_suite();
  if (name == "identities") return run_identity_suite();
  throw std::invalid_argument("unknown check suite '" + name + "' (use identities or oracles)");
}

}  // namespace factorlab::selfcheck
