// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Convergence-trend clauses are evaluated at the stated sizes and
// reported with their measured values, whichever way they come out.

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "factorlab/factorlab.hpp"

namespace fl = factorlab;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) { return fl::format_double(v); }

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << detail
            << std::endl;
  if (!pass) ++failures;
}

}  // namespace

int main() {
  const auto wall_start = Clock::now();
  std::cout << "building factor table to 1e7..." << std::endl;
  const fl::FactorTable table(10000000);
  std::cout << "table ready after " << num(seconds_since(wall_start)) << " s" << std::endl;

  // 1. Factorization profiles against the trial-division oracle.
  {
    const auto t0 = Clock::now();
    int64_t mismatches = 0;
    for (int64_t n = 1; n <= 100000; ++n)
      if (!fl::selfcheck::profiles_equal(table.profile(n),
                                         fl::selfcheck::trial_division_profile(n)))
        ++mismatches;
    const double secs = seconds_since(t0);
    report(1, mismatches == 0 && secs < 10.0,
           "profiles vs trial division for n <= 1e5: " + std::to_string(mismatches) +
               " mismatches in " + num(secs) + " s (budget 10 s)");
  }

  // 2. Density-profile solver: anchor value and step-halving self-convergence.
  {
    const auto t0 = Clock::now();
    const fl::RhoGrid g1 = fl::dickman_rho(1.0, 10.0, 1.0 / 1024.0);
    const double anchor = std::abs(g1.value(2.0) - (1.0 - std::log(2.0)));
    double worst = 0.0;
    for (double alpha : {0.5, 1.0, 2.0}) {
      const fl::RhoGrid coarse = fl::dickman_rho(alpha, 10.0, 1.0 / 512.0);
      const fl::RhoGrid fine = fl::dickman_rho(alpha, 10.0, 1.0 / 1024.0);
      for (int64_t i = 0; i <= 10 * 512; ++i) {
        const double u = static_cast<double>(i) / 512.0;
        worst = std::max(worst, std::abs(coarse.value(u) - fine.value(u)));
      }
    }
    const double secs = seconds_since(t0);
    report(2, anchor <= 1e-8 && worst < 1e-6 && secs < 5.0,
           "|rho_1(2) - (1 - log 2)| = " + num(anchor) + ", step-halving worst " + num(worst) +
               ", " + num(secs) + " s (budget 5 s)");
  }

  // 3. Friable main-term ratio and the exact enumeration anchor.
  {
    const fl::RhoGrid rho1 = fl::dickman_rho(1.0, 4.0);
    const auto tw = fl::tw_ratio(table, rho1, fl::WeightSpec::unit(), 1000000, 1000);
    const double fast = fl::psi_f(table, fl::WeightSpec::unit(), 100, 10).value;
    const int64_t brute = fl::selfcheck::friable_count_brute(100, 10);
    report(3, tw.ratio >= 0.8 && tw.ratio <= 1.2 && fast == 46.0 && brute == 46,
           "ratio(1e6, 1e3) = " + num(tw.ratio) + " (band [0.8, 1.2]); Psi(100, 10) fast " +
               num(fast) + " / brute " + std::to_string(brute) + " (want 46)");
  }

  // 4. Euler constants: exact telescoping cases and the squarefree density.
  {
    const auto unit = fl::euler_constant(fl::WeightSpec::unit(), 200000);
    const auto d2 = fl::euler_constant(fl::WeightSpec::divisor(2.0), 200000);
    const auto mu2 = fl::euler_constant(fl::WeightSpec::mu_squared(), 200000);
    const double target = 6.0 / (std::acos(-1.0) * std::acos(-1.0));
    const bool exact = unit.value == 1.0 && unit.tail_bound == 0.0 && d2.value == 1.0 &&
                       d2.tail_bound == 0.0;
    const bool squarefree = std::abs(mu2.value - target) <= mu2.tail_bound;
    report(4, exact && squarefree,
           "unit {" + num(unit.value) + ", " + num(unit.tail_bound) + "}, two-divisor {" +
               num(d2.value) + ", " + num(d2.tail_bound) + "} (want exact {1, 0}); mu^2 " +
               num(mu2.value) + " vs 6/pi^2 " + num(target) + " +- " + num(mu2.tail_bound));
  }

  // 5. Vanishing Liouville mean at 1e7 with the streaming sieve.
  {
    const auto t0 = Clock::now();
    const double streamed = fl::liouville_mean_streaming(10000000);
    const double secs = seconds_since(t0);
    const double tabled = fl::liouville_mean(table, 10000000);
    report(5, std::abs(streamed) < 1e-3 && streamed == tabled && secs < 60.0,
           "streamed mean " + num(streamed) + " (|.| < 1e-3), table mean " + num(tabled) +
               " (exact match required), " + num(secs) + " s (budget 60 s)");
  }

  // 6. Largest-prime-factor residue classes equidistribute.
  {
    const auto set = fl::PrimeSetSpec::residue(1, 4);
    int64_t count = 0;
    for (int64_t n = 1; n <= 10000000; ++n)
      if (set.admits_pmax(table.profile(n).pmax)) ++count;
    const double frac = static_cast<double>(count) / 1e7;
    report(6, std::abs(frac - 0.5) <= 0.02,
           "fraction with largest factor 1 mod 4 = " + num(frac) + ", |. - 1/2| = " +
               num(std::abs(frac - 0.5)) + " (tolerance 0.02)");
  }

  // 7. Distribution trend for the two-divisor weight on a residue class.
  {
    const auto w = fl::WeightSpec::divisor(2.0);
    const auto set = fl::PrimeSetSpec::residue(1, 4);
    const auto c4 = fl::restricted_weighted_cdf(table, w, set,
                                                fl::NormalizationSpec::ek(2.0, 1e4), 10000);
    const auto c7 = fl::restricted_weighted_cdf(table, w, set,
                                                fl::NormalizationSpec::ek(2.0, 1e7), 10000000);
    const double ks4 = fl::ks_distance(c4, set.delta());
    const double ks7 = fl::ks_distance(c7, set.delta());
    report(7, ks7 <= 0.2 && ks7 < ks4,
           "ks(1e7) = " + num(ks7) + " (<= 0.2 required), ks(1e4) = " + num(ks4) +
               " (strict decrease required); lattice-phase effects keep the knot-top distance "
               "near 0.06 across this whole range");
  }

  // 8. Orbit-average trend for the three-cycle rotation.
  {
    const auto sys = fl::DynSystem::finite_rotation(3, 0);
    const auto g = fl::Observable::finite({1.0, 0.0, 0.0});
    const auto f = std::optional<fl::TestFunction>(fl::TestFunction::triangle(-2.0, 2.0));
    const auto all = fl::PrimeSetSpec::all();
    const auto r4 = fl::orbit_average(table, sys, g, f, all,
                                      fl::NormalizationSpec::ek(1.0, 1e4), 10000);
    const auto r7 = fl::orbit_average(table, sys, g, f, all,
                                      fl::NormalizationSpec::ek(1.0, 1e7), 10000000);
    report(8, r7.abs_err() <= 0.1 && r7.abs_err() < r4.abs_err(),
           "err(1e7) = " + num(r7.abs_err()) + " (<= 0.1 required), err(1e4) = " +
               num(r4.abs_err()) + " (strict decrease required); empirical " + num(r7.empirical) +
               " vs target " + num(r7.target) +
               "; the integer-lattice bucket at 3 dominates and still grows toward its peak here");
  }

  // 9. Exact decomposition of the restricted weighted sum.
  {
    double worst = 0.0;
    for (const auto& [x, y] :
         std::vector<std::pair<int64_t, int64_t>>{{100000, 100}, {1000000, 1000}})
      for (const auto& w :
           {fl::WeightSpec::unit(), fl::WeightSpec::divisor(2.0), fl::WeightSpec::mu_squared()})
        for (const auto& s : {fl::PrimeSetSpec::all(), fl::PrimeSetSpec::residue(1, 4)}) {
          const auto norm = fl::NormalizationSpec::ek(w.prime_mean(), static_cast<double>(x));
          const auto parts = fl::decomposition_check(table, w, s, std::nullopt, norm, x, y);
          worst = std::max(worst, parts.residual_rel);
        }
    report(9, worst <= 1e-9,
           "worst relative residual over 12 (x, y, weight, set) combinations = " + num(worst) +
               " (<= 1e-9)");
  }

  // 10. Exact correlation machinery and matched block construction.
  {
    const bool corr_ok = fl::phi_correlation({2, 3}) == fl::Rational(17, 25);
    const auto pair = fl::matched_block_sets(table, 2.0, 1e9, 10, 20, 3);
    bool blocks_ok = pair.blocks.size() == 11;
    for (const auto& b : pair.blocks) {
      if (b.b1.size() != b.b2.size() || b.b1.empty()) blocks_ok = false;
      const int64_t lo = int64_t(1) << b.j, hi = int64_t(1) << (b.j + 1);
      for (int64_t p : b.b1) {
        const auto pr = table.profile(p);
        if (pr.big_omega != 1 || p < lo || p >= hi) blocks_ok = false;
      }
      for (int64_t q : b.b2) {
        const auto pr = table.profile(q);
        if (pr.big_omega != 2 || q < lo || q >= hi) blocks_ok = false;
      }
    }
    const bool corr_recomputed = pair.corr1 == fl::phi_correlation(pair.b1()) &&
                                 pair.corr2 == fl::phi_correlation(pair.b2());
    report(10, corr_ok && blocks_ok && corr_recomputed,
           std::string("phi correlation {2,3} = 17/25 ") + (corr_ok ? "exact" : "WRONG") +
               "; 11 blocks j = 10..20, per-block membership/size checks " +
               (blocks_ok ? "exact" : "VIOLATED") + "; correlations recomputed " +
               (corr_recomputed ? "equal" : "UNEQUAL") + " (corr1 " + pair.corr1.str() +
               ", corr2 " + pair.corr2.str() + ", matched-regime flag honest: " +
               (pair.limit_regime ? "true" : "false") + ")");
  }

  // 11. Totient identities in exact arithmetic.
  {
    int64_t violations = 0;
    for (int64_t m = 1; m <= 300; ++m)
      for (int64_t n = 1; n <= 300; ++n)
        if (!fl::phi_identity_check(table, m, n)) ++violations;
    const fl::Rational s = fl::omega_phi_prime_sum_exact(table, 10);
    const bool sum_ok = s == fl::Rational(107, 105);
    report(11, violations == 0 && sum_ok,
           "gcd identity violations for m, n <= 300: " + std::to_string(violations) +
               "; factor-count sum at 10 = " + s.str() + " (want 107/105)");
  }

  // 12. Repeated-largest-factor sums: exact prefix agreement and order of magnitude.
  {
    int64_t brute = 0;
    int64_t first_bad = 0;
    for (int64_t x = 1; x <= 10000; ++x) {
      if (x >= 4 && table.profile(x).pmax_multiplicity() >= 2) ++brute;
      if (fl::square_pmax_sum(table, x, 0.0) != static_cast<double>(brute)) {
        first_bad = x;
        break;
      }
    }
    const double sum6 = fl::square_pmax_sum(table, 1000000, 0.0);
    const double main6 = fl::ivic_main_term(1e6, 0.0);
    const double log_ratio = std::log(sum6) / std::log(main6);
    report(12, first_bad == 0 && log_ratio >= 0.5 && log_ratio <= 2.0,
           std::string("prefix sums match the incremental count for all x <= 1e4") +
               (first_bad ? " EXCEPT x = " + std::to_string(first_bad) : "") +
               "; log(sum(1e6)) / log(main term) = " + num(log_ratio) + " (band [0.5, 2])");
  }

  // 13. Property suites and the built-in check suites.
  {
    const auto t0 = Clock::now();
    bool ok = true;
    std::ostringstream why;

    for (const auto& set : {fl::PrimeSetSpec::all(), fl::PrimeSetSpec::residue(1, 4)}) {
      const auto dt = fl::build_density_error(table, set, {100, 1000, 10000, 100000, 1000000});
      for (size_t i = 1; i < dt.xs.size(); ++i) {
        if (dt.e_s[i] < dt.e_s[i - 1] - 1e-15) ok = false, why << "e_S dip at " << dt.xs[i] << "; ";
        if (dt.v_s[i] > dt.v_s[i - 1] + 1e-15) ok = false, why << "v_S rise at " << dt.xs[i] << "; ";
      }
    }

    const auto curve =
        fl::restricted_weighted_cdf(table, fl::WeightSpec::mu_squared(),
                                    fl::PrimeSetSpec::residue(1, 4),
                                    fl::NormalizationSpec::ek(1.0, 1e6), 1000000);
    for (size_t i = 1; i < curve.mass.size(); ++i)
      if (curve.mass[i] + 1e-15 < curve.mass[i - 1]) ok = false, why << "cdf dip; ";
    if (!curve.mass.empty() && curve.mass.back() > 1.0 + 1e-12) ok = false, why << "cdf > 1; ";

    for (const auto& w : {fl::WeightSpec::unit(), fl::WeightSpec::mu_squared(),
                          fl::WeightSpec::divisor(2.0), fl::WeightSpec::divisor(1.5),
                          fl::WeightSpec::alpha_pow_omega(2.0)})
      for (int64_t m = 1; m <= 60; ++m)
        for (int64_t n = 1; n <= 60; ++n) {
          if (std::gcd(m, n) != 1) continue;
          const double lhs = fl::weight_value(w, table.profile(m * n), table);
          const double rhs = fl::weight_value(w, table.profile(m), table) *
                             fl::weight_value(w, table.profile(n), table);
          if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, std::abs(rhs)))
            ok = false, why << "multiplicativity broken at " << m << "*" << n << "; ";
        }

    struct Agg {
      int64_t liouville = 0, omega = 0, primes = 0;
      bool operator==(const Agg& o) const {
        return liouville == o.liouville && omega == o.omega && primes == o.primes;
      }
    };
    const auto aggregate = [](int64_t segment) {
      Agg a;
      fl::stream_profiles(1000000, segment, [&](const fl::ArithmeticProfile& pr) {
        a.liouville += pr.liouville;
        a.omega += pr.big_omega;
        if (pr.is_prime()) ++a.primes;
      });
      return a;
    };
    if (!(aggregate(65536) == aggregate(int64_t(1) << 18)))
      ok = false, why << "segmentation changed the stream aggregates; ";

    int suite_checks = 0, suite_failures = 0;
    for (const char* name : {"oracles", "identities"})
      for (const auto& r : fl::selfcheck::run_suite(name)) {
        ++suite_checks;
        if (!r.pass) {
          ++suite_failures;
          ok = false;
          why << name << "/" << r.name << " failed (" << r.detail << "); ";
        }
      }

    const double secs = seconds_since(t0);
    if (secs >= 300.0) ok = false, why << "over the 300 s budget; ";
    report(13, ok,
           "monotone error functionals, cdf monotonicity, multiplicativity, segmentation "
           "determinism, and " +
               std::to_string(suite_checks) + " built-in checks (" +
               std::to_string(suite_failures) + " failures) in " + num(secs) +
               " s (budget 300 s)" + (ok ? "" : " -- " + why.str()));
  }

  std::cout << "acceptance: " << (13 - failures) << "/13 criteria passed in "
            << num(seconds_since(wall_start)) << " s" << std::endl;
  return failures == 0 ? 0 : 1;
}
