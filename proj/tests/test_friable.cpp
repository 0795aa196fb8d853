#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "factorlab/factorlab.hpp"

namespace fl = factorlab;

namespace {

const fl::FactorTable& table200k() {
  static const fl::FactorTable t(200000);
  return t;
}

void check_rel(double got, double want, double tol) {
  REQUIRE(std::abs(got - want) <= tol * std::abs(want));
}

}  // namespace

TEST_CASE("euler product constants", "[friable]") {
  const auto unit = fl::euler_constant(fl::WeightSpec::unit());
  CHECK(unit.value == 1.0);
  CHECK(unit.tail_bound == 0.0);
  const auto d2 = fl::euler_constant(fl::WeightSpec::divisor(2.0));
  CHECK(d2.value == 1.0);
  CHECK(d2.tail_bound == 0.0);

  // The squarefree-weight constant is 1/zeta(2) up to the stated tail.
  const auto sqf = fl::euler_constant(fl::WeightSpec::mu_squared(), 100000);
  const double pi = std::acos(-1.0);
  CHECK(std::abs(sqf.value - 6.0 / (pi * pi)) <= sqf.tail_bound);
  CHECK(sqf.tail_bound < 1e-4);

  // alpha^omega with alpha = 1 telescopes to 1 factor by factor.
  const auto apw1 = fl::euler_constant(fl::WeightSpec::alpha_pow_omega(1.0), 10000);
  CHECK(std::abs(apw1.value - 1.0) <= 1e-11);

  CHECK_THROWS_AS(fl::euler_constant(fl::WeightSpec::unit(), 50), std::invalid_argument);
}

TEST_CASE("dickman closed forms on the first two intervals", "[friable]") {
  const auto g1 = fl::dickman_rho(1.0, 4.0);
  const auto g2 = fl::dickman_rho(2.0, 4.0);
  const auto gh = fl::dickman_rho(0.5, 4.0);
  const double pi = std::acos(-1.0);

  CHECK(g1.value(0.5) == 1.0);
  CHECK(g1.value(1.0) == 1.0);
  check_rel(g1.value(1.5), 1.0 - std::log(1.5), 1e-14);
  check_rel(g1.value(2.0), 1.0 - std::log(2.0), 1e-14);

  check_rel(g2.value(0.5), 0.5, 1e-14);
  check_rel(g2.value(2.0), 4.0 - 4.0 * std::log(2.0), 1e-13);

  check_rel(gh.value(1.0), 1.0 / std::sqrt(pi), 1e-14);
  // Closed form (1 - atanh(sqrt(w))) / sqrt(pi u) with w = (u-1)/u.
  for (double u : {1.25, 1.5, 1.75, 2.0}) {
    const double w = (u - 1.0) / u;
    check_rel(gh.value(u), (1.0 - std::atanh(std::sqrt(w))) / std::sqrt(pi * u), 1e-13);
  }
  check_rel(gh.value(2.0), 0.04732509171026557, 1e-13);
}

TEST_CASE("dickman marched values against independent references", "[friable]") {
  const auto g1 = fl::dickman_rho(1.0, 12.0);
  check_rel(g1.value(2.5), 0.1303195618322507, 1e-12);
  check_rel(g1.value(3.0), 0.04860838829113157, 1e-12);
  CHECK(std::abs(g1.value(4.0) - 0.004910925647760832) <= 5e-8);
  CHECK(std::abs(g1.value(5.0) - 0.0003547247004560397) <= 5e-8);
  // Deep tail: the grid carries a small absolute interpolation residue, so
  // only an absolute envelope is meaningful here.
  CHECK(std::abs(g1.value(10.0) - 2.770171837725959e-11) <= 5e-8);

  const auto g2 = fl::dickman_rho(2.0, 6.0);
  check_rel(g2.value(3.0), 0.6297969470226746, 1e-12);
  CHECK(std::abs(g2.value(3.5) - 0.3656401655501047) <= 1e-7);
  CHECK(std::abs(g2.value(4.0) - 0.1903420457307146) <= 1e-7);

  const auto gh = fl::dickman_rho(0.5, 6.0);
  check_rel(gh.value(3.0), 0.002674785652603873, 1e-12);
  CHECK(std::abs(gh.value(3.5) - 0.00055139056157376697) <= 5e-8);
  CHECK(std::abs(gh.value(4.0) - 0.00010139416372629408) <= 5e-8);
}

TEST_CASE("dickman grid satisfies the delay equation", "[friable]") {
  // Central differences at interior nodes: u rho'(u) + (1-alpha) rho(u)
  // + alpha rho(u-1) must vanish up to O(h^2) discretization error.
  const double h = 1.0 / 256.0;
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto g = fl::dickman_rho(alpha, 8.0, h);
    for (double u : {2.25, 2.75, 3.5, 5.0}) {
      const double drho = (g.value(u + h) - g.value(u - h)) / (2.0 * h);
      const double resid = u * drho + (1.0 - alpha) * g.value(u) + alpha * g.value(u - 1.0);
      REQUIRE(std::abs(resid) <= 1e-3);
    }
  }
}

TEST_CASE("dickman grids converge under step halving", "[friable]") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto coarse = fl::dickman_rho(alpha, 10.0, 1.0 / 512.0);
    const auto fine = fl::dickman_rho(alpha, 10.0, 1.0 / 1024.0);
    double worst = 0.0;
    for (int64_t i = 0; i <= 512 * 10; ++i) {
      const double u = double(i) / 512.0;
      worst = std::max(worst, std::abs(coarse.value(u) - fine.value(u)));
    }
    REQUIRE(worst < 1e-6);
  }
}

TEST_CASE("dickman construction validation", "[friable]") {
  CHECK_THROWS_AS(fl::dickman_rho(0.0), std::invalid_argument);
  CHECK_THROWS_AS(fl::dickman_rho(-2.0), std::invalid_argument);
  CHECK_THROWS_AS(fl::dickman_rho(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(fl::dickman_rho(1.0, 65.0), std::invalid_argument);
  CHECK_THROWS_AS(fl::dickman_rho(1.0, 10.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(fl::dickman_rho(1.0, 10.0, 1.0 / 100.0), std::invalid_argument);
  const auto g = fl::dickman_rho(1.0, 4.0);
  CHECK_THROWS_AS(g.value(-0.5), std::domain_error);
  CHECK_THROWS_AS(g.value(4.5), std::domain_error);
}

TEST_CASE("friable sums against enumeration", "[friable]") {
  const auto& t = table200k();
  CHECK(fl::psi_f(t, fl::WeightSpec::unit(), 1, 1).value == 1.0);
  CHECK(fl::psi_f(t, fl::WeightSpec::unit(), 100, 10).value == 46.0);
  CHECK(fl::selfcheck::friable_count_brute(100, 10) == 46);
  CHECK(fl::psi_f(t, fl::WeightSpec::unit(), 1000, 1000).value == 1000.0);
  CHECK(fl::psi_f(t, fl::WeightSpec::divisor(2.0), 1000, 1000).value == 7069.0);

  for (const auto& w : {fl::WeightSpec::unit(), fl::WeightSpec::divisor(2.0),
                        fl::WeightSpec::mu_squared(), fl::WeightSpec::alpha_pow_omega(1.5)}) {
    for (const auto& [x, y] : std::vector<std::pair<int64_t, int64_t>>{
             {500, 7}, {1000, 31}, {2000, 13}}) {
      const double fast = fl::psi_f(t, w, x, y).value;
      const double brute = fl::selfcheck::friable_weighted_brute(x, y, w);
      REQUIRE(std::abs(fast - brute) <= 1e-9 * std::max(1.0, std::abs(brute)));
    }
  }

  // Monotone in the smoothness bound.
  double prev = 0.0;
  for (int64_t y : {2, 3, 5, 10, 100, 1000}) {
    const double v = fl::psi_f(t, fl::WeightSpec::unit(), 1000, y).value;
    REQUIRE(v >= prev);
    prev = v;
  }

  CHECK(fl::psi_f(t, fl::WeightSpec::unit(), 100, 1).value == 1.0);
  CHECK(fl::psi_f(t, fl::WeightSpec::unit(), 100, 2).u ==
        std::log(100.0) / std::log(2.0));
  CHECK_THROWS_AS(fl::psi_f(t, fl::WeightSpec::unit(), 300000, 10), std::invalid_argument);
  CHECK_THROWS_AS(fl::psi_f(t, fl::WeightSpec::unit(), 100, 0), std::invalid_argument);
}

TEST_CASE("friable ratio against the predicted main term", "[friable]") {
  const auto& t = table200k();
  const auto rho = fl::dickman_rho(1.0, 8.0);
  const auto r = fl::tw_ratio(t, rho, fl::WeightSpec::unit(), 100000, 100);
  CHECK(r.u == std::log(100000.0) / std::log(100.0));
  REQUIRE(std::abs(r.ratio - r.psi / r.main_term) <= 1e-15);
  CHECK(r.ratio > 0.5);
  CHECK(r.ratio < 1.5);

  // Weight/grid mean mismatch and grid overrun both fail fast.
  CHECK_THROWS_AS(fl::tw_ratio(t, rho, fl::WeightSpec::divisor(2.0), 1000, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(fl::tw_ratio(t, rho, fl::WeightSpec::unit(), 100000, 2), std::domain_error);
  CHECK_THROWS_AS(fl::tw_ratio(t, rho, fl::WeightSpec::unit(), 100000, 1),
                  std::invalid_argument);
}

TEST_CASE("repeated-largest-prime-factor sums", "[friable]") {
  const auto& t = table200k();
  CHECK(fl::square_pmax_sum(t, 9, 0.0) == 3.0);  // {4, 8, 9}
  CHECK(fl::square_pmax_sum(t, 3, 0.0) == 0.0);
  for (int64_t x : {100, 1000, 5000}) {
    for (double r : {0.0, 0.5, 2.0}) {
      const double fast = fl::square_pmax_sum(t, x, r);
      const double brute = fl::selfcheck::square_pmax_sum_brute(x, r);
      REQUIRE(std::abs(fast - brute) <= 1e-9 * std::max(1.0, brute));
    }
  }
  CHECK_THROWS_AS(fl::square_pmax_sum(t, 100, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(fl::square_pmax_sum(t, 300000, 0.0), std::invalid_argument);
}

TEST_CASE("main term for repeated-largest-prime-factor sums", "[friable]") {
  check_rel(fl::ivic_main_term(1e6, 0.0), 32853.8774179137801, 1e-12);
  check_rel(fl::ivic_main_term(1e6, 1.0), 393.763134211918931, 1e-12);
  check_rel(fl::ivic_main_term(1e5, 0.5), 1322.26964347446453, 1e-12);
  CHECK_THROWS_AS(fl::ivic_main_term(1e6, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(fl::ivic_main_term(10.0, 0.0), std::domain_error);
}
