#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "factorlab/factorlab.hpp"

namespace fl = factorlab;

namespace {

const fl::FactorTable& table200k() {
  static const fl::FactorTable t(200000);
  return t;
}

}  // namespace

TEST_CASE("logarithmic integral matches the series expansion", "[primeset]") {
  CHECK(fl::logarithmic_integral(2.0) == 0.0);
  for (double x : {10.0, 100.0, 10000.0, 1e6, 1e8}) {
    const double gl = fl::logarithmic_integral(x);
    const double series = fl::selfcheck::li_series(x);
    REQUIRE(std::abs(gl - series) <= 1e-10 * std::max(1.0, series));
  }
  CHECK_THROWS_AS(fl::logarithmic_integral(1.5), std::invalid_argument);
}

TEST_CASE("prime set membership and densities", "[primeset]") {
  const auto all = fl::PrimeSetSpec::all();
  CHECK(all.member(2));
  CHECK(all.member(97));
  CHECK(all.delta() == 1.0);
  CHECK(all.admits_pmax(1));  // vacuous restriction keeps n = 1
  CHECK_FALSE(all.restricts());

  const auto r14 = fl::PrimeSetSpec::residue(1, 4);
  CHECK(r14.member(5));
  CHECK(r14.member(13));
  CHECK_FALSE(r14.member(7));
  CHECK_FALSE(r14.member(2));
  CHECK(r14.delta() == 0.5);
  CHECK_FALSE(r14.admits_pmax(1));
  CHECK(r14.admits_pmax(5));
  CHECK(r14.restricts());

  CHECK(fl::PrimeSetSpec::residue(2, 4).delta() == 0.0);
  CHECK(fl::PrimeSetSpec::residue(-3, 4).residue_class() == 1);  // normalized mod q
  CHECK_THROWS_AS(fl::PrimeSetSpec::residue(1, 0), std::invalid_argument);

  const auto ex = fl::PrimeSetSpec::explicit_list({5, 3, 3});
  CHECK(ex.elements() == std::vector<int64_t>{3, 5});
  CHECK(ex.member(3));
  CHECK_FALSE(ex.member(7));
  CHECK(ex.delta() == 0.0);
  CHECK_THROWS_AS(fl::PrimeSetSpec::explicit_list({4}), std::invalid_argument);

  CHECK(all.label() == "all");
  CHECK(r14.label() == "residue(1;4)");
  CHECK(ex.label() == "explicit{3;5}");
}

TEST_CASE("residue classes partition the primes", "[primeset]") {
  const auto& t = table200k();
  const int64_t x = 100000;
  const int64_t total = fl::pi_S(t, fl::PrimeSetSpec::residue(1, 4), x) +
                        fl::pi_S(t, fl::PrimeSetSpec::residue(3, 4), x) + 1;  // p = 2
  CHECK(total == t.prime_count(x));
  CHECK(fl::pi_S(t, fl::PrimeSetSpec::explicit_list({3, 5}), 10) == 2);
  CHECK_THROWS_AS(fl::pi_S(t, fl::PrimeSetSpec::all(), 200001), std::invalid_argument);
}

TEST_CASE("density error table is internally consistent", "[primeset]") {
  const auto& t = table200k();
  const std::vector<int64_t> grid = {10, 100, 1000, 10000, 100000};
  for (const auto& set : {fl::PrimeSetSpec::all(), fl::PrimeSetSpec::residue(1, 4)}) {
    const auto de = fl::build_density_error(t, set, grid);
    REQUIRE(de.xs == grid);
    for (size_t i = 0; i < grid.size(); ++i) {
      // Counting column matches a direct scan.
      REQUIRE(de.pi_s[i] == fl::pi_S(t, set, grid[i]));
      // The density-weighted Li column matches the standalone quadrature.
      const double direct = set.delta() * fl::logarithmic_integral(double(grid[i]));
      REQUIRE(std::abs(de.delta_li[i] - direct) <= 1e-9 * std::max(1.0, direct));
      // e is a running sup, so it dominates the pointwise error and grows.
      REQUIRE(de.e_s[i] + 1e-12 >= std::abs(double(de.pi_s[i]) - de.delta_li[i]));
      if (i) {
        REQUIRE(de.e_s[i] >= de.e_s[i - 1]);
        REQUIRE(de.v_s[i] <= de.v_s[i - 1] + 1e-15);
      }
    }
  }
}

TEST_CASE("density error CSV format", "[primeset]") {
  const auto& t = table200k();
  const auto de = fl::build_density_error(t, fl::PrimeSetSpec::all(), {10, 100});
  std::ostringstream os;
  de.write_csv(os);
  const std::string csv = os.str();
  CHECK(csv.rfind("x,pi_S,delta_li,e_S,v_S\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
}

TEST_CASE("density error grid validation", "[primeset]") {
  const auto& t = table200k();
  const auto all = fl::PrimeSetSpec::all();
  CHECK_THROWS_AS(fl::build_density_error(t, all, {}), std::invalid_argument);
  CHECK_THROWS_AS(fl::build_density_error(t, all, {1, 10}), std::invalid_argument);
  CHECK_THROWS_AS(fl::build_density_error(t, all, {10, 10}), std::invalid_argument);
  CHECK_THROWS_AS(fl::build_density_error(t, all, {10, 300000}), std::invalid_argument);
}

TEST_CASE("step functional over tabulated error data", "[primeset]") {
  const fl::VTable v({10, 100, 1000}, {0.5, 0.2, 0.1});
  CHECK(std::isinf(v.eval(5.0)));
  CHECK(v.eval(10.0) == 0.5);
  CHECK(v.eval(99.0) == 0.5);
  CHECK(v.eval(100.0) == 0.2);
  CHECK(v.eval(5000.0) == 0.1);
  CHECK(v.x_max() == 1000);
  CHECK_THROWS_AS(fl::VTable({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(fl::VTable({10, 10}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fl::VTable({10}, {1.0, 2.0}), std::invalid_argument);

  const auto& t = table200k();
  const auto a = fl::build_density_error(t, fl::PrimeSetSpec::all(), {10, 100});
  const auto b = fl::build_density_error(t, fl::PrimeSetSpec::residue(1, 4), {10, 100});
  const auto c = fl::build_density_error(t, fl::PrimeSetSpec::all(), {10, 100, 1000});
  const fl::VTable vsum = fl::VTable::sum(a, b);
  CHECK(vsum.eval(10.0) == a.v_s[0] + b.v_s[0]);
  CHECK_THROWS_AS(fl::VTable::sum(a, c), std::invalid_argument);
}

TEST_CASE("growth functionals", "[primeset]") {
  const double x = std::exp(std::exp(2.0));
  REQUIRE(std::abs(fl::growth_value(fl::GrowthKind::loglog, x) - 2.0) <= 1e-12);
  REQUIRE(std::abs(fl::growth_value(fl::GrowthKind::log_over_loglog_sq, x) -
                   std::exp(2.0) / 4.0) <= 1e-12);
}

TEST_CASE("friability cutoff selection", "[primeset]") {
  const auto& t = table200k();
  const std::vector<int64_t> grid = {10,    30,    100,   300,    1000,  3000,
                                     10000, 30000, 60000, 100000, 150000, 200000};
  const auto de_all = fl::build_density_error(t, fl::PrimeSetSpec::all(), grid);
  const auto de_r = fl::build_density_error(t, fl::PrimeSetSpec::residue(1, 4), grid);
  const fl::VTable v = fl::VTable::sum(de_all, de_r);

  const double x = 100000.0;
  const auto res = fl::choose_y(x, v, fl::GrowthKind::log_over_loglog_sq);
  CHECK(res.beta >= 1);
  CHECK(res.h_x == fl::growth_value(fl::GrowthKind::log_over_loglog_sq, x));
  CHECK(res.beta <= int(std::floor(std::sqrt(res.h_x))));
  CHECK(res.u == double(res.beta));
  REQUIRE(std::abs(std::pow(res.y, res.beta) - x) <= 1e-6 * x);
  CHECK(res.v_at_y == v.eval(res.y));

  // Below the e^e threshold and beyond the table horizon both fail fast.
  CHECK_THROWS_AS(fl::choose_y(10.0, v, fl::GrowthKind::loglog), std::domain_error);
  CHECK_THROWS_AS(fl::choose_y(300000.0, v, fl::GrowthKind::loglog), std::domain_error);

  // Error data too weak for any exponent: every grid point fails the test.
  const fl::VTable hopeless({2, 200000}, {1e9, 1e9});
  CHECK_THROWS_AS(fl::choose_y(100000.0, hopeless, fl::GrowthKind::log_over_loglog_sq),
                  std::domain_error);
}
