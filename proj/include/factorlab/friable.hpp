#pragma once

#include <cmath>
#include <ostream>
#include <vector>

#include "factorlab/common.hpp"
#include "factorlab/primeset.hpp"
#include "factorlab/sieve.hpp"

namespace factorlab {

/// Euler product C(f) = prod_p (1 - 1/p)^alpha * sum_nu f(p^nu)/p^nu,
/// truncated at a prime cutoff together with a rigorous tail bound
/// (|log factor_p| <= 2 alpha (1+alpha) / p^2 summed over p > cutoff).
struct EulerConstantResult {
  double value = 1.0;
  double tail_bound = 0.0;
  int64_t cutoff = 0;
};

inline EulerConstantResult euler_constant(const WeightSpec& w, int64_t prime_cutoff = 100000) {
  if (prime_cutoff < 100)
    throw std::invalid_argument("euler_constant: prime cutoff must be >= 100");
  EulerConstantResult out;
  out.cutoff = prime_cutoff;

  // The unit and full divisor families telescope factor-by-factor to 1:
  // (1 - 1/p)^alpha * sum_nu binom(alpha+nu-1, nu) p^-nu = 1 exactly.
  if (w.kind == WeightSpec::Kind::unit || w.kind == WeightSpec::Kind::d_alpha) return out;

  const double alpha = w.prime_mean();
  double value = 1.0;
  for (uint32_t p : detail::small_primes(prime_cutoff)) {
    const double x = 1.0 / static_cast<double>(p);
    if (w.kind == WeightSpec::Kind::mu_squared) {
      value *= 1.0 - x * x;
    } else {  // alpha^omega: sum_nu alpha p^-nu = alpha/(p-1)
      value *= std::pow(1.0 - x, alpha) * (1.0 + alpha / (static_cast<double>(p) - 1.0));
    }
  }
  out.value = value;
  const double tail_log = 2.0 * alpha * (1.0 + alpha) / static_cast<double>(prime_cutoff);
  out.tail_bound = std::abs(value) * std::expm1(tail_log);
  return out;
}

namespace detail {

/// Closed forms for the delayed-equation solution on [0, 2]: the power
/// profile on (0, 1] and a geometrically convergent series on (1, 2],
///   rho(u) = u^(alpha-1)/Gamma(alpha) * (1 - alpha * sum_j W^(alpha+j)/(alpha+j)),
/// W = (u-1)/u <= 1/2. Keeping these exact removes the kink at u = 1 from
/// all interpolation error.
struct RhoClosedForm {
  double alpha;
  double inv_gamma;

  explicit RhoClosedForm(double a) : alpha(a), inv_gamma(1.0 / std::tgamma(a)) {}

  double initial(double u) const {  // u in [0, 1]
    if (u == 0.0) {
      if (alpha < 1.0) return std::numeric_limits<double>::infinity();
      return alpha == 1.0 ? 1.0 : 0.0;
    }
    return std::pow(u, alpha - 1.0) * inv_gamma;
  }

  double first_interval(double u) const {  // u in [1, 2]
    const double w = (u - 1.0) / u;
    double series = 0.0;
    if (w > 0.0) {
      double wpow = std::pow(w, alpha);
      for (int j = 0; j < 256; ++j) {
        const double term = wpow / (alpha + j);
        series += term;
        if (term < 1e-18 * (series + 1e-300)) break;
        wpow *= w;
      }
    }
    return std::pow(u, alpha - 1.0) * inv_gamma * (1.0 - alpha * series);
  }

  double eval(double u) const { return u <= 1.0 ? initial(u) : first_interval(u); }
};

}  // namespace detail

/// Tabulated generalized Dickman function rho_alpha on a uniform grid.
/// Evaluation uses the closed forms on [0, 2] and linear interpolation of
/// the stored nodes beyond.
class RhoGrid {
 public:
  RhoGrid(double alpha, double step, std::vector<double> values)
      : alpha_(alpha), step_(step), closed_(alpha), values_(std::move(values)) {}

  double alpha() const { return alpha_; }
  double step() const { return step_; }
  double u_max() const { return static_cast<double>(values_.size() - 1) * step_; }
  const std::vector<double>& nodes() const { return values_; }

  double value(double u) const {
    if (!(u >= 0.0) || u > u_max() + 1e-12)
      throw std::domain_error("RhoGrid: u outside [0, u_max]");
    if (u <= 2.0) return closed_.eval(u);
    const double pos = u / step_;
    auto i = static_cast<size_t>(pos);
    if (i >= values_.size() - 1) return values_.back();
    const double frac = pos - static_cast<double>(i);
    return values_[i] * (1.0 - frac) + values_[i + 1] * frac;
  }

  void write_csv(std::ostream& os) const {
    os << "u,rho\n";
    for (size_t i = 0; i < values_.size(); ++i)
      os << format_double(static_cast<double>(i) * step_) << ',' << format_double(values_[i])
         << '\n';
  }

 private:
  double alpha_;
  double step_;
  detail::RhoClosedForm closed_;
  std::vector<double> values_;
};

/// Builds rho_alpha by integrating u^(1-alpha) rho(u) = k^(1-alpha) rho(k)
///   - alpha * int_k^u t^-alpha rho(t-1) dt
/// interval by interval. Cells on (2, 3] use Gauss-Legendre with a t = 2+s^2
/// substitution in the first cell (the delayed argument has a u^alpha kink
/// there); later intervals integrate the linear interpolant of the delayed
/// values against exact power moments.
inline RhoGrid dickman_rho(double alpha, double u_max = 20.0, double step = 1.0 / 1024.0) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("dickman_rho: alpha must be positive");
  if (!(u_max >= 1.0) || u_max > 64.0)
    throw std::invalid_argument("dickman_rho: u_max must lie in [1, 64]");
  if (!(step > 0.0) || step > 1.0 / 256.0)
    throw std::invalid_argument("dickman_rho: step must be positive and <= 1/256");
  const double spu_real = 1.0 / step;
  const auto spu = static_cast<int64_t>(std::llround(spu_real));
  if (std::abs(spu_real - static_cast<double>(spu)) > 1e-9)
    throw std::invalid_argument("dickman_rho: 1/step must be an integer");

  const auto last = static_cast<int64_t>(std::floor(u_max / step + 1e-9));
  std::vector<double> values(static_cast<size_t>(last) + 1);
  detail::RhoClosedForm cf(alpha);

  for (int64_t i = 0; i <= std::min(spu, last); ++i) values[static_cast<size_t>(i)] = cf.initial(static_cast<double>(i) * step);
  for (int64_t i = spu + 1; i <= std::min(2 * spu, last); ++i)
    values[static_cast<size_t>(i)] = cf.first_interval(static_cast<double>(i) * step);

  const auto moment0 = [&](double t0, double t1) {  // int t^-alpha dt
    if (alpha == 1.0) return std::log(t1 / t0);
    return (std::pow(t1, 1.0 - alpha) - std::pow(t0, 1.0 - alpha)) / (1.0 - alpha);
  };
  const auto moment1 = [&](double t0, double t1) {  // int t^(1-alpha) dt
    if (alpha == 2.0) return std::log(t1 / t0);
    return (std::pow(t1, 2.0 - alpha) - std::pow(t0, 2.0 - alpha)) / (2.0 - alpha);
  };

  for (int64_t k = 2; k * spu < last; ++k) {
    const double bracket =
        std::pow(static_cast<double>(k), 1.0 - alpha) * values[static_cast<size_t>(k * spu)];
    CompensatedSum integral;
    const int64_t stop = std::min((k + 1) * spu, last);
    for (int64_t i = k * spu + 1; i <= stop; ++i) {
      const double t0 = static_cast<double>(i - 1) * step;
      const double t1 = static_cast<double>(i) * step;
      double cell;
      if (k == 2) {
        const auto f = [&](double t) { return std::pow(t, -alpha) * cf.first_interval(t - 1.0); };
        if (i == 2 * spu + 1) {
          const auto g = [&](double s) { return f(2.0 + s * s) * 2.0 * s; };
          cell = detail::gauss_legendre_16(g, 0.0, std::sqrt(step));
        } else {
          cell = detail::gauss_legendre_16(f, t0, t1);
        }
      } else {
        const double f0 = values[static_cast<size_t>(i - 1 - spu)];
        const double f1 = values[static_cast<size_t>(i - spu)];
        const double slope = (f1 - f0) / step;
        const double a = f0 - (t0 - 1.0) * slope;  // interpolant a + b*(t-1) in t
        // rho(t-1) ~ a + slope*(t-1) = (a - slope) + slope*t
        cell = (a - slope) * moment0(t0, t1) + slope * moment1(t0, t1);
      }
      integral.add(cell);
      values[static_cast<size_t>(i)] =
          std::pow(t1, alpha - 1.0) * (bracket - alpha * integral.value());
    }
  }
  return RhoGrid(alpha, step, std::move(values));
}

/// Weighted friable sum Psi_f(x, y) = sum over n <= x with P+(n) <= y of f(n).
struct FriableSum {
  int64_t x = 0;
  int64_t y = 0;
  double u = 0.0;
  double value = 0.0;
};

inline FriableSum psi_f(const FactorTable& table, const WeightSpec& w, int64_t x, int64_t y) {
  if (x < 1 || x > table.limit()) throw std::invalid_argument("psi_f: x outside table range");
  if (y < 1) throw std::invalid_argument("psi_f: y must be >= 1");
  FriableSum out;
  out.x = x;
  out.y = y;
  out.u = x <= 1 ? 0.0
                 : (y <= 1 ? std::numeric_limits<double>::infinity()
                           : std::log(static_cast<double>(x)) / std::log(static_cast<double>(y)));
  CompensatedSum acc;
  acc.add(1.0);  // n = 1 is y-friable for every y and f(1) = 1
  for (int64_t n = 2; n <= x; ++n) {
    if (table.pmax(n) <= y) acc.add(weight_value(w, n, table));
  }
  out.value = acc.value();
  return out;
}

/// Ratio of the exact friable sum to its predicted main term
/// C(f) * x * rho_alpha(u) * (log y)^(alpha - 1).
struct TwRatioResult {
  double psi = 0.0;
  double main_term = 0.0;
  double ratio = 0.0;
  double u = 0.0;
};

inline TwRatioResult tw_ratio(const FactorTable& table, const RhoGrid& rho, const WeightSpec& w,
                              int64_t x, int64_t y, int64_t euler_cutoff = 100000) {
  if (std::abs(rho.alpha() - w.prime_mean()) > 1e-12)
    throw std::invalid_argument("tw_ratio: rho grid alpha does not match the weight");
  if (x < 2 || y < 2) throw std::invalid_argument("tw_ratio: x and y must be >= 2");
  const double u =
      std::log(static_cast<double>(x)) / std::log(static_cast<double>(y));
  if (u > rho.u_max()) throw std::domain_error("tw_ratio: u exceeds the rho grid range");

  TwRatioResult out;
  out.u = u;
  out.psi = psi_f(table, w, x, y).value;
  const double alpha = w.prime_mean();
  const double c = euler_constant(w, euler_cutoff).value;
  out.main_term = c * static_cast<double>(x) * rho.value(u) *
                  std::pow(std::log(static_cast<double>(y)), alpha - 1.0);
  out.ratio = out.psi / out.main_term;
  return out;
}

/// sum over 2 <= n <= x whose largest prime factor is repeated
/// (P+(n)^2 | n) of P+(n)^(-r).
inline double square_pmax_sum(const FactorTable& table, int64_t x, double r) {
  if (!(r > -1.0)) throw std::invalid_argument("square_pmax_sum: r must exceed -1");
  if (x < 0 || x > table.limit())
    throw std::invalid_argument("square_pmax_sum: x outside table range");
  CompensatedSum acc;
  for (int64_t n = 4; n <= x; ++n) {
    int64_t m = n, p = 1;
    int nu = 0;
    while (m > 1) {
      p = table.spf(m);
      nu = 0;
      do {
        m /= p;
        ++nu;
      } while (m > 1 && table.spf(m) == p);
    }
    if (nu >= 2) acc.add(std::pow(static_cast<double>(p), -r));
  }
  return acc.value();
}

/// Predicted size x * exp(-sqrt((2r+2) log x log_2 x) (1 + g_r(x))) of the
/// repeated-largest-prime-factor sum, with the standard second-order
/// correction g_r.
inline double ivic_main_term(double x, double r) {
  if (!(r > -1.0)) throw std::invalid_argument("ivic_main_term: r must exceed -1");
  const double l1 = std::log(x);
  if (!(l1 > std::exp(1.0))) throw std::domain_error("ivic_main_term: x must exceed e^e");
  const double l2 = std::log(l1);
  const double l3 = std::log(l2);
  const double a = l3 + std::log(1.0 + r) - 2.0;
  const double g = (a - std::log(2.0)) / (2.0 * l2) * (1.0 + 2.0 / l2) - a * a / (8.0 * l2 * l2);
  return x * std::exp(-std::sqrt((2.0 * r + 2.0) * l1 * l2) * (1.0 + g));
}

}  // namespace factorlab
