#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "factorlab/common.hpp"
#include "factorlab/sieve.hpp"

namespace factorlab {

namespace detail {

struct GaussLegendre16 {
  // Standard 16-point nodes/weights on [-1, 1].
  static constexpr double nodes[8] = {
      0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
      0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
  static constexpr double weights[8] = {
      0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
      0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
};

template <class F>
double gauss_legendre_16(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = half * GaussLegendre16::nodes[i];
    acc += GaussLegendre16::weights[i] * (f(mid - dx) + f(mid + dx));
  }
  return acc * half;
}

/// Panel-doubling GL16 with relative tolerance `tol`.
template <class F>
double integrate_doubling(F&& f, double a, double b, double tol) {
  double prev = gauss_legendre_16(f, a, b);
  for (int panels = 2; panels <= (1 << 20); panels *= 2) {
    double acc = 0.0;
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) acc += gauss_legendre_16(f, a + i * h, a + (i + 1) * h);
    if (std::abs(acc - prev) <= tol * std::max(1.0, std::abs(acc))) return acc;
    prev = acc;
  }
  return prev;
}

inline int64_t totient_of(int64_t q) {
  int64_t result = q, m = q;
  for (int64_t p = 2; p * p <= m; ++p) {
    if (m % p == 0) {
      result -= result / p;
      while (m % p == 0) m /= p;
    }
  }
  if (m > 1) result -= result / m;
  return result;
}

inline bool is_prime_slow(int64_t n) {
  if (n < 2) return false;
  for (int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace detail

/// Offset logarithmic integral Li(x) = integral_2^x dt / log t, accurate to
/// about 1e-12 relative via panel-doubled Gauss-Legendre on s = log t.
inline double logarithmic_integral(double x) {
  if (!(x >= 2.0)) throw std::invalid_argument("logarithmic_integral: x must be >= 2");
  if (x == 2.0) return 0.0;
  const double lo = std::log(2.0), hi = std::log(x);
  return detail::integrate_doubling([](double s) { return std::exp(s) / s; }, lo, hi, 1e-13);
}

/// A set of primes: all of them, a residue class a mod q, or a finite list.
class PrimeSetSpec {
 public:
  enum class Kind { all, residue, explicit_list };

  static PrimeSetSpec all() { return PrimeSetSpec(Kind::all, 0, 0, {}); }

  static PrimeSetSpec residue(int64_t a, int64_t q) {
    if (q < 1) throw std::invalid_argument("PrimeSetSpec: modulus must be >= 1");
    int64_t r = a % q;
    if (r < 0) r += q;
    return PrimeSetSpec(Kind::residue, r, q, {});
  }

  static PrimeSetSpec explicit_list(std::vector<int64_t> primes) {
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    for (int64_t p : primes)
      if (!detail::is_prime_slow(p))
        throw std::invalid_argument("PrimeSetSpec: explicit element " + std::to_string(p) +
                                    " is not prime");
    return PrimeSetSpec(Kind::explicit_list, 0, 0, std::move(primes));
  }

  Kind kind() const { return kind_; }
  int64_t residue_class() const { return a_; }
  int64_t modulus() const { return q_; }
  const std::vector<int64_t>& elements() const { return primes_; }

  /// Membership test for a prime p.
  bool member(int64_t p) const {
    switch (kind_) {
      case Kind::all:
        return true;
      case Kind::residue:
        return p % q_ == a_;
      case Kind::explicit_list:
        return std::binary_search(primes_.begin(), primes_.end(), p);
    }
    return false;
  }

  /// Whether the set restricts anything at all. The unrestricted set keeps
  /// every integer (n = 1 included); every other kind filters by P+(n).
  bool restricts() const { return kind_ != Kind::all; }

  /// Test applied to integers n via their largest prime factor. For the
  /// unrestricted set this is vacuous, so n = 1 passes; otherwise n = 1
  /// (whose pmax is 1) never passes.
  bool admits_pmax(int64_t pmax) const {
    if (kind_ == Kind::all) return true;
    return pmax >= 2 && member(pmax);
  }

  /// Natural density inside the primes.
  double delta() const {
    switch (kind_) {
      case Kind::all:
        return 1.0;
      case Kind::residue:
        return std::gcd(a_, q_) == 1 ? 1.0 / static_cast<double>(detail::totient_of(q_)) : 0.0;
      case Kind::explicit_list:
        return 0.0;
    }
    return 0.0;
  }

  std::string label() const {
    switch (kind_) {
      case Kind::all:
        return "all";
      case Kind::residue:
        return "residue(" + std::to_string(a_) + ";" + std::to_string(q_) + ")";
      case Kind::explicit_list: {
        std::string s = "explicit{";
        for (size_t i = 0; i < primes_.size(); ++i) {
          if (i) s += ';';
          s += std::to_string(primes_[i]);
        }
        return s + "}";
      }
    }
    return "all";
  }

  bool operator==(const PrimeSetSpec& o) const {
    return kind_ == o.kind_ && a_ == o.a_ && q_ == o.q_ && primes_ == o.primes_;
  }

 private:
  PrimeSetSpec(Kind kind, int64_t a, int64_t q, std::vector<int64_t> primes)
      : kind_(kind), a_(a), q_(q), primes_(std::move(primes)) {}

  Kind kind_;
  int64_t a_;
  int64_t q_;
  std::vector<int64_t> primes_;
};

inline double natural_density(const PrimeSetSpec& set) { return set.delta(); }

/// Count of primes p <= x with p in the set.
inline int64_t pi_S(const FactorTable& table, const PrimeSetSpec& set, int64_t x) {
  if (x < 0 || x > table.limit())
    throw std::invalid_argument("pi_S: x outside table range");
  int64_t count = 0;
  for (uint32_t p : table.primes()) {
    if (static_cast<int64_t>(p) > x) break;
    if (set.member(p)) ++count;
  }
  return count;
}

/// Tabulated counting-error data for one prime set:
///   e(x) = max_{2 <= y <= x, y integer} |pi_S(y) - delta * Li(y)|
///   v(x) = max over tabulated points x' in [x, x_max] of e(x') / x'.
struct DensityErrorTable {
  std::string set_label;
  double delta = 1.0;
  int64_t x_max = 0;
  std::vector<int64_t> xs;
  std::vector<int64_t> pi_s;
  std::vector<double> delta_li;
  std::vector<double> e_s;
  std::vector<double> v_s;

  void write_csv(std::ostream& os) const {
    os << "x,pi_S,delta_li,e_S,v_S\n";
    for (size_t i = 0; i < xs.size(); ++i)
      os << xs[i] << ',' << pi_s[i] << ',' << format_double(delta_li[i]) << ','
         << format_double(e_s[i]) << ',' << format_double(v_s[i]) << '\n';
  }
};

/// Exact integer scan from 2 to the grid horizon. Li grows one unit interval
/// at a time (Gauss-Legendre per interval), the running sup of
/// |pi_S - delta Li| is recorded at every grid point, and v is the suffix
/// maximum of e/x over the grid.
inline DensityErrorTable build_density_error(const FactorTable& table, const PrimeSetSpec& set,
                                             const std::vector<int64_t>& grid) {
  if (grid.empty()) throw std::invalid_argument("build_density_error: empty grid");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 2) throw std::invalid_argument("build_density_error: grid points must be >= 2");
    if (i && grid[i] <= grid[i - 1])
      throw std::invalid_argument("build_density_error: grid must be strictly increasing");
  }
  if (grid.back() > table.limit())
    throw std::invalid_argument("build_density_error: grid exceeds table limit");

  DensityErrorTable out;
  out.set_label = set.label();
  out.delta = set.delta();
  out.x_max = grid.back();
  out.xs = grid;
  out.pi_s.resize(grid.size());
  out.delta_li.resize(grid.size());
  out.e_s.resize(grid.size());
  out.v_s.resize(grid.size());

  int64_t count = 0;
  double li = 0.0;  // Li(2) = 0
  double sup_err = 0.0;
  size_t next = 0;
  const auto log_inv = [](double t) { return 1.0 / std::log(t); };
  for (int64_t y = 2; y <= out.x_max; ++y) {
    if (y > 2)
      li += detail::gauss_legendre_16(log_inv, static_cast<double>(y - 1),
                                      static_cast<double>(y));
    if (table.is_prime(y) && set.member(y)) ++count;
    sup_err = std::max(sup_err, std::abs(static_cast<double>(count) - out.delta * li));
    if (next < grid.size() && y == grid[next]) {
      out.pi_s[next] = count;
      out.delta_li[next] = out.delta * li;
      out.e_s[next] = sup_err;
      ++next;
    }
  }
  double suffix = 0.0;
  for (size_t i = grid.size(); i-- > 0;) {
    suffix = std::max(suffix, out.e_s[i] / static_cast<double>(out.xs[i]));
    out.v_s[i] = suffix;
  }
  return out;
}

/// Non-increasing step functional v(y), evaluated at the largest tabulated
/// point <= y (conservatively +infinity below the first point). Usually the
/// sum of the tables for a target set and for the full primes.
class VTable {
 public:
  VTable(std::vector<int64_t> xs, std::vector<double> v) : xs_(std::move(xs)), v_(std::move(v)) {
    if (xs_.empty() || xs_.size() != v_.size())
      throw std::invalid_argument("VTable: mismatched or empty data");
    for (size_t i = 1; i < xs_.size(); ++i)
      if (xs_[i] <= xs_[i - 1]) throw std::invalid_argument("VTable: grid not increasing");
  }

  explicit VTable(const DensityErrorTable& t) : VTable(t.xs, t.v_s) {}

  static VTable sum(const DensityErrorTable& a, const DensityErrorTable& b) {
    if (a.xs != b.xs)
      throw std::invalid_argument("VTable::sum: tables must share one grid");
    std::vector<double> v(a.v_s.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = a.v_s[i] + b.v_s[i];
    return VTable(a.xs, std::move(v));
  }

  int64_t x_max() const { return xs_.back(); }
  const std::vector<int64_t>& grid() const { return xs_; }

  double eval(double y) const {
    if (y < static_cast<double>(xs_.front())) return std::numeric_limits<double>::infinity();
    auto it = std::upper_bound(xs_.begin(), xs_.end(), static_cast<int64_t>(y));
    return v_[static_cast<size_t>(it - xs_.begin()) - 1];
  }

 private:
  std::vector<int64_t> xs_;
  std::vector<double> v_;
};

enum class GrowthKind {
  log_over_loglog_sq,  // h(x) = log x / (log log x)^2
  loglog               // h(x) = log log x
};

inline double growth_value(GrowthKind h, double x) {
  const double lx = std::log(x);
  const double llx = std::log(lx);
  switch (h) {
    case GrowthKind::log_over_loglog_sq:
      return lx / (llx * llx);
    case GrowthKind::loglog:
      return llx;
  }
  return llx;
}

struct ChooseYResult {
  double y = 0.0;
  int beta = 1;
  double u = 1.0;    // log x / log y, equal to beta by construction
  double h_x = 0.0;  // h(x)
  double v_at_y = 0.0;
};

/// Friability-cutoff selection. For each m, C(m) is the largest tabulated t
/// where v(t^{1/m}) log t < 1/m fails (0 when it never fails); beta is the
/// largest feasible m, capped at floor(sqrt(h(x))); y = x^{1/beta}. C(m) is
/// non-decreasing in m, so the scan stops at the first infeasible m.
inline ChooseYResult choose_y(double x, const VTable& v, GrowthKind h) {
  if (!(x > std::exp(std::exp(1.0))))
    throw std::domain_error("choose_y: x must exceed e^e");
  if (static_cast<double>(v.x_max()) < x)
    throw std::domain_error("choose_y: table horizon is below x");

  const double hx = growth_value(h, x);
  const int cap = static_cast<int>(std::floor(std::sqrt(hx)));
  if (cap < 1) throw std::domain_error("choose_y: h(x) < 1, no admissible exponent");

  const auto failure_point = [&](int m) -> int64_t {
    int64_t worst = 0;
    for (int64_t t : v.grid()) {
      const double y = std::pow(static_cast<double>(t), 1.0 / m);
      if (!(v.eval(y) * std::log(static_cast<double>(t)) < 1.0 / m)) worst = t;
    }
    return worst;
  };

  int beta = 0;
  for (int m = 1; m <= cap; ++m) {
    if (static_cast<double>(failure_point(m)) >= x) break;
    beta = m;
  }
  if (beta == 0)
    throw std::domain_error("choose_y: tabulated error data rules out every exponent");

  ChooseYResult out;
  out.beta = beta;
  out.h_x = hx;
  out.u = static_cast<double>(beta);
  out.y = std::pow(x, 1.0 / beta);
  out.v_at_y = v.eval(out.y);
  return out;
}

}  // namespace factorlab
