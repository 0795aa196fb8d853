#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "factorlab/common.hpp"
#include "factorlab/ekstats.hpp"
#include "factorlab/primeset.hpp"
#include "factorlab/sieve.hpp"

namespace factorlab {

/// Uniquely ergodic model systems: rotation on Z/m or an irrational-type
/// circle rotation. The circle angle is a rational p/q with a huge
/// continued-fraction denominator, so orbit positions k*p/q mod 1 are exact
/// integer arithmetic while the angle behaves like the golden ratio at
/// every reachable orbit length.
class DynSystem {
 public:
  enum class Kind { finite_rotation, circle_rotation };

  static DynSystem finite_rotation(int64_t m, int64_t x0) {
    if (m < 1) throw std::invalid_argument("DynSystem: group order must be >= 1");
    if (x0 < 0 || x0 >= m) throw std::invalid_argument("DynSystem: base point outside Z/m");
    DynSystem s;
    s.kind_ = Kind::finite_rotation;
    s.m_ = m;
    s.x0_int_ = x0;
    return s;
  }

  static DynSystem circle_rotation(double x0) {
    // Consecutive Fibonacci numbers: theta = F(60)/F(61), the golden-mean
    // convergent with denominator ~2.5e12.
    return circle_rotation(1548008755920ll, 2504730781961ll, x0);
  }

  static DynSystem circle_rotation(int64_t theta_num, int64_t theta_den, double x0) {
    if (theta_den < 2 || theta_num < 1 || theta_num >= theta_den)
      throw std::invalid_argument("DynSystem: angle must be p/q with 0 < p < q");
    if (theta_den > int64_t(1) << 45)
      throw std::invalid_argument("DynSystem: angle denominator too large for exact stepping");
    if (!(x0 >= 0.0) || !(x0 < 1.0))
      throw std::invalid_argument("DynSystem: base point outside [0, 1)");
    DynSystem s;
    s.kind_ = Kind::circle_rotation;
    s.num_ = theta_num;
    s.den_ = theta_den;
    s.x0_frac_ = x0;
    return s;
  }

  Kind kind() const { return kind_; }
  int64_t order() const { return m_; }

  /// Finite orbit position after k steps.
  int64_t position_mod(int64_t k) const { return (x0_int_ + k) % m_; }

  /// Circle orbit position after k steps, in [0, 1).
  double position_frac(int64_t k) const {
    const int64_t rot = (k % den_) * num_ % den_;
    double x = x0_frac_ + static_cast<double>(rot) / static_cast<double>(den_);
    if (x >= 1.0) x -= 1.0;
    return x;
  }

  std::string label() const {
    if (kind_ == Kind::finite_rotation)
      return "rot(" + std::to_string(m_) + ";" + std::to_string(x0_int_) + ")";
    return "circle(" + format_double(x0_frac_) + ")";
  }

 private:
  DynSystem() = default;

  Kind kind_ = Kind::finite_rotation;
  int64_t m_ = 1;
  int64_t x0_int_ = 0;
  int64_t num_ = 0;
  int64_t den_ = 1;
  double x0_frac_ = 0.0;
};

/// Continuous observable on the system: a value table on Z/m, or a finite
/// Fourier polynomial a0 + sum_j (c_j cos(2 pi j x) + s_j sin(2 pi j x)).
/// A single-entry value table acts as a constant on every system.
class Observable {
 public:
  enum class Kind { finite, fourier };

  static Observable finite(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("Observable: empty value table");
    Observable g;
    g.kind_ = Kind::finite;
    g.values_ = std::move(values);
    return g;
  }

  static Observable fourier(double a0, std::vector<double> cos_coef, std::vector<double> sin_coef) {
    Observable g;
    g.kind_ = Kind::fourier;
    g.a0_ = a0;
    g.cos_ = std::move(cos_coef);
    g.sin_ = std::move(sin_coef);
    return g;
  }

  static Observable constant(double c) { return finite({c}); }

  Kind kind() const { return kind_; }
  size_t table_size() const { return values_.size(); }

  /// Value along an orbit of the given system after k steps.
  double at_step(const DynSystem& sys, int64_t k) const {
    if (sys.kind() == DynSystem::Kind::finite_rotation) {
      if (kind_ != Kind::finite ||
          (values_.size() != 1 && values_.size() != static_cast<size_t>(sys.order())))
        throw std::invalid_argument("Observable: value table does not match the system order");
      if (values_.size() == 1) return values_[0];
      return values_[static_cast<size_t>(sys.position_mod(k))];
    }
    if (kind_ == Kind::finite && values_.size() == 1) return values_[0];
    if (kind_ != Kind::fourier)
      throw std::invalid_argument("Observable: circle rotation needs a Fourier observable");
    const double x = sys.position_frac(k);
    double acc = a0_;
    const double tau = 2.0 * std::acos(-1.0);
    for (size_t j = 0; j < cos_.size(); ++j) acc += cos_[j] * std::cos(tau * (j + 1) * x);
    for (size_t j = 0; j < sin_.size(); ++j) acc += sin_[j] * std::sin(tau * (j + 1) * x);
    return acc;
  }

  /// Integral against the invariant measure (uniform in both models).
  double invariant_integral() const {
    if (kind_ == Kind::fourier) return a0_;
    double acc = 0.0;
    for (double v : values_) acc += v;
    return acc / static_cast<double>(values_.size());
  }

  /// Upper bound for |g|; exact for value tables, an l1 bound for Fourier.
  double sup_bound() const {
    if (kind_ == Kind::finite) {
      double m = 0.0;
      for (double v : values_) m = std::max(m, std::abs(v));
      return m;
    }
    double m = std::abs(a0_);
    for (double c : cos_) m += std::abs(c);
    for (double s : sin_) m += std::abs(s);
    return m;
  }

  std::string label() const {
    std::string s;
    if (kind_ == Kind::finite) {
      s = "g[";
      for (size_t i = 0; i < values_.size(); ++i) {
        if (i) s += ';';
        s += format_double(values_[i]);
      }
      return s + "]";
    }
    s = "gf[" + format_double(a0_);
    for (double c : cos_) s += ";c" + format_double(c);
    for (double v : sin_) s += ";s" + format_double(v);
    return s + "]";
  }

 private:
  Kind kind_ = Kind::finite;
  std::vector<double> values_;
  double a0_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

inline double cesaro_average(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("cesaro_average: empty range");
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value() / static_cast<double>(values.size());
}

/// Logarithmic average: sum a(n)/n over sum 1/n.
inline double log_average(const std::vector<int64_t>& ns, const std::vector<double>& values) {
  if (ns.empty() || ns.size() != values.size())
    throw std::invalid_argument("log_average: empty or mismatched data");
  CompensatedSum num, den;
  for (size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1) throw std::invalid_argument("log_average: indices must be positive");
    num.add(values[i] / static_cast<double>(ns[i]));
    den.add(1.0 / static_cast<double>(ns[i]));
  }
  return num.value() / den.value();
}

/// Exact gcd-correlation functional over a finite set:
///   E^log_{m in B} E^log_{n in B} (gcd(m, n) - 1).
inline Rational phi_correlation(const std::vector<int64_t>& block) {
  if (block.empty()) throw std::invalid_argument("phi_correlation: empty set");
  for (int64_t m : block)
    if (m < 1) throw std::invalid_argument("phi_correlation: elements must be positive");
  Rational numer(0), harmonic(0);
  for (int64_t m : block) {
    harmonic += Rational(1, m);
    for (int64_t n : block) {
      const int64_t g = std::gcd(m, n);
      if (g > 1) numer += Rational(g - 1, m * n);
    }
  }
  return numer / (harmonic * harmonic);
}

/// Mean of the Liouville function up to N; tends to 0 at PNT strength.
inline double liouville_mean(const FactorTable& table, int64_t limit) {
  if (limit < 1 || limit > table.limit())
    throw std::invalid_argument("liouville_mean: limit outside table range");
  int64_t acc = 0;
  for (int64_t n = 1; n <= limit; ++n) acc += table.profile(n).liouville;
  return static_cast<double>(acc) / static_cast<double>(limit);
}

/// Streaming variant: no factor table, bounded memory.
inline double liouville_mean_streaming(int64_t limit, int64_t segment = int64_t(1) << 20) {
  int64_t acc = 0;
  stream_profiles(limit, segment, [&](const ArithmeticProfile& pr) { acc += pr.liouville; });
  return static_cast<double>(acc) / static_cast<double>(limit);
}

/// Empirical orbit average
///   (1/N) sum_{n <= N, P+(n) in S} F(psi(n)) g(T^Omega(n) x0)
/// next to its ergodic limit delta(S) * int F dPhi * int g dmu. The Gaussian
/// weight argument psi comes from the normalization (Omega(n) or
/// Omega(phi(n))); the orbit exponent is always Omega(n).
struct OrbitAverageResult {
  double empirical = 0.0;
  double target = 0.0;
  double abs_err() const { return std::abs(empirical - target); }
};

inline OrbitAverageResult orbit_average(const FactorTable& table, const DynSystem& sys,
                                        const Observable& g,
                                        const std::optional<TestFunction>& f,
                                        const PrimeSetSpec& set, const NormalizationSpec& norm,
                                        int64_t limit) {
  if (limit < 2 || limit > table.limit())
    throw std::invalid_argument("orbit_average: limit outside table range");
  CompensatedSum acc;
  for (int64_t n = 1; n <= limit; ++n) {
    const ArithmeticProfile pr = table.profile(n);
    if (!set.admits_pmax(pr.pmax)) continue;
    const double fw =
        f ? (*f)(statistic_psi(norm, statistic_value(norm, pr, table))) : 1.0;
    if (fw == 0.0) continue;
    acc.add(fw * g.at_step(sys, pr.big_omega));
  }
  OrbitAverageResult out;
  out.empirical = acc.value() / static_cast<double>(limit);
  out.target = set.delta() * weight_function_gaussian(f) * g.invariant_integral();
  return out;
}

/// Defect of T-invariance of the orbit measure: the same weighted average
/// taken one extra step along the orbit, minus the original.
inline double t_invariance_gap(const FactorTable& table, const DynSystem& sys,
                               const Observable& g, const std::optional<TestFunction>& f,
                               const PrimeSetSpec& set, const NormalizationSpec& norm,
                               int64_t limit) {
  if (limit < 2 || limit > table.limit())
    throw std::invalid_argument("t_invariance_gap: limit outside table range");
  CompensatedSum shifted, plain;
  for (int64_t n = 1; n <= limit; ++n) {
    const ArithmeticProfile pr = table.profile(n);
    if (!set.admits_pmax(pr.pmax)) continue;
    const double fw =
        f ? (*f)(statistic_psi(norm, statistic_value(norm, pr, table))) : 1.0;
    if (fw == 0.0) continue;
    shifted.add(fw * g.at_step(sys, pr.big_omega + 1));
    plain.add(fw * g.at_step(sys, pr.big_omega));
  }
  return std::abs(shifted.value() - plain.value()) / static_cast<double>(limit);
}

/// Bounded arithmetic sequences (|a| <= 1) fed into the averaging
/// machinery: the Liouville function, its restriction by largest prime
/// factor, or an orbit sample g(T^Omega(n) x0).
class ASequence {
 public:
  enum class Kind { liouville, restricted_liouville, orbit };

  static ASequence liouville() { return ASequence(Kind::liouville); }

  static ASequence restricted_liouville(PrimeSetSpec set) {
    ASequence a(Kind::restricted_liouville);
    a.set_ = std::move(set);
    return a;
  }

  static ASequence orbit(DynSystem sys, Observable g) {
    if (g.sup_bound() > 1.0 + 1e-9)
      throw std::invalid_argument("ASequence: orbit observable must be bounded by 1");
    ASequence a(Kind::orbit);
    a.sys_ = std::move(sys);
    a.g_ = std::move(g);
    return a;
  }

  double value(const FactorTable& table, int64_t n) const {
    const ArithmeticProfile pr = table.profile(n);
    switch (kind_) {
      case Kind::liouville:
        return pr.liouville;
      case Kind::restricted_liouville:
        return set_->admits_pmax(pr.pmax) ? pr.liouville : 0.0;
      case Kind::orbit:
        return g_->at_step(*sys_, pr.big_omega);
    }
    return 0.0;
  }

  std::string label() const {
    switch (kind_) {
      case Kind::liouville:
        return "liouville";
      case Kind::restricted_liouville:
        return "liouville|" + set_->label();
      case Kind::orbit:
        return sys_->label() + "." + g_->label();
    }
    return "liouville";
  }

 private:
  explicit ASequence(Kind k) : kind_(k) {}

  Kind kind_;
  std::optional<PrimeSetSpec> set_;
  std::optional<DynSystem> sys_;
  std::optional<Observable> g_;
};

/// Finite-N report on the multiplicative-average comparison: the distance
/// between the plain average of a and the log-averaged dilation average,
/// next to the sqrt of the gcd-correlation of the dilation set (the bound
/// that holds in the limit).
struct BrInequalityReport {
  double plain_average = 0.0;
  double dilated_average = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

inline BrInequalityReport br_inequality_report(const FactorTable& table,
                                               const std::vector<int64_t>& block,
                                               const ASequence& a, int64_t limit) {
  if (block.empty()) throw std::invalid_argument("br_inequality_report: empty dilation set");
  int64_t bmax = 0;
  for (int64_t m : block) {
    if (m < 1) throw std::invalid_argument("br_inequality_report: elements must be positive");
    bmax = std::max(bmax, m);
  }
  if (limit < bmax || limit > table.limit())
    throw std::invalid_argument("br_inequality_report: limit outside [max(B), table limit]");

  BrInequalityReport out;
  CompensatedSum plain;
  for (int64_t n = 1; n <= limit; ++n) plain.add(a.value(table, n));
  out.plain_average = plain.value() / static_cast<double>(limit);

  CompensatedSum num, den;
  for (int64_t m : block) {
    const int64_t inner_limit = limit / m;
    CompensatedSum inner;
    for (int64_t n = 1; n <= inner_limit; ++n) inner.add(a.value(table, m * n));
    num.add(inner.value() / static_cast<double>(inner_limit) / static_cast<double>(m));
    den.add(1.0 / static_cast<double>(m));
  }
  out.dilated_average = num.value() / den.value();
  out.lhs = std::abs(out.plain_average - out.dilated_average);
  out.rhs = std::sqrt(static_cast<double>(phi_correlation(block)));
  return out;
}

/// One dyadic-style block [rho^j, rho^(j+1)) with equally many primes (b1)
/// and two-factor numbers (b2).
struct BlockSet {
  int64_t j = 0;
  std::vector<int64_t> b1;
  std::vector<int64_t> b2;
};

struct BlockSetPair {
  double rho = 2.0;
  double eps = 1.0;
  int64_t j_lo = 0;
  int64_t j_hi = 0;
  std::vector<BlockSet> blocks;
  Rational corr1, corr2;
  /// Whether the parameters sit in the regime the limit argument uses
  /// (eps < 1 and rho <= 1 + eps); larger values are still valid data.
  bool limit_regime = false;

  std::vector<int64_t> b1() const {
    std::vector<int64_t> out;
    for (const auto& b : blocks) out.insert(out.end(), b.b1.begin(), b.b1.end());
    return out;
  }
  std::vector<int64_t> b2() const {
    std::vector<int64_t> out;
    for (const auto& b : blocks) out.insert(out.end(), b.b2.begin(), b.b2.end());
    return out;
  }
};

/// Thrown when no matched pair exists in the window or the correlation
/// threshold is exceeded; carries the best correlations seen.
struct block_construction_error : std::runtime_error {
  block_construction_error(const std::string& msg, double c1, double c2)
      : std::runtime_error(msg), corr1(c1), corr2(c2) {}
  double corr1 = -1.0;
  double corr2 = -1.0;
};

/// Greedy matched selection: per block [rho^j, rho^(j+1)) take the smallest
/// per_block primes and the smallest per_block Omega=2 integers, trimmed to
/// equal counts, then verify membership and the correlation threshold.
inline BlockSetPair matched_block_sets(const FactorTable& table, double rho, double eps,
                                       int64_t j_lo, int64_t j_hi, int64_t per_block = 3) {
  if (!(rho > 1.0)) throw std::invalid_argument("matched_block_sets: rho must exceed 1");
  if (!(eps > 0.0)) throw std::invalid_argument("matched_block_sets: eps must be positive");
  if (j_lo < 0 || j_hi < j_lo) throw std::invalid_argument("matched_block_sets: bad block range");
  if (per_block < 1) throw std::invalid_argument("matched_block_sets: per_block must be >= 1");
  if (std::pow(rho, static_cast<double>(j_hi) + 1.0) > static_cast<double>(table.limit()) + 1.0)
    throw std::invalid_argument("matched_block_sets: top block exceeds the table limit");

  BlockSetPair out;
  out.rho = rho;
  out.eps = eps;
  out.j_lo = j_lo;
  out.j_hi = j_hi;
  out.limit_regime = eps < 1.0 && rho <= 1.0 + eps;

  for (int64_t j = j_lo; j <= j_hi; ++j) {
    const double lo = std::pow(rho, static_cast<double>(j));
    const double hi = std::pow(rho, static_cast<double>(j) + 1.0);
    BlockSet block;
    block.j = j;
    std::vector<int64_t> ones, twos;
    for (auto n = static_cast<int64_t>(std::ceil(lo)); static_cast<double>(n) < hi; ++n) {
      if (n < 2) continue;
      const int bo = table.profile(n).big_omega;
      if (bo == 1 && static_cast<int64_t>(ones.size()) < per_block) ones.push_back(n);
      if (bo == 2 && static_cast<int64_t>(twos.size()) < per_block) twos.push_back(n);
      if (static_cast<int64_t>(ones.size()) == per_block &&
          static_cast<int64_t>(twos.size()) == per_block)
        break;
    }
    const size_t count = std::min(ones.size(), twos.size());
    block.b1.assign(ones.begin(), ones.begin() + count);
    block.b2.assign(twos.begin(), twos.begin() + count);
    out.blocks.push_back(std::move(block));
  }

  const std::vector<int64_t> b1 = out.b1();
  const std::vector<int64_t> b2 = out.b2();
  if (b1.empty())
    throw block_construction_error("matched_block_sets: no matched pair in the given blocks",
                                   -1.0, -1.0);
  for (int64_t p : b1)
    if (table.profile(p).big_omega != 1)
      throw std::logic_error("matched_block_sets: non-prime slipped into b1");
  for (int64_t q : b2)
    if (table.profile(q).big_omega != 2)
      throw std::logic_error("matched_block_sets: non-semiprime slipped into b2");

  out.corr1 = phi_correlation(b1);
  out.corr2 = phi_correlation(b2);
  const double c1 = static_cast<double>(out.corr1);
  const double c2 = static_cast<double>(out.corr2);
  if (c1 > eps || c2 > eps)
    throw block_construction_error(
        "matched_block_sets: correlations " + format_double(c1) + ", " + format_double(c2) +
            " exceed eps = " + format_double(eps),
        c1, c2);
  return out;
}

/// Size of the perturbation caused by dilating n -> mn inside the weighted
/// orbit average:
///   | E_{n<=N} F1(P+(mn)) F2(psi(mn)) a(n) - E_{n<=N} F1(P+(n)) F2(psi(n)) a(n) |
/// where F1 is a prime-set indicator applied to the largest prime factor
/// (absent means constant 1).
inline double perturbation_gap(const FactorTable& table, int64_t m,
                               const std::optional<PrimeSetSpec>& f1,
                               const std::optional<TestFunction>& f2, const ASequence& a,
                               const NormalizationSpec& norm, int64_t limit) {
  if (m < 1) throw std::invalid_argument("perturbation_gap: m must be >= 1");
  if (limit < 2 || m * limit > table.limit())
    throw std::invalid_argument("perturbation_gap: m * limit outside table range");
  const auto f1_of = [&](int64_t pmax_val) {
    return !f1 || f1->admits_pmax(pmax_val) ? 1.0 : 0.0;
  };
  CompensatedSum dilated, plain;
  for (int64_t n = 1; n <= limit; ++n) {
    const double an = a.value(table, n);
    const ArithmeticProfile pm = table.profile(m * n);
    const ArithmeticProfile pn = table.profile(n);
    const double fm = f2 ? (*f2)(statistic_psi(norm, statistic_value(norm, pm, table))) : 1.0;
    const double fn = f2 ? (*f2)(statistic_psi(norm, statistic_value(norm, pn, table))) : 1.0;
    dilated.add(f1_of(pm.pmax) * fm * an);
    plain.add(f1_of(pn.pmax) * fn * an);
  }
  return std::abs(dilated.value() - plain.value()) / static_cast<double>(limit);
}

}  // namespace factorlab
