#pragma once

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <new>
#include <utility>
#include <vector>

#include "factorlab/common.hpp"

namespace factorlab {

/// Complete multiplicative fingerprint of one integer, produced either by
/// FactorTable::profile or by the segmented stream.
struct ArithmeticProfile {
  int64_t n = 1;
  int big_omega = 0;    // prime factors with multiplicity
  int small_omega = 0;  // distinct prime factors
  int omega1 = 0;       // distinct primes dividing n exactly once
  int64_t pmax = 1;     // largest prime factor, 1 for n = 1
  int64_t phi = 1;      // Euler totient
  int mu = 1;           // Moebius value in {-1, 0, 1}
  int liouville = 1;    // (-1)^big_omega

  bool squarefree() const { return mu != 0; }
  bool is_prime() const { return big_omega == 1; }
  /// Multiplicity of the largest prime factor (0 for n = 1).
  int pmax_multiplicity() const {
    if (n == 1) return 0;
    int nu = 0;
    for (int64_t m = n; m % pmax == 0; m /= pmax) ++nu;
    return nu;
  }
};

namespace detail {

/// Odd-only simple sieve; enough for base primes up to sqrt(N).
inline std::vector<uint32_t> small_primes(int64_t limit) {
  std::vector<uint32_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(static_cast<size_t>(limit) + 1, false);
  for (int64_t i = 2; i <= limit; ++i) {
    if (!composite[static_cast<size_t>(i)]) {
      primes.push_back(static_cast<uint32_t>(i));
      for (int64_t j = i * i; j <= limit; j += i) composite[static_cast<size_t>(j)] = true;
    }
  }
  return primes;
}

inline void put_u32_le(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64_le(std::ostream& os, uint64_t v) {
  put_u32_le(os, static_cast<uint32_t>(v & 0xffffffffull));
  put_u32_le(os, static_cast<uint32_t>(v >> 32));
}

inline uint32_t get_u32_le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline uint64_t get_u64_le(std::istream& is) {
  uint64_t lo = get_u32_le(is);
  uint64_t hi = get_u32_le(is);
  return lo | (hi << 32);
}

}  // namespace detail

/// Smallest-prime-factor table built by a linear (Euler) sieve.
/// Entries are 32-bit, so the table limit must stay below 2^32; the
/// constructor additionally enforces a configurable memory envelope.
class FactorTable {
 public:
  static constexpr int64_t kDefaultMemoryLimit = 100'000'000;

  explicit FactorTable(int64_t limit, int64_t memory_limit = kDefaultMemoryLimit) : limit_(limit) {
    if (limit < 2) throw std::invalid_argument("FactorTable: limit must be >= 2");
    if (limit >= (int64_t(1) << 32))
      throw std::invalid_argument("FactorTable: limit must fit 32-bit entries");
    if (limit > memory_limit)
      throw resource_error(
          "FactorTable: limit exceeds in-memory envelope; use stream_profiles instead");
    try {
      build();
    } catch (const std::bad_alloc&) {
      throw resource_error("FactorTable: allocation failed");
    }
  }

  int64_t limit() const { return limit_; }

  /// Smallest prime factor of n (n >= 2).
  int64_t spf(int64_t n) const {
    check_range(n, 2);
    return spf_[static_cast<size_t>(n)];
  }

  bool is_prime(int64_t n) const {
    if (n < 2) return false;
    check_range(n, 2);
    return spf_[static_cast<size_t>(n)] == static_cast<uint32_t>(n);
  }

  /// Ascending list of all primes up to the table limit.
  const std::vector<uint32_t>& primes() const { return primes_; }

  int64_t prime_count(int64_t x) const {
    check_range(x, 1);
    auto it = std::upper_bound(primes_.begin(), primes_.end(), static_cast<uint32_t>(x));
    return static_cast<int64_t>(it - primes_.begin());
  }

  ArithmeticProfile profile(int64_t n) const {
    check_range(n, 1);
    ArithmeticProfile pr;
    pr.n = n;
    if (n == 1) return pr;
    bool squareful = false;
    int64_t m = n;
    while (m > 1) {
      const int64_t p = spf_[static_cast<size_t>(m)];
      int nu = 0;
      do {
        m /= p;
        ++nu;
      } while (m > 1 && spf_[static_cast<size_t>(m)] == static_cast<uint32_t>(p));
      pr.big_omega += nu;
      pr.small_omega += 1;
      if (nu == 1) pr.omega1 += 1;
      if (nu > 1) squareful = true;
      pr.pmax = p;  // factors come out in ascending order
      pr.phi *= ipow64(p, nu - 1) * (p - 1);
    }
    pr.mu = squareful ? 0 : (pr.small_omega % 2 ? -1 : 1);
    pr.liouville = pr.big_omega % 2 ? -1 : 1;
    return pr;
  }

  /// Largest prime factor only; cheaper than a full profile.
  int64_t pmax(int64_t n) const {
    check_range(n, 1);
    if (n == 1) return 1;
    int64_t m = n, p = 1;
    while (m > 1) {
      p = spf_[static_cast<size_t>(m)];
      do { m /= p; } while (m > 1 && spf_[static_cast<size_t>(m)] == static_cast<uint32_t>(p));
    }
    return p;
  }

 private:
  void build() {
    spf_.assign(static_cast<size_t>(limit_) + 1, 0);
    primes_.reserve(static_cast<size_t>(limit_ > 100 ? double(limit_) / (std::log(double(limit_)) - 1.1)
                                                     : 32));
    for (int64_t i = 2; i <= limit_; ++i) {
      if (spf_[static_cast<size_t>(i)] == 0) {
        spf_[static_cast<size_t>(i)] = static_cast<uint32_t>(i);
        primes_.push_back(static_cast<uint32_t>(i));
      }
      for (uint32_t p : primes_) {
        if (p > spf_[static_cast<size_t>(i)]) break;
        const int64_t q = static_cast<int64_t>(p) * i;
        if (q > limit_) break;
        spf_[static_cast<size_t>(q)] = p;
      }
    }
  }

  void check_range(int64_t n, int64_t lo) const {
    if (n < lo || n > limit_)
      throw std::invalid_argument("FactorTable: argument outside [" + std::to_string(lo) + ", " +
                                  std::to_string(limit_) + "]");
  }

  int64_t limit_;
  std::vector<uint32_t> spf_;
  std::vector<uint32_t> primes_;
};

inline FactorTable build_factor_table(int64_t limit,
                                      int64_t memory_limit = FactorTable::kDefaultMemoryLimit) {
  return FactorTable(limit, memory_limit);
}

/// Binary smallest-prime-factor dump: magic "SPF1", u32 version, u64 limit,
/// then limit+1 little-endian u32 entries (index 0 and 1 are zero).
inline void dump_spf(const FactorTable& table, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw resource_error("dump_spf: cannot open " + path);
  os.write("SPF1", 4);
  detail::put_u32_le(os, 1u);
  detail::put_u64_le(os, static_cast<uint64_t>(table.limit()));
  for (int64_t n = 0; n <= table.limit(); ++n) {
    uint32_t v = n >= 2 ? static_cast<uint32_t>(table.spf(n)) : 0u;
    detail::put_u32_le(os, v);
  }
  if (!os) throw resource_error("dump_spf: write failed for " + path);
}

/// Header-only check of a dump (magic/version/limit). Returns the limit.
inline int64_t peek_spf_limit(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw resource_error("peek_spf_limit: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SPF1", 4) != 0)
    throw std::invalid_argument("peek_spf_limit: bad magic in " + path);
  const uint32_t version = detail::get_u32_le(is);
  if (version != 1u) throw std::invalid_argument("peek_spf_limit: unsupported version");
  const uint64_t limit = detail::get_u64_le(is);
  if (!is) throw std::invalid_argument("peek_spf_limit: truncated header");
  return static_cast<int64_t>(limit);
}

/// Multiplicative weight families. All four have f(p^nu) independent of p,
/// which the Euler-product and friable-sum code exploits.
struct WeightSpec {
  enum class Kind { unit, d_alpha, mu_squared, alpha_pow_omega };

  Kind kind = Kind::unit;
  double alpha = 1.0;

  static WeightSpec unit() { return {Kind::unit, 1.0}; }
  static WeightSpec divisor(double alpha) {
    require_alpha(alpha);
    return {Kind::d_alpha, alpha};
  }
  static WeightSpec mu_squared() { return {Kind::mu_squared, 1.0}; }
  static WeightSpec alpha_pow_omega(double alpha) {
    require_alpha(alpha);
    return {Kind::alpha_pow_omega, alpha};
  }

  /// f(p^nu); by construction the same for every prime p.
  double prime_power_value(int nu) const {
    if (nu < 0) throw std::invalid_argument("WeightSpec: negative exponent");
    if (nu == 0) return 1.0;
    switch (kind) {
      case Kind::unit:
        return 1.0;
      case Kind::mu_squared:
        return nu == 1 ? 1.0 : 0.0;
      case Kind::alpha_pow_omega:
        return alpha;
      case Kind::d_alpha: {
        // binomial(alpha + nu - 1, nu) = prod_{i=1..nu} (alpha + i - 1) / i
        double v = 1.0;
        for (int i = 1; i <= nu; ++i) v *= (alpha + i - 1) / i;
        return v;
      }
    }
    return 1.0;
  }

  /// Mean value of f on the primes; drives the Dickman parameter and the
  /// (log x)^{alpha-1} scale of the partial sums.
  double prime_mean() const {
    switch (kind) {
      case Kind::unit:
      case Kind::mu_squared:
        return 1.0;
      default:
        return alpha;
    }
  }

  /// Smallest integer k with f dominated by the k-divisor function; the
  /// moment bounds in the normal-approximation layer use it.
  int divisor_bound_order() const {
    switch (kind) {
      case Kind::unit:
      case Kind::mu_squared:
        return 1;
      default:
        return std::max(1, static_cast<int>(std::ceil(alpha)));
    }
  }

  std::string label() const {
    switch (kind) {
      case Kind::unit:
        return "unit";
      case Kind::mu_squared:
        return "mu^2";
      case Kind::alpha_pow_omega:
        return "alpha^omega(" + format_double(alpha) + ")";
      case Kind::d_alpha:
        return "d_alpha(" + format_double(alpha) + ")";
    }
    return "unit";
  }

  bool operator==(const WeightSpec& o) const { return kind == o.kind && alpha == o.alpha; }

 private:
  static void require_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw std::invalid_argument("WeightSpec: alpha must be positive and finite");
  }
};

inline double weight_value(const WeightSpec& w, const ArithmeticProfile& pr,
                           const FactorTable& table) {
  if (pr.n == 1) return 1.0;
  double v = 1.0;
  int64_t m = pr.n;
  while (m > 1) {
    const int64_t p = table.spf(m);
    int nu = 0;
    do {
      m /= p;
      ++nu;
    } while (m > 1 && table.spf(m) == p);
    v *= w.prime_power_value(nu);
    if (v == 0.0) return 0.0;
  }
  return v;
}

inline double weight_value(const WeightSpec& w, int64_t n, const FactorTable& table) {
  ArithmeticProfile pr;
  pr.n = n;
  return weight_value(w, pr, table);
}

/// Streams profiles for n = 1..limit in ascending order without holding a
/// full table: a window of `segment` integers is factored against the base
/// primes below sqrt(limit). Integer aggregates are bit-identical to the
/// in-memory path regardless of the segment size.
template <class Visitor>
void stream_profiles(int64_t limit, int64_t segment, Visitor&& visit) {
  if (limit < 1) throw std::invalid_argument("stream_profiles: limit must be >= 1");
  if (segment < (int64_t(1) << 16))
    throw std::invalid_argument("stream_profiles: segment must be >= 65536");
  try {
    const std::vector<uint32_t> base = detail::small_primes(isqrt64(limit));
    const auto width = static_cast<size_t>(std::min(segment, limit));
    std::vector<int64_t> rem(width), phi(width), pmax(width);
    std::vector<unsigned char> bo(width), so(width), o1(width), squareful(width);

    for (int64_t lo = 1; lo <= limit; lo += segment) {
      const int64_t hi = std::min(lo + segment - 1, limit);
      const auto count = static_cast<size_t>(hi - lo + 1);
      for (size_t i = 0; i < count; ++i) {
        rem[i] = lo + static_cast<int64_t>(i);
        phi[i] = 1;
        pmax[i] = 1;
        bo[i] = so[i] = o1[i] = squareful[i] = 0;
      }
      for (uint32_t p32 : base) {
        const auto p = static_cast<int64_t>(p32);
        if (p * p > hi) break;
        int64_t m = ((lo + p - 1) / p) * p;
        if (m < p * 2) m = p * 2;  // n = p itself is handled by the residual step
        for (; m <= hi; m += p) {
          const auto i = static_cast<size_t>(m - lo);
          int nu = 0;
          int64_t pk = 1;
          while (rem[i] % p == 0) {
            rem[i] /= p;
            pk *= p;
            ++nu;
          }
          bo[i] = static_cast<unsigned char>(bo[i] + nu);
          so[i] += 1;
          if (nu == 1)
            o1[i] += 1;
          else
            squareful[i] = 1;
          pmax[i] = p;
          phi[i] *= (pk / p) * (p - 1);
        }
      }
      for (size_t i = 0; i < count; ++i) {
        const int64_t n = lo + static_cast<int64_t>(i);
        ArithmeticProfile pr;
        pr.n = n;
        if (n > 1) {
          if (rem[i] > 1) {  // residual prime above sqrt(hi), multiplicity 1
            bo[i] += 1;
            so[i] += 1;
            o1[i] += 1;
            pmax[i] = rem[i];
            phi[i] *= rem[i] - 1;
          }
          pr.big_omega = bo[i];
          pr.small_omega = so[i];
          pr.omega1 = o1[i];
          pr.pmax = pmax[i];
          pr.phi = phi[i];
          pr.mu = squareful[i] ? 0 : (so[i] % 2 ? -1 : 1);
          pr.liouville = bo[i] % 2 ? -1 : 1;
        }
        visit(static_cast<const ArithmeticProfile&>(pr));
      }
    }
  } catch (const std::bad_alloc&) {
    throw resource_error("stream_profiles: allocation failed");
  }
}

}  // namespace factorlab
