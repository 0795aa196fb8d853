#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace factorlab {

using std::int64_t;
using std::uint32_t;
using std::uint64_t;

/// Exact rational arithmetic for the identities that demand it
/// (gcd-correlations, small harmonic sums).
using Rational = boost::multiprecision::cpp_rational;

/// Thrown when a requested computation would exceed the configured
/// memory envelope (CLI exit code 3).
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Neumaier-compensated accumulator. Used for every floating sum that
/// can run to >= 1e6 terms so identity residuals stay at the 1e-9 level.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Shortest round-trip decimal form, locale-independent ('.' decimal point).
inline std::string format_double(double v) {
  std::array<char, 40> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

inline int64_t isqrt64(int64_t n) {
  if (n < 0) throw std::invalid_argument("isqrt64: negative argument");
  auto r = static_cast<int64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline int64_t ipow64(int64_t base, int exp) {
  int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// FNV-1a over a byte string; provenance hashing for experiment configs.
inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace factorlab
