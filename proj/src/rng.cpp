#include "pclq/rng.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "pclq/errors.hpp"

namespace pclq {

namespace {

// Split of ln(2) so that e * ln2 keeps full precision for |e| <= 2048.
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;

}  // namespace

double portable_log(double x) {
  require(x > 0.0 && std::isfinite(x), ErrorCode::kBadArgument,
          "portable_log requires a finite positive argument");
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  int exponent = 0;
  if (bits < (1ULL << 52)) {  // subnormal: renormalize by 2^64
    bits = std::bit_cast<std::uint64_t>(x * 0x1.0p64);
    exponent -= 64;
  }
  exponent += static_cast<int>((bits >> 52) & 0x7FF) - 1023;
  // Mantissa in [1, 2).
  double m = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFULL) |
                                   0x3FF0000000000000ULL);
  if (m > 1.4142135623730951) {  // keep |m - 1| small: m in [sqrt(1/2), sqrt(2))
    m *= 0.5;
    exponent += 1;
  }
  // ln(m) = 2 * atanh(t) with t = (m-1)/(m+1), |t| < 0.1716.
  const double t = (m - 1.0) / (m + 1.0);
  const double t2 = t * t;
  double term = t;
  double sum = t;
  for (int k = 1; k < 30; ++k) {
    term *= t2;
    const double contribution = term / static_cast<double>(2 * k + 1);
    const double next = sum + contribution;
    if (next == sum) break;
    sum = next;
  }
  const double e = static_cast<double>(exponent);
  return e * kLn2Hi + (e * kLn2Lo + 2.0 * sum);
}

double CounterRng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s <= 0.0);
  const double f = std::sqrt(-2.0 * portable_log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

}  // namespace pclq
