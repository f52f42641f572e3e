#ifndef PCLQ_RNG_HPP_
#define PCLQ_RNG_HPP_

#include <cstdint>

namespace pclq {

// Natural logarithm evaluated with plain IEEE double arithmetic only
// (bit-level exponent extraction + atanh series). Used by the sampling path
// so that streams do not depend on the platform math library.
double portable_log(double x);

// Counter-based splittable generator. The output at step i is a SplitMix64
// finalizer applied to key + i * golden; child streams re-key through the
// same mixer, so split(a) and split(b) are independent for a != b and the
// stream layout does not depend on evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed + kGolden)) {}

  // Derives an independent stream. Does not advance this generator.
  CounterRng split(std::uint64_t stream) const {
    return CounterRng(FromKey{}, mix(key_ ^ mix(stream + kSplitSalt)));
  }

  std::uint64_t next_u64() {
    counter_ += 1;
    return mix(key_ + counter_ * kGolden);
  }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the polar form of the Box-Muller transform; the
  // only transcendental involved is portable_log (sqrt is correctly rounded
  // by IEEE-754 and therefore reproducible).
  double gaussian();

 private:
  struct FromKey {};
  CounterRng(FromKey, std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kSplitSalt = 0x2545F4914F6CDD1DULL;

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pclq

#endif  // PCLQ_RNG_HPP_
