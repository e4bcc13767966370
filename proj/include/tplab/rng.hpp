#pragma once

#include <cstdint>

namespace tplab {

/// Counter-based generator. Draw i of stream s under seed z is
///   mix64(z * 0x9E3779B97F4A7C15 + s * 0xD1B54A32D192ED03 + i)
/// where mix64 is the SplitMix64 finalizer. No hidden state beyond the
/// counter, so any case can be regenerated from (seed, stream) alone.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t at(std::uint64_t i) const;
  std::uint64_t next() { return at(counter_++); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace tplab
