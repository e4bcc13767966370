#include "tplab/rng.hpp"

namespace tplab {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::at(std::uint64_t i) const {
  return mix64(seed_ * 0x9E3779B97F4A7C15ULL + stream_ * 0xD1B54A32D192ED03ULL + i);
}

}  // namespace tplab
