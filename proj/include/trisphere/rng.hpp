#pragma once

#include <cstdint>
#include <random>

namespace trisphere {

/// Seedable generator with a platform-independent stream.
///
/// The raw words come from std::mt19937_64, whose output sequence is fixed by
/// the C++ standard. Derived variates are computed here rather than through
/// <random> distributions, whose algorithms differ between standard
/// libraries:
///   uniform() = (word >> 11) * 2^-53
///   coin()    = top bit of one word
///   normal()  = Box-Muller on two uniforms, the second value is cached.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  bool coin() { return (next() >> 63) != 0; }
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace trisphere
