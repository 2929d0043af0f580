#pragma once

#include <cstdint>
#include <string>

namespace pik {

/// xoshiro256++ 1.0, seeded through splitmix64. Stream is identical across
/// platforms, which is what makes the random-system scenarios reproducible.
class Rng {
 public:
  static constexpr const char* algorithm = "xoshiro256++";
  static constexpr const char* version = "1.0";

  explicit Rng(uint64_t seed);

  uint64_t next();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller (two uniforms per pair, cached spare).
  double normal();
  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n);

 private:
  uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline std::string rng_name() {
  return std::string(Rng::algorithm) + " " + Rng::version;
}

}  // namespace pik
