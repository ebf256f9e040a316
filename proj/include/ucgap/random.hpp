#pragma once

#include <cstdint>
#include <random>

namespace ucgap {

/// Seeded random stream owned by a single chain.
///
/// Variates come from Boost.Random distributions, whose algorithms are fixed
/// (unlike the implementation-defined std:: distributions), so a seed
/// reproduces the same bitstream on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0x5eed) : engine_(seed) {}

  double uniform();            // (0, 1), never returns 0
  double normal();             // N(0, 1)
  double gamma(double shape);  // Gamma(shape, scale 1)
  double beta(double a, double b);
  /// Inverse gamma with density proportional to x^{-(a+1)} exp(-b/x).
  double inverse_gamma(double a, double b);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ucgap
