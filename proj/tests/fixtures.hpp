#pragma once

#include "setomo/jsa.hpp"
#include "setomo/signals.hpp"

namespace setomo::fixtures {

// Chirped double-Gaussian joint amplitude used across the tests.
inline constexpr double kSigmaPlus = 1.0;
inline constexpr double kSigmaMinus = 3.0;
inline constexpr double kChirp = 0.5;

inline ModeGrid chirped_grid(int n = 64) { return ModeGrid(0.0, 24.0, n); }

inline JointAmplitude chirped_gaussian(int n = 64) {
  const ModeGrid g = chirped_grid(n);
  return gaussian_jsa(kSigmaPlus, kSigmaMinus, kChirp, g, g);
}

// Standard deviation of either marginal of |L|^2.
inline double marginal_sigma() { return 0.5 * std::sqrt(kSigmaPlus * kSigmaPlus + kSigmaMinus * kSigmaMinus); }

}  // namespace setomo::fixtures
