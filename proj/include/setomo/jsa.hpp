#pragma once

#include <optional>

#include "setomo/grid.hpp"
#include "setomo/io.hpp"

namespace setomo {

// gamma = pump_amp * chi, stored as magnitude (gain) plus phase. chi and
// pump_amp are bookkeeping only; gain is authoritative.
struct CouplingParams {
  double gain = 0.0;
  double gain_phase = 0.0;
  std::optional<double> chi;
  std::optional<double> pump_amp;

  void validate() const;
};

// Pump spectral amplitude sampled along the energy-conservation variable
// (k + k'), with a quadratic spectral phase.
struct PumpProfile {
  Field1D amplitude;
  double chirp = 0.0;

  // Linear interpolation of the sampled amplitude; out-of-range outside the grid.
  cplx amplitude_at(double x) const;

  static PumpProfile flat(const ModeGrid& grid, double chirp = 0.0);
  static PumpProfile gaussian(const ModeGrid& grid, double center, double sigma, double chirp = 0.0);
};

struct PhaseMatchingFunction {
  Field2D values;

  // exp(-(k - k')^2 / (4 sigma^2)).
  static PhaseMatchingFunction gaussian_difference(const ModeGrid& grid_s, const ModeGrid& grid_i,
                                                   double sigma);
  // exp(-k^2 / (4 sigma_s^2)) * exp(-k'^2 / (4 sigma_i^2)).
  static PhaseMatchingFunction separable_gaussian(const ModeGrid& grid_s, const ModeGrid& grid_i,
                                                  double sigma_s, double sigma_i);
};

// Unit-norm joint modal function L(k, k').
struct JointAmplitude {
  Field2D kernel;
  // Scale applied to the raw kernel to reach unit norm (1 / raw norm).
  double norm_factor = 1.0;
  CouplingParams coupling;
  // False for kernels deliberately left off unit norm (e.g. jitter-attenuated).
  bool normalized = true;

  double prenormalization_norm() const { return 1.0 / norm_factor; }
};

JointAmplitude normalize(const Field2D& kernel);

JointAmplitude build_jsa_pump_phasematch(const PumpProfile& pump, const PhaseMatchingFunction& pm);

// L ~ exp(-(k+k')^2/(4 sp^2)) exp(-(k-k')^2/(4 sm^2)) exp(i chirp (k+k')^2), normalized.
JointAmplitude gaussian_jsa(double sigma_plus, double sigma_minus, double chirp, const ModeGrid& grid_s,
                            const ModeGrid& grid_i);

// Kernel with the coupling phase absorbed: exp(i gain_phase) * L.
Field2D effective_kernel(const JointAmplitude& jsa);

json joint_amplitude_to_json(const JointAmplitude& jsa);
JointAmplitude joint_amplitude_from_json(const json& j);

}  // namespace setomo
