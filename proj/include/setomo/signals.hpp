#pragma once

#include <vector>

#include "setomo/grid.hpp"
#include "setomo/jsa.hpp"
#include "setomo/schmidt.hpp"

namespace setomo {

// Coherent seed amplitude alpha(k) on the idler grid.
struct SeedProfile {
  Field1D alpha;

  // |alpha|^2 = sum |alpha(k)|^2 dk (mean seed photon number).
  double total_intensity() const;
  // |sum alpha(k) dk|^2: the weight of a narrowband (delta-like) seed.
  double integrated_intensity() const;

  SeedProfile scaled(cplx factor) const;

  static SeedProfile zero(const ModeGrid& grid);
  static SeedProfile flat(const ModeGrid& grid, cplx amplitude);
  // amplitude * exp(-(k - center)^2 / (4 sigma^2)); |alpha|^2 has standard deviation sigma.
  static SeedProfile gaussian(const ModeGrid& grid, cplx amplitude, double center, double sigma);
  // Single grid cell nearest k0 holding integrated amplitude `weight`.
  static SeedProfile point(const ModeGrid& grid, double k0, cplx weight);
};

struct InterferometerSettings {
  double q_sigma = 0.0;           // seed delay, applied before the interaction
  double q_eta = 0.0;             // idler-arm delay, applied after the interaction
  double quadrature_theta = 0.0;  // extra signal-arm phase
};

// Schmidt projections beta_n = <phi_n, alpha>.
std::vector<cplx> seed_projections(const SchmidtData& s, const Field1D& alpha);

// Spectral densities per unit k; multiply by the detector resolution for counts.
double spontaneous_spectrum(const SchmidtData& s, double gain, int k_index);
double stimulated_spectrum(const SchmidtData& s, double gain, const SeedProfile& seed, int k_index);
std::vector<double> stimulated_spectrum(const SchmidtData& s, double gain, const SeedProfile& seed);

double total_signal_photons(const SchmidtData& s, double gain, const SeedProfile& seed);

double lowgain_stimulated_spectrum(const Field2D& kernel, double gain, const SeedProfile& seed, int k_index);
double lowgain_stimulated_spectrum(const JointAmplitude& jsa, double gain, const SeedProfile& seed, int k_index);

// gain^2 |alpha|^2 |L(k_s, k0)|^2 with L taken at the idler sample nearest k0.
double sipe_limit_spectrum(const Field2D& kernel, double gain, double seed_center, double seed_intensity,
                           int k_index);
double sipe_limit_spectrum(const JointAmplitude& jsa, double gain, double seed_center, double seed_intensity,
                           int k_index);

// <N_A - N_B> from exact first-moment propagation. With the seed delayed by
// exp(-i k q_sigma), the idler arm by exp(-i k q_eta) and the signal arm by
// exp(-i theta):
//   2 Re sum_k <a_s^+(k)> <a_i(k)> exp(i (theta - k q_eta)) dk.
double interferometric_signal_exact(const SchmidtData& s, double gain, const SeedProfile& seed,
                                    const InterferometerSettings& settings);

// Complex low-gain map
//   Z = gain sum_ij L(k_i, k'_j) a*(k_i) e^{i k_i (q_sigma + q_eta)} a*(k'_j) e^{i k'_j q_sigma} dk dk'
// so that the detected signal at quadrature theta is 2 Re[e^{-i theta} Z].
cplx interferometric_complex_lowgain(const Field2D& kernel, double gain, const SeedProfile& seed, double q_sigma,
                                     double q_eta);

double interferometric_signal_lowgain(const Field2D& kernel, double gain, const SeedProfile& seed,
                                      const InterferometerSettings& settings);
double interferometric_signal_lowgain(const JointAmplitude& jsa, double gain, const SeedProfile& seed,
                                      const InterferometerSettings& settings);

}  // namespace setomo
