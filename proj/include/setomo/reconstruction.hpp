#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "setomo/grid.hpp"
#include "setomo/io.hpp"
#include "setomo/jsa.hpp"
#include "setomo/schmidt.hpp"
#include "setomo/signals.hpp"

namespace setomo {

inline constexpr double kDefaultRegEps = 1e-3;
// P(delta) ~ exp(-delta^2 / Delta) averages exp(i k delta) to exp(-k^2 Delta / 4).
inline constexpr double kJitterConstant = 0.25;

enum class Provenance { kExact, kLowGain, kExternalFile };

const char* provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

struct NoiseParams {
  double delta_eta = 0.0;
  double delta_sigma = 0.0;
  int mc_samples = 0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Complex interferometric map over (q_sigma, q_eta): the theta = 0 quadrature
// in the real part and theta = pi/2 in the imaginary part. In the low-gain limit
// it samples 2 gain S~(q1, q2) with q1 = q_sigma + q_eta (signal axis) and
// q2 = q_sigma (idler axis).
struct MeasurementRecord {
  explicit MeasurementRecord(Field2D m) : map(std::move(m)) {}

  Field2D map;  // grid_s() = q_sigma grid, grid_i() = q_eta grid
  double gain_used = 0.0;
  Provenance provenance = Provenance::kLowGain;
  std::string rng_algorithm;
  std::optional<std::uint64_t> rng_seed;
  NoiseParams noise;
  // Per-cell Monte Carlo standard errors of the real and imaginary parts; empty
  // for deterministic records.
  std::vector<double> se_re;
  std::vector<double> se_im;

  const ModeGrid& grid_sigma() const noexcept { return map.grid_s(); }
  const ModeGrid& grid_eta() const noexcept { return map.grid_i(); }
};

json record_to_json(const MeasurementRecord& record);
MeasurementRecord record_from_json(const json& j);

// Evaluates the complex low-gain map at arbitrary (q_sigma, q_eta).
class LowGainSignalMap {
 public:
  LowGainSignalMap(const Field2D& kernel, double gain, const SeedProfile& seed);

  cplx operator()(double q_sigma, double q_eta) const;

 private:
  std::vector<double> k_;
  std::vector<cplx> weights_;  // L(k_i, k_j) a*(k_i) a*(k_j) dk dk', row-major
  std::vector<cplx> seed_conj_;
  double gain_;
};

using SignalMapFn = std::function<cplx(double q_sigma, double q_eta)>;

MeasurementRecord sample_signal_map(const Field2D& kernel, double gain, const SeedProfile& seed,
                                    const ModeGrid& grid_sigma, const ModeGrid& grid_eta);
MeasurementRecord sample_signal_map(const SchmidtData& schmidt, double gain, const SeedProfile& seed,
                                    const ModeGrid& grid_sigma, const ModeGrid& grid_eta);

// Record grids whose inversion is exact on the given mode grid.
ModeGrid dual_sigma_grid(const ModeGrid& mode_grid);
ModeGrid dual_eta_grid(const ModeGrid& mode_grid);

// Inverse transform of the record onto (k, k'):
//   R(k, k') = dq_sigma dq_eta / (2 pi)^2 sum_mn S(m, n) e^{-i (k + k') q_sigma_m} e^{-i k q_eta_n}
// which is 2 gain L(k, k') a*(k) a*(k') for a noiseless low-gain record. Linear in
// the record.
Field2D invert_kernel(const MeasurementRecord& record, const ModeGrid& grid);

// Cells are masked where the seed is below reg_eps * max|alpha|^2 or, when the
// record spacing is coarser than 2 pi / span, where (k, k + k') falls outside
// the alias-free band |k - c| <= pi / dq_eta, |k + k' - 2c| <= pi / dq_sigma.
struct Reconstruction {
  Reconstruction(JointAmplitude j, Field2D e) : jsa(std::move(j)), estimate(std::move(e)) {}

  JointAmplitude jsa;         // unit norm over unmasked cells
  Field2D estimate;           // R / (2 gain a* a*), zero on masked cells
  std::vector<bool> mask;     // true = masked, row-major over (k, k')
  double masked_fraction = 0.0;
  double band_masked_fraction = 0.0;  // part of masked_fraction outside the sampled band
  double residual = 0.0;      // ||forward(estimate) - record|| / ||record||
};

Reconstruction invert_to_modal(const MeasurementRecord& record, const SeedProfile& seed, double gain,
                               double reg_eps = kDefaultRegEps);

// |<A,B>|^2 / (<A,A><B,B>) over unmasked cells.
double fidelity(const Field2D& a, const Field2D& b, const std::vector<bool>* mask = nullptr);
double fidelity(const JointAmplitude& a, const JointAmplitude& b, const std::vector<bool>* mask = nullptr);

// Pointwise attenuation exp(-c (k+k')^2 D_sigma) exp(-c k^2 D_eta): q_sigma
// jitter couples to k + k', q_eta jitter to the signal variable.
double jitter_attenuation(double k, double k_prime, const NoiseParams& noise);
JointAmplitude apply_jitter_analytic(const JointAmplitude& jsa, const NoiseParams& noise);

inline constexpr const char* kRngAlgorithm = "mt19937_64/splitmix64-per-cell/normal_distribution";

// Averages map_fn(q_sigma + d_sigma, q_eta + d_eta) over independent Gaussian
// draws with variance Delta/2 per axis. Each cell owns a generator stream derived
// from (rng_seed, cell index), so results do not depend on evaluation order.
MeasurementRecord apply_jitter_monte_carlo(const SignalMapFn& map_fn, const NoiseParams& noise,
                                           const ModeGrid& grid_sigma, const ModeGrid& grid_eta);

struct NyquistReport {
  bool pass = false;
  bool sampling_ok = false;
  bool span_ok = false;
  double k_max_sigma = 0.0;  // half-width of the (k + k') support
  double k_max_eta = 0.0;    // half-width of the k support
  double required_dq_sigma = 0.0;
  double required_dq_eta = 0.0;
  double edge_ratio = 0.0;   // max |map| on the record boundary / max |map|
};

NyquistReport nyquist_check(const Field2D& kernel, const ModeGrid& grid_sigma, const ModeGrid& grid_eta,
                            const SeedProfile* seed = nullptr);

}  // namespace setomo
