#include "setomo/signals.hpp"

#include <cmath>

namespace setomo {

double SeedProfile::total_intensity() const {
  double acc = 0.0;
  for (const cplx& a : alpha.values) acc += std::norm(a);
  return acc * alpha.grid.spacing();
}

double SeedProfile::integrated_intensity() const {
  cplx acc{0.0, 0.0};
  for (const cplx& a : alpha.values) acc += a;
  return std::norm(acc * alpha.grid.spacing());
}

SeedProfile SeedProfile::scaled(cplx factor) const {
  SeedProfile out = *this;
  for (cplx& a : out.alpha.values) a *= factor;
  return out;
}

SeedProfile SeedProfile::zero(const ModeGrid& grid) { return SeedProfile{Field1D(grid)}; }

SeedProfile SeedProfile::flat(const ModeGrid& grid, cplx amplitude) {
  return SeedProfile{Field1D(grid, std::vector<cplx>(static_cast<std::size_t>(grid.size()), amplitude))};
}

SeedProfile SeedProfile::gaussian(const ModeGrid& grid, cplx amplitude, double center, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorKind::kInvalidArgument, "seed width must be positive");
  Field1D f(grid);
  for (int i = 0; i < grid.size(); ++i) {
    const double d = grid.point(i) - center;
    f[i] = amplitude * std::exp(-d * d / (4.0 * sigma * sigma));
  }
  return SeedProfile{std::move(f)};
}

SeedProfile SeedProfile::point(const ModeGrid& grid, double k0, cplx weight) {
  Field1D f(grid);
  f[grid.nearest_index(k0)] = weight / grid.spacing();
  return SeedProfile{std::move(f)};
}

namespace {

void require_same_grid(const ModeGrid& a, const ModeGrid& b, const char* what) {
  if (!(a == b)) fail(ErrorKind::kInvalidArgument, what);
}

void require_mode_index(const SchmidtData& s, int k_index) {
  if (s.rank() == 0) fail(ErrorKind::kInvalidArgument, "empty Schmidt decomposition");
  if (k_index < 0 || k_index >= s.psi.front().size()) fail(ErrorKind::kOutOfRange, "signal index out of range");
}

// <a_s(k)> = sum_n psi_n(k) conj(beta_n) sinh(g sqrt(lambda_n)).
std::vector<cplx> signal_mean(const SchmidtData& s, double gain, const std::vector<cplx>& beta) {
  const int n_k = s.psi.front().size();
  std::vector<cplx> mean(static_cast<std::size_t>(n_k));
  for (int n = 0; n < s.rank(); ++n) {
    const cplx c = std::conj(beta[static_cast<std::size_t>(n)]) * std::sinh(gain * s.sqrt_lambdas[static_cast<std::size_t>(n)]);
    const auto& psi = s.psi[static_cast<std::size_t>(n)];
    for (int k = 0; k < n_k; ++k) mean[static_cast<std::size_t>(k)] += psi[k] * c;
  }
  return mean;
}

}  // namespace

std::vector<cplx> seed_projections(const SchmidtData& s, const Field1D& alpha) {
  std::vector<cplx> beta;
  beta.reserve(s.phi.size());
  for (const auto& phi : s.phi) beta.push_back(inner_product(phi, alpha));
  return beta;
}

double spontaneous_spectrum(const SchmidtData& s, double gain, int k_index) {
  require_mode_index(s, k_index);
  double acc = 0.0;
  for (int n = 0; n < s.rank(); ++n) {
    const double sh = std::sinh(gain * s.sqrt_lambdas[static_cast<std::size_t>(n)]);
    acc += std::norm(s.psi[static_cast<std::size_t>(n)][k_index]) * sh * sh;
  }
  return acc;
}

double stimulated_spectrum(const SchmidtData& s, double gain, const SeedProfile& seed, int k_index) {
  require_mode_index(s, k_index);
  require_same_grid(s.phi.front().grid, seed.alpha.grid, "seed grid does not match the idler grid");
  const auto beta = seed_projections(s, seed.alpha);
  cplx seeded{0.0, 0.0};
  for (int n = 0; n < s.rank(); ++n) {
    seeded += std::conj(beta[static_cast<std::size_t>(n)]) * s.psi[static_cast<std::size_t>(n)][k_index] *
              std::sinh(gain * s.sqrt_lambdas[static_cast<std::size_t>(n)]);
  }
  return spontaneous_spectrum(s, gain, k_index) + std::norm(seeded);
}

std::vector<double> stimulated_spectrum(const SchmidtData& s, double gain, const SeedProfile& seed) {
  if (s.rank() == 0) fail(ErrorKind::kInvalidArgument, "empty Schmidt decomposition");
  require_same_grid(s.phi.front().grid, seed.alpha.grid, "seed grid does not match the idler grid");
  const auto beta = seed_projections(s, seed.alpha);
  const auto mean = signal_mean(s, gain, beta);
  std::vector<double> out(mean.size());
  for (std::size_t k = 0; k < mean.size(); ++k) {
    out[k] = spontaneous_spectrum(s, gain, static_cast<int>(k)) + std::norm(mean[k]);
  }
  return out;
}

double total_signal_photons(const SchmidtData& s, double gain, const SeedProfile& seed) {
  if (s.rank() == 0) return 0.0;
  require_same_grid(s.phi.front().grid, seed.alpha.grid, "seed grid does not match the idler grid");
  const auto beta = seed_projections(s, seed.alpha);
  double acc = 0.0;
  for (int n = 0; n < s.rank(); ++n) {
    const double sh = std::sinh(gain * s.sqrt_lambdas[static_cast<std::size_t>(n)]);
    acc += sh * sh * (1.0 + std::norm(beta[static_cast<std::size_t>(n)]));
  }
  return acc;
}

double lowgain_stimulated_spectrum(const Field2D& kernel, double gain, const SeedProfile& seed, int k_index) {
  require_same_grid(kernel.grid_i(), seed.alpha.grid, "seed grid does not match the idler grid");
  if (k_index < 0 || k_index >= kernel.rows()) fail(ErrorKind::kOutOfRange, "signal index out of range");
  cplx acc{0.0, 0.0};
  for (int j = 0; j < kernel.cols(); ++j) acc += kernel(k_index, j) * std::conj(seed.alpha[j]);
  return std::norm(gain * acc * kernel.grid_i().spacing());
}

double lowgain_stimulated_spectrum(const JointAmplitude& jsa, double gain, const SeedProfile& seed, int k_index) {
  return lowgain_stimulated_spectrum(effective_kernel(jsa), gain, seed, k_index);
}

double sipe_limit_spectrum(const Field2D& kernel, double gain, double seed_center, double seed_intensity,
                           int k_index) {
  const int j = kernel.grid_i().nearest_index(seed_center);
  if (k_index < 0 || k_index >= kernel.rows()) fail(ErrorKind::kOutOfRange, "signal index out of range");
  return gain * gain * seed_intensity * std::norm(kernel(k_index, j));
}

double sipe_limit_spectrum(const JointAmplitude& jsa, double gain, double seed_center, double seed_intensity,
                           int k_index) {
  return sipe_limit_spectrum(jsa.kernel, gain, seed_center, seed_intensity, k_index);
}

double interferometric_signal_exact(const SchmidtData& s, double gain, const SeedProfile& seed,
                                    const InterferometerSettings& settings) {
  if (s.rank() == 0) fail(ErrorKind::kInvalidArgument, "empty Schmidt decomposition");
  const ModeGrid& grid = s.psi.front().grid;
  require_same_grid(grid, s.phi.front().grid, "interferometric detection needs equal signal and idler grids");
  require_same_grid(grid, seed.alpha.grid, "seed grid does not match the idler grid");

  // Seed delayed before the interaction.
  Field1D delayed = seed.alpha;
  for (int k = 0; k < grid.size(); ++k) delayed[k] *= std::polar(1.0, -grid.point(k) * settings.q_sigma);
  const auto beta = seed_projections(s, delayed);

  const auto signal = signal_mean(s, gain, beta);
  // <a_i(k)> = alpha'(k) + sum_m phi_m(k) beta_m (cosh(g sqrt(lambda_m)) - 1); the
  // part of alpha' outside the retained Schmidt modes passes through unchanged.
  std::vector<cplx> idler(delayed.values);
  for (int m = 0; m < s.rank(); ++m) {
    const double x = gain * s.sqrt_lambdas[static_cast<std::size_t>(m)];
    // cosh(x) - 1 = 2 sinh^2(x/2), free of cancellation at small x.
    const double sh = std::sinh(0.5 * x);
    const cplx c = beta[static_cast<std::size_t>(m)] * (2.0 * sh * sh);
    const auto& phi = s.phi[static_cast<std::size_t>(m)];
    for (int k = 0; k < grid.size(); ++k) idler[static_cast<std::size_t>(k)] += phi[k] * c;
  }

  cplx acc{0.0, 0.0};
  for (int k = 0; k < grid.size(); ++k) {
    const cplx phase = std::polar(1.0, settings.quadrature_theta - grid.point(k) * settings.q_eta);
    acc += std::conj(signal[static_cast<std::size_t>(k)]) * idler[static_cast<std::size_t>(k)] * phase;
  }
  return 2.0 * (acc * grid.spacing()).real();
}

cplx interferometric_complex_lowgain(const Field2D& kernel, double gain, const SeedProfile& seed, double q_sigma,
                                     double q_eta) {
  const ModeGrid& gs = kernel.grid_s();
  const ModeGrid& gi = kernel.grid_i();
  require_same_grid(gs, gi, "interferometric detection needs equal signal and idler grids");
  require_same_grid(gi, seed.alpha.grid, "seed grid does not match the idler grid");

  std::vector<cplx> idler_weight(static_cast<std::size_t>(gi.size()));
  for (int j = 0; j < gi.size(); ++j) {
    idler_weight[static_cast<std::size_t>(j)] = std::conj(seed.alpha[j]) * std::polar(1.0, gi.point(j) * q_sigma);
  }
  cplx acc{0.0, 0.0};
  for (int i = 0; i < gs.size(); ++i) {
    cplx row{0.0, 0.0};
    for (int j = 0; j < gi.size(); ++j) row += kernel(i, j) * idler_weight[static_cast<std::size_t>(j)];
    acc += row * std::conj(seed.alpha[i]) * std::polar(1.0, gs.point(i) * (q_sigma + q_eta));
  }
  return gain * acc * kernel.cell_area();
}

double interferometric_signal_lowgain(const Field2D& kernel, double gain, const SeedProfile& seed,
                                      const InterferometerSettings& settings) {
  const cplx z = interferometric_complex_lowgain(kernel, gain, seed, settings.q_sigma, settings.q_eta);
  return 2.0 * (std::polar(1.0, -settings.quadrature_theta) * z).real();
}

double interferometric_signal_lowgain(const JointAmplitude& jsa, double gain, const SeedProfile& seed,
                                      const InterferometerSettings& settings) {
  return interferometric_signal_lowgain(effective_kernel(jsa), gain, seed, settings);
}

}  // namespace setomo
