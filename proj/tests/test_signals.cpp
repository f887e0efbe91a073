#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "setomo/oracle.hpp"
#include "setomo/schmidt.hpp"
#include "setomo/signals.hpp"

namespace setomo {
namespace {

// One mode concentrated on the first sample of a two-point unit-spacing grid.
SchmidtData single_mode() {
  const ModeGrid g(0.0, 2.0, 2);
  SchmidtData s;
  s.sqrt_lambdas = {1.0};
  s.psi = {Field1D(g, {1.0, 0.0})};
  s.phi = {Field1D(g, {1.0, 0.0})};
  return s;
}

JointAmplitude random_square(int n, std::mt19937_64& eng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const ModeGrid g(0.2, 3.0, n);
  Field2D f(g, g);
  for (cplx& v : f.values()) v = cplx(nd(eng), nd(eng));
  return normalize(f);
}

SeedProfile random_seed(const ModeGrid& g, std::mt19937_64& eng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  SeedProfile s = SeedProfile::zero(g);
  for (cplx& a : s.alpha.values) a = cplx(nd(eng), nd(eng));
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

TEST(Spontaneous, ClosedForms) {
  const SchmidtData s = single_mode();
  EXPECT_EQ(spontaneous_spectrum(s, 0.0, 0), 0.0);
  EXPECT_NEAR(spontaneous_spectrum(s, 0.5, 0), 0.2715403, 1e-7);
}

TEST(Spontaneous, IntegratesToModeSum) {
  const JointAmplitude j = fixtures::chirped_gaussian(32);
  const SchmidtData s = schmidt_decompose(j);
  const double gain = 0.8;
  double integral = 0.0;
  for (int k = 0; k < j.kernel.rows(); ++k) integral += spontaneous_spectrum(s, gain, k) * j.kernel.grid_s().spacing();
  double want = 0.0;
  for (double x : s.sqrt_lambdas) want += std::pow(std::sinh(gain * x), 2);
  EXPECT_NEAR(integral, want, 1e-10);
}

TEST(Stimulated, ZeroSeedIsSpontaneous) {
  const JointAmplitude j = fixtures::chirped_gaussian(24);
  const SchmidtData s = schmidt_decompose(j);
  const SeedProfile zero = SeedProfile::zero(j.kernel.grid_i());
  for (int k = 0; k < 24; ++k) EXPECT_EQ(stimulated_spectrum(s, 0.6, zero, k), spontaneous_spectrum(s, 0.6, k));
}

TEST(Stimulated, SeededPartQuadraticInSeed) {
  const JointAmplitude j = fixtures::chirped_gaussian(24);
  const SchmidtData s = schmidt_decompose(j);
  const SeedProfile seed = SeedProfile::gaussian(j.kernel.grid_i(), cplx(0.4, 1.0), 0.5, 2.0);
  const SeedProfile doubled = seed.scaled(2.0);
  for (int k = 0; k < 24; k += 3) {
    const double base = stimulated_spectrum(s, 0.4, seed, k) - spontaneous_spectrum(s, 0.4, k);
    const double twice = stimulated_spectrum(s, 0.4, doubled, k) - spontaneous_spectrum(s, 0.4, k);
    EXPECT_NEAR(twice, 4.0 * base, 1e-12 * std::max(1.0, twice));
  }
}

TEST(Stimulated, VectorMatchesScalar) {
  const JointAmplitude j = fixtures::chirped_gaussian(16);
  const SchmidtData s = schmidt_decompose(j);
  const SeedProfile seed = SeedProfile::flat(j.kernel.grid_i(), 1.3);
  const auto v = stimulated_spectrum(s, 0.9, seed);
  for (int k = 0; k < 16; ++k) EXPECT_NEAR(v[static_cast<std::size_t>(k)], stimulated_spectrum(s, 0.9, seed, k), 1e-13);
}

TEST(TotalPhotons, ClosedFormsAndCompleteness) {
  SchmidtData s = single_mode();
  // beta_0 = <phi_0, alpha> = alpha(k_0) * dk = 10.
  SeedProfile seed{Field1D(s.phi[0].grid, {10.0, 0.0})};
  EXPECT_EQ(total_signal_photons(s, 0.0, seed), 0.0);
  EXPECT_NEAR(total_signal_photons(s, 0.1, seed), std::pow(std::sinh(0.1), 2) * 101.0, 1e-12);
  EXPECT_NEAR(total_signal_photons(s, 0.1, seed), 1.013372, 1e-6);

  std::mt19937_64 eng(3);
  const JointAmplitude j = random_square(6, eng);
  const SchmidtData full = schmidt_decompose(j, 0.0);
  const SeedProfile rs = random_seed(j.kernel.grid_i(), eng);
  const auto spectrum = stimulated_spectrum(full, 1.1, rs);
  double integral = 0.0;
  for (double x : spectrum) integral += x * j.kernel.grid_s().spacing();
  EXPECT_NEAR(integral, total_signal_photons(full, 1.1, rs), 1e-10 * integral);
}

TEST(LowGain, FlatAndZeroSeed) {
  const JointAmplitude j = fixtures::chirped_gaussian(20);
  const ModeGrid& g = j.kernel.grid_i();
  const double gain = 0.01;
  for (int k = 0; k < 20; k += 4) {
    cplx marginal{0.0, 0.0};
    for (int b = 0; b < 20; ++b) marginal += j.kernel(k, b) * g.spacing();
    EXPECT_NEAR(lowgain_stimulated_spectrum(j, gain, SeedProfile::flat(g, 1.0), k), gain * gain * std::norm(marginal),
                1e-18);
    EXPECT_EQ(lowgain_stimulated_spectrum(j, gain, SeedProfile::zero(g), k), 0.0);
  }
}

TEST(LowGain, SeededErrorScalesAsGainSquared) {
  const JointAmplitude j = fixtures::chirped_gaussian(32);
  const SchmidtData s = schmidt_decompose(j);
  const SeedProfile seed = SeedProfile::gaussian(j.kernel.grid_i(), 1.0, 0.3, 2.0);
  const int k = 15;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = 7;
  for (int p = 0; p < n; ++p) {
    const double g = 1e-3 * std::pow(100.0, p / double(n - 1));
    const double seeded = stimulated_spectrum(s, g, seed, k) - spontaneous_spectrum(s, g, k);
    const double err = std::abs(lowgain_stimulated_spectrum(j, g, seed, k) - seeded) / seeded;
    sx += std::log(g);
    sy += std::log(err);
    sxx += std::log(g) * std::log(g);
    sxy += std::log(g) * std::log(err);
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_NEAR(slope, 2.0, 0.1);
}

TEST(Sipe, NarrowbandSeedAgreesWithLowGain) {
  const JointAmplitude j = fixtures::chirped_gaussian(48);
  const ModeGrid& g = j.kernel.grid_i();
  const double k0 = -1.1;
  const SeedProfile seed = SeedProfile::point(g, k0, cplx(0.0, 30.0));
  for (int k = 0; k < 48; ++k) {
    const double lg = lowgain_stimulated_spectrum(j, 0.02, seed, k);
    const double sp = sipe_limit_spectrum(j, 0.02, k0, seed.integrated_intensity(), k);
    EXPECT_NEAR(sp, lg, 0.02 * lg + 1e-300);
  }
}

TEST(Sipe, ScalingZerosAndRange) {
  const ModeGrid g(0.0, 4.0, 4);
  Field2D f(g, g);
  f(0, 0) = 1.0;
  f(1, 1) = 1.0;
  const JointAmplitude j = normalize(f);
  EXPECT_NEAR(sipe_limit_spectrum(j, 0.2, 0.5, 3.0, 1), 4.0 * sipe_limit_spectrum(j, 0.1, 0.5, 3.0, 1), 1e-15);
  EXPECT_EQ(sipe_limit_spectrum(j, 0.2, 0.5, 3.0, 2), 0.0);
  EXPECT_THROW(sipe_limit_spectrum(j, 0.2, 2.5, 3.0, 1), Error);
}

TEST(Interferometric, VanishesWithoutGainOrSeed) {
  const JointAmplitude j = fixtures::chirped_gaussian(16);
  const SchmidtData s = schmidt_decompose(j);
  const InterferometerSettings st{0.3, -0.2, 0.4};
  EXPECT_EQ(interferometric_signal_exact(s, 0.0, SeedProfile::flat(j.kernel.grid_i(), 1.0), st), 0.0);
  EXPECT_EQ(interferometric_signal_exact(s, 0.5, SeedProfile::zero(j.kernel.grid_i()), st), 0.0);
}

TEST(Interferometric, MatchesOracleOnRandomInstances) {
  std::mt19937_64 eng(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const JointAmplitude j = random_square(4, eng);
    const SeedProfile seed = random_seed(j.kernel.grid_i(), eng);
    const SchmidtData s = schmidt_decompose(j);
    const double gain = trial % 2 == 0 ? 0.4 : 0.3;
    const GaussianTransform t = build_transform(j.kernel, gain);
    const OracleExpectations ox = oracle_expectations(t, seed_displacement(seed, 4));
    const InterferometerSettings st{u(eng), u(eng), u(eng)};
    EXPECT_LT(rel(interferometric_signal_exact(s, gain, seed, st), ox.n_diff_interf(st)), 1e-9);
    const auto spectrum = stimulated_spectrum(s, gain, seed);
    for (int k = 0; k < 4; ++k) EXPECT_LT(rel(spectrum[static_cast<std::size_t>(k)], ox.signal_spectrum()[static_cast<std::size_t>(k)]), 1e-9);
  }
}

TEST(Interferometric, LowGainAtOriginIsTwiceKernelOverlap) {
  const ModeGrid g(0.0, 10.0, 12);
  Field2D f(g, g);
  for (int a = 0; a < 12; ++a) {
    for (int b = 0; b < 12; ++b) f(a, b) = std::exp(-0.1 * std::pow(g.point(a) + 0.5 * g.point(b), 2));
  }
  const JointAmplitude j = normalize(f);
  const SeedProfile seed = SeedProfile::gaussian(g, 1.7, 0.5, 1.5);
  double want = 0.0;
  for (int a = 0; a < 12; ++a) {
    for (int b = 0; b < 12; ++b) want += j.kernel(a, b).real() * seed.alpha[a].real() * seed.alpha[b].real();
  }
  want *= 2.0 * 0.05 * j.kernel.cell_area();
  EXPECT_NEAR(interferometric_signal_lowgain(j, 0.05, seed, {0.0, 0.0, 0.0}), want, 1e-12 * std::abs(want));
}

TEST(Interferometric, FlatSeedSamplesTransform) {
  const JointAmplitude j = fixtures::chirped_gaussian(16);
  const double b = 1.4, gain = 0.01;
  const SeedProfile seed = SeedProfile::flat(j.kernel.grid_i(), b);
  const Field2D lt = dft2(j.kernel, 1, 1);
  for (int m = 0; m < lt.rows(); m += 3) {
    for (int n = 0; n < lt.cols(); n += 5) {
      // Signal axis carries q_sigma + q_eta, idler axis q_sigma.
      const double q1 = lt.grid_s().point(m), q2 = lt.grid_i().point(n);
      const InterferometerSettings st{q2, q1 - q2, 0.0};
      const double want = 2.0 * (gain * b * b * lt(m, n)).real();
      EXPECT_NEAR(interferometric_signal_lowgain(j, gain, seed, st), want, 1e-10);
    }
  }
}

TEST(Interferometric, QuadratureCompleteness) {
  const JointAmplitude j = fixtures::chirped_gaussian(16);
  const SeedProfile seed = SeedProfile::gaussian(j.kernel.grid_i(), cplx(1.0, 0.5), -0.3, 2.5);
  for (double q : {-1.0, 0.2, 2.0}) {
    const cplx z = interferometric_complex_lowgain(j.kernel, 0.03, seed, q, 0.7 * q);
    const double m0 = interferometric_signal_lowgain(j, 0.03, seed, {q, 0.7 * q, 0.0});
    const double m1 = interferometric_signal_lowgain(j, 0.03, seed, {q, 0.7 * q, 0.5 * kPi});
    EXPECT_NEAR(m0, 2.0 * z.real(), 1e-12);
    EXPECT_NEAR(m1, 2.0 * z.imag(), 1e-12);
  }
}

TEST(Interferometric, LowGainErrorScalesAsGainCubed) {
  const JointAmplitude j = fixtures::chirped_gaussian(24);
  const SchmidtData s = schmidt_decompose(j);
  const SeedProfile seed = SeedProfile::flat(j.kernel.grid_i(), 1.0);
  const InterferometerSettings st{0.4, -0.3, 0.2};
  const double g1 = 1e-3, g2 = 1e-1;
  const double e1 = std::abs(interferometric_signal_exact(s, g1, seed, st) - interferometric_signal_lowgain(j, g1, seed, st));
  const double e2 = std::abs(interferometric_signal_exact(s, g2, seed, st) - interferometric_signal_lowgain(j, g2, seed, st));
  EXPECT_NEAR(std::log(e2 / e1) / std::log(g2 / g1), 3.0, 0.2);
}

TEST(Interferometric, UnequalGridsRejected) {
  const ModeGrid gs(0.0, 4.0, 4), gi(0.0, 5.0, 4);
  Field2D f(gs, gi);
  f(0, 0) = 1.0;
  const JointAmplitude j = normalize(f);
  const SeedProfile seed = SeedProfile::flat(gi, 1.0);
  EXPECT_THROW(interferometric_signal_lowgain(j, 0.1, seed, {0, 0, 0}), Error);
  EXPECT_THROW(interferometric_signal_exact(schmidt_decompose(j), 0.1, seed, {0, 0, 0}), Error);
}

TEST(Gauge, ModeRephasingLeavesSignalsUnchanged) {
  const JointAmplitude j = fixtures::chirped_gaussian(20);
  const SchmidtData s = schmidt_decompose(j);
  SchmidtData t = s;
  for (int n = 0; n < t.rank(); ++n) {
    const cplx u = std::polar(1.0, 0.37 * (n + 1));
    for (cplx& v : t.psi[n].values) v *= u;
    for (cplx& v : t.phi[n].values) v *= std::conj(u);
  }
  const SeedProfile seed = SeedProfile::gaussian(j.kernel.grid_i(), cplx(2.0, -1.0), 0.2, 1.8);
  const double gain = 0.6;
  const auto a = stimulated_spectrum(s, gain, seed);
  const auto b = stimulated_spectrum(t, gain, seed);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  const InterferometerSettings st{0.5, 0.1, 1.0};
  EXPECT_NEAR(interferometric_signal_exact(s, gain, seed, st), interferometric_signal_exact(t, gain, seed, st), 1e-12);
}

TEST(Gauge, GlobalKernelPhaseWithCompensatingCouplingPhase) {
  JointAmplitude j = fixtures::chirped_gaussian(16);
  JointAmplitude r = j;
  for (cplx& v : r.kernel.values()) v *= std::polar(1.0, 1.2);
  r.coupling.gain_phase = -1.2;
  const SeedProfile seed = SeedProfile::flat(j.kernel.grid_i(), 1.0);
  const InterferometerSettings st{0.3, 0.3, 0.0};
  EXPECT_NEAR(interferometric_signal_lowgain(j, 0.05, seed, st), interferometric_signal_lowgain(r, 0.05, seed, st),
              1e-12);
  // Direct detection ignores a global phase outright.
  const auto a = stimulated_spectrum(schmidt_decompose(j.kernel), 0.5, seed);
  const auto b = stimulated_spectrum(schmidt_decompose(r.kernel), 0.5, seed);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
}

}  // namespace
}  // namespace setomo
