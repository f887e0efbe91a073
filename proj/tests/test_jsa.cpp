#include <cmath>

#include <gtest/gtest.h>

#include "setomo/jsa.hpp"
#include "setomo/schmidt.hpp"

namespace setomo {
namespace {

ModeGrid sum_grid_for(const ModeGrid& g) {
  return ModeGrid(2.0 * g.center(), (2 * g.size() - 1) * g.spacing(), 2 * g.size() - 1);
}

TEST(Normalize, ScaleReported) {
  const ModeGrid g(0.0, 2.0, 4);
  Field2D f(g, g);
  for (cplx& v : f.values()) v = 2.0;  // 16 cells of area 1/4: norm^2 = 16
  const JointAmplitude j = normalize(f);
  EXPECT_NEAR(j.norm_factor, 0.25, 1e-15);
  EXPECT_NEAR(j.prenormalization_norm(), 4.0, 1e-14);
  EXPECT_NEAR(squared_norm(j.kernel), 1.0, 1e-12);
}

TEST(Normalize, Idempotent) {
  const ModeGrid g(0.0, 8.0, 16);
  const JointAmplitude once = gaussian_jsa(1.0, 2.0, 0.3, g, g);
  const JointAmplitude twice = normalize(once.kernel);
  EXPECT_NEAR(twice.norm_factor, 1.0, 1e-15);
  for (std::size_t i = 0; i < once.kernel.values().size(); ++i) {
    EXPECT_NEAR(std::abs(once.kernel.values()[i] - twice.kernel.values()[i]), 0.0, 1e-15);
  }
}

TEST(Normalize, ZeroKernelIsDegenerate) {
  const ModeGrid g(0.0, 1.0, 3);
  try {
    normalize(Field2D(g, g));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateKernel);
  }
}

TEST(GaussianJsa, UnitNormForAnyParameters) {
  const ModeGrid g(0.3, 10.0, 20);
  for (double sp : {0.5, 1.0, 2.0}) {
    for (double sm : {0.7, 3.0}) {
      for (double chirp : {0.0, 0.5, -2.0}) {
        EXPECT_NEAR(squared_norm(gaussian_jsa(sp, sm, chirp, g, g).kernel), 1.0, 1e-12);
      }
    }
  }
}

TEST(GaussianJsa, EqualWidthsAreSeparable) {
  const ModeGrid g(0.0, 20.0, 64);
  const SchmidtData s = schmidt_decompose(gaussian_jsa(1.5, 1.5, 0.0, g, g));
  EXPECT_NEAR(schmidt_number(s), 1.0, 1e-6);
}

TEST(GaussianJsa, GeometricSpectrum) {
  const ModeGrid g(0.0, 28.0, 128);
  const SchmidtData s = schmidt_decompose(gaussian_jsa(1.0, 3.0, 0.0, g, g));
  const auto l = s.lambdas();
  EXPECT_NEAR(l[0], 0.75, 1e-6);
  EXPECT_NEAR(l[1], 0.1875, 1e-6);
  EXPECT_NEAR(l[2] / l[1], 0.25, 1e-6);
}

TEST(GaussianJsa, RejectsNonPositiveWidths) {
  const ModeGrid g(0.0, 1.0, 4);
  EXPECT_THROW(gaussian_jsa(0.0, 1.0, 0.0, g, g), Error);
  EXPECT_THROW(gaussian_jsa(1.0, -1.0, 0.0, g, g), Error);
}

TEST(PumpPhaseMatch, FlatPumpSeparablePmIsSeparable) {
  const ModeGrid g(0.0, 16.0, 48);
  const PumpProfile pump = PumpProfile::flat(sum_grid_for(g));
  const auto pm = PhaseMatchingFunction::separable_gaussian(g, g, 1.0, 2.0);
  const SchmidtData s = schmidt_decompose(build_jsa_pump_phasematch(pump, pm));
  EXPECT_NEAR(schmidt_number(s), 1.0, 1e-6);
}

TEST(PumpPhaseMatch, GaussianPumpAndPmGiveDoubleGaussian) {
  const ModeGrid g(0.0, 20.0, 40);
  const PumpProfile pump = PumpProfile::gaussian(sum_grid_for(g), 0.0, 1.0, 0.5);
  const auto pm = PhaseMatchingFunction::gaussian_difference(g, g, 3.0);
  const JointAmplitude built = build_jsa_pump_phasematch(pump, pm);
  const JointAmplitude ref = gaussian_jsa(1.0, 3.0, 0.5, g, g);
  for (std::size_t i = 0; i < ref.kernel.values().size(); ++i) {
    EXPECT_NEAR(std::abs(built.kernel.values()[i] - ref.kernel.values()[i]), 0.0, 1e-12);
  }
}

TEST(PumpPhaseMatch, ZeroPumpIsDegenerate) {
  const ModeGrid g(0.0, 4.0, 8);
  PumpProfile pump = PumpProfile::flat(sum_grid_for(g));
  for (cplx& v : pump.amplitude.values) v = 0.0;
  const auto pm = PhaseMatchingFunction::gaussian_difference(g, g, 1.0);
  try {
    build_jsa_pump_phasematch(pump, pm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateKernel);
  }
}

TEST(PumpPhaseMatch, RescalingInvariance) {
  const ModeGrid g(0.0, 12.0, 24);
  const PumpProfile pump = PumpProfile::gaussian(sum_grid_for(g), 0.0, 1.2);
  const auto pm = PhaseMatchingFunction::gaussian_difference(g, g, 2.0);
  PumpProfile pump3 = pump;
  for (cplx& v : pump3.amplitude.values) v *= 3.0;
  auto pm2 = pm;
  for (cplx& v : pm2.values.values()) v *= cplx(0.0, 2.0);
  const JointAmplitude a = build_jsa_pump_phasematch(pump, pm);
  const JointAmplitude b = build_jsa_pump_phasematch(pump3, pm2);
  EXPECT_NEAR(b.prenormalization_norm(), 6.0 * a.prenormalization_norm(), 1e-12 * b.prenormalization_norm());
  // Up to the global phase i.
  for (std::size_t k = 0; k < a.kernel.values().size(); ++k) {
    EXPECT_NEAR(std::abs(b.kernel.values()[k] - cplx(0.0, 1.0) * a.kernel.values()[k]), 0.0, 1e-13);
  }
}

TEST(PumpProfile, OutOfRange) {
  const PumpProfile pump = PumpProfile::flat(ModeGrid(0.0, 2.0, 4));
  EXPECT_NO_THROW(pump.amplitude_at(1.0));
  EXPECT_THROW(pump.amplitude_at(1.5), Error);
}

TEST(CouplingParams, Invariants) {
  CouplingParams c{0.2, 0.0, 0.1, 2.0};
  EXPECT_NO_THROW(c.validate());
  c.pump_amp = 3.0;
  EXPECT_THROW(c.validate(), Error);
  CouplingParams neg{-0.1, 0.0, std::nullopt, std::nullopt};
  EXPECT_THROW(neg.validate(), Error);
}

TEST(JointAmplitudeJson, RoundTripWithMetadata) {
  const ModeGrid g(0.0, 6.0, 6);
  JointAmplitude j = gaussian_jsa(1.0, 2.0, 0.4, g, g);
  j.coupling = CouplingParams{0.3, 0.7, 0.1, 3.0};
  const JointAmplitude back = joint_amplitude_from_json(json::parse(dump_json(joint_amplitude_to_json(j))));
  EXPECT_EQ(back.norm_factor, j.norm_factor);
  EXPECT_EQ(back.coupling.gain, 0.3);
  EXPECT_EQ(back.coupling.gain_phase, 0.7);
  EXPECT_EQ(*back.coupling.chi, 0.1);
  EXPECT_EQ(*back.coupling.pump_amp, 3.0);
  for (std::size_t i = 0; i < j.kernel.values().size(); ++i) EXPECT_EQ(back.kernel.values()[i], j.kernel.values()[i]);
}

TEST(EffectiveKernel, AbsorbsGainPhase) {
  const ModeGrid g(0.0, 6.0, 6);
  JointAmplitude j = gaussian_jsa(1.0, 2.0, 0.0, g, g);
  j.coupling.gain_phase = 0.9;
  const Field2D k = effective_kernel(j);
  EXPECT_NEAR(std::arg(k(2, 3)), 0.9, 1e-14);
}

}  // namespace
}  // namespace setomo
