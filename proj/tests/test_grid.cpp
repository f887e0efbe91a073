#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "setomo/grid.hpp"
#include "setomo/io.hpp"

namespace setomo {
namespace {

Field2D random_field(const ModeGrid& gs, const ModeGrid& gi, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Field2D f(gs, gi);
  for (cplx& v : f.values()) v = cplx(n(eng), n(eng));
  return f;
}

double max_abs_diff(const Field2D& a, const Field2D& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

TEST(ModeGrid, MidpointPoints) {
  const ModeGrid g = make_grid(0.0, 2.0, 2);
  EXPECT_DOUBLE_EQ(g.point(0), -0.5);
  EXPECT_DOUBLE_EQ(g.point(1), 0.5);
  EXPECT_DOUBLE_EQ(g.spacing(), 1.0);

  const ModeGrid h = make_grid(5.0, 1.0, 4);
  const double want[] = {4.625, 4.875, 5.125, 5.375};
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(h.point(i), want[i]);

  const ModeGrid fine = make_grid(0.0, 10.0, 1000);
  EXPECT_NEAR(fine.spacing(), 0.01, 1e-15);
  EXPECT_NEAR(fine.point(0), -4.995, 1e-12);
}

TEST(ModeGrid, StoredSpanIsSpacingTimesCount) {
  for (double span : {0.1, 1.0 / 3.0, 7.7, 24.0}) {
    for (int n : {2, 3, 17, 64, 1000}) {
      const ModeGrid g(0.3, span, n);
      EXPECT_EQ(g.spacing() * n, g.span());
      for (int i = 1; i < n; ++i) EXPECT_GT(g.point(i), g.point(i - 1));
    }
  }
}

TEST(ModeGrid, RejectsBadArguments) {
  EXPECT_THROW(ModeGrid(0.0, 0.0, 4), Error);
  EXPECT_THROW(ModeGrid(0.0, -1.0, 4), Error);
  EXPECT_THROW(ModeGrid(0.0, 1.0, 1), Error);
  try {
    ModeGrid(0.0, 1.0, 1);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
  }
}

TEST(ModeGrid, NearestIndex) {
  const ModeGrid g(0.0, 4.0, 4);
  EXPECT_EQ(g.nearest_index(-1.9), 0);
  EXPECT_EQ(g.nearest_index(0.1), 2);
  EXPECT_EQ(g.nearest_index(2.0), 3);
  EXPECT_THROW(g.nearest_index(2.1), Error);
}

TEST(InnerProduct, ConstantOnSpanTwo) {
  const ModeGrid g(0.0, 2.0, 10);
  const Field1D one(g, std::vector<cplx>(10, cplx(1.0, 0.0)));
  const cplx ip = inner_product(one, one);
  EXPECT_NEAR(ip.real(), 2.0, 1e-14);
  EXPECT_NEAR(ip.imag(), 0.0, 1e-14);
}

TEST(InnerProduct, EvenOddOrthogonal) {
  const ModeGrid g(0.0, 6.0, 31);
  Field1D even(g), odd(g);
  for (int i = 0; i < g.size(); ++i) {
    even[i] = std::exp(-g.point(i) * g.point(i));
    odd[i] = g.point(i) * std::exp(-0.5 * g.point(i) * g.point(i));
  }
  EXPECT_LT(std::abs(inner_product(even, odd)), 1e-12);
}

TEST(InnerProduct, NormalizedGaussianAgainstFineQuadrature) {
  // Reference: the same integral at 4x density.
  auto gaussian_norm = [](int n) {
    const ModeGrid g(0.0, 24.0, n);
    Field1D a(g);
    const double sigma = 1.3;
    const double c = std::pow(2.0 * kPi * sigma * sigma, -0.25);
    for (int i = 0; i < n; ++i) a[i] = c * std::exp(-g.point(i) * g.point(i) / (4.0 * sigma * sigma));
    return inner_product(a, a).real();
  };
  EXPECT_NEAR(gaussian_norm(64), gaussian_norm(256), 1e-10);
  EXPECT_NEAR(gaussian_norm(64), 1.0, 1e-10);
}

TEST(InnerProduct, GridMismatch) {
  const Field1D a(ModeGrid(0.0, 1.0, 4));
  const Field1D b(ModeGrid(0.0, 2.0, 4));
  EXPECT_THROW(inner_product(a, b), Error);
}

TEST(Dft2, DeltaTransformsToPurePhase) {
  const ModeGrid gs(0.5, 6.0, 12);
  const ModeGrid gi(-1.0, 4.0, 10);
  Field2D f(gs, gi);
  const int i0 = 3, j0 = 7;
  f(i0, j0) = 1.0 / f.cell_area();
  const Field2D F = dft2(f, 1, 1);
  for (int m = 0; m < F.rows(); ++m) {
    for (int n = 0; n < F.cols(); ++n) {
      const cplx want = std::polar(1.0, F.grid_s().point(m) * gs.point(i0) + F.grid_i().point(n) * gi.point(j0));
      EXPECT_NEAR(std::abs(F(m, n) - want), 0.0, 1e-12);
    }
  }
}

TEST(Dft2, SeparableGaussianMatchesContinuum) {
  const double sigma = 1.0;
  const ModeGrid g(0.0, 24.0, 64);
  Field2D f(g, g);
  for (int i = 0; i < g.size(); ++i) {
    for (int j = 0; j < g.size(); ++j) {
      const double a = g.point(i), b = g.point(j);
      f(i, j) = std::exp(-(a * a + b * b) / (2.0 * sigma * sigma));
    }
  }
  const Field2D F = dft2(f, 1, 1);
  double worst = 0.0;
  const double peak = 2.0 * kPi * sigma * sigma;
  for (int m = 0; m < F.rows(); ++m) {
    for (int n = 0; n < F.cols(); ++n) {
      const double q = F.grid_s().point(m), p = F.grid_i().point(n);
      const double want = peak * std::exp(-sigma * sigma * (q * q + p * p) / 2.0);
      worst = std::max(worst, std::abs(F(m, n) - want) / peak);
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Dft2, RoundTripAndParseval) {
  const ModeGrid gs(1.2, 5.0, 16);
  const ModeGrid gi(-0.4, 9.0, 21);
  const Field2D f = random_field(gs, gi, 5);
  const Field2D F = dft2(f, 1, 1);
  const Field2D back = dft2(F, -1, -1, gs, gi);
  EXPECT_LT(max_abs_diff(f, back), 1e-10);
  const double lhs = squared_norm(f);
  const double rhs = squared_norm(F) / (kTwoPi * kTwoPi);
  EXPECT_NEAR(lhs, rhs, 1e-10 * lhs);
}

TEST(Dft2, Linear) {
  const ModeGrid g(0.0, 4.0, 9);
  const Field2D a = random_field(g, g, 1);
  const Field2D b = random_field(g, g, 2);
  const cplx ca(0.3, -1.1), cb(2.0, 0.5);
  Field2D mix(g, g);
  for (std::size_t i = 0; i < mix.values().size(); ++i) mix.values()[i] = ca * a.values()[i] + cb * b.values()[i];
  const Field2D fa = dft2(a, 1, -1), fb = dft2(b, 1, -1), fm = dft2(mix, 1, -1);
  Field2D want(fa.grid_s(), fa.grid_i());
  for (std::size_t i = 0; i < want.values().size(); ++i) want.values()[i] = ca * fa.values()[i] + cb * fb.values()[i];
  EXPECT_LT(max_abs_diff(fm, want), 1e-12);
}

TEST(Dft2, ShiftByOneStepIsPhase) {
  const ModeGrid g(0.0, 6.0, 12);
  const ModeGrid shifted(g.spacing(), 6.0, 12);
  const Field2D f = random_field(g, g, 9);
  const Field2D fs(shifted, g, std::vector<cplx>(f.values().begin(), f.values().end()));
  const Field2D F = dft2(f, 1, 1);
  const Field2D Fs = dft2(fs, 1, 1);
  for (int m = 0; m < F.rows(); ++m) {
    const cplx phase = std::polar(1.0, F.grid_s().point(m) * g.spacing());
    for (int n = 0; n < F.cols(); ++n) EXPECT_LT(std::abs(Fs(m, n) - phase * F(m, n)), 1e-12);
  }
}

TEST(Dft2, RejectsNonConjugateGrid) {
  const ModeGrid g(0.0, 4.0, 8);
  const Field2D f(g, g);
  EXPECT_THROW(dft2(f, 1, 1, ModeGrid(0.0, 3.0, 8), conjugate_grid(g)), Error);
  EXPECT_THROW(dft2(f, 1, 1, ModeGrid(0.0, kTwoPi / g.spacing(), 9), conjugate_grid(g)), Error);
  EXPECT_THROW(dft2(f, 2, 1), Error);
}

TEST(Io, Field2DRoundTripIsExact) {
  const ModeGrid gs(0.1, 3.0, 5);
  const ModeGrid gi(-0.2, 2.0, 3);
  const Field2D f = random_field(gs, gi, 11);
  const json j = json::parse(dump_json(field2d_to_json(f)));
  const Field2D back = field2d_from_json(j);
  ASSERT_TRUE(back.same_grids(f));
  for (std::size_t i = 0; i < f.values().size(); ++i) EXPECT_EQ(back.values()[i], f.values()[i]);
}

TEST(Io, SeventeenDigitsAndShortest) {
  const std::string text = dump_json(json{{"x", 0.1}});
  EXPECT_NE(text.find("0.10000000000000001"), std::string::npos);
  EXPECT_EQ(format_shortest(0.1), "0.1");
  for (double x : {1.0 / 3.0, 1e-300, -2.5e17, 123456.789}) EXPECT_EQ(std::stod(format_shortest(x)), x);
}

}  // namespace
}  // namespace setomo
