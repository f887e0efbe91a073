#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "setomo/errors.hpp"

namespace setomo {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Uniform midpoint-sampled grid over one beam's mode variable:
//   k_i = center - span/2 + (i + 1/2) * spacing,  spacing = span / n.
class ModeGrid {
 public:
  ModeGrid(double center, double span, int n_points);

  double center() const noexcept { return center_; }
  double span() const noexcept { return span_; }
  double spacing() const noexcept { return spacing_; }
  int size() const noexcept { return n_; }

  double point(int i) const noexcept { return center_ - 0.5 * span_ + (i + 0.5) * spacing_; }
  std::vector<double> points() const;

  // Cell edges of the first and last sample.
  double lower() const noexcept { return center_ - 0.5 * span_; }
  double upper() const noexcept { return center_ + 0.5 * span_; }

  // Index of the sample nearest to x; out-of-range if x lies outside [lower, upper].
  int nearest_index(double x) const;

  friend bool operator==(const ModeGrid&, const ModeGrid&) = default;

 private:
  double center_;
  double spacing_;
  double span_;
  int n_;
};

ModeGrid make_grid(double center, double span, int n_points);

// Grid of the conjugate variable: same size, spacing 2*pi/(n * spacing).
ModeGrid conjugate_grid(const ModeGrid& grid, double center = 0.0);

struct Field1D {
  ModeGrid grid;
  std::vector<cplx> values;

  explicit Field1D(const ModeGrid& g) : grid(g), values(static_cast<std::size_t>(g.size())) {}
  Field1D(const ModeGrid& g, std::vector<cplx> v);

  int size() const noexcept { return grid.size(); }
  cplx& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
  const cplx& operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
};

// Row-major complex kernel, signal index outer.
class Field2D {
 public:
  Field2D(const ModeGrid& grid_s, const ModeGrid& grid_i);
  Field2D(const ModeGrid& grid_s, const ModeGrid& grid_i, std::vector<cplx> values);

  const ModeGrid& grid_s() const noexcept { return grid_s_; }
  const ModeGrid& grid_i() const noexcept { return grid_i_; }
  int rows() const noexcept { return grid_s_.size(); }
  int cols() const noexcept { return grid_i_.size(); }

  cplx& operator()(int i, int j) { return values_[index(i, j)]; }
  const cplx& operator()(int i, int j) const { return values_[index(i, j)]; }

  std::span<cplx> values() noexcept { return values_; }
  std::span<const cplx> values() const noexcept { return values_; }

  // Area element dk * dk'.
  double cell_area() const noexcept { return grid_s_.spacing() * grid_i_.spacing(); }

  bool same_grids(const Field2D& other) const noexcept {
    return grid_s_ == other.grid_s_ && grid_i_ == other.grid_i_;
  }

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(grid_i_.size()) +
           static_cast<std::size_t>(j);
  }

  ModeGrid grid_s_;
  ModeGrid grid_i_;
  std::vector<cplx> values_;
};

// Riemann sum of conj(a) * b * dk.
cplx inner_product(const Field1D& a, const Field1D& b);

// Riemann sum of conj(a) * b * dk dk'.
cplx inner_product(const Field2D& a, const Field2D& b);

// Sum of |f|^2 dk dk'.
double squared_norm(const Field2D& f);

// Two-dimensional Fourier sum with phases referenced to true grid coordinates:
//   out(q_m, q'_n) = sum_ij f(k_i, k'_j) exp(i s_s q_m k_i) exp(i s_i q'_n k'_j) w_s w_i
// where w = dk for sign +1 and w = dk / (2 pi) for sign -1, so that (+,+) followed
// by (-,-) onto the original grids is the identity. Output grids must have the
// input's size and spacing 2 pi / (n dk).
Field2D dft2(const Field2D& f, int sign_s, int sign_i, const ModeGrid& out_s, const ModeGrid& out_i);

// Same, onto conjugate grids centred at zero.
Field2D dft2(const Field2D& f, int sign_s, int sign_i);

}  // namespace setomo
