#include "setomo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace setomo {

ModeGrid::ModeGrid(double center, double span, int n_points) : center_(center), n_(n_points) {
  if (!std::isfinite(center) || !std::isfinite(span) || !(span > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "grid span must be positive and finite, got " + std::to_string(span));
  }
  if (n_points < 2) {
    fail(ErrorKind::kInvalidArgument, "grid needs at least 2 points, got " + std::to_string(n_points));
  }
  spacing_ = span / n_points;
  span_ = spacing_ * n_points;
}

std::vector<double> ModeGrid::points() const {
  std::vector<double> out(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = point(i);
  return out;
}

int ModeGrid::nearest_index(double x) const {
  if (!(x >= lower() && x <= upper())) {
    fail(ErrorKind::kOutOfRange, "coordinate " + std::to_string(x) + " outside grid [" +
                                     std::to_string(lower()) + ", " + std::to_string(upper()) + "]");
  }
  const int idx = static_cast<int>(std::floor((x - lower()) / spacing_));
  return std::clamp(idx, 0, n_ - 1);
}

ModeGrid make_grid(double center, double span, int n_points) { return ModeGrid(center, span, n_points); }

ModeGrid conjugate_grid(const ModeGrid& grid, double center) {
  return ModeGrid(center, kTwoPi / grid.spacing(), grid.size());
}

Field1D::Field1D(const ModeGrid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  if (values.size() != static_cast<std::size_t>(g.size())) {
    fail(ErrorKind::kInvalidArgument, "field length does not match grid size");
  }
}

Field2D::Field2D(const ModeGrid& grid_s, const ModeGrid& grid_i)
    : grid_s_(grid_s),
      grid_i_(grid_i),
      values_(static_cast<std::size_t>(grid_s.size()) * static_cast<std::size_t>(grid_i.size())) {}

Field2D::Field2D(const ModeGrid& grid_s, const ModeGrid& grid_i, std::vector<cplx> values)
    : grid_s_(grid_s), grid_i_(grid_i), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid_s.size()) * static_cast<std::size_t>(grid_i.size())) {
    fail(ErrorKind::kInvalidArgument, "kernel dimensions do not match grids");
  }
}

cplx inner_product(const Field1D& a, const Field1D& b) {
  if (!(a.grid == b.grid)) fail(ErrorKind::kInvalidArgument, "inner product on mismatched grids");
  cplx acc{0.0, 0.0};
  for (int i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc * a.grid.spacing();
}

cplx inner_product(const Field2D& a, const Field2D& b) {
  if (!a.same_grids(b)) fail(ErrorKind::kInvalidArgument, "inner product on mismatched grids");
  cplx acc{0.0, 0.0};
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t n = 0; n < va.size(); ++n) acc += std::conj(va[n]) * vb[n];
  return acc * a.cell_area();
}

double squared_norm(const Field2D& f) {
  double acc = 0.0;
  for (const cplx& v : f.values()) acc += std::norm(v);
  return acc * f.cell_area();
}

namespace {

using MatrixXcdR = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_conjugate(const ModeGrid& in, const ModeGrid& out, const char* axis) {
  const double expected = kTwoPi / (in.size() * in.spacing());
  if (out.size() != in.size() || std::abs(out.spacing() - expected) > 1e-12 * expected) {
    fail(ErrorKind::kInvalidArgument, std::string("dft2: output grid on ") + axis +
                                          " axis is not conjugate to the input grid");
  }
}

// Rows: output samples; columns: input samples.
Eigen::MatrixXcd fourier_matrix(const ModeGrid& in, const ModeGrid& out, int sign) {
  const double weight = sign > 0 ? in.spacing() : in.spacing() / kTwoPi;
  Eigen::MatrixXcd m(out.size(), in.size());
  for (int r = 0; r < out.size(); ++r) {
    const double q = out.point(r);
    for (int c = 0; c < in.size(); ++c) m(r, c) = std::polar(weight, sign * q * in.point(c));
  }
  return m;
}

}  // namespace

Field2D dft2(const Field2D& f, int sign_s, int sign_i, const ModeGrid& out_s, const ModeGrid& out_i) {
  if ((sign_s != 1 && sign_s != -1) || (sign_i != 1 && sign_i != -1)) {
    fail(ErrorKind::kInvalidArgument, "dft2 signs must be +1 or -1");
  }
  check_conjugate(f.grid_s(), out_s, "signal");
  check_conjugate(f.grid_i(), out_i, "idler");

  const Eigen::MatrixXcd fs = fourier_matrix(f.grid_s(), out_s, sign_s);
  const Eigen::MatrixXcd fi = fourier_matrix(f.grid_i(), out_i, sign_i);
  const Eigen::Map<const MatrixXcdR> in(f.values().data(), f.rows(), f.cols());

  Field2D out(out_s, out_i);
  Eigen::Map<MatrixXcdR> result(out.values().data(), out.rows(), out.cols());
  result.noalias() = fs * in * fi.transpose();
  return out;
}

Field2D dft2(const Field2D& f, int sign_s, int sign_i) {
  return dft2(f, sign_s, sign_i, conjugate_grid(f.grid_s()), conjugate_grid(f.grid_i()));
}

}  // namespace setomo
