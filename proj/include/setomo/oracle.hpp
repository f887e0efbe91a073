#pragma once

#include <Eigen/Dense>

#include "setomo/grid.hpp"
#include "setomo/signals.hpp"

namespace setomo {

inline constexpr int kOracleMaxModes = 16;

// Heisenberg map of the discretized 2N-mode Gaussian state, acting on the
// operator vector (a_s[0..N), a_i^+[0..N)):
//   (a_s', a_i'^+) = exp(G) (a_s, a_i^+),  G = gain [[0, M], [M^+, 0]],
// with M_ij = L(k_i, k'_j) sqrt(dk dk'). Built by scaling and squaring, never
// through an SVD of M.
struct GaussianTransform {
  ModeGrid grid_s;
  ModeGrid grid_i;
  Eigen::MatrixXcd matrix;

  int n_signal() const noexcept { return grid_s.size(); }
  int n_idler() const noexcept { return grid_i.size(); }
  Eigen::MatrixXcd cosh_signal() const { return matrix.topLeftCorner(n_signal(), n_signal()); }
  Eigen::MatrixXcd sinh_block() const { return matrix.topRightCorner(n_signal(), n_idler()); }
  Eigen::MatrixXcd cosh_idler() const { return matrix.bottomRightCorner(n_idler(), n_idler()); }

  // max-abs entry of C_s C_s^+ - S S^+ - 1.
  double symplectic_error() const;
};

// exp(a) by scaling and squaring of a Taylor series; exposed for testing.
Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& a);

GaussianTransform build_transform(const Field2D& kernel, double gain);

// (0, alpha(k_j) sqrt(dk')): the input displacement of a seeded idler.
Eigen::VectorXcd seed_displacement(const SeedProfile& seed, int n_signal);

class OracleExpectations {
 public:
  OracleExpectations(const GaussianTransform& transform, const Eigen::VectorXcd& displacement);

  // Signal photon density per unit k at each signal sample.
  const std::vector<double>& signal_spectrum() const noexcept { return signal_spectrum_; }
  double n_total_s() const noexcept { return n_total_s_; }

  // <N_A - N_B> with the same seed delay / arm phase / quadrature conventions as
  // interferometric_signal_exact.
  double n_diff_interf(const InterferometerSettings& settings) const;

 private:
  GaussianTransform transform_;
  Eigen::VectorXcd displacement_;
  Eigen::MatrixXcd normal_moments_;  // connected <c'^+_p c'_q>, c = (a_s, a_i)
  std::vector<double> signal_spectrum_;
  double n_total_s_ = 0.0;
};

// Fails with invalid-argument if the displacement touches the signal block.
OracleExpectations oracle_expectations(const GaussianTransform& transform, const Eigen::VectorXcd& displacement);

}  // namespace setomo
