#include "setomo/oracle.hpp"

#include <cmath>
#include <string>

namespace setomo {

Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& a) {
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm) || norm > 600.0) {
    fail(ErrorKind::kNumeric, "matrix exponential: generator norm " + std::to_string(norm) + " out of range");
  }
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXcd scaled = a / std::ldexp(1.0, squarings);

  const Eigen::Index n = a.rows();
  Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(n, n);
  bool converged = false;
  for (int k = 1; k <= 40; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-20 * result.cwiseAbs().maxCoeff()) {
      converged = true;
      break;
    }
  }
  if (!converged) fail(ErrorKind::kNumeric, "matrix exponential: Taylor series did not converge");
  for (int s = 0; s < squarings; ++s) result = result * result;
  if (!result.allFinite()) fail(ErrorKind::kNumeric, "matrix exponential overflowed");
  return result;
}

double GaussianTransform::symplectic_error() const {
  const Eigen::MatrixXcd c = cosh_signal();
  const Eigen::MatrixXcd s = sinh_block();
  const Eigen::MatrixXcd defect =
      c * c.adjoint() - s * s.adjoint() - Eigen::MatrixXcd::Identity(n_signal(), n_signal());
  return defect.cwiseAbs().maxCoeff();
}

GaussianTransform build_transform(const Field2D& kernel, double gain) {
  const int ns = kernel.rows();
  const int ni = kernel.cols();
  if (ns > kOracleMaxModes || ni > kOracleMaxModes) {
    fail(ErrorKind::kInvalidArgument, "oracle limited to " + std::to_string(kOracleMaxModes) + " modes per beam");
  }
  if (!(gain >= 0.0) || !std::isfinite(gain)) fail(ErrorKind::kInvalidArgument, "gain must be >= 0");

  const double w = std::sqrt(kernel.cell_area());
  Eigen::MatrixXcd m(ns, ni);
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < ni; ++j) m(i, j) = kernel(i, j) * w;
  }
  Eigen::MatrixXcd generator = Eigen::MatrixXcd::Zero(ns + ni, ns + ni);
  generator.topRightCorner(ns, ni) = gain * m;
  generator.bottomLeftCorner(ni, ns) = gain * m.adjoint();

  GaussianTransform t{kernel.grid_s(), kernel.grid_i(), matrix_exponential(generator)};
  const double defect = t.symplectic_error();
  if (!(defect < 1e-8 * std::max(1.0, t.matrix.cwiseAbs2().maxCoeff()))) {
    fail(ErrorKind::kNumeric, "Bogoliubov transform violates the symplectic condition by " + std::to_string(defect));
  }
  return t;
}

Eigen::VectorXcd seed_displacement(const SeedProfile& seed, int n_signal) {
  const int ni = seed.alpha.size();
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(n_signal + ni);
  const double w = std::sqrt(seed.alpha.grid.spacing());
  for (int j = 0; j < ni; ++j) d(n_signal + j) = seed.alpha[j] * w;
  return d;
}

OracleExpectations::OracleExpectations(const GaussianTransform& transform, const Eigen::VectorXcd& displacement)
    : transform_(transform), displacement_(displacement) {
  const int ns = transform_.n_signal();
  const int ni = transform_.n_idler();
  if (displacement_.size() != ns + ni) fail(ErrorKind::kInvalidArgument, "displacement has the wrong length");
  if (displacement_.head(ns).cwiseAbs().maxCoeff() != 0.0) {
    fail(ErrorKind::kInvalidArgument, "seed displacement must be orthogonal to the signal modes");
  }

  // c' = A c + B c^+ with c = (a_s, a_i); only B matters for vacuum fluctuations.
  const Eigen::MatrixXcd& t = transform_.matrix;
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(ns + ni, ns + ni);
  b.topRightCorner(ns, ni) = t.topRightCorner(ns, ni);
  b.bottomLeftCorner(ni, ns) = t.bottomLeftCorner(ni, ns).conjugate();
  normal_moments_ = b.conjugate() * b.transpose();

  Eigen::VectorXcd input = Eigen::VectorXcd::Zero(ns + ni);
  input.tail(ni) = displacement_.tail(ni).conjugate();
  const Eigen::VectorXcd out = t * input;

  const double dk = transform_.grid_s.spacing();
  signal_spectrum_.resize(static_cast<std::size_t>(ns));
  for (int x = 0; x < ns; ++x) {
    const double n_x = std::norm(out(x)) + normal_moments_(x, x).real();
    signal_spectrum_[static_cast<std::size_t>(x)] = n_x / dk;
    n_total_s_ += n_x;
  }
}

double OracleExpectations::n_diff_interf(const InterferometerSettings& settings) const {
  const int ns = transform_.n_signal();
  const int ni = transform_.n_idler();
  if (!(transform_.grid_s == transform_.grid_i)) {
    fail(ErrorKind::kInvalidArgument, "interferometric detection needs equal signal and idler grids");
  }
  Eigen::VectorXcd input = Eigen::VectorXcd::Zero(ns + ni);
  for (int j = 0; j < ni; ++j) {
    const cplx delayed = displacement_(ns + j) * std::polar(1.0, -transform_.grid_i.point(j) * settings.q_sigma);
    input(ns + j) = std::conj(delayed);
  }
  const Eigen::VectorXcd out = transform_.matrix * input;

  cplx acc{0.0, 0.0};
  for (int x = 0; x < ns; ++x) {
    const cplx signal_mean = out(x);
    const cplx idler_mean = std::conj(out(ns + x));
    const cplx cross = std::conj(signal_mean) * idler_mean + normal_moments_(x, ns + x);
    acc += cross * std::polar(1.0, settings.quadrature_theta - transform_.grid_s.point(x) * settings.q_eta);
  }
  return 2.0 * acc.real();
}

OracleExpectations oracle_expectations(const GaussianTransform& transform, const Eigen::VectorXcd& displacement) {
  return OracleExpectations(transform, displacement);
}

}  // namespace setomo
