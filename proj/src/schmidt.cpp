#include "setomo/schmidt.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace setomo {

std::vector<double> SchmidtData::lambdas() const {
  std::vector<double> out;
  out.reserve(sqrt_lambdas.size());
  for (double s : sqrt_lambdas) out.push_back(s * s);
  return out;
}

SchmidtData schmidt_decompose(const JointAmplitude& jsa, double tol) { return schmidt_decompose(jsa.kernel, tol); }

SchmidtData schmidt_decompose(const Field2D& kernel, double tol) {
  if (!(tol >= 0.0 && tol < 1.0)) fail(ErrorKind::kInvalidArgument, "Schmidt tolerance must lie in [0, 1)");
  const double norm2 = squared_norm(kernel);
  if (std::abs(norm2 - 1.0) > 1e-9) {
    fail(ErrorKind::kInvalidArgument,
         "Schmidt decomposition needs a unit-norm kernel (norm^2 = " + std::to_string(norm2) + "); normalize first");
  }

  const ModeGrid& gs = kernel.grid_s();
  const ModeGrid& gi = kernel.grid_i();
  const double w = std::sqrt(kernel.cell_area());

  Eigen::MatrixXcd m(kernel.rows(), kernel.cols());
  for (int i = 0; i < kernel.rows(); ++i) {
    for (int j = 0; j < kernel.cols(); ++j) m(i, j) = kernel(i, j) * w;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const Eigen::MatrixXcd& u = svd.matrixU();
  const Eigen::MatrixXcd& v = svd.matrixV();

  SchmidtData out;
  out.truncation_tol = tol;
  const double lambda0 = sv.size() > 0 ? sv(0) * sv(0) : 0.0;
  const double inv_s = 1.0 / std::sqrt(gs.spacing());
  const double inv_i = 1.0 / std::sqrt(gi.spacing());

  for (Eigen::Index n = 0; n < sv.size(); ++n) {
    const double lambda = sv(n) * sv(n);
    if (lambda <= 0.0 || lambda < tol * lambda0) {
      out.dropped_weight += lambda;
      continue;
    }
    // Gauge: largest-magnitude psi sample real positive; phi counter-rotated.
    Eigen::Index peak = 0;
    u.col(n).cwiseAbs().maxCoeff(&peak);
    const cplx gauge = std::conj(u(peak, n)) / std::abs(u(peak, n));

    Field1D psi(gs);
    Field1D phi(gi);
    for (int i = 0; i < gs.size(); ++i) psi[i] = u(i, n) * gauge * inv_s;
    for (int j = 0; j < gi.size(); ++j) phi[j] = std::conj(v(j, n) * gauge) * inv_i;
    psi[static_cast<int>(peak)] = std::abs(psi[static_cast<int>(peak)]);

    out.sqrt_lambdas.push_back(sv(n));
    out.psi.push_back(std::move(psi));
    out.phi.push_back(std::move(phi));
  }
  return out;
}

double schmidt_number(const SchmidtData& s) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double l : s.lambdas()) {
    sum += l;
    sum_sq += l * l;
  }
  if (sum_sq == 0.0) fail(ErrorKind::kDegenerateKernel, "Schmidt number of an empty decomposition");
  return sum * sum / sum_sq;
}

Field2D reconstruct_from_schmidt(const SchmidtData& s, int n_max) {
  if (n_max < 0 || n_max > s.rank()) {
    fail(ErrorKind::kInvalidArgument,
         "n_max = " + std::to_string(n_max) + " outside [0, " + std::to_string(s.rank()) + "]");
  }
  if (s.rank() == 0) fail(ErrorKind::kInvalidArgument, "empty Schmidt decomposition");
  Field2D out(s.psi.front().grid, s.phi.front().grid);
  for (int n = 0; n < n_max; ++n) {
    const auto& psi = s.psi[static_cast<std::size_t>(n)];
    const auto& phi = s.phi[static_cast<std::size_t>(n)];
    const double c = s.sqrt_lambdas[static_cast<std::size_t>(n)];
    for (int i = 0; i < out.rows(); ++i) {
      const cplx a = c * psi[i];
      for (int j = 0; j < out.cols(); ++j) out(i, j) += a * phi[j];
    }
  }
  return out;
}

std::vector<double> effective_couplings(const SchmidtData& s, double gain) {
  std::vector<double> out;
  out.reserve(s.sqrt_lambdas.size());
  for (double r : s.sqrt_lambdas) out.push_back(gain * r);
  return out;
}

json schmidt_to_json(const SchmidtData& s) {
  json psi = json::array();
  json phi = json::array();
  for (const auto& f : s.psi) psi.push_back(field1d_to_json(f));
  for (const auto& f : s.phi) phi.push_back(field1d_to_json(f));
  return json{{"sqrt_lambdas", s.sqrt_lambdas},
              {"psi", std::move(psi)},
              {"phi", std::move(phi)},
              {"truncation_tol", s.truncation_tol},
              {"dropped_weight", s.dropped_weight}};
}

}  // namespace setomo
