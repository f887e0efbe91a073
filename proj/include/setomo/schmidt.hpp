#pragma once

#include <vector>

#include "setomo/grid.hpp"
#include "setomo/io.hpp"
#include "setomo/jsa.hpp"

namespace setomo {

inline constexpr double kDefaultSchmidtTol = 1e-12;

// L(k, k') = sum_n sqrt(lambda_n) psi_n(k) phi_n(k'), with psi_n and phi_n
// orthonormal under the grid inner product.
struct SchmidtData {
  std::vector<double> sqrt_lambdas;  // descending
  std::vector<Field1D> psi;          // signal grid
  std::vector<Field1D> phi;          // idler grid
  double truncation_tol = kDefaultSchmidtTol;
  double dropped_weight = 0.0;  // sum of lambda_n over discarded modes

  int rank() const noexcept { return static_cast<int>(sqrt_lambdas.size()); }
  std::vector<double> lambdas() const;
};

// Fails with invalid-argument unless the kernel has unit norm.
SchmidtData schmidt_decompose(const JointAmplitude& jsa, double tol = kDefaultSchmidtTol);
SchmidtData schmidt_decompose(const Field2D& kernel, double tol = kDefaultSchmidtTol);

double schmidt_number(const SchmidtData& s);

Field2D reconstruct_from_schmidt(const SchmidtData& s, int n_max);

// gain * sqrt(lambda_n): the per-mode squeezing parameters.
std::vector<double> effective_couplings(const SchmidtData& s, double gain);

json schmidt_to_json(const SchmidtData& s);

}  // namespace setomo
