#pragma once

#include "tppca/core_model.hpp"
#include "tppca/ecm.hpp"
#include "tppca/random.hpp"

#include <Eigen/Dense>

namespace tppca {

/// Closed-form posterior moments under the shared-scale model.
struct MarginalEStep {
  WeightedMoments moments;   // <u_n>, <u_n z_n>, <u_n z_n z_n^T>
  Eigen::VectorXd log_u;     // <log u_n>
};

struct EmControl {
  double tol = 1e-6;   // relative log-likelihood change
  int max_iter = 500;
  int threads = 1;
};

/// Observed-data log-likelihood: sum_n log t_nu(x_n; mu, W W^T + sigma2 I).
/// Gaussian dof gives the PPCA likelihood.
double loglik_marginal(const ModelParams& p, const Dataset& data);

/// u_n | x_n ~ Ga((nu + q)/2, (nu + delta_n)/2) with delta_n the Mahalanobis
/// distance under C = W W^T + sigma2 I, and z_n | x_n, u_n ~
/// N(M^-1 W^T (x_n - mu), (sigma2/u_n) M^-1), M = W^T W + sigma2 I.
MarginalEStep estep_marginal(const ModelParams& p, const Dataset& data, int threads = 1);

struct MStepResult {
  ModelParams params;
  bool nu_clamped = false;
};

/// ECM update mu -> W -> sigma2 -> nu. Estimated nu solves
/// dof_score(nu, mean(<log u> - <u>)) = 0 on its bracket.
MStepResult mstep_marginal(const MarginalEStep& e, const Dataset& data, const ModelParams& current);

/// EM for the shared-scale model. Requires SingleNu or GaussianDof. The trace
/// starts with the log-likelihood at the initial point (iteration 0), then
/// records loglik_marginal after each update; `rng` only seeds the result
/// record since the iteration itself is deterministic.
FitResult fit_marginal_em(const Dataset& data, int d, const DofSpec& dof, const EmControl& ctrl,
                          RandomStream& rng);

}  // namespace tppca
