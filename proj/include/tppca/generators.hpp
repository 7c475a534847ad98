#pragma once

#include "tppca/core_model.hpp"
#include "tppca/random.hpp"

#include <Eigen/Dense>

#include <vector>

namespace tppca {

/// Uniform contamination on the box [-halfwidth, halfwidth]^q.
struct OutlierSpec {
  int count = 0;
  double box_halfwidth = 1.0;
};

/// Full latent state of one generated observation.
struct GeneratedSample {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  double u1 = 1.0;
  double u2 = 1.0;
};

/// Independent scale variables: u1 ~ Ga(nu1/2, nu1/2) on the data layer,
/// u2 ~ Ga(nu2/2, nu2/2) on the latent layer. Requires PairNu.
std::vector<GeneratedSample> gen_cl(const ModelParams& p, int n, RandomStream& rng);

/// Gaussian latent z ~ N(0, I) and a data-layer scale u. u2 is fixed at 1.
/// Requires SingleNu or GaussianDof (the latter is plain PPCA sampling).
std::vector<GeneratedSample> gen_conditional(const ModelParams& p, int n, RandomStream& rng);

/// One shared scale u for both layers, so u1 == u2. Requires SingleNu or
/// GaussianDof.
std::vector<GeneratedSample> gen_marginal(const ModelParams& p, int n, RandomStream& rng);

/// Stacks the x vectors of `samples` as rows.
Eigen::MatrixXd observations(const std::vector<GeneratedSample>& samples);

/// Equicorrelation matrix (1 - rho) I + rho 11^T.
Eigen::MatrixXd equicorrelation(int q, double rho);

/// n_clean rows from N(0, equicorrelation(q, rho)) followed by `outliers.count`
/// rows uniform on the outlier box. The mask marks the appended rows.
Dataset gen_experiment(int q, int n_clean, double rho, const OutlierSpec& outliers, RandomStream& rng);

/// E[(nu + z^T z)/(nu + d)] for z ~ t_nu(0, I_d), i.e.
/// (nu + nu d/(nu - 2)) / (nu + d). Requires nu > 2.
double check_scale_matrix_limit(double nu, int d, double sigma2);

}  // namespace tppca
