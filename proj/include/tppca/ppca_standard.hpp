#pragma once

#include "tppca/core_model.hpp"

#include <Eigen/Dense>

namespace tppca {

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

EigenDecomposition eigen_descending(const Eigen::MatrixXd& symmetric);

/// Maximum-likelihood (divisor N) covariance about `center`.
Eigen::MatrixXd scatter_about(const Eigen::MatrixXd& X, const Eigen::VectorXd& center);

inline constexpr double kEigenvalueFloor = 1e-12;

/// Closed-form PPCA from a covariance: sigma2 is the mean of the q - d
/// smallest eigenvalues and W = U_d (Lambda_d - sigma2 I)^(1/2), with
/// eigenvalues floored at kEigenvalueFloor.
ModelParams ppca_from_covariance(const Eigen::MatrixXd& cov, const Eigen::VectorXd& mean, int d);

/// Gaussian PPCA maximum-likelihood fit. Requires d < q.
FitResult fit_standard(const Dataset& data, int d);

/// Log-likelihood of the data under N(mu, W W^T + sigma2 I).
double loglik_gaussian(const ModelParams& p, const Dataset& data);

/// E[z | x] = M^-1 W^T (x - mu), M = W^T W + sigma2 I.
Eigen::VectorXd posterior_mean_z(const ModelParams& p, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace tppca
