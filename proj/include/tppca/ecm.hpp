#pragma once

#include "tppca/core_model.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace tppca {

/// Raised when an M-step accumulator cannot be inverted.
class DegenerateEStep : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scale-weighted posterior moments shared by the closed-form and Monte Carlo
/// E-steps: per observation <u>, <u z> (row of `uz`) and <u z z^T>.
struct WeightedMoments {
  Eigen::VectorXd u;
  Eigen::MatrixXd uz;
  std::vector<Eigen::MatrixXd> uzz;
};

/// Conditional-maximization updates for mu, then W using the new mu, then
/// sigma2 using both. Degrees of freedom are copied from `current`.
ModelParams ecm_location_scale_update(const WeightedMoments& m, const Eigen::MatrixXd& X,
                                      const ModelParams& current);

/// Score of the expected complete log-likelihood in nu (up to a factor N/2):
/// 1 + log(nu/2) - digamma(nu/2) + mean_log_minus_mean, where the last term
/// is mean_n(<log u_n> - <u_n>). Strictly decreasing in nu.
double dof_score(double nu, double mean_log_minus_mean);

struct DofUpdate {
  double value;
  bool clamped;
};

/// Root of dof_score on [nu.lower, nu.upper] by bisection to 1e-8. Without a
/// sign change the nearest endpoint is returned with `clamped` set.
DofUpdate solve_dof(double mean_log_minus_mean, const Nu& nu);

/// Starting point shared by the iterative estimators: coordinatewise median
/// for mu, PPCA closed form on the scatter about the median for W and sigma2.
ModelParams initial_params(const Eigen::MatrixXd& X, int d, const DofSpec& dof);

/// ||theta_new - theta_old|| / max(||theta_old||, eps) over (W, mu, sigma2).
double relative_param_change(const ModelParams& before, const ModelParams& after);

}  // namespace tppca
