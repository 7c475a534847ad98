#include "tppca/ecm.hpp"

#include "tppca/ppca_standard.hpp"
#include "tppca/special_dist.hpp"

#include <algorithm>
#include <cmath>

namespace tppca {

ModelParams ecm_location_scale_update(const WeightedMoments& m, const Eigen::MatrixXd& X,
                                      const ModelParams& current) {
  const Eigen::Index N = X.rows();
  const Eigen::Index q = X.cols();
  const Eigen::Index d = current.d();
  if (m.u.size() != N || m.uz.rows() != N || m.uz.cols() != d || static_cast<Eigen::Index>(m.uzz.size()) != N) {
    throw std::invalid_argument("M-step: moments not aligned with data");
  }
  const double u_sum = m.u.sum();
  if (!(u_sum > 0.0)) throw DegenerateEStep("M-step: scale weights sum to zero");

  ModelParams next = current;
  next.mu = (X.transpose() * m.u - current.W * m.uz.colwise().sum().transpose()) / u_sum;

  const Eigen::MatrixXd Xc = X.rowwise() - next.mu.transpose();
  Eigen::MatrixXd uzz_sum = Eigen::MatrixXd::Zero(d, d);
  for (const auto& s : m.uzz) uzz_sum += s;
  const Eigen::LLT<Eigen::MatrixXd> llt(uzz_sum);
  if (llt.info() != Eigen::Success) throw DegenerateEStep("M-step: sum of <u z z^T> is singular");
  const Eigen::MatrixXd cross = Xc.transpose() * m.uz;  // q x d
  next.W = llt.solve(cross.transpose()).transpose();

  const double fit = (Xc.rowwise().squaredNorm().array() * m.u.array()).sum();
  const double coupling = (next.W.transpose() * cross).trace();
  const double spread = (next.W.transpose() * next.W * uzz_sum).trace();
  next.sigma2 = std::max((fit - 2.0 * coupling + spread) / static_cast<double>(N * q), 1e-300);
  return next;
}

double dof_score(double nu, double mean_log_minus_mean) {
  return 1.0 + std::log(0.5 * nu) - digamma(0.5 * nu) + mean_log_minus_mean;
}

DofUpdate solve_dof(double mean_log_minus_mean, const Nu& nu) {
  double lo = nu.lower;
  double hi = nu.upper;
  if (dof_score(hi, mean_log_minus_mean) >= 0.0) return {hi, true};
  if (dof_score(lo, mean_log_minus_mean) <= 0.0) return {lo, true};
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (dof_score(mid, mean_log_minus_mean) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), false};
}

ModelParams initial_params(const Eigen::MatrixXd& X, int d, const DofSpec& dof) {
  const Eigen::Index q = X.cols();
  Eigen::VectorXd median(q);
  std::vector<double> col(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index j = 0; j < q; ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) col[static_cast<std::size_t>(i)] = X(i, j);
    std::sort(col.begin(), col.end());
    const std::size_t n = col.size();
    median[j] = n % 2 ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
  }
  ModelParams p = ppca_from_covariance(scatter_about(X, median), median, d);
  p.dof = dof;
  return p;
}

double relative_param_change(const ModelParams& before, const ModelParams& after) {
  const double diff = (after.W - before.W).squaredNorm() + (after.mu - before.mu).squaredNorm() +
                      (after.sigma2 - before.sigma2) * (after.sigma2 - before.sigma2);
  const double base = before.W.squaredNorm() + before.mu.squaredNorm() + before.sigma2 * before.sigma2;
  return std::sqrt(diff / std::max(base, 1e-300));
}

}  // namespace tppca
