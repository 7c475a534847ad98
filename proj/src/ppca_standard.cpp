#include "tppca/ppca_standard.hpp"

#include "tppca/special_dist.hpp"

#include <cmath>
#include <stdexcept>

namespace tppca {

EigenDecomposition eigen_descending(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  EigenDecomposition out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  return out;
}

Eigen::MatrixXd scatter_about(const Eigen::MatrixXd& X, const Eigen::VectorXd& center) {
  const Eigen::MatrixXd C = X.rowwise() - center.transpose();
  return (C.transpose() * C) / static_cast<double>(X.rows());
}

ModelParams ppca_from_covariance(const Eigen::MatrixXd& cov, const Eigen::VectorXd& mean, int d) {
  const Eigen::Index q = cov.rows();
  if (d < 1 || d >= q) throw std::invalid_argument("PPCA: requires 1 <= d < q");
  const EigenDecomposition eig = eigen_descending(cov);
  const Eigen::VectorXd lambda = eig.eigenvalues.cwiseMax(kEigenvalueFloor);
  ModelParams p;
  p.sigma2 = lambda.tail(q - d).mean();
  const Eigen::VectorXd spread = (lambda.head(d).array() - p.sigma2).max(kEigenvalueFloor).sqrt();
  p.W = eig.eigenvectors.leftCols(d) * spread.asDiagonal();
  p.mu = mean;
  p.dof = GaussianDof{};
  return p;
}

double loglik_gaussian(const ModelParams& p, const Dataset& data) {
  Eigen::MatrixXd C = p.W * p.W.transpose();
  C.diagonal().array() += p.sigma2;
  const MvtParams dist(std::numeric_limits<double>::infinity(), p.mu, C);
  double total = 0.0;
  for (Eigen::Index n = 0; n < data.n(); ++n) total += mvt_logpdf(dist, data.X.row(n).transpose());
  return total;
}

FitResult fit_standard(const Dataset& data, int d) {
  validate_dataset(data);
  if (d < 1 || d >= data.q()) throw std::invalid_argument("fit_standard: requires 1 <= d < q");
  const Eigen::VectorXd mean = data.X.colwise().mean().transpose();
  FitResult r;
  r.params = ppca_from_covariance(scatter_about(data.X, mean), mean, d);
  r.n_iter = 1;
  r.converged = true;
  r.trace.push_back({1, loglik_gaussian(r.params, data), 0.0});
  return r;
}

Eigen::VectorXd posterior_mean_z(const ModelParams& p, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (!is_gaussian(p.dof)) throw std::invalid_argument("posterior_mean_z: requires Gaussian model");
  if (x.size() != p.q()) throw std::invalid_argument("posterior_mean_z: dimension mismatch");
  Eigen::MatrixXd M = p.W.transpose() * p.W;
  M.diagonal().array() += p.sigma2;
  return M.llt().solve(p.W.transpose() * (x - p.mu));
}

}  // namespace tppca
