#include "tppca/special_dist.hpp"

#include <cmath>
#include <string>

namespace tppca {

void validate(const GammaParams& g) {
  if (!(g.shape > 0.0) || !std::isfinite(g.shape)) {
    throw std::invalid_argument("gamma shape must be positive and finite");
  }
  if (!(g.rate > 0.0) || !std::isfinite(g.rate)) {
    throw std::invalid_argument("gamma rate must be positive and finite");
  }
}

GammaSampler::GammaSampler(double shape) : shape_(shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::invalid_argument("gamma shape must be positive and finite");
  }
  boosted_ = shape < 1.0;
  const double a = boosted_ ? shape + 1.0 : shape;
  d_ = a - 1.0 / 3.0;
  c_ = 1.0 / std::sqrt(9.0 * d_);
  inv_shape_ = 1.0 / shape;
}

double GammaSampler::operator()(double rate, RandomStream& rng) const {
  double draw;
  while (true) {
    const double x = rng.normal();
    double v = 1.0 + c_ * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d_ * (1.0 - v + std::log(v))) {
      draw = d_ * v;
      break;
    }
  }
  if (boosted_) draw *= std::pow(rng.uniform(), inv_shape_);
  return draw / rate;
}

double sample_gamma(const GammaParams& g, RandomStream& rng) {
  validate(g);
  return GammaSampler(g.shape)(g.rate, rng);
}

GammaParams gamma_posterior(const GammaParams& prior, int q, double mahalanobis) {
  validate(prior);
  if (q < 0) throw std::invalid_argument("gamma_posterior: negative dimension");
  if (!(mahalanobis >= 0.0)) throw std::invalid_argument("gamma_posterior: negative Mahalanobis distance");
  return {prior.shape + 0.5 * q, prior.rate + 0.5 * mahalanobis};
}

MvtParams::MvtParams(double nu, Eigen::VectorXd mu, Eigen::MatrixXd sigma)
    : nu_(nu), mu_(std::move(mu)), sigma_(std::move(sigma)) {
  if (!(nu_ > 0.0)) throw std::invalid_argument("mvt: degrees of freedom must be positive");
  if (sigma_.rows() != sigma_.cols() || sigma_.rows() != mu_.size()) {
    throw std::invalid_argument("mvt: scale matrix dimension mismatch");
  }
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("mvt: scale matrix not symmetric");
  }
  llt_.compute(sigma_);
  if (llt_.info() != Eigen::Success) throw std::domain_error("mvt: scale matrix not positive definite");
  log_det_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

namespace {

Eigen::VectorXd mvn_from_factor(const Eigen::VectorXd& mean, const Eigen::LLT<Eigen::MatrixXd>& llt,
                                double scale, RandomStream& rng) {
  Eigen::VectorXd eps(mean.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = rng.normal();
  const Eigen::VectorXd le = llt.matrixL() * eps;
  return mean + scale * le;
}

}  // namespace

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, RandomStream& rng) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw std::invalid_argument("sample_mvn: covariance dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::domain_error("sample_mvn: covariance not positive definite");
  return mvn_from_factor(mean, llt, 1.0, rng);
}

Eigen::VectorXd sample_mvt(const MvtParams& t, RandomStream& rng) {
  double scale = 1.0;
  if (!t.gaussian()) {
    const double u = sample_gamma({0.5 * t.nu(), 0.5 * t.nu()}, rng);
    scale = 1.0 / std::sqrt(u);
  }
  return mvn_from_factor(t.mu(), t.cholesky(), scale, rng);
}

double mvt_logpdf(const MvtParams& t, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double p = static_cast<double>(t.dim());
  const Eigen::VectorXd r = t.cholesky().matrixL().solve(x - t.mu());
  const double delta = r.squaredNorm();
  if (t.gaussian()) {
    return -0.5 * (p * std::log(2.0 * std::numbers::pi) + t.log_det_sigma() + delta);
  }
  const double nu = t.nu();
  return std::lgamma(0.5 * (nu + p)) - std::lgamma(0.5 * nu) - 0.5 * p * std::log(nu * std::numbers::pi) -
         0.5 * t.log_det_sigma() - 0.5 * (nu + p) * std::log1p(delta / nu);
}

}  // namespace tppca
