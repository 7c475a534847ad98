#pragma once

#include "tppca/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tppca {

/// Gamma distribution in the shape/rate convention: density proportional to
/// u^(shape-1) exp(-rate u), mean shape/rate. Ga(nu/2, nu/2) has mean 1.
struct GammaParams {
  double shape;
  double rate;

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }
};

void validate(const GammaParams& g);

double sample_gamma(const GammaParams& g, RandomStream& rng);

/// Marsaglia-Tsang sampler with the shape-dependent constants hoisted, for
/// loops that draw many variates of one shape at varying rates.
class GammaSampler {
 public:
  explicit GammaSampler(double shape);
  double operator()(double rate, RandomStream& rng) const;
  double shape() const { return shape_; }

 private:
  double shape_;
  double d_;
  double c_;
  double inv_shape_;
  bool boosted_;
};

/// Conjugate update of a Ga(alpha, beta) prior on the precision multiplier u
/// of a q-dimensional normal, given the Mahalanobis distance delta of the
/// observation: Ga(alpha + q/2, beta + delta/2).
GammaParams gamma_posterior(const GammaParams& prior, int q, double mahalanobis);

/// Multivariate t with degrees of freedom nu, location mu and scale matrix
/// Sigma. nu = +infinity denotes the Gaussian limit.
class MvtParams {
 public:
  MvtParams(double nu, Eigen::VectorXd mu, Eigen::MatrixXd sigma);

  double nu() const { return nu_; }
  bool gaussian() const { return std::isinf(nu_); }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::LLT<Eigen::MatrixXd>& cholesky() const { return llt_; }
  Eigen::Index dim() const { return mu_.size(); }
  double log_det_sigma() const { return log_det_; }

 private:
  double nu_;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd sigma_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_;
};

/// Draws N(mean, cov) as mean + L eps. Throws std::domain_error when cov is
/// not positive definite.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           RandomStream& rng);

/// Scale-mixture draw: u ~ Ga(nu/2, nu/2), then N(mu, Sigma/u). In the
/// Gaussian limit u is not drawn and the stream advances exactly as
/// sample_mvn would.
Eigen::VectorXd sample_mvt(const MvtParams& t, RandomStream& rng);

double mvt_logpdf(const MvtParams& t, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Digamma via upward recurrence to x >= 10 followed by the asymptotic
/// series. Absolute error below 1e-12 for x > 0.
template <typename Scalar>
Scalar digamma(Scalar x) {
  if (!(x > Scalar(0))) throw std::domain_error("digamma: argument must be positive");
  Scalar acc(0);
  while (x < Scalar(10)) {
    acc -= Scalar(1) / x;
    x += Scalar(1);
  }
  const Scalar inv = Scalar(1) / x;
  const Scalar inv2 = inv * inv;
  // Bernoulli terms B_2k / (2k x^2k), k = 1..7.
  const Scalar series =
      inv2 * (Scalar(1) / 12 -
              inv2 * (Scalar(1) / 120 -
                      inv2 * (Scalar(1) / 252 -
                              inv2 * (Scalar(1) / 240 -
                                      inv2 * (Scalar(1) / 132 -
                                              inv2 * (Scalar(691) / 32760 - inv2 * Scalar(1) / 12))))));
  return acc + std::log(x) - Scalar(0.5) * inv - series;
}

}  // namespace tppca
