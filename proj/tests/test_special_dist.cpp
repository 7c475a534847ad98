#include "tppca/special_dist.hpp"

#include "support/oracles.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <gtest/gtest.h>

#include <numbers>

using namespace tppca;

namespace {

std::vector<double> gamma_draws(GammaParams g, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = sample_gamma(g, rng);
  return v;
}

// Integral of exp(logpdf) over R^2 in polar coordinates about mu in the
// whitened frame.
double mvt_total_mass(const MvtParams& t) {
  const Eigen::MatrixXd L = t.cholesky().matrixL();
  const double jac = L.determinant();
  const int n_phi = 64;
  auto ring = [&](double r) {
    double s = 0.0;
    for (int k = 0; k < n_phi; ++k) {
      const double phi = 2 * std::numbers::pi * k / n_phi;
      const Eigen::Vector2d y(r * std::cos(phi), r * std::sin(phi));
      s += std::exp(mvt_logpdf(t, t.mu() + L * y));
    }
    return s * 2 * std::numbers::pi / n_phi * r * jac;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(ring);
}

}  // namespace

TEST(Gamma, MeanOneForEqualShapeAndRate) {
  const auto v = gamma_draws({1.5, 1.5}, 1'000'000, 11);
  const auto ms = oracle::mean_se(v);
  EXPECT_NEAR(ms.mean, 1.0, 0.01);
  EXPECT_NEAR(ms.var, 2.0 / 3.0, 0.02);
}

TEST(Gamma, RateConventionMean) {
  const auto v = gamma_draws({2.5, 3.5}, 1'000'000, 12);
  EXPECT_NEAR(oracle::mean_se(v).mean, 2.5 / 3.5, 0.003);
}

TEST(Gamma, SmallShapeBoostMatchesCdf) {
  for (double shape : {0.05, 0.3, 0.9}) {
    const auto v = gamma_draws({shape, 2.0}, 20000, 13);
    EXPECT_GT(oracle::ks_pvalue(v, oracle::gamma_cdf(shape, 2.0)), 0.01) << "shape " << shape;
    const auto ms = oracle::mean_se(v);
    EXPECT_NEAR(ms.mean, shape / 2.0, 4 * ms.se);
  }
}

TEST(Gamma, LargeShapeMatchesCdf) {
  const auto v = gamma_draws({40.0, 0.5}, 20000, 14);
  EXPECT_GT(oracle::ks_pvalue(v, oracle::gamma_cdf(40.0, 0.5)), 0.01);
}

TEST(Gamma, InvalidParamsThrow) {
  RandomStream rng(1);
  EXPECT_THROW(sample_gamma({0.0, 1.0}, rng), std::invalid_argument);
  EXPECT_THROW(sample_gamma({1.0, -1.0}, rng), std::invalid_argument);
  EXPECT_THROW(GammaSampler(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(GammaPosterior, Examples) {
  const GammaParams prior{1.5, 1.5};
  auto a = gamma_posterior(prior, 2, 0.0);
  EXPECT_DOUBLE_EQ(a.shape, 2.5);
  EXPECT_DOUBLE_EQ(a.rate, 1.5);
  auto b = gamma_posterior(prior, 2, 4.0);
  EXPECT_DOUBLE_EQ(b.shape, 2.5);
  EXPECT_DOUBLE_EQ(b.rate, 3.5);
  auto c = gamma_posterior({0.7, 2.3}, 0, 0.0);
  EXPECT_DOUBLE_EQ(c.shape, 0.7);
  EXPECT_DOUBLE_EQ(c.rate, 2.3);
  EXPECT_THROW(gamma_posterior(prior, 2, -1e-9), std::invalid_argument);
}

// Drawing u from the prior, x | u from N(mu, Sigma/u), then u' from the
// conjugate posterior must return u' to the prior marginal.
TEST(GammaPosterior, ResamplingPreservesPrior) {
  RandomStream rng(21);
  const Eigen::MatrixXd sigma = (Eigen::MatrixXd(2, 2) << 2.0, 0.3, 0.3, 0.5).finished();
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  const GammaParams prior{2.5, 3.5};
  std::vector<double> u_post;
  for (int i = 0; i < 20000; ++i) {
    const double u = sample_gamma(prior, rng);
    const Eigen::VectorXd x = sample_mvn(Eigen::VectorXd::Zero(2), sigma / u, rng);
    const double delta = x.dot(llt.solve(x));
    u_post.push_back(sample_gamma(gamma_posterior(prior, 2, delta), rng));
  }
  EXPECT_GT(oracle::ks_pvalue(u_post, oracle::gamma_cdf(2.5, 3.5)), 0.01);
}

TEST(Mvn, MeanAndCorrelation) {
  RandomStream rng(31);
  const Eigen::MatrixXd cov = (Eigen::MatrixXd(2, 2) << 1.0, 0.5, 0.5, 1.0).finished();
  std::vector<double> a, b;
  for (int i = 0; i < 1'000'000; ++i) {
    const auto x = sample_mvn(Eigen::VectorXd::Zero(2), cov, rng);
    a.push_back(x[0]);
    b.push_back(x[1]);
  }
  EXPECT_NEAR(oracle::mean_se(a).mean, 0.0, 0.005);
  EXPECT_NEAR(oracle::mean_se(b).mean, 0.0, 0.005);
  EXPECT_NEAR(oracle::correlation(a, b).first, 0.5, 0.01);
}

TEST(Mvn, NotPositiveDefiniteThrows) {
  RandomStream rng(1);
  const Eigen::MatrixXd cov = (Eigen::MatrixXd(2, 2) << 1.0, 0.0, 0.0, -0.1).finished();
  EXPECT_THROW(sample_mvn(Eigen::VectorXd::Zero(2), cov, rng), std::domain_error);
  EXPECT_THROW(MvtParams(3.0, Eigen::VectorXd::Zero(2), cov), std::domain_error);
}

TEST(Mvt, GaussianVariantMatchesMvnPath) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  const MvtParams t(std::numeric_limits<double>::infinity(), Eigen::VectorXd::Zero(2), I);
  RandomStream a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_mvt(t, a), sample_mvn(Eigen::VectorXd::Zero(2), I, b));
  }
}

TEST(Mvt, UnivariateKsAgainstStudentT) {
  for (double nu : {1.0, 3.0, 10.0}) {
    const MvtParams t(nu, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
    RandomStream rng(41);
    std::vector<double> v(100000);
    for (auto& x : v) x = sample_mvt(t, rng)[0];
    EXPECT_GT(oracle::ks_pvalue(v, oracle::t_cdf(nu)), 0.01) << "nu " << nu;
  }
}

TEST(Mvt, CovarianceFactor) {
  const MvtParams t(3.0, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  RandomStream rng(42);
  Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d x = sample_mvt(t, rng);
    s += x * x.transpose();
  }
  s /= n;
  EXPECT_NEAR(s(0, 0), 3.0, 0.15);
  EXPECT_NEAR(s(1, 1), 3.0, 0.15);
  EXPECT_NEAR(s(0, 1), 0.0, 0.15);
}

TEST(Mvt, CauchyLogDensity) {
  const MvtParams t(1.0, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  EXPECT_NEAR(mvt_logpdf(t, Eigen::VectorXd::Zero(1)), std::log(1 / std::numbers::pi), 1e-12);
  EXPECT_NEAR(mvt_logpdf(t, Eigen::VectorXd::Ones(1)), std::log(1 / (2 * std::numbers::pi)), 1e-12);
}

TEST(Mvt, LogDensityMatchesUnivariateT) {
  boost::math::students_t_distribution<double> ref(4.5);
  const MvtParams t(4.5, Eigen::VectorXd::Constant(1, 0.7), Eigen::MatrixXd::Constant(1, 1, 2.25));
  for (double x : {-5.0, -1.0, 0.0, 0.7, 3.3, 20.0}) {
    const double expect = std::log(boost::math::pdf(ref, (x - 0.7) / 1.5) / 1.5);
    EXPECT_NEAR(mvt_logpdf(t, Eigen::VectorXd::Constant(1, x)), expect, 1e-10);
  }
}

TEST(Mvt, DensityIntegratesToOne) {
  const Eigen::MatrixXd corr = (Eigen::MatrixXd(2, 2) << 1.0, 0.5, 0.5, 2.0).finished();
  for (double nu : {1.0, 3.0, 30.0}) {
    EXPECT_NEAR(mvt_total_mass(MvtParams(nu, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2))), 1.0, 1e-4);
    EXPECT_NEAR(mvt_total_mass(MvtParams(nu, Eigen::Vector2d(1.0, -2.0), corr)), 1.0, 1e-4);
  }
  EXPECT_NEAR(mvt_total_mass(MvtParams(std::numeric_limits<double>::infinity(), Eigen::VectorXd::Zero(2), corr)), 1.0,
              1e-4);
}

TEST(Mvt, InvalidConstruction) {
  EXPECT_THROW(MvtParams(0.0, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)), std::invalid_argument);
  EXPECT_THROW(MvtParams(3.0, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(1, 1)), std::invalid_argument);
  const Eigen::MatrixXd asym = (Eigen::MatrixXd(2, 2) << 1.0, 0.2, 0.0, 1.0).finished();
  EXPECT_THROW(MvtParams(3.0, Eigen::VectorXd::Zero(2), asym), std::invalid_argument);
}

TEST(Digamma, KnownValues) {
  EXPECT_NEAR(digamma(1.0), -0.5772156649, 1e-10);
  EXPECT_NEAR(digamma(0.5), -1.9635100260, 1e-10);
  EXPECT_NEAR(digamma(10.0), 2.2517525891, 1e-10);
  EXPECT_THROW(digamma(0.0), std::domain_error);
  EXPECT_THROW(digamma(-1.0), std::domain_error);
}

TEST(Digamma, RecurrenceAndReference) {
  for (double x = 0.1; x <= 100.0; x *= 1.07) {
    EXPECT_NEAR(digamma(x + 1) - digamma(x), 1 / x, 1e-10) << x;
    EXPECT_NEAR(digamma(x), boost::math::digamma(x), 1e-12 * std::max(1.0, std::abs(digamma(x)))) << x;
  }
}

TEST(Digamma, FloatInstantiation) {
  EXPECT_NEAR(digamma(1.0f), -0.5772157f, 1e-5f);
  EXPECT_NEAR(static_cast<double>(digamma(3.0L)), 0.9227843350984671, 1e-14);
}

// Scale-mixture identity: u ~ Ga(a, b), x | u ~ N(mu, Sigma/u) gives
// x ~ t_{2a}(mu, (b/a) Sigma). Checked on a unit-norm projection.
class Conjugacy : public ::testing::TestWithParam<std::pair<double, double>> {};

TEST_P(Conjugacy, CompoundMatchesStudentT) {
  const auto [a, b] = GetParam();
  RandomStream rng(51);
  const Eigen::MatrixXd sigma = (Eigen::MatrixXd(2, 2) << 1.0, 0.5, 0.5, 1.0).finished();
  const Eigen::Vector2d mu(0.5, -1.0);
  const GammaParams prior = gamma_posterior({a, b}, 0, 0.0);
  std::vector<double> x0, x1;
  for (int i = 0; i < 20000; ++i) {
    const double u = sample_gamma(prior, rng);
    const Eigen::VectorXd x = sample_mvn(mu, sigma / u, rng);
    x0.push_back(x[0]);
    x1.push_back(x[1]);
  }
  const double scale = std::sqrt(b / a);
  EXPECT_GT(oracle::ks_pvalue(x0, oracle::t_cdf(2 * a, mu[0], scale)), 0.01);
  EXPECT_GT(oracle::ks_pvalue(x1, oracle::t_cdf(2 * a, mu[1], scale)), 0.01);
}

INSTANTIATE_TEST_SUITE_P(ShapeRate, Conjugacy,
                         ::testing::Values(std::pair{0.5, 0.5}, std::pair{1.5, 1.5}, std::pair{5.0, 5.0},
                                           std::pair{2.5, 3.5}));
