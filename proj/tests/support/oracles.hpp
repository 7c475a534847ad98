#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include "tppca/core_model.hpp"
#include "tppca/random.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

// Two-sided one-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Asymptotic Kolmogorov tail with Stephens' finite-n correction.
inline double kolmogorov_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline double ks_pvalue(const std::vector<double>& x, const std::function<double(double)>& cdf) {
  return kolmogorov_pvalue(ks_statistic(x, cdf), x.size());
}

// CDF of loc + scale * T with T ~ t_nu.
inline std::function<double(double)> t_cdf(double nu, double loc = 0.0, double scale = 1.0) {
  boost::math::students_t_distribution<double> t(nu);
  return [t, loc, scale](double x) { return boost::math::cdf(t, (x - loc) / scale); };
}

// Shape/rate gamma CDF.
inline std::function<double(double)> gamma_cdf(double shape, double rate) {
  boost::math::gamma_distribution<double> g(shape, 1.0 / rate);
  return [g](double x) { return x <= 0 ? 0.0 : boost::math::cdf(g, x); };
}

inline std::function<double(double)> normal_cdf(double mean = 0.0, double sd = 1.0) {
  boost::math::normal_distribution<double> nd(mean, sd);
  return [nd](double x) { return boost::math::cdf(nd, x); };
}

struct MeanSe {
  double mean;
  double se;
  double var;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double a : v) ss += (a - m) * (a - m);
  const double var = ss / (n - 1);
  return {m, std::sqrt(var / n), var};
}

// Standard error of the sample variance, from the fourth central moment.
inline double variance_se(const std::vector<double>& v) {
  const auto ms = mean_se(v);
  double m4 = 0.0;
  for (double a : v) m4 += std::pow(a - ms.mean, 4);
  m4 /= static_cast<double>(v.size());
  return std::sqrt((m4 - ms.var * ms.var) / static_cast<double>(v.size()));
}

// Sample correlation with its large-sample standard error (1 - r^2)/sqrt(n).
inline std::pair<double, double> correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ma = mean_se(a), mb = mean_se(b);
  double sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sab += (a[i] - ma.mean) * (b[i] - mb.mean);
  sab /= static_cast<double>(a.size() - 1);
  const double r = sab / std::sqrt(ma.var * mb.var);
  return {r, (1 - r * r) / std::sqrt(static_cast<double>(a.size()))};
}

// Reference gamma and normal draws from the standard library, independent of
// the samplers under test.
struct RefRng {
  std::mt19937_64 eng;
  explicit RefRng(std::uint64_t seed) : eng(seed) {}
  double gamma(double shape, double rate) { return std::gamma_distribution<double>(shape, 1.0 / rate)(eng); }
  double normal() { return std::normal_distribution<double>()(eng); }
  double uniform() { return std::uniform_real_distribution<double>()(eng); }
};

struct Triple {
  double u1, u2;
  Eigen::VectorXd z;
};

// Exact draws from (u1, u2, z) | x under the independent-scale model, by
// rejection from the proposal u1 ~ Ga((nu1+q)/2, nu1/2), u2 ~ Ga(nu2/2, nu2/2),
// z | u2 ~ N(0, I/u2). The target over the proposal is proportional to
// exp(-u1 ||x - W z - mu||^2 / (2 sigma2)) <= 1.
inline std::vector<Triple> rejection_cl(const tppca::ModelParams& p, const Eigen::VectorXd& x, std::size_t n,
                                        std::uint64_t seed) {
  const auto& pair = std::get<tppca::PairNu>(p.dof);
  const double nu1 = pair.nu1.value, nu2 = pair.nu2.value;
  const auto q = static_cast<double>(p.q());
  RefRng rng(seed);
  std::vector<Triple> out;
  out.reserve(n);
  Eigen::VectorXd z(p.d());
  while (out.size() < n) {
    const double u1 = rng.gamma((nu1 + q) / 2, nu1 / 2);
    const double u2 = rng.gamma(nu2 / 2, nu2 / 2);
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = rng.normal() / std::sqrt(u2);
    const double r2 = (x - p.W * z - p.mu).squaredNorm();
    if (rng.uniform() < std::exp(-u1 * r2 / (2 * p.sigma2))) out.push_back({u1, u2, z});
  }
  return out;
}

// Long-run Gibbs sampler for the shared-scale model:
//   u | z, x ~ Ga((nu + q + d)/2, (nu + ||x - W z - mu||^2/sigma2 + ||z||^2)/2)
//   z | u, x ~ N(M^-1 W^T (x - mu), (sigma2/u) M^-1),  M = W^T W + sigma2 I
// Returns the mean of u, log u, u z and u z z^T over `draws` sweeps.
struct SharedMoments {
  double u = 0, log_u = 0;
  Eigen::VectorXd uz;
  Eigen::MatrixXd uzz;
};

inline SharedMoments shared_gibbs(const tppca::ModelParams& p, const Eigen::VectorXd& x, std::size_t draws,
                                  std::uint64_t seed) {
  const double nu = std::get<tppca::SingleNu>(p.dof).nu.value;
  const auto q = static_cast<double>(p.q());
  const auto d = p.d();
  RefRng rng(seed);
  const Eigen::MatrixXd M = p.W.transpose() * p.W + p.sigma2 * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd Minv = M.inverse();
  const Eigen::VectorXd mean = Minv * p.W.transpose() * (x - p.mu);
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(p.sigma2 * Minv).matrixL();
  SharedMoments s;
  s.uz = Eigen::VectorXd::Zero(d);
  s.uzz = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd z = mean, eps(d);
  for (std::size_t t = 0; t < draws + 200; ++t) {
    const double r2 = (x - p.W * z - p.mu).squaredNorm();
    const double u = rng.gamma((nu + q + static_cast<double>(d)) / 2, (nu + r2 / p.sigma2 + z.squaredNorm()) / 2);
    for (Eigen::Index k = 0; k < d; ++k) eps[k] = rng.normal();
    z = mean + L * eps / std::sqrt(u);
    if (t < 200) continue;
    s.u += u;
    s.log_u += std::log(u);
    s.uz += u * z;
    s.uzz += u * z * z.transpose();
  }
  const double n = static_cast<double>(draws);
  s.u /= n;
  s.log_u /= n;
  s.uz /= n;
  s.uzz /= n;
  return s;
}

// Trapezoid integral of f over [-h, h]^2 on an m x m grid.
inline double integrate_2d(const std::function<double(double, double)>& f, double h, int m) {
  const double step = 2 * h / (m - 1);
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double wi = (i == 0 || i == m - 1) ? 0.5 : 1.0;
    for (int j = 0; j < m; ++j) {
      const double wj = (j == 0 || j == m - 1) ? 0.5 : 1.0;
      sum += wi * wj * f(-h + i * step, -h + j * step);
    }
  }
  return sum * step * step;
}

// Observed-data log-likelihood of the independent-scale model for d = 1:
// p(x) = integral of t_nu1(x; w z + mu, sigma2 I) t_nu2(z; 0, 1) dz, by
// adaptive Gauss-Kronrod quadrature on the real line.
inline double cl_loglik_d1(const tppca::ModelParams& p, const Eigen::MatrixXd& X) {
  const auto& pair = std::get<tppca::PairNu>(p.dof);
  auto tlog = [](double nu, double r2, double s2, double dim) {
    return std::lgamma((nu + dim) / 2) - std::lgamma(nu / 2) - dim / 2 * std::log(nu * M_PI * s2) -
           (nu + dim) / 2 * std::log1p(r2 / (nu * s2));
  };
  const double q = static_cast<double>(p.q());
  const double inf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (Eigen::Index n = 0; n < X.rows(); ++n) {
    const Eigen::VectorXd x = X.row(n).transpose() - p.mu;
    auto f = [&](double z) {
      const double r2 = (x - p.W.col(0) * z).squaredNorm();
      return std::exp(tlog(pair.nu1.value, r2, p.sigma2, q) + tlog(pair.nu2.value, z * z, 1.0, 1.0));
    };
    total += std::log(boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -inf, inf, 15, 1e-12));
  }
  return total;
}

// Least-squares slope of y against 0..n-1 with its standard error.
inline std::pair<double, double> slope(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  const double xbar = (n - 1) / 2;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sxx += (static_cast<double>(i) - xbar) * (static_cast<double>(i) - xbar);
    sxy += (static_cast<double>(i) - xbar) * (y[i] - ybar);
  }
  const double b = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - ybar - b * (static_cast<double>(i) - xbar);
    rss += r * r;
  }
  return {b, std::sqrt(rss / (n - 2) / sxx)};
}

}  // namespace oracle
