#include "tppca/generators.hpp"

#include "tppca/special_dist.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace tppca {

namespace {

// Draws x = W z + mu + sqrt(sigma2 / u1) eps with z = eps_z / sqrt(u2).
GeneratedSample draw_sample(const ModelParams& p, double u1, double u2, RandomStream& rng) {
  GeneratedSample s;
  s.u1 = u1;
  s.u2 = u2;
  s.z.resize(p.d());
  const double z_scale = 1.0 / std::sqrt(u2);
  for (Eigen::Index i = 0; i < p.d(); ++i) s.z[i] = z_scale * rng.normal();
  const double noise_scale = std::sqrt(p.sigma2 / u1);
  s.x = p.W * s.z + p.mu;
  for (Eigen::Index j = 0; j < p.q(); ++j) s.x[j] += noise_scale * rng.normal();
  return s;
}

std::optional<GammaSampler> prior_sampler(const Nu& nu) { return GammaSampler(0.5 * nu.value); }

// Scale-variable sampler for single-nu models; empty for the Gaussian model.
std::optional<GammaSampler> single_scale(const ModelParams& p, const char* who) {
  if (const auto* s = std::get_if<SingleNu>(&p.dof)) return prior_sampler(s->nu);
  if (is_gaussian(p.dof)) return std::nullopt;
  throw std::invalid_argument(std::string(who) + ": requires SingleNu or Gaussian degrees of freedom");
}

void check_count(int n) {
  if (n < 0) throw std::invalid_argument("sample count must be non-negative");
}

}  // namespace

std::vector<GeneratedSample> gen_cl(const ModelParams& p, int n, RandomStream& rng) {
  validate_params(p);
  check_count(n);
  const auto* pair = std::get_if<PairNu>(&p.dof);
  if (!pair) throw std::invalid_argument("gen_cl: requires PairNu degrees of freedom");
  const GammaSampler g1(0.5 * pair->nu1.value);
  const GammaSampler g2(0.5 * pair->nu2.value);
  std::vector<GeneratedSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u1 = g1(0.5 * pair->nu1.value, rng);
    const double u2 = g2(0.5 * pair->nu2.value, rng);
    out.push_back(draw_sample(p, u1, u2, rng));
  }
  return out;
}

std::vector<GeneratedSample> gen_conditional(const ModelParams& p, int n, RandomStream& rng) {
  validate_params(p);
  check_count(n);
  const auto g = single_scale(p, "gen_conditional");
  std::vector<GeneratedSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = g ? (*g)(g->shape(), rng) : 1.0;
    out.push_back(draw_sample(p, u, 1.0, rng));
  }
  return out;
}

std::vector<GeneratedSample> gen_marginal(const ModelParams& p, int n, RandomStream& rng) {
  validate_params(p);
  check_count(n);
  const auto g = single_scale(p, "gen_marginal");
  std::vector<GeneratedSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = g ? (*g)(g->shape(), rng) : 1.0;
    out.push_back(draw_sample(p, u, u, rng));
  }
  return out;
}

Eigen::MatrixXd observations(const std::vector<GeneratedSample>& samples) {
  if (samples.empty()) return {};
  Eigen::MatrixXd X(static_cast<Eigen::Index>(samples.size()), samples.front().x.size());
  for (std::size_t i = 0; i < samples.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = samples[i].x.transpose();
  return X;
}

Eigen::MatrixXd equicorrelation(int q, double rho) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Constant(q, q, rho);
  S.diagonal().setOnes();
  return S;
}

Dataset gen_experiment(int q, int n_clean, double rho, const OutlierSpec& outliers, RandomStream& rng) {
  if (q < 1) throw std::invalid_argument("gen_experiment: q must be >= 1");
  if (n_clean < 0 || outliers.count < 0) throw std::invalid_argument("gen_experiment: negative row count");
  if (n_clean + outliers.count < 1) throw std::invalid_argument("gen_experiment: empty dataset");
  if (!(outliers.box_halfwidth > 0.0)) throw std::invalid_argument("gen_experiment: box half-width must be positive");
  if (!(std::abs(rho) < 1.0) || (q > 1 && !(rho > -1.0 / (q - 1)))) {
    throw std::invalid_argument("gen_experiment: correlation matrix is not positive definite");
  }
  const Eigen::MatrixXd cov = equicorrelation(q, rho);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("gen_experiment: correlation matrix is not positive definite");
  }
  const Eigen::MatrixXd L = llt.matrixL();

  Dataset data;
  data.X.resize(n_clean + outliers.count, q);
  data.outlier_mask = std::vector<bool>(static_cast<std::size_t>(n_clean + outliers.count), false);
  data.seed = rng.seed();
  Eigen::VectorXd eps(q);
  for (int i = 0; i < n_clean; ++i) {
    for (int j = 0; j < q; ++j) eps[j] = rng.normal();
    data.X.row(i) = (L * eps).transpose();
  }
  const double h = outliers.box_halfwidth;
  for (int i = n_clean; i < n_clean + outliers.count; ++i) {
    for (int j = 0; j < q; ++j) data.X(i, j) = -h + 2.0 * h * rng.uniform();
    (*data.outlier_mask)[static_cast<std::size_t>(i)] = true;
  }
  return data;
}

double check_scale_matrix_limit(double nu, int d, double sigma2) {
  if (!(nu > 2.0)) throw std::domain_error("check_scale_matrix_limit: requires nu > 2");
  if (d < 1) throw std::invalid_argument("check_scale_matrix_limit: d must be >= 1");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("check_scale_matrix_limit: sigma2 must be positive");
  return (nu + nu * d / (nu - 2.0)) / (nu + d);
}

}  // namespace tppca
