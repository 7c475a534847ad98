#include "tppca/ppca_marginal_t.hpp"

#include "tppca/parallel.hpp"
#include "tppca/special_dist.hpp"

#include <cmath>
#include <limits>

namespace tppca {

namespace {

double single_nu(const ModelParams& p, const char* who) {
  if (const auto* s = std::get_if<SingleNu>(&p.dof)) return s->nu.value;
  if (is_gaussian(p.dof)) return std::numeric_limits<double>::infinity();
  throw std::invalid_argument(std::string(who) + ": requires SingleNu or Gaussian degrees of freedom");
}

Eigen::MatrixXd marginal_covariance(const ModelParams& p) {
  Eigen::MatrixXd C = p.W * p.W.transpose();
  C.diagonal().array() += p.sigma2;
  return C;
}

}  // namespace

double loglik_marginal(const ModelParams& p, const Dataset& data) {
  validate_params(p);
  if (data.q() != p.q()) throw std::invalid_argument("loglik_marginal: dimension mismatch");
  const MvtParams dist(single_nu(p, "loglik_marginal"), p.mu, marginal_covariance(p));
  double total = 0.0;
  for (Eigen::Index n = 0; n < data.n(); ++n) total += mvt_logpdf(dist, data.X.row(n).transpose());
  return total;
}

MarginalEStep estep_marginal(const ModelParams& p, const Dataset& data, int threads) {
  validate_params(p);
  if (data.q() != p.q()) throw std::invalid_argument("estep_marginal: dimension mismatch");
  const double nu = single_nu(p, "estep_marginal");
  const bool gaussian = std::isinf(nu);
  const Eigen::Index N = data.n();
  const Eigen::Index q = p.q();
  const Eigen::Index d = p.d();

  const Eigen::LLT<Eigen::MatrixXd> c_llt(marginal_covariance(p));
  if (c_llt.info() != Eigen::Success) throw std::domain_error("estep_marginal: W W^T + sigma2 I not positive definite");
  Eigen::MatrixXd M = p.W.transpose() * p.W;
  M.diagonal().array() += p.sigma2;
  const Eigen::LLT<Eigen::MatrixXd> m_llt(M);
  const Eigen::MatrixXd M_inv = m_llt.solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd proj = M_inv * p.W.transpose();  // d x q
  const Eigen::MatrixXd base_cov = p.sigma2 * M_inv;

  MarginalEStep e;
  e.moments.u.resize(N);
  e.moments.uz.resize(N, d);
  e.moments.uzz.assign(static_cast<std::size_t>(N), Eigen::MatrixXd());
  e.log_u.resize(N);
  const double shape = gaussian ? 0.0 : 0.5 * (nu + static_cast<double>(q));
  const double log_shape_digamma = gaussian ? 0.0 : digamma(shape);

  parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t idx) {
    const auto n = static_cast<Eigen::Index>(idx);
    const Eigen::VectorXd xc = data.X.row(n).transpose() - p.mu;
    const Eigen::VectorXd mean = proj * xc;
    double u = 1.0;
    double log_u = 0.0;
    if (!gaussian) {
      const double delta = c_llt.matrixL().solve(xc).squaredNorm();
      const double rate = 0.5 * (nu + delta);
      u = shape / rate;
      log_u = log_shape_digamma - std::log(rate);
    }
    e.moments.u[n] = u;
    e.log_u[n] = log_u;
    e.moments.uz.row(n) = u * mean.transpose();
    e.moments.uzz[idx] = base_cov + u * mean * mean.transpose();
  });
  return e;
}

MStepResult mstep_marginal(const MarginalEStep& e, const Dataset& data, const ModelParams& current) {
  MStepResult out{ecm_location_scale_update(e.moments, data.X, current), false};
  if (auto* s = std::get_if<SingleNu>(&out.params.dof); s && s->nu.estimated) {
    const double c = (e.log_u - e.moments.u).mean();
    const DofUpdate upd = solve_dof(c, s->nu);
    s->nu.value = upd.value;
    out.nu_clamped = upd.clamped;
  }
  return out;
}

FitResult fit_marginal_em(const Dataset& data, int d, const DofSpec& dof, const EmControl& ctrl,
                          RandomStream& rng) {
  validate_dataset(data);
  if (is_pair(dof)) throw std::invalid_argument("fit_marginal_em: requires SingleNu or Gaussian degrees of freedom");
  if (d < 1 || d >= data.q()) throw std::invalid_argument("fit_marginal_em: requires 1 <= d < q");

  FitResult r;
  r.seed = rng.seed();
  ModelParams params = initial_params(data.X, d, dof);
  double previous = loglik_marginal(params, data);
  r.trace.push_back({0, previous, 0.0});
  for (int it = 1; it <= ctrl.max_iter; ++it) {
    const MarginalEStep e = estep_marginal(params, data, ctrl.threads);
    MStepResult m = mstep_marginal(e, data, params);
    const double change = relative_param_change(params, m.params);
    params = std::move(m.params);
    r.nu_clamped = m.nu_clamped;
    const double ll = loglik_marginal(params, data);
    r.trace.push_back({it, ll, change});
    r.n_iter = it;
    if (std::abs(ll - previous) < ctrl.tol * std::abs(previous)) {
      r.converged = true;
      break;
    }
    previous = ll;
  }
  r.params = std::move(params);
  return r;
}

}  // namespace tppca
