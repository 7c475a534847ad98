#include "tppca/ppca_cl_mcem.hpp"

#include "tppca/parallel.hpp"
#include "tppca/ppca_standard.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace tppca {

int McemControl::draws(int iteration) const {
  return std::min(draws_start + draws_step * iteration, draws_max);
}

void validate(const McemControl& ctrl) {
  if (ctrl.draws_start < 1 || ctrl.draws_max < 1 || ctrl.draws_step < 0) {
    throw std::invalid_argument("McemControl: retained draws must be >= 1");
  }
  if (ctrl.burn_in < 0 || ctrl.burn_in_first < 0) throw std::invalid_argument("McemControl: negative burn-in");
  if (ctrl.max_iter < 1) throw std::invalid_argument("McemControl: max_iter must be >= 1");
  if (ctrl.window < 1) throw std::invalid_argument("McemControl: window must be >= 1");
}

void GibbsChainState::record() {
  const Eigen::Index cols = 2 + current.z.size();
  if (history.cols() != cols) history.resize(std::max<Eigen::Index>(history.rows(), 1), cols);
  if (retained >= history.rows()) history.conservativeResize(std::max<Eigen::Index>(2 * history.rows(), 16), cols);
  history(retained, 0) = current.u1;
  history(retained, 1) = current.u2;
  history.row(retained).tail(current.z.size()) = current.z.transpose();
  ++retained;
}

GibbsKernel::GibbsKernel(const ModelParams& p)
    : sigma2_(p.sigma2), q_(p.q()), d_(p.d()), mu_(p.mu) {
  validate_params(p);
  if (const auto* pr = std::get_if<PairNu>(&p.dof)) {
    nu1_ = pr->nu1.value;
    nu2_ = pr->nu2.value;
  } else if (const auto* s = std::get_if<SingleNu>(&p.dof)) {
    nu1_ = s->nu.value;
  }
  if (nu1_) g1_.emplace(0.5 * (*nu1_ + static_cast<double>(q_)));
  if (nu2_) g2_.emplace(0.5 * (*nu2_ + static_cast<double>(d_)));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.W.transpose() * p.W);
  basis_ = es.eigenvectors();
  lambda_ = es.eigenvalues().cwiseMax(0.0);
  projection_ = basis_.transpose() * p.W.transpose();
}

GibbsKernel::Observation GibbsKernel::prepare(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd xc = x - mu_;
  return {projection_ * xc, xc.squaredNorm()};
}

GammaParams GibbsKernel::u1_conditional(double residual_norm2) const {
  if (!nu1_) throw std::logic_error("u1 is pinned under this model");
  return {0.5 * (*nu1_ + static_cast<double>(q_)), 0.5 * (*nu1_ + residual_norm2 / sigma2_)};
}

GammaParams GibbsKernel::u2_conditional(double z_norm2) const {
  if (!nu2_) throw std::logic_error("u2 is pinned under this model");
  return {0.5 * (*nu2_ + static_cast<double>(d_)), 0.5 * (*nu2_ + z_norm2)};
}

void GibbsKernel::sweep(const Observation& obs, double& u1, double& u2, Eigen::VectorXd& y,
                        RandomStream& rng) const {
  if (g1_) {
    // ||x - mu - W z||^2 = ||x - mu||^2 - 2 y^T b + y^T Lambda y
    double r2 = obs.centered_norm2;
    for (Eigen::Index i = 0; i < d_; ++i) r2 += y[i] * (lambda_[i] * y[i] - 2.0 * obs.b[i]);
    r2 = std::max(r2, 0.0);
    u1 = (*g1_)(0.5 * (*nu1_ + r2 / sigma2_), rng);
  }
  if (g2_) {
    u2 = (*g2_)(0.5 * (*nu2_ + y.squaredNorm()), rng);
  }
  const double c = sigma2_ * u2 / u1;
  const double noise = sigma2_ / u1;
  for (Eigen::Index i = 0; i < d_; ++i) {
    const double prec = std::max(lambda_[i] + c, 1e-12);
    y[i] = obs.b[i] / prec + std::sqrt(noise / prec) * rng.normal();
  }
}

GibbsChainState gibbs_sweep(const ModelParams& p, const Eigen::Ref<const Eigen::VectorXd>& x, GibbsChainState s,
                            RandomStream& rng) {
  if (x.size() != p.q()) throw std::invalid_argument("gibbs_sweep: dimension mismatch");
  if (s.current.z.size() != p.d()) throw std::invalid_argument("gibbs_sweep: latent state has wrong dimension");
  if (!(s.current.u1 > 0.0) || !(s.current.u2 > 0.0)) throw std::invalid_argument("gibbs_sweep: scales must be positive");
  const GibbsKernel kernel(p);
  const auto obs = kernel.prepare(x);
  Eigen::VectorXd y = kernel.to_eigenbasis(s.current.z);
  kernel.sweep(obs, s.current.u1, s.current.u2, y, rng);
  s.current.z = kernel.to_latent(y);
  return s;
}

void run_chain(const GibbsKernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& x, GibbsChainState& s,
               int burn_in, int draws, RandomStream& rng) {
  const auto obs = kernel.prepare(x);
  Eigen::VectorXd y = kernel.to_eigenbasis(s.current.z);
  for (int k = 0; k < burn_in; ++k) kernel.sweep(obs, s.current.u1, s.current.u2, y, rng);
  const Eigen::Index d = y.size();
  s.history.resize(draws, 2 + d);
  s.retained = 0;
  for (int k = 0; k < draws; ++k) {
    kernel.sweep(obs, s.current.u1, s.current.u2, y, rng);
    s.history(k, 0) = s.current.u1;
    s.history(k, 1) = s.current.u2;
    for (Eigen::Index i = 0; i < d; ++i) s.history(k, 2 + i) = y[i];
  }
  // Rows hold y = V^T z; rotate the block back to latent coordinates.
  s.history.rightCols(d) = (s.history.rightCols(d) * kernel.basis().transpose()).eval();
  s.retained = draws;
  s.current.z = kernel.to_latent(y);
}

CLExpectationSet mc_expectations(const std::vector<GibbsChainState>& chains, int draws) {
  if (draws < 1) throw std::invalid_argument("mc_expectations: need at least one draw");
  if (chains.empty()) throw std::invalid_argument("mc_expectations: no chains");
  const auto N = static_cast<Eigen::Index>(chains.size());
  const Eigen::Index d = chains.front().current.z.size();
  CLExpectationSet e;
  e.moments.u.resize(N);
  e.moments.uz.resize(N, d);
  e.moments.uzz.assign(chains.size(), Eigen::MatrixXd());
  e.u2.resize(N);
  e.log_u1.resize(N);
  e.log_u2.resize(N);
  for (Eigen::Index n = 0; n < N; ++n) {
    const auto& c = chains[static_cast<std::size_t>(n)];
    if (c.retained < draws) throw std::invalid_argument("mc_expectations: chain has fewer retained draws than requested");
    const auto h = c.history.middleRows(c.retained - draws, draws);
    const Eigen::VectorXd u1 = h.col(0);
    const Eigen::MatrixXd z = h.rightCols(d);
    const double inv = 1.0 / draws;
    e.moments.u[n] = u1.mean();
    e.u2[n] = h.col(1).mean();
    e.log_u1[n] = u1.array().log().mean();
    e.log_u2[n] = h.col(1).array().log().mean();
    e.moments.uz.row(n) = inv * (u1.transpose() * z);
    Eigen::MatrixXd uzz = inv * (z.transpose() * u1.asDiagonal() * z);
    e.moments.uzz[static_cast<std::size_t>(n)] = 0.5 * (uzz + uzz.transpose());
  }
  return e;
}

MStepResult mstep_cl(const CLExpectationSet& e, const Dataset& data, const ModelParams& current) {
  MStepResult out{ecm_location_scale_update(e.moments, data.X, current), false};
  auto update = [&](Nu& nu, const Eigen::VectorXd& log_u, const Eigen::VectorXd& u) {
    if (!nu.estimated) return;
    const DofUpdate upd = solve_dof((log_u - u).mean(), nu);
    nu.value = upd.value;
    out.nu_clamped = out.nu_clamped || upd.clamped;
  };
  if (auto* pr = std::get_if<PairNu>(&out.params.dof)) {
    update(pr->nu1, e.log_u1, e.moments.u);
    update(pr->nu2, e.log_u2, e.u2);
  } else if (auto* s = std::get_if<SingleNu>(&out.params.dof)) {
    update(s->nu, e.log_u1, e.moments.u);
  }
  return out;
}

double expected_complete_loglik(const CLExpectationSet& e, const Dataset& data, const ModelParams& p) {
  const Eigen::Index N = data.n();
  const double q = static_cast<double>(data.q());
  const Eigen::MatrixXd Xc = data.X.rowwise() - p.mu.transpose();
  const Eigen::MatrixXd WtW = p.W.transpose() * p.W;
  double total = 0.0;
  for (Eigen::Index n = 0; n < N; ++n) {
    const double fit = e.moments.u[n] * Xc.row(n).squaredNorm() -
                       2.0 * e.moments.uz.row(n).dot(Xc.row(n) * p.W) +
                       (WtW * e.moments.uzz[static_cast<std::size_t>(n)]).trace();
    total -= 0.5 * q * std::log(p.sigma2) + 0.5 * fit / p.sigma2;
  }
  auto scale_term = [&](const Nu& nu, const Eigen::VectorXd& log_u, const Eigen::VectorXd& u) {
    const double h = 0.5 * nu.value;
    return static_cast<double>(N) * (h * std::log(h) - std::lgamma(h)) + h * (log_u - u).sum();
  };
  if (const auto* pr = std::get_if<PairNu>(&p.dof)) {
    total += scale_term(pr->nu1, e.log_u1, e.moments.u) + scale_term(pr->nu2, e.log_u2, e.u2);
  } else if (const auto* s = std::get_if<SingleNu>(&p.dof)) {
    total += scale_term(s->nu, e.log_u1, e.moments.u);
  }
  return total;
}

namespace {

FitResult run_mcem(const Dataset& data, int d, const DofSpec& dof, const McemControl& ctrl, RandomStream& rng) {
  validate_dataset(data);
  validate(ctrl);
  if (d < 1 || d >= data.q()) throw std::invalid_argument("MCEM: requires 1 <= d < q");
  const Eigen::Index N = data.n();

  FitResult r;
  r.seed = rng.seed();
  ModelParams params = initial_params(data.X, d, dof);
  if (ctrl.init == McemInit::MarginalT) {
    EmControl em;
    em.threads = ctrl.threads;
    RandomStream unused(0);
    params = fit_marginal_em(data, d, SingleNu{Nu::estimate()}, em, unused).params;
    params.dof = dof;
  }
  validate_params(params);

  std::vector<RandomStream> streams;
  streams.reserve(static_cast<std::size_t>(N));
  for (Eigen::Index n = 0; n < N; ++n) streams.push_back(rng.split(static_cast<std::uint64_t>(n)));

  std::vector<GibbsChainState> chains(static_cast<std::size_t>(N));
  {
    Eigen::MatrixXd M = params.W.transpose() * params.W;
    M.diagonal().array() += params.sigma2;
    const Eigen::MatrixXd proj = M.llt().solve(params.W.transpose());
    for (Eigen::Index n = 0; n < N; ++n) {
      chains[static_cast<std::size_t>(n)].current.z = proj * (data.X.row(n).transpose() - params.mu);
    }
  }

  std::deque<double> recent;
  for (int t = 0; t < ctrl.max_iter; ++t) {
    const GibbsKernel kernel(params);
    const int draws = ctrl.draws(t);
    const int burn = ctrl.burn(t);
    parallel_for(static_cast<std::size_t>(N), ctrl.threads, [&](std::size_t n) {
      run_chain(kernel, data.X.row(static_cast<Eigen::Index>(n)).transpose(), chains[n], burn, draws, streams[n]);
    });
    const CLExpectationSet e = mc_expectations(chains, draws);
    MStepResult m = mstep_cl(e, data, params);
    const double change = relative_param_change(params, m.params);
    params = std::move(m.params);
    r.nu_clamped = m.nu_clamped;
    r.trace.push_back({t + 1, expected_complete_loglik(e, data, params), change});
    r.n_iter = t + 1;

    recent.push_back(change);
    if (static_cast<int>(recent.size()) > ctrl.window) recent.pop_front();
    if (static_cast<int>(recent.size()) == ctrl.window &&
        std::accumulate(recent.begin(), recent.end(), 0.0) / ctrl.window < ctrl.param_tol) {
      r.converged = true;
      break;
    }
  }
  r.params = std::move(params);
  return r;
}

}  // namespace

std::string to_string(McemInit m) { return m == McemInit::MarginalT ? "marginal-t" : "pca"; }

McemInit parse_mcem_init(const std::string& s) {
  if (s == "marginal-t") return McemInit::MarginalT;
  if (s == "pca") return McemInit::Pca;
  throw ValidationError("mcem.init", "unknown initialization '" + s + "' (expected marginal-t or pca)");
}

FitResult fit_cl_mcem(const Dataset& data, int d, const DofSpec& dof, const McemControl& ctrl, RandomStream& rng) {
  if (!is_pair(dof)) throw std::invalid_argument("fit_cl_mcem: requires PairNu degrees of freedom");
  return run_mcem(data, d, dof, ctrl, rng);
}

FitResult fit_conditional_t(const Dataset& data, int d, const DofSpec& dof, const McemControl& ctrl,
                            RandomStream& rng) {
  if (is_pair(dof)) throw std::invalid_argument("fit_conditional_t: requires SingleNu or Gaussian degrees of freedom");
  return run_mcem(data, d, dof, ctrl, rng);
}

}  // namespace tppca
