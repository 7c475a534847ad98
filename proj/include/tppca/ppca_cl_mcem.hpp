#pragma once

#include "tppca/core_model.hpp"
#include "tppca/ecm.hpp"
#include "tppca/ppca_marginal_t.hpp"
#include "tppca/random.hpp"
#include "tppca/special_dist.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace tppca {

/// One Gibbs state (u1, u2, z) for a single observation.
struct LatentDraw {
  double u1 = 1.0;
  double u2 = 1.0;
  Eigen::VectorXd z;
};

/// Current draw plus the retained history, one row (u1, u2, z^T) per draw.
struct GibbsChainState {
  LatentDraw current;
  Eigen::MatrixXd history;
  Eigen::Index retained = 0;

  void clear() { retained = 0; }
  void record();
};

/// Monte Carlo posterior moments per observation. `moments` holds <u1>,
/// <u1 z> and <u1 z z^T>; the latter is symmetrized on store.
struct CLExpectationSet {
  WeightedMoments moments;
  Eigen::VectorXd u2;
  Eigen::VectorXd log_u1;
  Eigen::VectorXd log_u2;
};

/// Starting point for Monte Carlo EM. MarginalT runs the shared-scale EM to
/// convergence from the median-centered PCA start and takes its mu, W and
/// sigma2; Pca uses the median-centered PCA start directly. Degrees of
/// freedom always start from the requested DofSpec.
enum class McemInit { MarginalT, Pca };

std::string to_string(McemInit m);
McemInit parse_mcem_init(const std::string& s);

/// Monte Carlo EM budget. At EM iteration t the sampler retains
/// min(draws_start + draws_step * t, draws_max) draws after discarding
/// burn_in_first (t = 0) or burn_in (t > 0) sweeps of warm-started chains.
struct McemControl {
  int draws_start = 100;
  int draws_step = 20;
  int draws_max = 1000;
  int burn_in_first = 20;
  int burn_in = 5;
  int max_iter = 100;
  double param_tol = 1e-4;
  int window = 5;
  McemInit init = McemInit::MarginalT;
  int threads = 1;

  int draws(int iteration) const;
  int burn(int iteration) const { return iteration == 0 ? burn_in_first : burn_in; }
};

void validate(const McemControl& ctrl);

/// Full-conditional sampler for fixed parameters. Works in the eigenbasis of
/// W^T W = V Lambda V^T, where M = W^T W + c I has inverse
/// V diag(1/(lambda + c)) V^T for every c = sigma2 u2 / u1, so a sweep costs
/// O(d) once an observation has been prepared.
///
/// Sweep order u1 -> u2 -> z:
///   u1 ~ Ga((nu1 + q)/2, (nu1 + ||x - W z - mu||^2 / sigma2)/2)
///   u2 ~ Ga((nu2 + d)/2, (nu2 + ||z||^2)/2)
///   z  ~ N(M^-1 W^T (x - mu), (sigma2/u1) M^-1)
/// PairNu samples both scales; SingleNu pins u2 = 1 (conditional model);
/// GaussianDof pins both.
class GibbsKernel {
 public:
  explicit GibbsKernel(const ModelParams& p);

  struct Observation {
    Eigen::VectorXd b;     // V^T W^T (x - mu)
    double centered_norm2; // ||x - mu||^2
  };

  Observation prepare(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// One sweep on (u1, u2, y) with y = V^T z.
  void sweep(const Observation& obs, double& u1, double& u2, Eigen::VectorXd& y, RandomStream& rng) const;

  Eigen::VectorXd to_latent(const Eigen::VectorXd& y) const { return basis_ * y; }
  Eigen::VectorXd to_eigenbasis(const Eigen::VectorXd& z) const { return basis_.transpose() * z; }
  const Eigen::MatrixXd& basis() const { return basis_; }

  GammaParams u1_conditional(double residual_norm2) const;
  GammaParams u2_conditional(double z_norm2) const;

 private:
  double sigma2_;
  Eigen::Index q_;
  Eigen::Index d_;
  Eigen::MatrixXd basis_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd projection_;  // V^T W^T
  Eigen::VectorXd mu_;
  std::optional<double> nu1_;
  std::optional<double> nu2_;
  std::optional<GammaSampler> g1_;
  std::optional<GammaSampler> g2_;
};

/// Single Gibbs sweep for observation x. Returns the state with its current
/// draw replaced; history is left untouched.
GibbsChainState gibbs_sweep(const ModelParams& p, const Eigen::Ref<const Eigen::VectorXd>& x,
                            GibbsChainState s, RandomStream& rng);

/// Runs `burn_in` discarded sweeps then records `draws` sweeps into the
/// chain's history, replacing any previous history.
void run_chain(const GibbsKernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& x, GibbsChainState& s,
               int burn_in, int draws, RandomStream& rng);

/// Empirical means of u1, u2, log u1, log u2, u1 z and u1 z z^T over the last
/// `draws` retained draws of each chain.
CLExpectationSet mc_expectations(const std::vector<GibbsChainState>& chains, int draws);

/// ECM update mu -> W -> sigma2, then each estimated nu from its score
/// equation. PairNu updates nu1 from u1 and nu2 from u2; SingleNu updates
/// its nu from u1.
MStepResult mstep_cl(const CLExpectationSet& e, const Dataset& data, const ModelParams& current);

/// Monte Carlo estimate of the expected complete-data log-likelihood at `p`,
/// dropping terms that do not depend on the parameters.
double expected_complete_loglik(const CLExpectationSet& e, const Dataset& data, const ModelParams& p);

/// MCEM for the independent-scale model. Requires PairNu. Chain n uses
/// rng.split(n) for the whole fit, so results do not depend on ctrl.threads.
FitResult fit_cl_mcem(const Dataset& data, int d, const DofSpec& dof, const McemControl& ctrl, RandomStream& rng);

/// Same machinery with u2 pinned to 1 (Gaussian latent layer). Requires
/// SingleNu or GaussianDof.
FitResult fit_conditional_t(const Dataset& data, int d, const DofSpec& dof, const McemControl& ctrl,
                            RandomStream& rng);

}  // namespace tppca
