#include "tppca/experiments.hpp"
#include "tppca/io.hpp"
#include "tppca/metrics.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

using namespace tppca;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
};

void add_common(CLI::App* app, Common& c, bool out_required) {
  app->add_option("--seed", c.seed, "Root random seed")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  auto* o = app->add_option("--out", c.out, "Output path");
  if (out_required) o->required();
}

const std::map<std::string, ModelId> kModels{{"standard", ModelId::Standard},
                                             {"marginal-t", ModelId::MarginalT},
                                             {"conditional-t", ModelId::ConditionalT},
                                             {"cl-t", ModelId::ClT}};

struct DofOptions {
  std::string mode = "estimate";
  double nu = kDefaultNuInit;
  std::optional<double> nu2;
  double lower = kDefaultNuLower;
  double upper = kDefaultNuUpper;

  void add(CLI::App* app) {
    app->add_option("--nu-mode", mode, "estimate or fixed")
        ->check(CLI::IsMember({"estimate", "fixed"}))
        ->capture_default_str();
    app->add_option("--nu", nu, "Degrees of freedom (initial value when estimated; nu1 for cl-t)")
        ->capture_default_str();
    app->add_option("--nu2", nu2, "Latent-layer degrees of freedom for cl-t (defaults to --nu)");
    app->add_option("--nu-lower", lower, "Lower end of the nu search bracket")->capture_default_str();
    app->add_option("--nu-upper", upper, "Upper end of the nu search bracket")->capture_default_str();
  }

  DofSpec spec(ModelId m) const {
    const bool est = mode == "estimate";
    auto make = [&](double v) { return Nu{v, est, lower, upper}; };
    switch (m) {
      case ModelId::Standard:
        return GaussianDof{};
      case ModelId::MarginalT:
      case ModelId::ConditionalT:
        return SingleNu{make(nu)};
      case ModelId::ClT:
        return PairNu{make(nu), make(nu2.value_or(nu))};
    }
    return GaussianDof{};
  }
};

void add_mcem(CLI::App* app, McemControl& m) {
  app->add_option("--draws-start", m.draws_start, "Retained draws at the first MCEM iteration")->capture_default_str();
  app->add_option("--draws-step", m.draws_step, "Extra retained draws per MCEM iteration")->capture_default_str();
  app->add_option("--draws-max", m.draws_max, "Cap on retained draws")->capture_default_str();
  app->add_option("--burn-in-first", m.burn_in_first, "Burn-in sweeps at the first iteration")->capture_default_str();
  app->add_option("--burn-in", m.burn_in, "Burn-in sweeps at later iterations")->capture_default_str();
  app->add_option("--mcem-max-iter", m.max_iter, "MCEM iteration cap")->capture_default_str();
  app->add_option("--param-tol", m.param_tol, "Window-averaged relative parameter change threshold")
      ->capture_default_str();
  app->add_option("--window", m.window, "Stopping-rule averaging window")->capture_default_str();
  app->add_option_function<std::string>(
         "--mcem-init", [&m](const std::string& s) { m.init = parse_mcem_init(s); },
         "Starting point: marginal-t (shared-scale EM fit, default) or pca (median-centered PCA)")
      ->check(CLI::IsMember({"marginal-t", "pca"}));
}

ModelParams params_from_inline(const std::vector<double>& w, int d, const std::vector<double>& mu, double sigma2,
                               const DofSpec& dof) {
  if (d < 1 || w.empty() || w.size() % static_cast<std::size_t>(d) != 0) {
    throw std::invalid_argument("--W must hold q*d values in row-major order");
  }
  const auto q = static_cast<Eigen::Index>(w.size()) / d;
  ModelParams p;
  p.W.resize(q, d);
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) p.W(i, j) = w[static_cast<std::size_t>(i * d + j)];
  }
  p.mu = Eigen::VectorXd::Zero(q);
  if (!mu.empty()) {
    if (static_cast<Eigen::Index>(mu.size()) != q) throw std::invalid_argument("--mu must hold q values");
    for (Eigen::Index i = 0; i < q; ++i) p.mu[i] = mu[static_cast<std::size_t>(i)];
  }
  p.sigma2 = sigma2;
  p.dof = dof;
  validate_params(p);
  return p;
}

fs::path sidecar(const fs::path& p) {
  fs::path s = p;
  s += ".json";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust probabilistic PCA with multivariate t-distributions"};
  app.require_subcommand(1);

  // generate
  Common gen_c;
  std::string gen_model = "cl-t", gen_params, gen_recipe;
  int gen_n = 200, gen_q = 2, gen_n_clean = 200, gen_outliers = 0;
  double gen_rho = 0.5, gen_box = 10.0;
  auto* gen = app.add_subcommand("generate", "Sample a dataset from a model or an experiment recipe");
  add_common(gen, gen_c, true);
  gen->add_option("--model", gen_model, "Generative model")->check(CLI::IsMember({"standard", "marginal-t", "conditional-t", "cl-t"}))->capture_default_str();
  gen->add_option("--params", gen_params, "Model parameters (JSON)");
  gen->add_option("-n,--n", gen_n, "Number of samples")->capture_default_str();
  gen->add_option("--experiment", gen_recipe, "Builtin experiment recipe (2A, 2B, 20A, 20B)");
  gen->add_option("--q", gen_q, "Dimension for a custom experiment recipe")->capture_default_str();
  gen->add_option("--n-clean", gen_n_clean, "Clean rows for a custom recipe")->capture_default_str();
  gen->add_option("--rho", gen_rho, "Equicorrelation for a custom recipe")->capture_default_str();
  gen->add_option("--outliers", gen_outliers, "Outlier count for a custom recipe")->capture_default_str();
  gen->add_option("--box", gen_box, "Outlier box half-width for a custom recipe")->capture_default_str();

  // fit
  Common fit_c;
  std::string fit_data, fit_model_name = "standard", fit_trace;
  int fit_d = 1;
  DofOptions fit_dof;
  EmControl fit_em;
  McemControl fit_mcem;
  auto* fit = app.add_subcommand("fit", "Fit one estimator to a CSV dataset");
  add_common(fit, fit_c, false);
  fit->add_option("--data", fit_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--model", fit_model_name, "Estimator")->check(CLI::IsMember({"standard", "marginal-t", "conditional-t", "cl-t"}))->capture_default_str();
  fit->add_option("-d,--d", fit_d, "Latent dimension")->capture_default_str();
  fit_dof.add(fit);
  fit->add_option("--tol", fit_em.tol, "EM relative log-likelihood tolerance")->capture_default_str();
  fit->add_option("--max-iter", fit_em.max_iter, "EM iteration cap")->capture_default_str();
  add_mcem(fit, fit_mcem);
  fit->add_option("--trace", fit_trace, "Write the convergence trace CSV here");

  // angle
  Common ang_c;
  std::string ang_a, ang_b, ang_basis_a, ang_basis_b;
  auto* ang = app.add_subcommand("angle", "First principal angle between two subspaces");
  add_common(ang, ang_c, false);
  ang->add_option("--a", ang_a, "First parameter file (JSON)");
  ang->add_option("--b", ang_b, "Second parameter file (JSON)");
  ang->add_option("--basis-a", ang_basis_a, "First spanning set (CSV, one column per vector)");
  ang->add_option("--basis-b", ang_basis_b, "Second spanning set (CSV, one column per vector)");

  // experiment
  Common exp_c;
  std::string exp_config, exp_builtin;
  std::optional<int> exp_reps;
  auto* exp = app.add_subcommand("experiment", "Run a simulation study");
  add_common(exp, exp_c, true);
  exp->add_option("--config", exp_config, "Experiment config (JSON)");
  exp->add_option("--builtin", exp_builtin, "Builtin config name (2A, 2B, 20A, 20B)");
  exp->add_option("--replicates", exp_reps, "Override the replicate count");

  // reproduce-tables
  Common rep_c;
  std::optional<std::string> rep_only;
  std::optional<int> rep_reps;
  auto* rep = app.add_subcommand("reproduce-tables", "Run all builtin studies and compare with reference values");
  add_common(rep, rep_c, true);
  rep->add_option("--only", rep_only, "Run a single builtin config");
  rep->add_option("--replicates", rep_reps, "Override the replicate count (marks rows reduced)");

  // figure-data
  Common fig_c;
  std::string fig_model = "cl-t", fig_params;
  std::vector<double> fig_w{2.0, 1.0}, fig_mu;
  int fig_d = 1, fig_n = 10000;
  double fig_sigma2 = 0.5, fig_window = 100.0;
  DofOptions fig_dof;
  fig_dof.mode = "fixed";
  fig_dof.nu = 3.0;
  auto* fig = app.add_subcommand("figure-data", "Emit window-filtered samples for scatter plots");
  add_common(fig, fig_c, true);
  fig->add_option("--model", fig_model, "Generative model")->check(CLI::IsMember({"standard", "marginal-t", "conditional-t", "cl-t"}))->capture_default_str();
  fig->add_option("--params", fig_params, "Model parameters (JSON); overrides the inline options");
  fig->add_option("--W", fig_w, "Loadings, row-major q*d values")->capture_default_str()->delimiter(',');
  fig->add_option("-d,--d", fig_d, "Latent dimension")->capture_default_str();
  fig->add_option("--mu", fig_mu, "Mean (default 0)")->delimiter(',');
  fig->add_option("--sigma2", fig_sigma2, "Noise variance")->capture_default_str();
  fig_dof.add(fig);
  fig->add_option("-n,--n", fig_n, "Samples to generate")->capture_default_str();
  fig->add_option("--window", fig_window, "Half-width of the square plotting window")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      RandomStream rng(gen_c.seed);
      Dataset data;
      io::json side{{"seed", gen_c.seed}};
      if (!gen_recipe.empty() || gen_params.empty()) {
        ExperimentConfig cfg;
        if (!gen_recipe.empty()) {
          cfg = builtin_config(gen_recipe);
        } else {
          cfg.q = gen_q;
          cfg.n_clean = gen_n_clean;
          cfg.rho = gen_rho;
          cfg.outliers = {gen_outliers, gen_box};
        }
        data = tppca::gen_experiment(cfg.q, cfg.n_clean, cfg.rho, cfg.outliers, rng);
        side["recipe"] = {{"q", cfg.q},
                          {"n_clean", cfg.n_clean},
                          {"rho", cfg.rho},
                          {"outliers", {{"count", cfg.outliers.count}, {"box_halfwidth", cfg.outliers.box_halfwidth}}}};
      } else {
        const ModelParams p = io::read_params(gen_params);
        std::vector<GeneratedSample> s;
        const ModelId m = kModels.at(gen_model);
        if (m == ModelId::ClT) {
          s = gen_cl(p, gen_n, rng);
        } else if (m == ModelId::MarginalT) {
          s = gen_marginal(p, gen_n, rng);
        } else {
          s = gen_conditional(p, gen_n, rng);
        }
        data.X = observations(s);
        data.seed = gen_c.seed;
        side["model"] = gen_model;
        side["params"] = io::params_to_json(p);
        side["n"] = gen_n;
      }
      io::write_dataset_csv(gen_c.out, data);
      io::write_json(sidecar(gen_c.out), side);
      std::cout << "wrote " << data.n() << " rows to " << gen_c.out << '\n';
    } else if (fit->parsed()) {
      const Dataset data = io::read_dataset_csv(fit_data);
      const ModelId m = kModels.at(fit_model_name);
      fit_em.threads = fit_c.threads;
      fit_mcem.threads = fit_c.threads;
      RandomStream rng(fit_c.seed);
      const FitResult r = fit_model({m, fit_dof.spec(m)}, data, fit_d, fit_em, fit_mcem, rng);
      io::json j = io::fit_result_to_json(r);
      j["model"] = fit_model_name;
      if (fit_c.out.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        io::write_json(fit_c.out, j);
      }
      if (!fit_trace.empty()) io::write_trace_csv(fit_trace, r);
      std::cerr << fit_model_name << ": " << r.n_iter << " iterations, converged=" << std::boolalpha << r.converged
                << '\n';
    } else if (ang->parsed()) {
      Eigen::MatrixXd A, B;
      if (!ang_a.empty() && !ang_b.empty()) {
        A = io::read_params(ang_a).W;
        B = io::read_params(ang_b).W;
      } else if (!ang_basis_a.empty() && !ang_basis_b.empty()) {
        A = io::read_matrix_csv(ang_basis_a);
        B = io::read_matrix_csv(ang_basis_b);
      } else {
        throw std::invalid_argument("give either --a/--b or --basis-a/--basis-b");
      }
      const double theta = first_principal_angle(orthonormalize(A), orthonormalize(B));
      std::cout << io::format_double(theta) << '\n';
      if (!ang_c.out.empty()) io::write_json(ang_c.out, {{"angle", theta}});
    } else if (exp->parsed()) {
      ExperimentConfig cfg;
      if (!exp_config.empty()) {
        cfg = config_from_json(io::read_json(exp_config));
      } else if (!exp_builtin.empty()) {
        cfg = builtin_config(exp_builtin);
      } else {
        throw std::invalid_argument("give --config or --builtin");
      }
      if (exp_reps) cfg.n_replicates = *exp_reps;
      if (exp->count("--seed")) cfg.root_seed = exp_c.seed;
      cfg.threads = exp_c.threads;
      const ExperimentReport report = run_experiment(cfg);
      write_report(report, exp_c.out);
      std::ifstream summary(fs::path(exp_c.out) / "summary.txt");
      std::cout << summary.rdbuf();
    } else if (rep->parsed()) {
      const auto rows = reproduce_tables(rep_c.out, rep_only, rep_reps, rep_c.threads,
                                        rep->count("--seed") ? std::optional<std::uint64_t>(rep_c.seed) : std::nullopt);
      for (const auto& r : rows) {
        std::cout << r.reference.experiment << ' ' << to_string(r.reference.model) << " d=" << r.reference.d << "  reference "
                  << r.reference.mean << "  ours " << io::format_double(r.mean) << "  " << r.status << '\n';
      }
    } else if (fig->parsed()) {
      const ModelId m = kModels.at(fig_model);
      const ModelParams p = fig_params.empty()
                                ? params_from_inline(fig_w, fig_d, fig_mu, fig_sigma2, fig_dof.spec(m))
                                : io::read_params(fig_params);
      RandomStream rng(fig_c.seed);
      const auto kept = emit_figure_data(m, p, fig_n, Window{fig_window}, fig_c.out, rng);
      std::cout << "wrote " << kept << " of " << fig_n << " points to " << fig_c.out << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
