#include "tppca/experiments.hpp"

#include "tppca/parallel.hpp"
#include "tppca/ppca_standard.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tppca {

namespace {

using io::json;
namespace fs = std::filesystem;

constexpr int kReferenceReplicates = 100;

// Stable per-(model, d) stream key, independent of list order in the config.
std::uint64_t fit_stream_key(ModelId m, int d) {
  return 1000 + 64 * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(d);
}

json nu_to_json(const Nu& n) {
  return {{"value", n.value}, {"estimated", n.estimated}, {"lower", n.lower}, {"upper", n.upper}};
}

Nu nu_from_json(const json& j) {
  Nu n;
  n.value = j.at("value").get<double>();
  n.estimated = j.value("estimated", false);
  n.lower = j.value("lower", kDefaultNuLower);
  n.upper = j.value("upper", kDefaultNuUpper);
  return n;
}

json dof_to_json(const DofSpec& dof) {
  json j{{"variant", dof_variant_name(dof)}};
  if (const auto* s = std::get_if<SingleNu>(&dof)) j["nu"] = nu_to_json(s->nu);
  if (const auto* p = std::get_if<PairNu>(&dof)) {
    j["nu1"] = nu_to_json(p->nu1);
    j["nu2"] = nu_to_json(p->nu2);
  }
  return j;
}

DofSpec dof_from_json(const json& j) {
  const auto v = j.at("variant").get<std::string>();
  if (v == "gaussian") return GaussianDof{};
  if (v == "single") return SingleNu{nu_from_json(j.at("nu"))};
  if (v == "pair") return PairNu{nu_from_json(j.at("nu1")), nu_from_json(j.at("nu2"))};
  throw ValidationError("dof.variant", "unknown variant '" + v + "'");
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::string fixed3(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << v;
  return s.str();
}

struct ReplicateOutcome {
  std::vector<double> angle;               // per cell, NaN on failure
  std::vector<std::string> error;          // per cell, empty on success
  std::uint64_t data_seed = 0;
};

}  // namespace

std::string to_string(ModelId m) {
  switch (m) {
    case ModelId::Standard:
      return "standard";
    case ModelId::MarginalT:
      return "marginal-t";
    case ModelId::ConditionalT:
      return "conditional-t";
    case ModelId::ClT:
      return "cl-t";
  }
  throw std::logic_error("bad ModelId");
}

ModelId parse_model_id(const std::string& s) {
  for (auto m : {ModelId::Standard, ModelId::MarginalT, ModelId::ConditionalT, ModelId::ClT}) {
    if (to_string(m) == s) return m;
  }
  throw ValidationError("models", "unknown model '" + s + "' (expected standard, marginal-t, conditional-t, cl-t)");
}

DofSpec default_dof(ModelId m, bool estimate, double nu) {
  const Nu n = estimate ? Nu::estimate(nu) : Nu::fixed(nu);
  switch (m) {
    case ModelId::Standard:
      return GaussianDof{};
    case ModelId::MarginalT:
    case ModelId::ConditionalT:
      return SingleNu{n};
    case ModelId::ClT:
      return PairNu{n, n};
  }
  throw std::logic_error("bad ModelId");
}

FitResult fit_model(const ModelSpec& spec, const Dataset& data, int d, const EmControl& em,
                    const McemControl& mcem, RandomStream& rng) {
  switch (spec.id) {
    case ModelId::Standard: {
      auto r = fit_standard(data, d);
      r.seed = rng.seed();
      return r;
    }
    case ModelId::MarginalT:
      return fit_marginal_em(data, d, spec.dof, em, rng);
    case ModelId::ConditionalT:
      return fit_conditional_t(data, d, spec.dof, mcem, rng);
    case ModelId::ClT:
      return fit_cl_mcem(data, d, spec.dof, mcem, rng);
  }
  throw std::logic_error("bad ModelId");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.q < 2) throw ValidationError("q", "must be at least 2");
  if (cfg.n_clean < 1) throw ValidationError("n_clean", "must be positive");
  if (cfg.n_replicates < 1) throw ValidationError("n_replicates", "must be at least 1");
  if (cfg.d_list.empty()) throw ValidationError("d_list", "must not be empty");
  for (int d : cfg.d_list) {
    if (d < 1 || d >= cfg.q) throw ValidationError("d_list", "every d must satisfy 1 <= d < q");
  }
  if (cfg.models.empty()) throw ValidationError("models", "must not be empty");
  for (const auto& m : cfg.models) {
    const bool ok = (m.id == ModelId::Standard && is_gaussian(m.dof)) ||
                    (m.id == ModelId::MarginalT && !is_pair(m.dof)) ||
                    (m.id == ModelId::ConditionalT && !is_pair(m.dof)) || (m.id == ModelId::ClT && is_pair(m.dof));
    if (!ok) throw ValidationError("models", "dof variant '" + dof_variant_name(m.dof) + "' does not fit " + to_string(m.id));
  }
  if (cfg.outliers.count < 0) throw ValidationError("outliers.count", "must be non-negative");
  if (!(cfg.outliers.box_halfwidth >= 0)) throw ValidationError("outliers.box_halfwidth", "must be non-negative");
  if (cfg.threads < 1) throw ValidationError("threads", "must be at least 1");
  validate(cfg.mcem);
}

std::vector<std::string> builtin_names() { return {"2A", "2B", "20A", "20B"}; }

ExperimentConfig builtin_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.n_clean = 200;
  cfg.rho = 0.5;
  cfg.n_replicates = kReferenceReplicates;
  if (name == "2A" || name == "20A") {
    cfg.outliers = {20, 10.0};
  } else if (name == "2B" || name == "20B") {
    cfg.outliers = {5, 25.0};
  } else {
    throw ValidationError("name", "unknown builtin experiment '" + name + "'");
  }
  cfg.q = name.size() == 2 ? 2 : 20;
  cfg.d_list = cfg.q == 2 ? std::vector<int>{1} : std::vector<int>{1, 2, 3};
  cfg.models = {{ModelId::Standard, GaussianDof{}},
                {ModelId::MarginalT, default_dof(ModelId::MarginalT)},
                {ModelId::ClT, default_dof(ModelId::ClT)}};
  const std::map<std::string, std::uint64_t> seeds{{"2A", 2001}, {"2B", 2002}, {"20A", 20001}, {"20B", 20002}};
  cfg.root_seed = seeds.at(name);
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json models = json::array();
  for (const auto& m : cfg.models) models.push_back({{"model", to_string(m.id)}, {"dof", dof_to_json(m.dof)}});
  return {{"name", cfg.name},
          {"q", cfg.q},
          {"d_list", cfg.d_list},
          {"n_clean", cfg.n_clean},
          {"rho", cfg.rho},
          {"outliers", {{"count", cfg.outliers.count}, {"box_halfwidth", cfg.outliers.box_halfwidth}}},
          {"n_replicates", cfg.n_replicates},
          {"models", models},
          {"em", {{"tol", cfg.em.tol}, {"max_iter", cfg.em.max_iter}}},
          {"mcem",
           {{"draws_start", cfg.mcem.draws_start},
            {"draws_step", cfg.mcem.draws_step},
            {"draws_max", cfg.mcem.draws_max},
            {"burn_in_first", cfg.mcem.burn_in_first},
            {"burn_in", cfg.mcem.burn_in},
            {"max_iter", cfg.mcem.max_iter},
            {"param_tol", cfg.mcem.param_tol},
            {"window", cfg.mcem.window},
            {"init", to_string(cfg.mcem.init)}}},
          {"root_seed", cfg.root_seed},
          {"threads", cfg.threads}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("builtin")) cfg = builtin_config(j.at("builtin").get<std::string>());
  cfg.name = j.value("name", cfg.name);
  cfg.q = j.value("q", cfg.q);
  if (j.contains("d_list")) cfg.d_list = j.at("d_list").get<std::vector<int>>();
  cfg.n_clean = j.value("n_clean", cfg.n_clean);
  cfg.rho = j.value("rho", cfg.rho);
  if (j.contains("outliers")) {
    cfg.outliers.count = j.at("outliers").value("count", cfg.outliers.count);
    cfg.outliers.box_halfwidth = j.at("outliers").value("box_halfwidth", cfg.outliers.box_halfwidth);
  }
  cfg.n_replicates = j.value("n_replicates", cfg.n_replicates);
  if (j.contains("models")) {
    cfg.models.clear();
    for (const auto& m : j.at("models")) {
      ModelSpec spec;
      if (m.is_string()) {
        spec.id = parse_model_id(m.get<std::string>());
        spec.dof = default_dof(spec.id);
      } else {
        spec.id = parse_model_id(m.at("model").get<std::string>());
        spec.dof = m.contains("dof") ? dof_from_json(m.at("dof")) : default_dof(spec.id);
      }
      cfg.models.push_back(spec);
    }
  }
  if (j.contains("em")) {
    cfg.em.tol = j.at("em").value("tol", cfg.em.tol);
    cfg.em.max_iter = j.at("em").value("max_iter", cfg.em.max_iter);
  }
  if (j.contains("mcem")) {
    const auto& c = j.at("mcem");
    cfg.mcem.draws_start = c.value("draws_start", cfg.mcem.draws_start);
    cfg.mcem.draws_step = c.value("draws_step", cfg.mcem.draws_step);
    cfg.mcem.draws_max = c.value("draws_max", cfg.mcem.draws_max);
    cfg.mcem.burn_in_first = c.value("burn_in_first", cfg.mcem.burn_in_first);
    cfg.mcem.burn_in = c.value("burn_in", cfg.mcem.burn_in);
    cfg.mcem.max_iter = c.value("max_iter", cfg.mcem.max_iter);
    cfg.mcem.param_tol = c.value("param_tol", cfg.mcem.param_tol);
    cfg.mcem.window = c.value("window", cfg.mcem.window);
    if (c.contains("init")) cfg.mcem.init = parse_mcem_init(c.at("init").get<std::string>());
  }
  cfg.root_seed = j.value("root_seed", cfg.root_seed);
  cfg.threads = j.value("threads", cfg.threads);
  validate(cfg);
  return cfg;
}

Subspace<double> true_subspace(const Dataset& data, int d) {
  const Eigen::MatrixXd clean = data.clean_rows();
  if (clean.rows() < 2) throw std::invalid_argument("true_subspace: need at least two clean rows");
  const Eigen::VectorXd mean = clean.colwise().mean().transpose();
  const auto eig = eigen_descending(scatter_about(clean, mean));
  return Subspace<double>::from_orthonormal(eig.eigenvectors.leftCols(d));
}

std::pair<double, double> mean_and_se(const std::vector<double>& v) {
  if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double sum = 0.0;
  for (double a : v) sum += a;
  const double mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double a : v) ss += (a - mean) * (a - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return {mean, sd / std::sqrt(static_cast<double>(v.size()))};
}

const CellResult& ExperimentReport::cell(ModelId m, int d) const {
  for (const auto& c : cells) {
    if (c.model == m && c.d == d) return c;
  }
  throw std::out_of_range("no cell for " + to_string(m) + " d=" + std::to_string(d));
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  struct CellKey {
    ModelSpec spec;
    int d;
  };
  std::vector<CellKey> keys;
  for (const auto& m : cfg.models) {
    for (int d : cfg.d_list) keys.push_back({m, d});
  }

  const RandomStream root(cfg.root_seed);
  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(cfg.n_replicates));
  EmControl em = cfg.em;
  McemControl mcem = cfg.mcem;
  em.threads = 1;
  mcem.threads = 1;

  parallel_for(static_cast<std::size_t>(cfg.n_replicates), cfg.threads, [&](std::size_t i) {
    const RandomStream rep = root.split(i);
    RandomStream data_rng = rep.split(0);
    const Dataset data = gen_experiment(cfg.q, cfg.n_clean, cfg.rho, cfg.outliers, data_rng);
    auto& out = outcomes[i];
    out.data_seed = data_rng.seed();
    out.angle.assign(keys.size(), std::numeric_limits<double>::quiet_NaN());
    out.error.assign(keys.size(), {});
    std::map<int, Subspace<double>> truth;
    for (int d : cfg.d_list) truth.emplace(d, true_subspace(data, d));
    for (std::size_t k = 0; k < keys.size(); ++k) {
      try {
        RandomStream fit_rng = rep.split(fit_stream_key(keys[k].spec.id, keys[k].d));
        const FitResult fit = fit_model(keys[k].spec, data, keys[k].d, em, mcem, fit_rng);
        out.angle[k] = first_principal_angle(orthonormalize(fit.params.W), truth.at(keys[k].d));
        if (!std::isfinite(out.angle[k])) throw std::runtime_error("non-finite angle");
      } catch (const std::exception& e) {
        out.angle[k] = std::numeric_limits<double>::quiet_NaN();
        out.error[k] = e.what();
      }
    }
  });

  ExperimentReport report;
  report.name = cfg.name;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    CellResult c;
    c.model = keys[k].spec.id;
    c.d = keys[k].d;
    for (int i = 0; i < cfg.n_replicates; ++i) {
      const auto& o = outcomes[static_cast<std::size_t>(i)];
      if (o.error[k].empty()) {
        c.replicates.push_back(i);
        c.angles.push_back(o.angle[k]);
      } else {
        c.failures.push_back({i, o.error[k]});
      }
    }
    std::tie(c.mean, c.se) = mean_and_se(c.angles);
    report.cells.push_back(std::move(c));
  }

  json seeds = json::array();
  for (int i = 0; i < cfg.n_replicates; ++i) {
    const RandomStream rep = root.split(static_cast<std::uint64_t>(i));
    json fits = json::object();
    for (const auto& k : keys) {
      fits[to_string(k.spec.id) + "/d" + std::to_string(k.d)] = rep.split(fit_stream_key(k.spec.id, k.d)).seed();
    }
    seeds.push_back({{"replicate", i}, {"seed", rep.seed()}, {"data_seed", outcomes[static_cast<std::size_t>(i)].data_seed}, {"fits", fits}});
  }
  report.manifest = {{"config", config_to_json(cfg)},
                     {"seed_derivation",
                      "replicate i: RandomStream(root_seed).split(i); dataset: .split(0); fit for (model, d): "
                      ".split(1000 + 64*model_index + d) with model_index standard=0, marginal-t=1, "
                      "conditional-t=2, cl-t=3"},
                     {"true_subspace", "top-d eigenvectors of the clean-row covariance"},
                     {"replicate_seeds", seeds}};
  return report;
}

void write_report(const ExperimentReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "report.csv");
    out << "model,d,mean,se,n_ok,n_failed\n";
    for (const auto& c : report.cells) {
      out << to_string(c.model) << ',' << c.d << ',' << io::format_double(c.mean) << ',' << io::format_double(c.se)
          << ',' << c.angles.size() << ',' << c.failures.size() << '\n';
    }
  }
  {
    auto out = open_out(dir / "replicates.csv");
    out << "model,d,replicate,angle,error\n";
    for (const auto& c : report.cells) {
      for (std::size_t i = 0; i < c.angles.size(); ++i) {
        out << to_string(c.model) << ',' << c.d << ',' << c.replicates[i] << ',' << io::format_double(c.angles[i])
            << ",\n";
      }
      for (const auto& f : c.failures) {
        std::string msg = f.message;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        out << to_string(c.model) << ',' << c.d << ',' << f.replicate << ",," << msg << '\n';
      }
    }
  }
  {
    auto out = open_out(dir / "summary.txt");
    out << "Experiment " << report.name << ": mean first principal angle (SE)\n";
    for (const auto& c : report.cells) {
      out << "  " << std::left << std::setw(14) << to_string(c.model) << " d=" << c.d << "  " << fixed3(c.mean) << " ("
          << fixed3(c.se) << ")  n=" << c.angles.size();
      if (!c.failures.empty()) out << "  failed=" << c.failures.size();
      out << '\n';
    }
  }
  io::write_json(dir / "manifest.json", report.manifest);
}

std::size_t emit_figure_data(ModelId model, const ModelParams& params, int n, Window window, const fs::path& out,
                             RandomStream& rng) {
  validate_params(params);
  if (params.q() != 2) throw std::invalid_argument("emit_figure_data: windowed scatter output requires q = 2");
  if (n < 0) throw std::invalid_argument("emit_figure_data: n must be non-negative");
  if (!(window.halfwidth >= 0)) throw std::invalid_argument("emit_figure_data: window must be non-negative");
  const std::uint64_t seed = rng.seed();
  std::vector<GeneratedSample> samples;
  switch (model) {
    case ModelId::ClT:
      samples = gen_cl(params, n, rng);
      break;
    case ModelId::MarginalT:
      samples = gen_marginal(params, n, rng);
      break;
    case ModelId::ConditionalT:
    case ModelId::Standard:
      samples = gen_conditional(params, n, rng);
      break;
  }

  auto f = open_out(out);
  f << "x1,x2";
  for (Eigen::Index k = 0; k < params.d(); ++k) f << ",z" << (k + 1);
  f << ",u1,u2\n";
  std::size_t kept = 0;
  for (const auto& s : samples) {
    if (std::abs(s.x[0]) > window.halfwidth || std::abs(s.x[1]) > window.halfwidth) continue;
    f << io::format_double(s.x[0]) << ',' << io::format_double(s.x[1]);
    for (Eigen::Index k = 0; k < s.z.size(); ++k) f << ',' << io::format_double(s.z[k]);
    f << ',' << io::format_double(s.u1) << ',' << io::format_double(s.u2) << '\n';
    ++kept;
  }
  fs::path side = out;
  side += ".json";
  io::write_json(side, {{"model", to_string(model)},
                        {"params", io::params_to_json(params)},
                        {"n_generated", n},
                        {"n_written", kept},
                        {"window", {{"lower", -window.halfwidth}, {"upper", window.halfwidth}}},
                        {"seed", seed},
                        {"columns", "x1,x2,z...,u1,u2"}});
  return kept;
}

const std::vector<ReferenceValue>& reference_values() {
  using M = ModelId;
  static const std::vector<ReferenceValue> values = {
      {"2A", M::Standard, 1, 0.529, 0.046, 0.15},
      {"2A", M::MarginalT, 1, 0.037, 0.003, 0.02},
      {"2A", M::ClT, 1, 0.058, 0.016, 0.06},
      {"2B", M::Standard, 1, 0.725, 0.051, 0.16},
      {"2B", M::MarginalT, 1, 0.024, 0.002, 0.01},
      {"2B", M::ClT, 1, 0.036, 0.003, 0.02},
      {"20A", M::Standard, 1, 0.456, 0.017, 0.06},
      {"20A", M::Standard, 2, 0.356, 0.010, std::nullopt},
      {"20A", M::Standard, 3, 0.297, 0.007, std::nullopt},
      {"20A", M::MarginalT, 1, 0.020, 0.0004, 0.005},
      {"20A", M::MarginalT, 2, 0.019, 0.0004, std::nullopt},
      {"20A", M::MarginalT, 3, 0.018, 0.0004, std::nullopt},
      {"20A", M::ClT, 1, 0.022, 0.0004, 0.01},
      {"20A", M::ClT, 2, 0.021, 0.0004, std::nullopt},
      {"20A", M::ClT, 3, 0.021, 0.0005, std::nullopt},
      {"20B", M::Standard, 1, 1.274, 0.022, 0.10},
      {"20B", M::Standard, 2, 1.058, 0.019, std::nullopt},
      {"20B", M::Standard, 3, 0.820, 0.017, std::nullopt},
      {"20B", M::MarginalT, 1, 0.018, 0.0004, 0.005},
      {"20B", M::MarginalT, 2, 0.017, 0.0004, std::nullopt},
      {"20B", M::MarginalT, 3, 0.015, 0.0004, std::nullopt},
      {"20B", M::ClT, 1, 0.020, 0.0004, 0.01},
      {"20B", M::ClT, 2, 0.020, 0.0004, std::nullopt},
      {"20B", M::ClT, 3, 0.018, 0.0005, std::nullopt},
  };
  return values;
}

namespace {

// Semicolon-separated summary of how a model was fitted, e.g.
// "replicates=100;nu1=estimated(5);nu2=estimated(5);mcem_init=marginal-t;mcem_max_iter=100".
std::string cell_settings(const ExperimentConfig& cfg, ModelId model) {
  std::ostringstream s;
  s << "replicates=" << cfg.n_replicates;
  auto nu = [&](const char* name, const Nu& n) {
    s << ';' << name << '=' << (n.estimated ? "estimated(" : "fixed(") << n.value << ')';
  };
  for (const auto& m : cfg.models) {
    if (m.id != model) continue;
    if (const auto* sn = std::get_if<SingleNu>(&m.dof)) nu("nu", sn->nu);
    if (const auto* pr = std::get_if<PairNu>(&m.dof)) {
      nu("nu1", pr->nu1);
      nu("nu2", pr->nu2);
    }
  }
  if (model == ModelId::ClT || model == ModelId::ConditionalT) {
    s << ";mcem_init=" << to_string(cfg.mcem.init) << ";mcem_max_iter=" << cfg.mcem.max_iter;
  } else if (model == ModelId::MarginalT) {
    s << ";em_tol=" << cfg.em.tol;
  }
  return s.str();
}

}  // namespace

std::vector<ComparisonRow> reproduce_tables(const fs::path& out_dir, const std::optional<std::string>& only,
                                            std::optional<int> replicates, int threads,
                                            std::optional<std::uint64_t> root_seed) {
  std::vector<std::string> names = builtin_names();
  if (only) {
    if (std::find(names.begin(), names.end(), *only) == names.end()) {
      throw ValidationError("only", "unknown builtin experiment '" + *only + "'");
    }
    names = {*only};
  }
  fs::create_directories(out_dir);
  std::vector<ComparisonRow> rows;
  json manifests = json::object();
  for (const auto& name : names) {
    ExperimentConfig cfg = builtin_config(name);
    if (replicates) cfg.n_replicates = *replicates;
    if (root_seed) cfg.root_seed = *root_seed;
    cfg.threads = threads;
    const bool reduced = cfg.n_replicates != kReferenceReplicates;
    const ExperimentReport report = run_experiment(cfg);
    write_report(report, out_dir / name);
    manifests[name] = report.manifest;

    // Rows = d, columns = models, cell = mean (SE).
    auto table = open_out(out_dir / ("table_" + name + ".csv"));
    table << "d";
    for (const auto& m : cfg.models) table << ',' << to_string(m.id);
    table << '\n';
    for (int d : cfg.d_list) {
      table << d;
      for (const auto& m : cfg.models) {
        const auto& c = report.cell(m.id, d);
        table << ',' << fixed3(c.mean) << " (" << fixed3(c.se) << ')';
      }
      table << '\n';
    }

    for (const auto& pv : reference_values()) {
      if (pv.experiment != name) continue;
      const auto& c = report.cell(pv.model, pv.d);
      ComparisonRow row{pv, c.mean, c.se, static_cast<int>(c.angles.size()), "n/a", cell_settings(cfg, pv.model)};
      if (reduced) {
        row.status = "reduced";
      } else if (pv.tolerance) {
        row.status = std::abs(c.mean - pv.mean) <= *pv.tolerance ? "pass" : "fail";
      }
      rows.push_back(row);
    }
  }

  auto cmp = open_out(out_dir / "comparison.csv");
  cmp << "experiment,model,d,reference_mean,reference_se,reproduced_mean,reproduced_se,n_ok,tolerance,status,settings\n";
  for (const auto& r : rows) {
    cmp << r.reference.experiment << ',' << to_string(r.reference.model) << ',' << r.reference.d << ',' << r.reference.mean << ','
        << r.reference.se << ',' << io::format_double(r.mean) << ',' << io::format_double(r.se) << ',' << r.n_ok << ','
        << (r.reference.tolerance ? io::format_double(*r.reference.tolerance) : std::string()) << ',' << r.status << ',' << r.settings << '\n';
  }
  io::write_json(out_dir / "manifest.json", manifests);
  return rows;
}

}  // namespace tppca
