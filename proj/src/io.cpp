#include "tppca/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tppca::io {

namespace {

json nu_field(const std::vector<Nu>& nus, double Nu::*member) {
  json a = json::array();
  for (const auto& n : nus) a.push_back(n.*member);
  return a;
}

std::vector<Nu> dof_values(const DofSpec& dof) {
  if (const auto* s = std::get_if<SingleNu>(&dof)) return {s->nu};
  if (const auto* p = std::get_if<PairNu>(&dof)) return {p->nu1, p->nu2};
  return {};
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_bool(std::string s, bool& v) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "1" || s == "true") {
    v = true;
    return true;
  }
  if (s == "0" || s == "false") {
    v = false;
    return true;
  }
  return false;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json params_to_json(const ModelParams& p) {
  json W = json::array();
  for (Eigen::Index i = 0; i < p.W.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < p.W.cols(); ++j) row.push_back(p.W(i, j));
    W.push_back(std::move(row));
  }
  json mu = json::array();
  for (Eigen::Index i = 0; i < p.mu.size(); ++i) mu.push_back(p.mu[i]);
  const auto nus = dof_values(p.dof);
  json fixed = json::array();
  for (const auto& n : nus) fixed.push_back(!n.estimated);
  return {{"W", W},
          {"mu", mu},
          {"sigma2", p.sigma2},
          {"dof",
           {{"variant", dof_variant_name(p.dof)},
            {"values", nu_field(nus, &Nu::value)},
            {"fixed", fixed},
            {"lower", nu_field(nus, &Nu::lower)},
            {"upper", nu_field(nus, &Nu::upper)}}}};
}

ModelParams params_from_json(const json& j) {
  ModelParams p;
  const auto& W = j.at("W");
  const auto rows = static_cast<Eigen::Index>(W.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(W.at(0).size()) : 0;
  p.W.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(W.at(i).size()) != cols) throw ValidationError("W", "ragged rows");
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) p.W(i, j2) = W.at(i).at(j2).get<double>();
  }
  const auto& mu = j.at("mu");
  p.mu.resize(static_cast<Eigen::Index>(mu.size()));
  for (Eigen::Index i = 0; i < p.mu.size(); ++i) p.mu[i] = mu.at(i).get<double>();
  p.sigma2 = j.at("sigma2").get<double>();

  const auto& dof = j.at("dof");
  const auto variant = dof.at("variant").get<std::string>();
  auto nu_at = [&](std::size_t k) {
    Nu n;
    n.value = dof.at("values").at(k).get<double>();
    n.estimated = dof.contains("fixed") ? !dof.at("fixed").at(k).get<bool>() : false;
    if (dof.contains("lower")) n.lower = dof.at("lower").at(k).get<double>();
    if (dof.contains("upper")) n.upper = dof.at("upper").at(k).get<double>();
    return n;
  };
  if (variant == "gaussian") {
    p.dof = GaussianDof{};
  } else if (variant == "single") {
    p.dof = SingleNu{nu_at(0)};
  } else if (variant == "pair") {
    p.dof = PairNu{nu_at(0), nu_at(1)};
  } else {
    throw ValidationError("dof.variant", "unknown variant '" + variant + "'");
  }
  validate_params(p);
  return p;
}

json fit_result_to_json(const FitResult& r) {
  return {{"params", params_to_json(r.params)},
          {"n_iter", r.n_iter},
          {"converged", r.converged},
          {"nu_clamped", r.nu_clamped},
          {"seed", r.seed}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return json::parse(in);
}

ModelParams read_params(const std::filesystem::path& path) {
  const json j = read_json(path);
  return params_from_json(j.contains("params") ? j.at("params") : j);
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  auto out = open_out(path);
  for (Eigen::Index j = 0; j < data.q(); ++j) out << (j ? "," : "") << 'x' << (j + 1);
  if (data.outlier_mask) out << ",outlier";
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.q(); ++j) out << (j ? "," : "") << format_double(data.X(i, j));
    if (data.outlier_mask) out << ',' << ((*data.outlier_mask)[static_cast<std::size_t>(i)] ? "true" : "false");
    out << '\n';
  }
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error("empty dataset file: " + path.string());
  std::size_t first = 0;
  bool has_mask = false;
  auto head = split_line(lines[0]);
  double tmp;
  const bool header = std::any_of(head.begin(), head.end(), [&](const std::string& f) { return !parse_double(f, tmp); });
  if (header) {
    first = 1;
    std::string last = head.back();
    std::transform(last.begin(), last.end(), last.begin(), [](unsigned char c) { return std::tolower(c); });
    has_mask = last == "outlier";
  }
  const std::size_t width = head.size();
  const auto q = static_cast<Eigen::Index>(width - (has_mask ? 1 : 0));
  if (q < 1) throw std::runtime_error("dataset has no data columns: " + path.string());

  Dataset data;
  data.X.resize(static_cast<Eigen::Index>(lines.size() - first), q);
  if (has_mask) data.outlier_mask = std::vector<bool>();
  for (std::size_t l = first; l < lines.size(); ++l) {
    const auto fields = split_line(lines[l]);
    if (fields.size() != width) {
      throw std::runtime_error("line " + std::to_string(l + 1) + ": expected " + std::to_string(width) + " fields");
    }
    const auto row = static_cast<Eigen::Index>(l - first);
    for (Eigen::Index j = 0; j < q; ++j) {
      if (!parse_double(fields[static_cast<std::size_t>(j)], data.X(row, j))) {
        throw std::runtime_error("line " + std::to_string(l + 1) + ": non-numeric value");
      }
    }
    if (has_mask) {
      bool b;
      if (!parse_bool(fields.back(), b)) throw std::runtime_error("line " + std::to_string(l + 1) + ": bad outlier flag");
      data.outlier_mask->push_back(b);
    }
  }
  validate_dataset(data);
  return data;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  return read_dataset_csv(path).X;
}

void write_trace_csv(const std::filesystem::path& path, const FitResult& r) {
  auto out = open_out(path);
  out << "iteration,objective,param_change\n";
  for (const auto& t : r.trace) {
    out << t.iteration << ',' << format_double(t.objective) << ',' << format_double(t.param_change) << '\n';
  }
}

}  // namespace tppca::io
