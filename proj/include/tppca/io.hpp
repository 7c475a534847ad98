#pragma once

#include "tppca/core_model.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <filesystem>
#include <string>

namespace tppca::io {

using json = nlohmann::json;

/// {"W": [[...], ...] (row-major), "mu": [...], "sigma2": s,
///  "dof": {"variant": "gaussian"|"single"|"pair", "values": [...],
///          "fixed": [...], "lower": [...], "upper": [...]}}
json params_to_json(const ModelParams& p);
ModelParams params_from_json(const json& j);

json fit_result_to_json(const FitResult& r);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

/// Reads just the "params" member when present, else the whole document.
ModelParams read_params(const std::filesystem::path& path);

/// Header x1..xq, plus a final `outlier` column when a mask is present.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

/// One observation per row. A header line is detected when any field of the
/// first line is non-numeric; a final header column named `outlier` is read
/// as the boolean mask (true/false or 1/0).
Dataset read_dataset_csv(const std::filesystem::path& path);

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

void write_trace_csv(const std::filesystem::path& path, const FitResult& r);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace tppca::io
