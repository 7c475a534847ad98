#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tppca {

/// Thrown when a value object violates one of its invariants. `field()` names
/// the offending member (e.g. "sigma2", "W", "dof.nu1").
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline constexpr double kDefaultNuLower = 0.05;
inline constexpr double kDefaultNuUpper = 500.0;
inline constexpr double kDefaultNuInit = 5.0;

/// One degrees-of-freedom value, either held fixed or estimated within
/// [lower, upper] starting from `value`.
struct Nu {
  double value = kDefaultNuInit;
  bool estimated = false;
  double lower = kDefaultNuLower;
  double upper = kDefaultNuUpper;

  static Nu fixed(double v) { return Nu{v, false, kDefaultNuLower, kDefaultNuUpper}; }
  static Nu estimate(double init = kDefaultNuInit, double lo = kDefaultNuLower,
                     double hi = kDefaultNuUpper) {
    return Nu{init, true, lo, hi};
  }

  bool operator==(const Nu&) const = default;
};

struct GaussianDof {
  bool operator==(const GaussianDof&) const = default;
};
struct SingleNu {
  Nu nu;
  bool operator==(const SingleNu&) const = default;
};
/// Independent data-layer (nu1) and latent-layer (nu2) degrees of freedom.
struct PairNu {
  Nu nu1;
  Nu nu2;
  bool operator==(const PairNu&) const = default;
};

using DofSpec = std::variant<GaussianDof, SingleNu, PairNu>;

inline bool is_gaussian(const DofSpec& d) { return std::holds_alternative<GaussianDof>(d); }
inline bool is_single(const DofSpec& d) { return std::holds_alternative<SingleNu>(d); }
inline bool is_pair(const DofSpec& d) { return std::holds_alternative<PairNu>(d); }

std::string dof_variant_name(const DofSpec& d);

/// Loading matrix W (q x d), mean mu (q), isotropic noise variance sigma2 and
/// the degrees-of-freedom specification.
struct ModelParams {
  Eigen::MatrixXd W;
  Eigen::VectorXd mu;
  double sigma2 = 1.0;
  DofSpec dof = GaussianDof{};

  Eigen::Index q() const { return W.rows(); }
  Eigen::Index d() const { return W.cols(); }

  bool operator==(const ModelParams& o) const {
    return W.rows() == o.W.rows() && W.cols() == o.W.cols() && W == o.W &&
           mu.size() == o.mu.size() && mu == o.mu && sigma2 == o.sigma2 && dof == o.dof;
  }
};

/// Throws ValidationError naming the first violated invariant.
void validate_params(const ModelParams& p);

/// N x q observations. `outlier_mask[n]` marks rows that were injected as
/// contamination, when that provenance is known.
struct Dataset {
  Eigen::MatrixXd X;
  std::optional<std::vector<bool>> outlier_mask;
  std::optional<std::uint64_t> seed;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index q() const { return X.cols(); }

  /// Rows with a false mask entry (all rows when no mask is present).
  Eigen::MatrixXd clean_rows() const;
};

void validate_dataset(const Dataset& data);

struct TraceEntry {
  int iteration = 0;
  double objective = 0.0;
  double param_change = 0.0;
};

struct FitResult {
  ModelParams params;
  int n_iter = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
  std::uint64_t seed = 0;
  /// Set when a degrees-of-freedom update had no root inside its bracket and
  /// was clamped to an endpoint.
  bool nu_clamped = false;
};

}  // namespace tppca
