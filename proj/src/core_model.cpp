#include "tppca/core_model.hpp"

#include <cmath>

namespace tppca {

namespace {

void check_nu(const Nu& nu, const std::string& field) {
  if (!std::isfinite(nu.value)) throw ValidationError(field, "non-finite degrees of freedom");
  if (nu.value <= 0.0) throw ValidationError(field, "non-positive degrees of freedom");
  if (nu.estimated) {
    if (!(nu.lower > 0.0) || !(nu.lower < nu.upper) || !std::isfinite(nu.upper)) {
      throw ValidationError(field, "invalid estimation bracket");
    }
  }
}

}  // namespace

std::string dof_variant_name(const DofSpec& d) {
  switch (d.index()) {
    case 0: return "gaussian";
    case 1: return "single";
    default: return "pair";
  }
}

void validate_params(const ModelParams& p) {
  if (p.W.cols() < 1) throw ValidationError("W", "latent dimension d must be >= 1");
  if (p.W.rows() < p.W.cols()) throw ValidationError("W", "dimension: requires q >= d");
  if (p.mu.size() != p.W.rows()) throw ValidationError("mu", "dimension mismatch with W");
  if (!p.W.allFinite()) throw ValidationError("W", "non-finite entry");
  if (!p.mu.allFinite()) throw ValidationError("mu", "non-finite entry");
  if (!std::isfinite(p.sigma2)) throw ValidationError("sigma2", "non-finite entry");
  if (p.sigma2 <= 0.0) throw ValidationError("sigma2", "non-positive scale");
  if (const auto* s = std::get_if<SingleNu>(&p.dof)) check_nu(s->nu, "dof.nu");
  if (const auto* pr = std::get_if<PairNu>(&p.dof)) {
    check_nu(pr->nu1, "dof.nu1");
    check_nu(pr->nu2, "dof.nu2");
  }
}

Eigen::MatrixXd Dataset::clean_rows() const {
  if (!outlier_mask) return X;
  const auto& mask = *outlier_mask;
  Eigen::Index kept = 0;
  for (bool m : mask) kept += m ? 0 : 1;
  Eigen::MatrixXd out(kept, X.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) out.row(r++) = X.row(i);
  }
  return out;
}

void validate_dataset(const Dataset& data) {
  if (data.X.rows() < 1) throw ValidationError("X", "dataset must have at least one row");
  if (data.X.cols() < 1) throw ValidationError("X", "dataset must have at least one column");
  if (!data.X.allFinite()) throw ValidationError("X", "non-finite entry");
  if (data.outlier_mask && data.outlier_mask->size() != static_cast<std::size_t>(data.X.rows())) {
    throw ValidationError("outlier_mask", "length differs from number of rows");
  }
}

}  // namespace tppca
