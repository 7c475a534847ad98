#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tppca {

/// Orthonormal basis (q x d) of a linear subspace.
template <typename Scalar = double>
class Subspace {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  /// Wraps a basis that is already orthonormal; throws when B^T B deviates
  /// from the identity by more than 1e-10.
  static Subspace from_orthonormal(Matrix basis) {
    const Matrix gram = basis.transpose() * basis;
    if ((gram - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff() > Scalar(1e-10)) {
      throw std::invalid_argument("Subspace: basis columns are not orthonormal");
    }
    return Subspace(std::move(basis));
  }

  const Matrix& basis() const { return basis_; }
  Eigen::Index ambient_dim() const { return basis_.rows(); }
  Eigen::Index dim() const { return basis_.cols(); }

 private:
  explicit Subspace(Matrix b) : basis_(std::move(b)) {}
  template <typename Derived>
  friend Subspace<typename Derived::Scalar> orthonormalize(const Eigen::MatrixBase<Derived>& m);

  Matrix basis_;
};

/// Orthonormal basis for the column span of a full-column-rank matrix.
/// Householder QR with column signs fixed so that diag(R) > 0, which leaves
/// an already-orthonormal input unchanged. Rank is rejected when the smallest
/// singular value is at most 1e-10 times the largest.
template <typename Derived>
Subspace<typename Derived::Scalar> orthonormalize(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Matrix a = m;
  if (a.cols() < 1 || a.rows() < a.cols()) throw std::invalid_argument("orthonormalize: need q >= d >= 1");
  const auto sv = Eigen::JacobiSVD<Matrix>(a).singularValues();
  if (!(sv(sv.size() - 1) > Scalar(1e-10) * sv(0))) {
    throw std::invalid_argument("orthonormalize: matrix is rank deficient");
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix r = qr.matrixQR().topRows(a.cols()).template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);
  }
  return Subspace<Scalar>(std::move(q));
}

/// Smallest angle between unit vectors of the two subspaces, in [0, pi/2]:
/// arccos of the largest singular value of A^T B. One-dimensional pairs use
/// the absolute cosine directly.
template <typename Scalar>
Scalar first_principal_angle(const Subspace<Scalar>& a, const Subspace<Scalar>& b) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw std::invalid_argument("first_principal_angle: ambient dimension mismatch");
  }
  Scalar cosine;
  if (a.dim() == 1 && b.dim() == 1) {
    cosine = std::abs(a.basis().col(0).dot(b.basis().col(0)));
  } else {
    using Matrix = typename Subspace<Scalar>::Matrix;
    // Fixed argument order makes the result bitwise symmetric.
    const auto& ma = a.basis();
    const auto& mb = b.basis();
    bool swap = ma.cols() > mb.cols();
    if (ma.cols() == mb.cols()) {
      swap = std::lexicographical_compare(mb.data(), mb.data() + mb.size(), ma.data(), ma.data() + ma.size());
    }
    const Matrix cross = swap ? Matrix(mb.transpose() * ma) : Matrix(ma.transpose() * mb);
    cosine = Eigen::JacobiSVD<Matrix>(cross).singularValues()(0);
  }
  return std::acos(std::clamp(cosine, Scalar(0), Scalar(1)));
}

/// Convenience overload: orthonormalizes both column spans first.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar first_principal_angle(const Eigen::MatrixBase<DerivedA>& a,
                                                const Eigen::MatrixBase<DerivedB>& b) {
  return first_principal_angle(orthonormalize(a), orthonormalize(b));
}

}  // namespace tppca
