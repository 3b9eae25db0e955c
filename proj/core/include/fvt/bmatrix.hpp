#pragma once

// Function-valued (Bochner) matrices.
//
// A BMatrix is an m x n array of H elements. Coefficients are stored as one
// h x (m*n) Eigen matrix with entry (i, j) in column j*m + i, so each matrix
// column is a contiguous element of H^m. Scalar matrices are plain Eigen.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fvt/hilbert.hpp"

namespace fvt {

using ScalarMatrix = Eigen::MatrixXd;
using IndexSet = std::vector<std::size_t>;

inline constexpr double kDefaultTol = 1e-12;

class BMatrix {
 public:
  BMatrix() = default;
  /// Zero m x n matrix over `ip`.
  BMatrix(std::size_t m, std::size_t n, InnerProduct ip);
  /// Takes ownership of an h x (m*n) coefficient block.
  BMatrix(std::size_t m, std::size_t n, InnerProduct ip, Eigen::MatrixXd coeffs);

  std::size_t rows() const noexcept { return m_; }
  std::size_t cols() const noexcept { return n_; }
  std::size_t dim() const noexcept { return ip_.dim(); }
  const InnerProduct& ip() const noexcept { return ip_; }

  auto entry(std::size_t i, std::size_t j) { return coeffs_.col(static_cast<Eigen::Index>(j * m_ + i)); }
  auto entry(std::size_t i, std::size_t j) const {
    return coeffs_.col(static_cast<Eigen::Index>(j * m_ + i));
  }

  /// Column j as an element of H^m (h x m block).
  auto column(std::size_t j) {
    return coeffs_.middleCols(static_cast<Eigen::Index>(j * m_), static_cast<Eigen::Index>(m_));
  }
  auto column(std::size_t j) const {
    return coeffs_.middleCols(static_cast<Eigen::Index>(j * m_), static_cast<Eigen::Index>(m_));
  }

  const Eigen::MatrixXd& coeffs() const noexcept { return coeffs_; }
  Eigen::MatrixXd& coeffs() noexcept { return coeffs_; }

  /// l2(H) norm.
  double norm() const;
  /// H-norm of every entry, as an m x n matrix.
  ScalarMatrix entry_norms() const;

  BMatrix submatrix(const IndexSet& I, const IndexSet& J) const;

 private:
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  InnerProduct ip_;
  Eigen::MatrixXd coeffs_;
};

BMatrix transpose(const BMatrix& A);
/// B * A for scalar B (k x m).
BMatrix left_mul(const ScalarMatrix& B, const BMatrix& A);
/// A * C for scalar C (n x l).
BMatrix right_mul(const BMatrix& A, const ScalarMatrix& C);
/// A^* B: (j, l) entry is <B(:, l), A(:, j)> in l2(H).
ScalarMatrix adjoint_apply(const BMatrix& A, const BMatrix& B);
BMatrix operator-(const BMatrix& A, const BMatrix& B);

/// Column-pivoted modified Gram-Schmidt: A * P = Q * R.
struct QRFactors {
  BMatrix Q;                 ///< m x r, orthonormal columns in l2(H).
  ScalarMatrix R;            ///< r x n, upper trapezoidal in pivoted order.
  std::vector<std::size_t> perm;  ///< perm[q] is the original index of pivoted column q.
  std::size_t rank = 0;

  /// G * Q, cached for inner products with new vectors.
  Eigen::MatrixXd gram_q;
};

/// Greedy pivoting on the largest residual norm (ties go to the smallest
/// index). A selected column is re-orthogonalized once when its norm dropped
/// below 1/sqrt(2) of its original norm. Stops when the largest remaining
/// residual is <= tol_rel * (largest original column norm).
QRFactors mgs_qr(const BMatrix& A, double tol_rel = kDefaultTol);

/// Q^* B evaluated with the MGS recurrence: each column of B is projected
/// against q_1, q_2, ... in turn with the running residual.
ScalarMatrix mgs_adjoint_apply(const QRFactors& qr, const BMatrix& B);

struct SVDFactors {
  BMatrix U;              ///< m x r, orthonormal columns.
  Eigen::VectorXd sigma;  ///< r positive, nonincreasing.
  ScalarMatrix V;         ///< n x r, orthonormal columns.

  std::size_t rank() const noexcept { return static_cast<std::size_t>(sigma.size()); }
};

/// Via mgs_qr and a scalar SVD of R. With `with_u == false`, U is left empty.
SVDFactors svd(const BMatrix& A, double tol_rel = kDefaultTol, bool with_u = true);

/// Pseudoinverse of A, kept in factored form: b -> V Sigma^{-1} Uhat^T (Q^* b).
class PseudoInverse {
 public:
  explicit PseudoInverse(const BMatrix& A, double tol_rel = kDefaultTol);

  std::size_t rank() const noexcept { return static_cast<std::size_t>(sigma_.size()); }
  /// Applies the operator columnwise to B (m x k); returns n x k.
  ScalarMatrix apply(const BMatrix& B) const;

 private:
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  QRFactors qr_;
  ScalarMatrix uhat_;  // r_qr x r
  Eigen::VectorXd sigma_;
  ScalarMatrix v_;     // n x r
};

/// A^dagger B (n x k). Zero A gives a zero result.
ScalarMatrix pinv_apply(const BMatrix& A, const BMatrix& B, double tol_rel = kDefaultTol);

std::size_t column_rank(const BMatrix& A, double tol_rel = kDefaultTol);

/// Factors of the function-valued cross approximation F * core * Pt.
struct MatrixCross {
  ScalarMatrix F;   ///< m x |I|: {[A(I,J)^T]^dagger A(:,J)^T}^T
  BMatrix core;     ///< A(I, J)
  ScalarMatrix Pt;  ///< |J| x n: A(I,J)^dagger A(I,:)

  BMatrix assemble() const;
};

MatrixCross cross_matrix(const BMatrix& A, const IndexSet& I, const IndexSet& J,
                         double tol_rel = kDefaultTol);

}  // namespace fvt
