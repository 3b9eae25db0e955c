#pragma once

// Hilbert-space geometry on coefficient vectors.
//
// An element of H is a real vector of fixed length h; the inner product is
// <u, v> = u^T G v where G is the identity, a positive diagonal, or a dense
// SPD Gram matrix. Everything else in the library touches H only through
// this header.

#include <cstddef>
#include <memory>
#include <span>

#include <Eigen/Dense>

#include "fvt/error.hpp"

namespace fvt {

using HVec = Eigen::VectorXd;

enum class GramKind : unsigned char { Identity = 0, Diagonal = 1, Dense = 2 };

class InnerProduct {
 public:
  /// Identity Gram of dimension 1.
  InnerProduct() : InnerProduct(identity(1)) {}

  static InnerProduct identity(std::size_t h);
  /// Throws NonPositiveWeight unless all weights are > 0 and finite.
  static InnerProduct diagonal(Eigen::VectorXd weights);
  /// Validates symmetry (1e-12 relative) and positive definiteness, then
  /// stores the symmetrized matrix.
  static InnerProduct dense(const Eigen::MatrixXd& gram);

  std::size_t dim() const noexcept { return h_; }
  GramKind kind() const noexcept { return kind_; }
  /// Diagonal kind only.
  const Eigen::VectorXd& weights() const noexcept { return *weights_; }
  /// Dense kind only (symmetrized).
  const Eigen::MatrixXd& gram() const noexcept { return *gram_; }

  /// u^T G v. Throws DimensionMismatch or NonFinite.
  double dot(const HVec& u, const HVec& v) const;
  double norm(const HVec& u) const;

  // Block routines over "flat" vectors: `blocks` consecutive H elements
  // stored contiguously (an element of H^blocks).

  /// Sum of per-block inner products.
  double dot_flat(const double* x, const double* y, std::size_t blocks) const;
  /// out = (I_blocks (x) G) x. `out` must hold h*blocks doubles.
  void apply_flat(const double* x, double* out, std::size_t blocks) const;
  /// Squared H-norm of every column of X (h x k).
  Eigen::VectorXd squared_norms(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

  /// Returns a matrix with G applied to every column of X (h x k).
  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

  /// Full Gram as a dense matrix regardless of kind.
  Eigen::MatrixXd dense_gram() const;

  friend bool operator==(const InnerProduct& a, const InnerProduct& b);

 private:
  InnerProduct(std::size_t h, GramKind kind, Eigen::VectorXd w, Eigen::MatrixXd g)
      : h_(h),
        kind_(kind),
        weights_(std::make_shared<const Eigen::VectorXd>(std::move(w))),
        gram_(std::make_shared<const Eigen::MatrixXd>(std::move(g))) {}

  std::size_t h_;
  GramKind kind_;
  // Shared so that copies bound to many arrays stay cheap.
  std::shared_ptr<const Eigen::VectorXd> weights_;
  std::shared_ptr<const Eigen::MatrixXd> gram_;
};

/// Raw validation of a Gram specification without constructing it.
/// Throws NonSPD, NonSymmetric or NonPositiveWeight.
void validate_weights(const Eigen::VectorXd& weights);
void validate_gram(const Eigen::MatrixXd& gram);

double dot(const HVec& u, const HVec& v, const InnerProduct& ip);
double norm(const HVec& u, const InnerProduct& ip);

/// a*x + y. Throws DimensionMismatch.
HVec axpy(double a, const HVec& x, const HVec& y);

}  // namespace fvt
