#pragma once

// Function-valued tensors and Tucker-type decompositions.
//
// Multi-indices are 0-based and linearized big-endian (the first index varies
// slowest). The same order is used for unfolding columns, the rows of the
// fiber matrices R_k, and the entry payload of FVT files.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fvt/bmatrix.hpp"
#include "fvt/hilbert.hpp"

namespace fvt {

using Shape = std::vector<std::size_t>;
using MultiIndex = std::vector<std::size_t>;
using Rank = std::vector<std::size_t>;

std::size_t num_entries(const Shape& dims);
/// Throws IndexOutOfRange.
std::size_t linear_index(const Shape& dims, std::span<const std::size_t> idx);
MultiIndex multi_index(const Shape& dims, std::size_t linear);

class BTensor {
 public:
  BTensor() = default;
  BTensor(Shape dims, InnerProduct ip);
  BTensor(Shape dims, InnerProduct ip, Eigen::MatrixXd coeffs);

  std::size_t order() const noexcept { return dims_.size(); }
  const Shape& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(coeffs_.cols()); }
  std::size_t dim() const noexcept { return ip_.dim(); }
  const InnerProduct& ip() const noexcept { return ip_; }

  auto entry(std::size_t linear) { return coeffs_.col(static_cast<Eigen::Index>(linear)); }
  auto entry(std::size_t linear) const { return coeffs_.col(static_cast<Eigen::Index>(linear)); }
  auto entry(std::span<const std::size_t> idx) { return entry(linear_index(dims_, idx)); }
  auto entry(std::span<const std::size_t> idx) const { return entry(linear_index(dims_, idx)); }

  /// h x N, column per entry in big-endian order.
  const Eigen::MatrixXd& coeffs() const noexcept { return coeffs_; }
  Eigen::MatrixXd& coeffs() noexcept { return coeffs_; }

  BTensor subtensor(const std::vector<IndexSet>& sets) const;

 private:
  Shape dims_;
  InnerProduct ip_;
  Eigen::MatrixXd coeffs_;
};

/// l2(H) norm.
double fro_norm(const BTensor& A);

/// ||A - B|| in l2(H), without forming the difference. Uses A's inner product.
double fro_distance(const BTensor& A, const BTensor& B);

/// Mode-k unfolding, n_k x prod_{l != k} n_l (k is 0-based).
BMatrix unfold(const BTensor& A, std::size_t k);
/// Inverse of unfold.
BTensor refold(const BMatrix& M, std::size_t k, const Shape& dims);
/// transpose(unfold(A, k)) built directly.
BMatrix unfold_transposed(const BTensor& A, std::size_t k);

/// C with C_(k) = B A_(k).
BTensor mode_mul(const BTensor& A, std::size_t k, const ScalarMatrix& B);

/// Row-ranks of the mode unfoldings.
Rank tucker_rank(const BTensor& A, double tol_rel = kDefaultTol);

/// Random access to tensor entries by big-endian linear index.
class EntrySource {
 public:
  virtual ~EntrySource() = default;
  virtual const Shape& dims() const = 0;
  virtual const InnerProduct& ip() const = 0;
  /// Resizes `out` to h x linear.size() and fills column c with entry linear[c].
  virtual void fetch(std::span<const std::size_t> linear, Eigen::MatrixXd& out) = 0;
};

class TensorSource final : public EntrySource {
 public:
  explicit TensorSource(const BTensor& A) : A_(A) {}
  const Shape& dims() const override { return A_.dims(); }
  const InnerProduct& ip() const override { return A_.ip(); }
  void fetch(std::span<const std::size_t> linear, Eigen::MatrixXd& out) override;

 private:
  const BTensor& A_;
};

/// Fetches every entry of `src` into a dense tensor.
BTensor materialize(EntrySource& src);

/// A(I_1, ..., I_d) read through `src`; sets are sorted and deduplicated.
BTensor sample_subtensor(EntrySource& src, std::vector<IndexSet> sets);

/// R_k = [A(I_1, ..., I_{k-1}, :, I_{k+1}, ..., I_d)]_(k)^T. Rows are the
/// big-endian composite over positions in the retained index sets; I_k is
/// ignored. Throws EmptyIndexSet.
BMatrix row_matrix(EntrySource& src, const std::vector<IndexSet>& sets, std::size_t k);
BMatrix row_matrix(const BTensor& A, const std::vector<IndexSet>& sets, std::size_t k);

/// G x_1 F_1 ... x_d F_d.
struct TuckerDecomp {
  BTensor core;
  std::vector<ScalarMatrix> factors;  ///< F_k is n_k x r_k.

  Shape dims() const;
  Rank ranks() const;
  /// Kronecker weight vector of a multi-index against the core.
  Eigen::VectorXd weights(std::span<const std::size_t> idx) const;
  /// Single entry without materializing the tensor.
  HVec entry(std::span<const std::size_t> idx) const;
  /// Entries at big-endian linear indices; h x linear.size().
  Eigen::MatrixXd entries(std::span<const std::size_t> linear) const;
  BTensor assemble() const;
};

/// Tucker-cross approximation at (I_1, ..., I_d); index sets are kept
/// sorted and duplicate-free.
struct TuckerCrossModel {
  std::vector<IndexSet> index_sets;
  TuckerDecomp decomp;

  const BTensor& core() const noexcept { return decomp.core; }
  const std::vector<ScalarMatrix>& factors() const noexcept { return decomp.factors; }
  HVec entry(std::span<const std::size_t> idx) const { return decomp.entry(idx); }
  BTensor assemble() const { return decomp.assemble(); }
};

/// core = A(I_1..I_d), F_k = [(G_(k)^T)^dagger R_k]^T. Reads only the core
/// and the fiber slabs R_k from `src`.
TuckerCrossModel tucker_cross(EntrySource& src, std::vector<IndexSet> sets, double tol_rel = kDefaultTol);
TuckerCrossModel tucker_cross(const BTensor& A, std::vector<IndexSet> sets, double tol_rel = kDefaultTol);

/// Factors computed from an existing core and fiber slabs; used when the same
/// samples are re-weighted under a different inner product.
std::vector<ScalarMatrix> cross_factors(const BTensor& core, const std::vector<BMatrix>& slabs,
                                        double tol_rel = kDefaultTol);

/// Per-mode right singular vectors of the transposed unfoldings.
struct HosvdBasis {
  std::vector<ScalarMatrix> V;          ///< n_k x (numerical rank)
  std::vector<Eigen::VectorXd> sigma;  ///< all retained singular values
};

HosvdBasis hosvd_basis(const BTensor& A, double tol_rel = kDefaultTol);

struct HosvdResult {
  TuckerDecomp decomp;
  std::vector<Eigen::VectorXd> sigma;
  Rank requested;
  Rank ranks;  ///< after clamping to the numerical ranks
  bool clamped = false;
  double norm2 = 0.0;  ///< ||A||^2

  /// (sum_k ||Sigma_k - Sigma_{k,r_k}||^2)^{1/2}
  double tail_bound() const;
};

HosvdResult hosvd(const BTensor& A, const Rank& ranks, double tol_rel = kDefaultTol);
/// Same as hosvd() with precomputed per-mode bases.
HosvdResult hosvd(const BTensor& A, const HosvdBasis& basis, const Rank& ranks);

}  // namespace fvt
