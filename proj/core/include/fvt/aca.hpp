#pragma once

// Adaptive cross approximation of function-valued tensors (TuckerABC).
//
// Each iteration grows every index set I_k by one column found with rook
// pivoting on the residual fiber matrix Row(A - B)(I'_1, ..., I'_d)_k, which
// is evaluated lazily through the cached oracle. After the sweep over modes
// the Tucker-cross approximation B is rebuilt at (I_1, ..., I_d).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "fvt/btensor.hpp"
#include "fvt/sampler.hpp"

namespace fvt {

enum class DrawRule { Uniform, RoundRobin, Leverage };

DrawRule parse_draw_rule(std::string_view name);
std::string_view to_string(DrawRule rule) noexcept;

/// Matrix accessed only through the H-norms of its rows and columns.
class NormMatrix {
 public:
  virtual ~NormMatrix() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  /// ||M(i, j)||_H for all j.
  virtual Eigen::VectorXd row_norms(std::size_t i) = 0;
  /// ||M(i, j)||_H for all i.
  virtual Eigen::VectorXd col_norms(std::size_t j) = 0;
};

/// NormMatrix over an in-memory BMatrix.
class BMatrixNorms final : public NormMatrix {
 public:
  explicit BMatrixNorms(const BMatrix& M) : norms_(M.entry_norms()) {}
  std::size_t rows() const override { return static_cast<std::size_t>(norms_.rows()); }
  std::size_t cols() const override { return static_cast<std::size_t>(norms_.cols()); }
  Eigen::VectorXd row_norms(std::size_t i) override { return norms_.row(static_cast<Eigen::Index>(i)).transpose(); }
  Eigen::VectorXd col_norms(std::size_t j) override { return norms_.col(static_cast<Eigen::Index>(j)); }

 private:
  ScalarMatrix norms_;
};

struct RookResult {
  std::optional<std::size_t> row;  ///< last row pivot; empty when n_rook == 0
  std::size_t col = 0;
  double max_norm = 0.0;  ///< largest entry norm seen while scanning
};

/// Alternating column/row argmax scans; ties resolve to the smallest index.
RookResult rook_pivot(NormMatrix& M, std::size_t j_start, std::size_t n_rook);

/// Largest stride <= ceil(n/2) that is coprime to n.
std::size_t round_robin_stride(std::size_t n);

/// 0-based column for the `draw_count`-th draw (1-based) of a mode.
/// Leverage requires `scores`: non-negative and summing to 1 within 1e-9.
std::size_t draw(DrawRule rule, std::size_t n_k, std::size_t draw_count, std::mt19937_64& rng,
                 const Eigen::VectorXd* scores = nullptr);

/// Leverage scores from a transposed slab (fibers as rows, r x n_k):
/// squared row norms of V divided by rank. Throws InvalidArgument on a zero slab.
Eigen::VectorXd leverage_scores(const BMatrix& slab, double tol_rel = kDefaultTol);

/// Approximate leverage scores of every mode from `samples[k]` random mode-k
/// fibers (uniform over the other modes).
std::vector<Eigen::VectorXd> sample_leverage_scores(EntrySource& src, const std::vector<std::size_t>& samples,
                                                    std::mt19937_64& rng, double tol_rel = kDefaultTol);

struct AbcConfig {
  std::size_t n_iter = 10;
  std::size_t n_rook = 1;
  /// Initial auxiliary sets I'_k. When empty, `aux_size` indices per mode are
  /// drawn (from the leverage distribution for DrawRule::Leverage, uniformly
  /// otherwise).
  std::vector<IndexSet> aux;
  std::size_t aux_size = 3;
  DrawRule draw = DrawRule::Uniform;
  std::uint64_t seed = 0;
  double tol_rel = kDefaultTol;
  /// Stop once the largest residual seen in an iteration is <= early_stop
  /// times the largest core-entry norm. 0 disables.
  double early_stop = 0.0;

  void validate(const Shape& dims) const;
};

struct AbcReport {
  std::vector<IndexSet> index_sets;
  std::vector<IndexSet> aux_sets;
  std::vector<Rank> ranks;                 ///< Tucker rank of B after each iteration
  std::vector<Rank> index_sizes;           ///< |I_k| after each iteration
  std::vector<std::size_t> evaluations;    ///< oracle count after each iteration
  std::vector<double> max_residual;        ///< largest residual seen per iteration
  std::vector<std::vector<std::size_t>> pivots;  ///< accepted columns, one per mode (npos when skipped)
  std::size_t leverage_evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Called after every completed iteration (1-based) with the current model.
using AbcObserver = std::function<void(std::size_t iteration, const TuckerCrossModel& model)>;

struct AbcResult {
  TuckerCrossModel model;
  AbcReport report;
};

AbcResult tucker_abc(CachedOracle& oracle, const AbcConfig& cfg, const AbcObserver& observer = {});

}  // namespace fvt
