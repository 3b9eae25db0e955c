#pragma once

// Lazy access to tensor entries produced by an expensive solver.
//
// An EntryOracle is a pure map multi-index -> H element. CachedOracle
// memoizes it and counts distinct evaluations, which is the sampling budget
// that adaptive algorithms are measured against.

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>

#include "fvt/btensor.hpp"

namespace fvt {

class EntryOracle final : public EntrySource {
 public:
  using Eval = std::function<HVec(const MultiIndex&)>;

  EntryOracle(Shape dims, InnerProduct ip, Eval eval, std::size_t threads = 1);

  const Shape& dims() const override { return dims_; }
  const InnerProduct& ip() const override { return ip_; }

  /// Uncached evaluation; validates the index and the returned length.
  HVec operator()(std::span<const std::size_t> idx) const;
  void fetch(std::span<const std::size_t> linear, Eigen::MatrixXd& out) override;

  std::size_t threads() const noexcept { return threads_; }
  void set_threads(std::size_t t) noexcept { threads_ = t == 0 ? 1 : t; }

 private:
  Shape dims_;
  InnerProduct ip_;
  Eval eval_;
  std::size_t threads_;
};

/// Oracle answering from an in-memory tensor (file inputs, tests).
EntryOracle tensor_oracle(std::shared_ptr<const BTensor> A, std::size_t threads = 1);

class CachedOracle final : public EntrySource {
 public:
  /// max_entries == 0 means unbounded; otherwise exceeding it throws
  /// CacheOverflow (nothing is evicted).
  explicit CachedOracle(EntryOracle oracle, std::size_t threads = 1, std::size_t max_entries = 0);

  const Shape& dims() const override { return oracle_.dims(); }
  const InnerProduct& ip() const override { return oracle_.ip(); }

  HVec get(std::span<const std::size_t> idx);
  /// Evaluates the uncached entries of `linear` concurrently, then answers
  /// from the cache.
  void fetch(std::span<const std::size_t> linear, Eigen::MatrixXd& out) override;

  /// Number of distinct oracle evaluations so far.
  std::size_t count() const;
  bool contains(std::size_t linear) const;

  const EntryOracle& oracle() const noexcept { return oracle_; }
  std::size_t threads() const noexcept { return threads_; }
  void set_threads(std::size_t t) noexcept { threads_ = t == 0 ? 1 : t; }

 private:
  void insert(std::size_t linear, HVec value);

  EntryOracle oracle_;
  std::size_t threads_;
  std::size_t max_entries_;
  mutable std::mutex mu_;
  std::unordered_map<std::size_t, HVec> cache_;
};

/// Entries of A - B where A comes from a cached oracle and B from a model.
/// Only uncached A-entries are charged to the oracle.
class ResidualView final : public EntrySource {
 public:
  /// `model` may be null, meaning B = 0.
  ResidualView(CachedOracle& oracle, const TuckerDecomp* model);

  const Shape& dims() const override { return oracle_.dims(); }
  const InnerProduct& ip() const override { return oracle_.ip(); }
  void fetch(std::span<const std::size_t> linear, Eigen::MatrixXd& out) override;

 private:
  CachedOracle& oracle_;
  const TuckerDecomp* model_;
};

ResidualView residual_view(CachedOracle& oracle, const TuckerCrossModel& model);

}  // namespace fvt
