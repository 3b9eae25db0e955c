#include "fvt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fvt/parallel.hpp"

namespace fvt {

EntryOracle::EntryOracle(Shape dims, InnerProduct ip, Eval eval, std::size_t threads)
    : dims_(std::move(dims)), ip_(std::move(ip)), eval_(std::move(eval)), threads_(threads == 0 ? 1 : threads) {
  if (dims_.empty()) throw Error(ErrorCode::InvalidArgument, "oracle order must be >= 1");
  for (auto d : dims_) {
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "oracle dims must be >= 1");
  }
  if (!eval_) throw Error(ErrorCode::InvalidArgument, "oracle needs an evaluation function");
}

HVec EntryOracle::operator()(std::span<const std::size_t> idx) const {
  (void)linear_index(dims_, idx);
  HVec v = eval_(MultiIndex(idx.begin(), idx.end()));
  if (static_cast<std::size_t>(v.size()) != ip_.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "oracle returned length " + std::to_string(v.size()));
  }
  if (!v.allFinite()) throw Error(ErrorCode::NonFinite, "oracle returned non-finite coefficients");
  return v;
}

void EntryOracle::fetch(std::span<const std::size_t> linear, Eigen::MatrixXd& out) {
  const std::size_t total = num_entries(dims_);
  out.resize(static_cast<Eigen::Index>(ip_.dim()), static_cast<Eigen::Index>(linear.size()));
  parallel_for(linear.size(), threads_, [&](std::size_t c) {
    if (linear[c] >= total) throw Error(ErrorCode::IndexOutOfRange, "fetch: linear index");
    out.col(static_cast<Eigen::Index>(c)) = (*this)(multi_index(dims_, linear[c]));
  });
}

EntryOracle tensor_oracle(std::shared_ptr<const BTensor> A, std::size_t threads) {
  if (!A) throw Error(ErrorCode::InvalidArgument, "tensor_oracle: null tensor");
  auto eval = [A](const MultiIndex& idx) -> HVec { return A->entry(std::span<const std::size_t>(idx)); };
  return EntryOracle(A->dims(), A->ip(), eval, threads);
}

CachedOracle::CachedOracle(EntryOracle oracle, std::size_t threads, std::size_t max_entries)
    : oracle_(std::move(oracle)), threads_(threads == 0 ? 1 : threads), max_entries_(max_entries) {}

void CachedOracle::insert(std::size_t linear, HVec value) {
  std::lock_guard lock(mu_);
  if (cache_.count(linear)) return;  // first writer wins; values are identical
  if (max_entries_ != 0 && cache_.size() >= max_entries_) {
    throw Error(ErrorCode::CacheOverflow, "oracle cache limit of " + std::to_string(max_entries_) + " reached");
  }
  cache_.emplace(linear, std::move(value));
}

HVec CachedOracle::get(std::span<const std::size_t> idx) {
  const std::size_t lin = linear_index(dims(), idx);
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(lin);
    if (it != cache_.end()) return it->second;
  }
  HVec v = oracle_(idx);
  insert(lin, v);
  std::lock_guard lock(mu_);
  return cache_.at(lin);
}

void CachedOracle::fetch(std::span<const std::size_t> linear, Eigen::MatrixXd& out) {
  const std::size_t total = num_entries(dims());
  std::vector<std::size_t> missing;
  {
    std::lock_guard lock(mu_);
    for (auto lin : linear) {
      if (lin >= total) throw Error(ErrorCode::IndexOutOfRange, "fetch: linear index");
      if (!cache_.count(lin)) missing.push_back(lin);
    }
  }
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
  if (max_entries_ != 0) {
    std::lock_guard lock(mu_);
    if (cache_.size() + missing.size() > max_entries_) {
      throw Error(ErrorCode::CacheOverflow, "oracle cache limit of " + std::to_string(max_entries_) + " reached");
    }
  }
  std::vector<HVec> values(missing.size());
  parallel_for(missing.size(), threads_, [&](std::size_t c) {
    values[c] = oracle_(multi_index(dims(), missing[c]));
  });
  for (std::size_t c = 0; c < missing.size(); ++c) insert(missing[c], std::move(values[c]));

  out.resize(static_cast<Eigen::Index>(ip().dim()), static_cast<Eigen::Index>(linear.size()));
  std::lock_guard lock(mu_);
  for (std::size_t c = 0; c < linear.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = cache_.at(linear[c]);
}

std::size_t CachedOracle::count() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

bool CachedOracle::contains(std::size_t linear) const {
  std::lock_guard lock(mu_);
  return cache_.count(linear) != 0;
}

ResidualView::ResidualView(CachedOracle& oracle, const TuckerDecomp* model) : oracle_(oracle), model_(model) {
  if (model_ && model_->dims() != oracle_.dims()) {
    throw Error(ErrorCode::DimensionMismatch, "residual_view: model and oracle dims differ");
  }
}

void ResidualView::fetch(std::span<const std::size_t> linear, Eigen::MatrixXd& out) {
  oracle_.fetch(linear, out);
  if (model_) out -= model_->entries(linear);
}

ResidualView residual_view(CachedOracle& oracle, const TuckerCrossModel& model) {
  return ResidualView(oracle, &model.decomp);
}

}  // namespace fvt
