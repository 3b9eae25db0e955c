#include "fvt/btensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fvt {

namespace {

using Index = Eigen::Index;

Index as_index(std::size_t v) { return static_cast<Index>(v); }

void check_mode(std::size_t k, std::size_t d) {
  if (k >= d) {
    throw Error(ErrorCode::IndexOutOfRange, "mode " + std::to_string(k) + " out of range for order " + std::to_string(d));
  }
}

// Sizes before and after mode k: linear = (p * n_k + i) * S + s.
struct ModeSplit {
  std::size_t before = 1;
  std::size_t n = 1;
  std::size_t after = 1;
};

ModeSplit split(const Shape& dims, std::size_t k) {
  ModeSplit s;
  for (std::size_t l = 0; l < k; ++l) s.before *= dims[l];
  s.n = dims[k];
  for (std::size_t l = k + 1; l < dims.size(); ++l) s.after *= dims[l];
  return s;
}

std::vector<IndexSet> normalize_sets(std::vector<IndexSet> sets, const Shape& dims) {
  if (sets.size() != dims.size()) {
    throw Error(ErrorCode::DimensionMismatch, "expected one index set per mode");
  }
  for (std::size_t k = 0; k < sets.size(); ++k) {
    auto& s = sets[k];
    if (s.empty()) throw Error(ErrorCode::EmptyIndexSet, "index set " + std::to_string(k) + " is empty");
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.back() >= dims[k]) throw Error(ErrorCode::IndexOutOfRange, "index set " + std::to_string(k));
  }
  return sets;
}

// Linear indices of the cross product of `sets`, big-endian.
std::vector<std::size_t> product_linear(const Shape& dims, const std::vector<IndexSet>& sets) {
  std::vector<std::size_t> out{0};
  for (std::size_t k = 0; k < dims.size(); ++k) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * sets[k].size());
    for (auto base : out) {
      for (auto i : sets[k]) next.push_back(base * dims[k] + i);
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

std::size_t num_entries(const Shape& dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::size_t linear_index(const Shape& dims, std::span<const std::size_t> idx) {
  if (idx.size() != dims.size()) throw Error(ErrorCode::DimensionMismatch, "multi-index has the wrong order");
  std::size_t lin = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (idx[k] >= dims[k]) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "index " + std::to_string(idx[k]) + " in mode " + std::to_string(k) + " >= " + std::to_string(dims[k]));
    }
    lin = lin * dims[k] + idx[k];
  }
  return lin;
}

MultiIndex multi_index(const Shape& dims, std::size_t linear) {
  MultiIndex idx(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    idx[k] = linear % dims[k];
    linear /= dims[k];
  }
  return idx;
}

BTensor::BTensor(Shape dims, InnerProduct ip) : dims_(std::move(dims)), ip_(std::move(ip)) {
  if (dims_.empty()) throw Error(ErrorCode::InvalidArgument, "tensor order must be >= 1");
  coeffs_ = Eigen::MatrixXd::Zero(as_index(ip_.dim()), as_index(num_entries(dims_)));
}

BTensor::BTensor(Shape dims, InnerProduct ip, Eigen::MatrixXd coeffs)
    : dims_(std::move(dims)), ip_(std::move(ip)), coeffs_(std::move(coeffs)) {
  if (dims_.empty()) throw Error(ErrorCode::InvalidArgument, "tensor order must be >= 1");
  if (static_cast<std::size_t>(coeffs_.rows()) != ip_.dim() ||
      static_cast<std::size_t>(coeffs_.cols()) != num_entries(dims_)) {
    throw Error(ErrorCode::DimensionMismatch, "BTensor: coefficient block has the wrong shape");
  }
}

BTensor BTensor::subtensor(const std::vector<IndexSet>& sets) const {
  if (sets.size() != dims_.size()) throw Error(ErrorCode::DimensionMismatch, "subtensor: one set per mode");
  Shape sub(dims_.size());
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    for (auto i : sets[k]) {
      if (i >= dims_[k]) throw Error(ErrorCode::IndexOutOfRange, "subtensor index");
    }
    sub[k] = sets[k].size();
  }
  const auto lin = product_linear(dims_, sets);
  Eigen::MatrixXd c(coeffs_.rows(), as_index(lin.size()));
  for (std::size_t t = 0; t < lin.size(); ++t) c.col(as_index(t)) = coeffs_.col(as_index(lin[t]));
  return BTensor(sub, ip_, std::move(c));
}

double fro_norm(const BTensor& A) {
  if (A.size() == 0) return 0.0;
  return std::sqrt(std::max(0.0, A.ip().squared_norms(A.coeffs()).sum()));
}

double fro_distance(const BTensor& A, const BTensor& B) {
  if (A.dims() != B.dims() || A.dim() != B.dim()) throw Error(ErrorCode::DimensionMismatch, "fro_distance: shapes differ");
  constexpr Index kChunk = 4096;
  double s = 0.0;
  for (Index c = 0; c < A.coeffs().cols(); c += kChunk) {
    const Index w = std::min(kChunk, A.coeffs().cols() - c);
    const Eigen::MatrixXd d = A.coeffs().middleCols(c, w) - B.coeffs().middleCols(c, w);
    s += A.ip().squared_norms(d).sum();
  }
  return std::sqrt(s);
}

BMatrix unfold(const BTensor& A, std::size_t k) {
  check_mode(k, A.order());
  const ModeSplit s = split(A.dims(), k);
  BMatrix out(s.n, s.before * s.after, A.ip());
  for (std::size_t p = 0; p < s.before; ++p) {
    for (std::size_t i = 0; i < s.n; ++i) {
      for (std::size_t a = 0; a < s.after; ++a) {
        out.entry(i, p * s.after + a) = A.entry((p * s.n + i) * s.after + a);
      }
    }
  }
  return out;
}

BMatrix unfold_transposed(const BTensor& A, std::size_t k) {
  check_mode(k, A.order());
  const ModeSplit s = split(A.dims(), k);
  BMatrix out(s.before * s.after, s.n, A.ip());
  for (std::size_t p = 0; p < s.before; ++p) {
    for (std::size_t i = 0; i < s.n; ++i) {
      for (std::size_t a = 0; a < s.after; ++a) {
        out.entry(p * s.after + a, i) = A.entry((p * s.n + i) * s.after + a);
      }
    }
  }
  return out;
}

BTensor refold(const BMatrix& M, std::size_t k, const Shape& dims) {
  check_mode(k, dims.size());
  const ModeSplit s = split(dims, k);
  if (M.rows() != s.n || M.cols() != s.before * s.after) {
    throw Error(ErrorCode::DimensionMismatch, "refold: matrix size does not match dims");
  }
  BTensor out(dims, M.ip());
  for (std::size_t p = 0; p < s.before; ++p) {
    for (std::size_t i = 0; i < s.n; ++i) {
      for (std::size_t a = 0; a < s.after; ++a) {
        out.entry((p * s.n + i) * s.after + a) = M.entry(i, p * s.after + a);
      }
    }
  }
  return out;
}

BTensor mode_mul(const BTensor& A, std::size_t k, const ScalarMatrix& B) {
  check_mode(k, A.order());
  if (static_cast<std::size_t>(B.cols()) != A.dims()[k]) {
    throw Error(ErrorCode::DimensionMismatch, "mode_mul: B must have n_k columns");
  }
  Shape dims = A.dims();
  dims[k] = static_cast<std::size_t>(B.rows());
  return refold(left_mul(B, unfold(A, k)), k, dims);
}

Rank tucker_rank(const BTensor& A, double tol_rel) {
  Rank r(A.order());
  for (std::size_t k = 0; k < A.order(); ++k) r[k] = column_rank(unfold_transposed(A, k), tol_rel);
  return r;
}

void TensorSource::fetch(std::span<const std::size_t> linear, Eigen::MatrixXd& out) {
  out.resize(as_index(A_.dim()), as_index(linear.size()));
  for (std::size_t c = 0; c < linear.size(); ++c) {
    if (linear[c] >= A_.size()) throw Error(ErrorCode::IndexOutOfRange, "fetch: linear index");
    out.col(as_index(c)) = A_.entry(linear[c]);
  }
}

BTensor materialize(EntrySource& src) {
  const std::size_t n = num_entries(src.dims());
  std::vector<std::size_t> lin(n);
  std::iota(lin.begin(), lin.end(), std::size_t{0});
  Eigen::MatrixXd c;
  src.fetch(lin, c);
  return BTensor(src.dims(), src.ip(), std::move(c));
}

BTensor sample_subtensor(EntrySource& src, std::vector<IndexSet> sets) {
  sets = normalize_sets(std::move(sets), src.dims());
  Shape sub(sets.size());
  for (std::size_t k = 0; k < sets.size(); ++k) sub[k] = sets[k].size();
  const auto lin = product_linear(src.dims(), sets);
  Eigen::MatrixXd c;
  src.fetch(lin, c);
  return BTensor(std::move(sub), src.ip(), std::move(c));
}

BMatrix row_matrix(EntrySource& src, const std::vector<IndexSet>& sets, std::size_t k) {
  const Shape& dims = src.dims();
  check_mode(k, dims.size());
  if (sets.size() != dims.size()) throw Error(ErrorCode::DimensionMismatch, "row_matrix: one set per mode");
  std::vector<IndexSet> others = sets;
  for (std::size_t l = 0; l < dims.size(); ++l) {
    if (l == k) continue;
    if (sets[l].empty()) throw Error(ErrorCode::EmptyIndexSet, "index set " + std::to_string(l) + " is empty");
  }
  // Rows: big-endian over retained modes; mode k is collapsed to one slot.
  others[k] = IndexSet{0};
  Shape collapsed = dims;
  collapsed[k] = 1;
  const std::vector<std::size_t> row_lin = product_linear(collapsed, others);
  // Shift of one step in mode k.
  const ModeSplit s = split(dims, k);
  const std::size_t rows = row_lin.size();
  std::vector<std::size_t> lin(rows * s.n);
  for (std::size_t r = 0; r < rows; ++r) {
    // Re-expand the collapsed linear index: before-part and after-part.
    const std::size_t before = row_lin[r] / s.after;
    const std::size_t after = row_lin[r] % s.after;
    for (std::size_t j = 0; j < s.n; ++j) lin[j * rows + r] = (before * s.n + j) * s.after + after;
  }
  Eigen::MatrixXd c;
  src.fetch(lin, c);
  return BMatrix(rows, s.n, src.ip(), std::move(c));
}

BMatrix row_matrix(const BTensor& A, const std::vector<IndexSet>& sets, std::size_t k) {
  TensorSource src(A);
  return row_matrix(src, sets, k);
}

Shape TuckerDecomp::dims() const {
  Shape d(factors.size());
  for (std::size_t k = 0; k < factors.size(); ++k) d[k] = static_cast<std::size_t>(factors[k].rows());
  return d;
}

Rank TuckerDecomp::ranks() const { return core.dims(); }

Eigen::VectorXd TuckerDecomp::weights(std::span<const std::size_t> idx) const {
  if (idx.size() != factors.size()) throw Error(ErrorCode::DimensionMismatch, "multi-index has the wrong order");
  Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (idx[k] >= static_cast<std::size_t>(factors[k].rows())) {
      throw Error(ErrorCode::IndexOutOfRange, "entry index in mode " + std::to_string(k));
    }
    const Index rk = factors[k].cols();
    Eigen::VectorXd next(w.size() * rk);
    for (Index a = 0; a < w.size(); ++a) next.segment(a * rk, rk) = w[a] * factors[k].row(as_index(idx[k])).transpose();
    w = std::move(next);
  }
  return w;
}

HVec TuckerDecomp::entry(std::span<const std::size_t> idx) const {
  if (core.size() == 0) return HVec::Zero(as_index(core.dim()));
  return core.coeffs() * weights(idx);
}

Eigen::MatrixXd TuckerDecomp::entries(std::span<const std::size_t> linear) const {
  const Shape d = dims();
  Eigen::MatrixXd out(as_index(core.dim()), as_index(linear.size()));
  if (core.size() == 0) {
    out.setZero();
    return out;
  }
  Eigen::MatrixXd W(as_index(core.size()), as_index(linear.size()));
  for (std::size_t c = 0; c < linear.size(); ++c) W.col(as_index(c)) = weights(multi_index(d, linear[c]));
  out.noalias() = core.coeffs() * W;
  return out;
}

BTensor TuckerDecomp::assemble() const {
  BTensor out = core;
  for (std::size_t k = 0; k < factors.size(); ++k) out = mode_mul(out, k, factors[k]);
  return out;
}

std::vector<ScalarMatrix> cross_factors(const BTensor& core, const std::vector<BMatrix>& slabs, double tol_rel) {
  if (slabs.size() != core.order()) throw Error(ErrorCode::DimensionMismatch, "cross_factors: one slab per mode");
  std::vector<ScalarMatrix> F(core.order());
  for (std::size_t k = 0; k < core.order(); ++k) {
    const BMatrix gt = unfold_transposed(core, k);
    F[k] = pinv_apply(gt, slabs[k], tol_rel).transpose();
  }
  return F;
}

TuckerCrossModel tucker_cross(EntrySource& src, std::vector<IndexSet> sets, double tol_rel) {
  TuckerCrossModel model;
  model.index_sets = normalize_sets(std::move(sets), src.dims());
  const Shape& dims = src.dims();
  BTensor core = sample_subtensor(src, model.index_sets);

  std::vector<BMatrix> slabs;
  slabs.reserve(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) slabs.push_back(row_matrix(src, model.index_sets, k));
  model.decomp.factors = cross_factors(core, slabs, tol_rel);
  model.decomp.core = std::move(core);
  return model;
}

TuckerCrossModel tucker_cross(const BTensor& A, std::vector<IndexSet> sets, double tol_rel) {
  TensorSource src(A);
  return tucker_cross(src, std::move(sets), tol_rel);
}

HosvdBasis hosvd_basis(const BTensor& A, double tol_rel) {
  HosvdBasis basis;
  for (std::size_t k = 0; k < A.order(); ++k) {
    SVDFactors f = svd(unfold_transposed(A, k), tol_rel, /*with_u=*/false);
    basis.V.push_back(std::move(f.V));
    basis.sigma.push_back(std::move(f.sigma));
  }
  return basis;
}

double HosvdResult::tail_bound() const {
  double s = 0.0;
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    double tail = 0.0;
    double head = 0.0;
    for (Index i = 0; i < sigma[k].size(); ++i) (i < as_index(ranks[k]) ? head : tail) += sigma[k][i] * sigma[k][i];
    // Spectrum below the rank tolerance is not stored; the deflated norm covers it.
    s += std::max(tail, norm2 - head);
  }
  return std::sqrt(s);
}

HosvdResult hosvd(const BTensor& A, const HosvdBasis& basis, const Rank& ranks) {
  if (ranks.size() != A.order()) throw Error(ErrorCode::DimensionMismatch, "hosvd: one rank per mode");
  HosvdResult out;
  out.requested = ranks;
  out.sigma = basis.sigma;
  out.ranks.resize(A.order());
  const double nA = fro_norm(A);
  out.norm2 = nA * nA;
  BTensor core;
  for (std::size_t k = 0; k < A.order(); ++k) {
    const auto avail = static_cast<std::size_t>(basis.V[k].cols());
    out.ranks[k] = std::min(ranks[k], avail);
    if (out.ranks[k] < ranks[k]) out.clamped = true;
    ScalarMatrix Vk = basis.V[k].leftCols(as_index(out.ranks[k]));
    core = mode_mul(k == 0 ? A : core, k, Vk.transpose());
    out.decomp.factors.push_back(std::move(Vk));
  }
  out.decomp.core = std::move(core);
  return out;
}

HosvdResult hosvd(const BTensor& A, const Rank& ranks, double tol_rel) {
  return hosvd(A, hosvd_basis(A, tol_rel), ranks);
}

}  // namespace fvt
