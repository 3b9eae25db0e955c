#include "fvt/hilbert.hpp"

#include <cmath>
#include <string>

namespace fvt {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonSPD: return "NonSPD";
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::EmptyIndexSet: return "EmptyIndexSet";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::CacheOverflow: return "CacheOverflow";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadVersion: return "BadVersion";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::NonSPDGram: return "NonSPDGram";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

void validate_weights(const Eigen::VectorXd& weights) {
  if (weights.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty weight vector");
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] <= 0.0) {
      throw Error(ErrorCode::NonPositiveWeight,
                  "weight " + std::to_string(i) + " = " + std::to_string(weights[i]));
    }
  }
}

void validate_gram(const Eigen::MatrixXd& gram) {
  if (gram.rows() == 0 || gram.rows() != gram.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "Gram matrix must be square and non-empty");
  }
  if (!gram.allFinite()) throw Error(ErrorCode::NonFinite, "Gram matrix has non-finite entries");
  const double scale = gram.cwiseAbs().maxCoeff();
  const double asym = (gram - gram.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw Error(ErrorCode::NonSymmetric, "Gram asymmetry " + std::to_string(asym));
  }
  const Eigen::MatrixXd sym = 0.5 * (gram + gram.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NonSPD, "Cholesky factorization failed");
}

InnerProduct InnerProduct::identity(std::size_t h) {
  if (h == 0) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  return InnerProduct(h, GramKind::Identity, {}, {});
}

InnerProduct InnerProduct::diagonal(Eigen::VectorXd weights) {
  validate_weights(weights);
  const auto h = static_cast<std::size_t>(weights.size());
  return InnerProduct(h, GramKind::Diagonal, std::move(weights), {});
}

InnerProduct InnerProduct::dense(const Eigen::MatrixXd& gram) {
  validate_gram(gram);
  const auto h = static_cast<std::size_t>(gram.rows());
  return InnerProduct(h, GramKind::Dense, {}, 0.5 * (gram + gram.transpose()));
}

double InnerProduct::dot(const HVec& u, const HVec& v) const {
  if (static_cast<std::size_t>(u.size()) != h_ || static_cast<std::size_t>(v.size()) != h_) {
    throw Error(ErrorCode::DimensionMismatch, "expected length " + std::to_string(h_));
  }
  const double r = dot_flat(u.data(), v.data(), 1);
  if (!std::isfinite(r)) throw Error(ErrorCode::NonFinite, "inner product is not finite");
  return r;
}

double InnerProduct::norm(const HVec& u) const { return std::sqrt(std::max(0.0, dot(u, u))); }

double InnerProduct::dot_flat(const double* x, const double* y, std::size_t blocks) const {
  const auto h = static_cast<Eigen::Index>(h_);
  const auto nb = static_cast<Eigen::Index>(blocks);
  Eigen::Map<const Eigen::MatrixXd> X(x, h, nb);
  Eigen::Map<const Eigen::MatrixXd> Y(y, h, nb);
  switch (kind_) {
    case GramKind::Identity:
      return Eigen::Map<const Eigen::VectorXd>(x, h * nb).dot(Eigen::Map<const Eigen::VectorXd>(y, h * nb));
    case GramKind::Diagonal:
      return (X.array().colwise() * weights_->array() * Y.array()).sum();
    case GramKind::Dense:
      return (X.array() * (*gram_ * Y).array()).sum();
  }
  return 0.0;
}

void InnerProduct::apply_flat(const double* x, double* out, std::size_t blocks) const {
  const auto h = static_cast<Eigen::Index>(h_);
  const auto nb = static_cast<Eigen::Index>(blocks);
  Eigen::Map<const Eigen::MatrixXd> X(x, h, nb);
  Eigen::Map<Eigen::MatrixXd> Out(out, h, nb);
  switch (kind_) {
    case GramKind::Identity: Out = X; break;
    case GramKind::Diagonal: Out = X.array().colwise() * weights_->array(); break;
    case GramKind::Dense: Out.noalias() = *gram_ * X; break;
  }
}

Eigen::MatrixXd InnerProduct::apply(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  if (static_cast<std::size_t>(X.rows()) != h_) throw Error(ErrorCode::DimensionMismatch, "apply: row count");
  switch (kind_) {
    case GramKind::Identity: return X;
    case GramKind::Diagonal: return X.array().colwise() * weights_->array();
    case GramKind::Dense: return *gram_ * X;
  }
  return X;
}

Eigen::VectorXd InnerProduct::squared_norms(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  if (static_cast<std::size_t>(X.rows()) != h_) {
    throw Error(ErrorCode::DimensionMismatch, "squared_norms: row count");
  }
  switch (kind_) {
    case GramKind::Identity: return X.colwise().squaredNorm().transpose();
    case GramKind::Diagonal:
      return (X.array().square().colwise() * weights_->array()).colwise().sum().transpose();
    case GramKind::Dense: return (X.array() * (*gram_ * X).array()).colwise().sum().transpose();
  }
  return {};
}

Eigen::MatrixXd InnerProduct::dense_gram() const {
  const auto h = static_cast<Eigen::Index>(h_);
  switch (kind_) {
    case GramKind::Identity: return Eigen::MatrixXd::Identity(h, h);
    case GramKind::Diagonal: return weights_->asDiagonal();
    case GramKind::Dense: return *gram_;
  }
  return {};
}

bool operator==(const InnerProduct& a, const InnerProduct& b) {
  if (a.h_ != b.h_ || a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case GramKind::Identity: return true;
    case GramKind::Diagonal: return a.weights_ == b.weights_ || *a.weights_ == *b.weights_;
    case GramKind::Dense: return a.gram_ == b.gram_ || *a.gram_ == *b.gram_;
  }
  return false;
}

double dot(const HVec& u, const HVec& v, const InnerProduct& ip) { return ip.dot(u, v); }

double norm(const HVec& u, const InnerProduct& ip) { return ip.norm(u); }

HVec axpy(double a, const HVec& x, const HVec& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "axpy: length mismatch");
  return a * x + y;
}

}  // namespace fvt
