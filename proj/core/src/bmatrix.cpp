#include "fvt/bmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fvt {

namespace {

using Index = Eigen::Index;

Index as_index(std::size_t v) { return static_cast<Index>(v); }

void check_same_ip(const BMatrix& A, const BMatrix& B, const char* where) {
  if (!(A.ip() == B.ip())) {
    throw Error(ErrorCode::DimensionMismatch, std::string(where) + ": inner products differ");
  }
}

void check_index_set(const IndexSet& I, std::size_t bound, const char* what) {
  if (I.empty()) throw Error(ErrorCode::EmptyIndexSet, std::string(what) + " is empty");
  for (auto i : I) {
    if (i >= bound) {
      throw Error(ErrorCode::IndexOutOfRange,
                  std::string(what) + " index " + std::to_string(i) + " >= " + std::to_string(bound));
    }
  }
}

IndexSet iota_set(std::size_t n) {
  IndexSet s(n);
  std::iota(s.begin(), s.end(), std::size_t{0});
  return s;
}

}  // namespace

BMatrix::BMatrix(std::size_t m, std::size_t n, InnerProduct ip)
    : m_(m), n_(n), ip_(std::move(ip)), coeffs_(Eigen::MatrixXd::Zero(as_index(ip_.dim()), as_index(m * n))) {}

BMatrix::BMatrix(std::size_t m, std::size_t n, InnerProduct ip, Eigen::MatrixXd coeffs)
    : m_(m), n_(n), ip_(std::move(ip)), coeffs_(std::move(coeffs)) {
  if (static_cast<std::size_t>(coeffs_.rows()) != ip_.dim() ||
      static_cast<std::size_t>(coeffs_.cols()) != m * n) {
    throw Error(ErrorCode::DimensionMismatch, "BMatrix: coefficient block has the wrong shape");
  }
}

double BMatrix::norm() const {
  if (coeffs_.size() == 0) return 0.0;
  return std::sqrt(std::max(0.0, ip_.squared_norms(coeffs_).sum()));
}

ScalarMatrix BMatrix::entry_norms() const {
  ScalarMatrix out(as_index(m_), as_index(n_));
  if (coeffs_.size() == 0) return out;
  const Eigen::VectorXd sq = ip_.squared_norms(coeffs_);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < m_; ++i) out(as_index(i), as_index(j)) = std::sqrt(std::max(0.0, sq[as_index(j * m_ + i)]));
  }
  return out;
}

BMatrix BMatrix::submatrix(const IndexSet& I, const IndexSet& J) const {
  for (auto i : I) {
    if (i >= m_) throw Error(ErrorCode::IndexOutOfRange, "submatrix: row index");
  }
  for (auto j : J) {
    if (j >= n_) throw Error(ErrorCode::IndexOutOfRange, "submatrix: column index");
  }
  BMatrix out(I.size(), J.size(), ip_);
  for (std::size_t b = 0; b < J.size(); ++b) {
    for (std::size_t a = 0; a < I.size(); ++a) out.entry(a, b) = entry(I[a], J[b]);
  }
  return out;
}

BMatrix transpose(const BMatrix& A) {
  BMatrix out(A.cols(), A.rows(), A.ip());
  for (std::size_t j = 0; j < A.cols(); ++j) {
    for (std::size_t i = 0; i < A.rows(); ++i) out.entry(j, i) = A.entry(i, j);
  }
  return out;
}

BMatrix left_mul(const ScalarMatrix& B, const BMatrix& A) {
  if (static_cast<std::size_t>(B.cols()) != A.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "left_mul: B has " + std::to_string(B.cols()) +
                                                  " columns, A has " + std::to_string(A.rows()) + " rows");
  }
  const auto k = static_cast<std::size_t>(B.rows());
  BMatrix out(k, A.cols(), A.ip());
  // Column j of the result is X_j * B^T with X_j the h x m block of A.
  for (std::size_t j = 0; j < A.cols(); ++j) out.column(j).noalias() = A.column(j) * B.transpose();
  return out;
}

BMatrix right_mul(const BMatrix& A, const ScalarMatrix& C) {
  if (static_cast<std::size_t>(C.rows()) != A.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "right_mul: size mismatch");
  }
  const auto l = static_cast<std::size_t>(C.cols());
  BMatrix out(A.rows(), l, A.ip());
  const Index L = as_index(A.dim() * A.rows());
  if (L == 0 || l == 0) return out;
  Eigen::Map<const Eigen::MatrixXd> flat(A.coeffs().data(), L, as_index(A.cols()));
  Eigen::Map<Eigen::MatrixXd> res(out.coeffs().data(), L, as_index(l));
  res.noalias() = flat * C;
  return out;
}

ScalarMatrix adjoint_apply(const BMatrix& A, const BMatrix& B) {
  if (A.rows() != B.rows()) throw Error(ErrorCode::DimensionMismatch, "adjoint_apply: row counts differ");
  check_same_ip(A, B, "adjoint_apply");
  const Index L = as_index(A.dim() * A.rows());
  ScalarMatrix out = ScalarMatrix::Zero(as_index(A.cols()), as_index(B.cols()));
  if (L == 0 || out.size() == 0) return out;
  Eigen::MatrixXd GB(B.coeffs().rows(), B.coeffs().cols());
  A.ip().apply_flat(B.coeffs().data(), GB.data(), B.rows() * B.cols());
  Eigen::Map<const Eigen::MatrixXd> fa(A.coeffs().data(), L, as_index(A.cols()));
  Eigen::Map<const Eigen::MatrixXd> fgb(GB.data(), L, as_index(B.cols()));
  out.noalias() = fa.transpose() * fgb;
  return out;
}

BMatrix operator-(const BMatrix& A, const BMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw Error(ErrorCode::DimensionMismatch, "subtract");
  check_same_ip(A, B, "subtract");
  return BMatrix(A.rows(), A.cols(), A.ip(), A.coeffs() - B.coeffs());
}

QRFactors mgs_qr(const BMatrix& A, double tol_rel) {
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();
  const std::size_t h = A.dim();
  const Index L = as_index(h * m);
  const InnerProduct& ip = A.ip();

  QRFactors out;
  out.Q = BMatrix(m, 0, ip);
  out.R = ScalarMatrix(0, as_index(n));
  out.perm = iota_set(n);
  if (L == 0 || n == 0) return out;

  // Residual columns, flattened: column j is an element of R^{h*m}.
  Eigen::MatrixXd W = Eigen::Map<const Eigen::MatrixXd>(A.coeffs().data(), L, as_index(n));
  std::vector<double> orig2(n), res2(n);
  for (std::size_t j = 0; j < n; ++j) {
    orig2[j] = std::max(0.0, ip.dot_flat(W.col(as_index(j)).data(), W.col(as_index(j)).data(), m));
    res2[j] = orig2[j];
  }
  const double max_norm = std::sqrt(*std::max_element(orig2.begin(), orig2.end()));
  if (max_norm == 0.0) return out;
  const double threshold = tol_rel * max_norm;

  const std::size_t max_rank = std::min(n, static_cast<std::size_t>(L));
  Eigen::MatrixXd Qf(L, as_index(max_rank));
  Eigen::MatrixXd GQf(L, as_index(max_rank));
  ScalarMatrix Rorig = ScalarMatrix::Zero(as_index(max_rank), as_index(n));
  std::vector<bool> used(n, false);
  std::vector<bool> reorthogonalized(n, false);
  std::vector<std::size_t> order;
  std::size_t r = 0;

  while (r < max_rank) {
    std::size_t p = n;
    double best = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!used[j] && res2[j] > best) {
        best = res2[j];
        p = j;
      }
    }
    if (p == n || std::sqrt(best) <= threshold) break;

    auto w = W.col(as_index(p));
    double nrm = std::sqrt(best);
    if (r > 0 && !reorthogonalized[p] && nrm < std::sqrt(orig2[p]) / std::sqrt(2.0)) {
      reorthogonalized[p] = true;
      // Cancellation: one more orthogonalization pass for the selected column.
      for (std::size_t t = 0; t < r; ++t) {
        const double c = GQf.col(as_index(t)).dot(w);
        Rorig(as_index(t), as_index(p)) += c;
        w -= c * Qf.col(as_index(t));
      }
      nrm = std::sqrt(std::max(0.0, ip.dot_flat(w.data(), w.data(), m)));
      res2[p] = nrm * nrm;
      if (nrm <= threshold) continue;
      // Re-select if another column is now larger.
      bool larger = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (!used[j] && j != p && res2[j] > res2[p]) larger = true;
      }
      if (larger) continue;
    }

    Qf.col(as_index(r)) = w / nrm;
    ip.apply_flat(Qf.col(as_index(r)).data(), GQf.col(as_index(r)).data(), m);
    Rorig(as_index(r), as_index(p)) = nrm;
    used[p] = true;
    order.push_back(p);

    const auto q = Qf.col(as_index(r));
    const auto gq = GQf.col(as_index(r));
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      auto wj = W.col(as_index(j));
      const double c = gq.dot(wj);
      Rorig(as_index(r), as_index(j)) = c;
      wj -= c * q;
      res2[j] = std::max(0.0, ip.dot_flat(wj.data(), wj.data(), m));
    }
    ++r;
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (!used[j]) order.push_back(j);
  }
  out.rank = r;
  out.perm = order;
  out.Q = BMatrix(m, r, ip, Eigen::Map<const Eigen::MatrixXd>(Qf.data(), as_index(h), as_index(m * r)));
  out.gram_q = GQf.leftCols(as_index(r));
  out.R = ScalarMatrix(as_index(r), as_index(n));
  for (std::size_t qcol = 0; qcol < n; ++qcol) {
    out.R.col(as_index(qcol)) = Rorig.col(as_index(order[qcol])).head(as_index(r));
  }
  return out;
}

ScalarMatrix mgs_adjoint_apply(const QRFactors& qr, const BMatrix& B) {
  if (B.rows() != qr.Q.rows()) throw Error(ErrorCode::DimensionMismatch, "mgs_adjoint_apply: row counts differ");
  check_same_ip(qr.Q, B, "mgs_adjoint_apply");
  const std::size_t r = qr.rank;
  const Index L = as_index(B.dim() * B.rows());
  ScalarMatrix out = ScalarMatrix::Zero(as_index(r), as_index(B.cols()));
  if (r == 0 || B.cols() == 0) return out;
  Eigen::Map<const Eigen::MatrixXd> Qf(qr.Q.coeffs().data(), L, as_index(r));
  Eigen::VectorXd b(L);
  for (std::size_t l = 0; l < B.cols(); ++l) {
    b = Eigen::Map<const Eigen::VectorXd>(B.coeffs().data() + l * static_cast<std::size_t>(L), L);
    for (std::size_t t = 0; t < r; ++t) {
      const double c = qr.gram_q.col(as_index(t)).dot(b);
      out(as_index(t), as_index(l)) = c;
      b -= c * Qf.col(as_index(t));
    }
  }
  return out;
}

namespace {

struct ScalarSvd {
  ScalarMatrix uhat;  // r_qr x r
  Eigen::VectorXd sigma;
  ScalarMatrix v;  // n x r in original column order
};

ScalarSvd svd_of_r(const QRFactors& qr, std::size_t n, double tol_rel) {
  ScalarSvd out;
  if (qr.rank == 0) {
    out.uhat = ScalarMatrix(0, 0);
    out.sigma = Eigen::VectorXd(0);
    out.v = ScalarMatrix(as_index(n), 0);
    return out;
  }
  Eigen::JacobiSVD<ScalarMatrix> jsvd(qr.R, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = jsvd.singularValues();
  Index keep = 0;
  const double cut = tol_rel * s[0];
  while (keep < s.size() && s[keep] > cut && s[keep] > 0.0) ++keep;
  out.uhat = jsvd.matrixU().leftCols(keep);
  out.sigma = s.head(keep);
  out.v = ScalarMatrix(as_index(n), keep);
  const ScalarMatrix& vhat = jsvd.matrixV();
  for (std::size_t q = 0; q < n; ++q) out.v.row(as_index(qr.perm[q])) = vhat.row(as_index(q)).head(keep);
  return out;
}

}  // namespace

SVDFactors svd(const BMatrix& A, double tol_rel, bool with_u) {
  const QRFactors qr = mgs_qr(A, tol_rel);
  ScalarSvd s = svd_of_r(qr, A.cols(), tol_rel);
  SVDFactors out;
  out.U = with_u ? right_mul(qr.Q, s.uhat) : BMatrix(A.rows(), 0, A.ip());
  out.sigma = std::move(s.sigma);
  out.V = std::move(s.v);
  return out;
}

PseudoInverse::PseudoInverse(const BMatrix& A, double tol_rel)
    : m_(A.rows()), n_(A.cols()), qr_(mgs_qr(A, tol_rel)) {
  ScalarSvd s = svd_of_r(qr_, n_, tol_rel);
  uhat_ = std::move(s.uhat);
  sigma_ = std::move(s.sigma);
  v_ = std::move(s.v);
}

ScalarMatrix PseudoInverse::apply(const BMatrix& B) const {
  if (B.rows() != m_) throw Error(ErrorCode::DimensionMismatch, "pinv_apply: row counts differ");
  if (sigma_.size() == 0) {
    check_same_ip(qr_.Q, B, "pinv_apply");
    return ScalarMatrix::Zero(as_index(n_), as_index(B.cols()));
  }
  const ScalarMatrix qb = mgs_adjoint_apply(qr_, B);
  const ScalarMatrix coords = uhat_.transpose() * qb;
  return v_ * (sigma_.cwiseInverse().asDiagonal() * coords);
}

ScalarMatrix pinv_apply(const BMatrix& A, const BMatrix& B, double tol_rel) {
  if (A.rows() != B.rows()) throw Error(ErrorCode::DimensionMismatch, "pinv_apply: row counts differ");
  check_same_ip(A, B, "pinv_apply");
  return PseudoInverse(A, tol_rel).apply(B);
}

std::size_t column_rank(const BMatrix& A, double tol_rel) { return mgs_qr(A, tol_rel).rank; }

BMatrix MatrixCross::assemble() const { return left_mul(F, right_mul(core, Pt)); }

MatrixCross cross_matrix(const BMatrix& A, const IndexSet& I, const IndexSet& J, double tol_rel) {
  check_index_set(I, A.rows(), "row index set");
  check_index_set(J, A.cols(), "column index set");
  MatrixCross out;
  out.core = A.submatrix(I, J);
  const BMatrix cols_j = A.submatrix(iota_set(A.rows()), J);
  const BMatrix rows_i = A.submatrix(I, iota_set(A.cols()));
  // Transposition and pseudoinversion do not commute here, so the left factor
  // is built from the transposed core rather than from A(I,J)^dagger.
  out.F = pinv_apply(transpose(out.core), transpose(cols_j), tol_rel).transpose();
  out.Pt = pinv_apply(out.core, rows_i, tol_rel);
  return out;
}

}  // namespace fvt
