#pragma once

// Seeded generators and brute-force oracles shared by the test programs.
//
// The oracles never call library algorithms: an element of H^m is mapped
// isometrically to R^{m h} through the Cholesky factor of the Gram matrix,
// and everything is then done with Eigen's dense scalar decompositions.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fvt/bmatrix.hpp"
#include "fvt/btensor.hpp"
#include "fvt/hilbert.hpp"

namespace fvt::test {

inline Eigen::MatrixXd randn(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) M(i, j) = nd(rng);
  }
  return M;
}

inline std::size_t uniform_int(std::size_t lo, std::size_t hi, std::mt19937_64& rng) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline InnerProduct random_ip(GramKind kind, std::size_t h, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(h);
  switch (kind) {
    case GramKind::Identity:
      return InnerProduct::identity(h);
    case GramKind::Diagonal: {
      std::uniform_real_distribution<double> u(0.3, 3.0);
      Eigen::VectorXd w(n);
      for (Eigen::Index i = 0; i < n; ++i) w(i) = u(rng);
      return InnerProduct::diagonal(w);
    }
    case GramKind::Dense: {
      const Eigen::MatrixXd M = randn(n, n, rng);
      Eigen::MatrixXd G = M * M.transpose() / static_cast<double>(h) + 0.5 * Eigen::MatrixXd::Identity(n, n);
      G = (0.5 * (G + G.transpose())).eval();
      return InnerProduct::dense(G);
    }
  }
  return InnerProduct::identity(h);
}

inline constexpr GramKind kAllGrams[] = {GramKind::Identity, GramKind::Diagonal, GramKind::Dense};

inline BMatrix random_bmatrix(std::size_t m, std::size_t n, const InnerProduct& ip, std::mt19937_64& rng) {
  return BMatrix(m, n, ip, randn(static_cast<Eigen::Index>(ip.dim()), static_cast<Eigen::Index>(m * n), rng));
}

inline BTensor random_btensor(const Shape& dims, const InnerProduct& ip, std::mt19937_64& rng) {
  return BTensor(dims, ip, randn(static_cast<Eigen::Index>(ip.dim()), static_cast<Eigen::Index>(num_entries(dims)), rng));
}

/// Upper factor L^T with G = L L^T, so <u, v> = (L^T u) . (L^T v).
inline Eigen::MatrixXd iso(const InnerProduct& ip) {
  Eigen::LLT<Eigen::MatrixXd> llt(ip.dense_gram());
  return llt.matrixU();
}

/// (m h) x n scalar image of a BMatrix; column j stacks L^T A(i, j) over i.
inline Eigen::MatrixXd stack(const BMatrix& A) {
  const Eigen::MatrixXd U = iso(A.ip());
  const auto h = static_cast<Eigen::Index>(A.dim());
  Eigen::MatrixXd S(static_cast<Eigen::Index>(A.rows()) * h, static_cast<Eigen::Index>(A.cols()));
  for (std::size_t j = 0; j < A.cols(); ++j) {
    for (std::size_t i = 0; i < A.rows(); ++i) {
      S.block(static_cast<Eigen::Index>(i) * h, static_cast<Eigen::Index>(j), h, 1) = U * A.entry(i, j);
    }
  }
  return S;
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues();
}

/// Truncated dense pseudoinverse (relative threshold tol).
inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& M, double tol = 1e-12) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  const double cut = s.size() > 0 ? tol * s(0) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut && s(i) > 0) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

inline std::size_t numerical_rank(const Eigen::MatrixXd& M, double tol = 1e-10) {
  const Eigen::VectorXd s = singular_values(M);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > tol * s(0) ? 1 : 0;
  return r;
}

/// Scalar tensor stored flat in big-endian order.
struct ScalarTensor {
  Shape dims;
  Eigen::VectorXd data;
};

inline std::size_t flat(const Shape& dims, const std::vector<std::size_t>& idx) {
  std::size_t lin = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) lin = lin * dims[k] + idx[k];
  return lin;
}

inline std::vector<std::size_t> unflat(const Shape& dims, std::size_t lin) {
  std::vector<std::size_t> idx(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    idx[k] = lin % dims[k];
    lin /= dims[k];
  }
  return idx;
}

/// Component c of a function-valued tensor.
inline ScalarTensor component(const BTensor& A, Eigen::Index c) {
  return {A.dims(), A.coeffs().row(c).transpose()};
}

/// Mode-k unfolding by definition: row i_k, column big-endian over the other
/// modes in increasing order.
inline Eigen::MatrixXd unfold_oracle(const ScalarTensor& T, std::size_t k) {
  std::size_t cols = 1;
  for (std::size_t l = 0; l < T.dims.size(); ++l) cols *= l == k ? 1 : T.dims[l];
  Eigen::MatrixXd M(static_cast<Eigen::Index>(T.dims[k]), static_cast<Eigen::Index>(cols));
  for (std::size_t lin = 0; lin < static_cast<std::size_t>(T.data.size()); ++lin) {
    const auto idx = unflat(T.dims, lin);
    std::size_t c = 0;
    for (std::size_t l = 0; l < T.dims.size(); ++l) {
      if (l != k) c = c * T.dims[l] + idx[l];
    }
    M(static_cast<Eigen::Index>(idx[k]), static_cast<Eigen::Index>(c)) = T.data(static_cast<Eigen::Index>(lin));
  }
  return M;
}

inline ScalarTensor refold_oracle(const Eigen::MatrixXd& M, std::size_t k, const Shape& dims) {
  ScalarTensor T{dims, Eigen::VectorXd(static_cast<Eigen::Index>(num_entries(dims)))};
  for (std::size_t lin = 0; lin < num_entries(dims); ++lin) {
    const auto idx = unflat(dims, lin);
    std::size_t c = 0;
    for (std::size_t l = 0; l < dims.size(); ++l) {
      if (l != k) c = c * dims[l] + idx[l];
    }
    T.data(static_cast<Eigen::Index>(lin)) = M(static_cast<Eigen::Index>(idx[k]), static_cast<Eigen::Index>(c));
  }
  return T;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  }
  return K;
}

/// Multilinear product T x_1 B_1 ... x_d B_d via C_(k) = B_k T_(k) (kron_{l != k} B_l)^T.
inline ScalarTensor multilinear_oracle(const ScalarTensor& T, const std::vector<Eigen::MatrixXd>& B, std::size_t k) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Ones(1, 1);
  for (std::size_t l = 0; l < B.size(); ++l) {
    if (l != k) K = kron(K, B[l]);
  }
  const Eigen::MatrixXd C = B[k] * unfold_oracle(T, k) * K.transpose();
  Shape out(B.size());
  for (std::size_t l = 0; l < B.size(); ++l) out[l] = static_cast<std::size_t>(B[l].rows());
  return refold_oracle(C, k, out);
}

/// Function-valued tensor with exact Tucker rank `ranks` (generic Gaussian
/// core and factors).
inline BTensor tucker_tensor(const Shape& dims, const Rank& ranks, const InnerProduct& ip, std::mt19937_64& rng) {
  BTensor core = random_btensor(ranks, ip, rng);
  for (std::size_t k = 0; k < dims.size(); ++k) {
    core = mode_mul(core, k, randn(static_cast<Eigen::Index>(dims[k]), static_cast<Eigen::Index>(ranks[k]), rng));
  }
  return core;
}

/// Relative l2(H) distance.
inline double rel_err(const BTensor& A, const BTensor& B) { return fro_distance(A, B) / fro_norm(A); }

inline double rel_err(const BMatrix& A, const BMatrix& B) { return (A - B).norm() / A.norm(); }

}  // namespace fvt::test
