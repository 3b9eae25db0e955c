#include <doctest.h>

#include <algorithm>
#include <set>

#include "fvt/btensor.hpp"
#include "fvt/error.hpp"
#include "support.hpp"

using namespace fvt;
using test::randn;

namespace {

template <class F>
bool throws_code(F&& f, ErrorCode code) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

double max_abs(const Eigen::MatrixXd& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

// Records every linear index read through it.
class RecordingSource final : public EntrySource {
 public:
  explicit RecordingSource(const BTensor& A) : inner_(A) {}
  const Shape& dims() const override { return inner_.dims(); }
  const InnerProduct& ip() const override { return inner_.ip(); }
  void fetch(std::span<const std::size_t> linear, Eigen::MatrixXd& out) override {
    seen.insert(linear.begin(), linear.end());
    inner_.fetch(linear, out);
  }
  std::set<std::size_t> seen;

 private:
  TensorSource inner_;
};

IndexSet random_subset(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  IndexSet all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<IndexSet> random_sets(const Shape& dims, const Rank& sizes, std::mt19937_64& rng) {
  std::vector<IndexSet> sets;
  for (std::size_t k = 0; k < dims.size(); ++k) sets.push_back(random_subset(dims[k], sizes[k], rng));
  return sets;
}

bool in_cross(const Shape& dims, const std::vector<IndexSet>& sets, std::size_t lin) {
  const MultiIndex idx = multi_index(dims, lin);
  std::size_t outside = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (std::find(sets[k].begin(), sets[k].end(), idx[k]) == sets[k].end()) ++outside;
  }
  return outside <= 1;
}

// Stacked isometric image of R_k-style BMatrix, for rank oracles.
std::size_t oracle_column_rank(const BMatrix& M) { return test::numerical_rank(test::stack(M), 1e-10); }

test::ScalarTensor scalar(const BTensor& A) { return test::component(A, 0); }

}  // namespace

TEST_CASE("unfold big-endian example") {
  const auto ip = InnerProduct::identity(1);
  BTensor A({2, 2, 2}, ip);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t c = 0; c < 2; ++c) {
        const std::size_t idx[] = {a, b, c};
        A.entry(idx)(0) = 100.0 * double(a + 1) + 10.0 * double(b + 1) + double(c + 1);
      }
    }
  }
  const BMatrix U = unfold(A, 0);
  REQUIRE(U.rows() == 2);
  REQUIRE(U.cols() == 4);
  const double row1[] = {111, 112, 121, 122};
  for (std::size_t j = 0; j < 4; ++j) CHECK(U.entry(0, j)(0) == row1[j]);
  const BMatrix U2 = unfold(A, 1);
  const double row21[] = {111, 112, 211, 212};
  for (std::size_t j = 0; j < 4; ++j) CHECK(U2.entry(0, j)(0) == row21[j]);
  CHECK(throws_code([&] { (void)unfold(A, 3); }, ErrorCode::IndexOutOfRange));
}

TEST_CASE("unfold of a matrix") {
  std::mt19937_64 rng(11);
  const auto ip = test::random_ip(GramKind::Diagonal, 3, rng);
  const BTensor A = test::random_btensor({4, 5}, ip, rng);
  const BMatrix U0 = unfold(A, 0);
  const BMatrix U1 = unfold(A, 1);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const std::size_t idx[] = {i, j};
      CHECK(U0.entry(i, j) == A.entry(idx));
      CHECK(U1.entry(j, i) == A.entry(idx));
    }
  }
  CHECK(unfold_transposed(A, 0).coeffs() == transpose(U0).coeffs());
}

TEST_CASE("unfold and refold against the definition") {
  std::mt19937_64 rng(12);
  for (GramKind g : test::kAllGrams) {
    const auto ip = test::random_ip(g, 3, rng);
    const BTensor A = test::random_btensor({3, 4, 2}, ip, rng);
    for (std::size_t k = 0; k < 3; ++k) {
      const BMatrix U = unfold(A, k);
      for (Eigen::Index c = 0; c < 3; ++c) {
        const Eigen::MatrixXd oracle = test::unfold_oracle(test::component(A, c), k);
        Eigen::MatrixXd got(oracle.rows(), oracle.cols());
        for (std::size_t i = 0; i < U.rows(); ++i) {
          for (std::size_t j = 0; j < U.cols(); ++j) got(Eigen::Index(i), Eigen::Index(j)) = U.entry(i, j)(c);
        }
        CHECK(got == oracle);
      }
      CHECK(refold(U, k, A.dims()).coeffs() == A.coeffs());
      CHECK(unfold_transposed(A, k).coeffs() == transpose(U).coeffs());
    }
  }
  const auto ip = InnerProduct::identity(2);
  CHECK(refold(BMatrix(3, 8, ip), 1, {2, 3, 4}).coeffs().norm() == 0.0);
  const BTensor v = test::random_btensor({5}, ip, rng);
  const BMatrix col = unfold(v, 0);
  CHECK(col.rows() == 5);
  CHECK(col.cols() == 1);
  CHECK(refold(col, 0, {5}).coeffs() == v.coeffs());
  CHECK(throws_code([&] { (void)refold(BMatrix(3, 7, ip), 1, {2, 3, 4}); }, ErrorCode::DimensionMismatch));
}

TEST_CASE("mode products") {
  std::mt19937_64 rng(13);
  const auto ip = test::random_ip(GramKind::Dense, 2, rng);
  const BTensor A = test::random_btensor({3, 3, 3}, ip, rng);
  CHECK(mode_mul(A, 1, Eigen::MatrixXd::Identity(3, 3)).coeffs() == A.coeffs());

  const Eigen::MatrixXd B1 = randn(4, 3, rng);
  const Eigen::MatrixXd B2 = randn(2, 3, rng);
  const BTensor left = mode_mul(mode_mul(A, 0, B1), 1, B2);
  const BTensor right = mode_mul(mode_mul(A, 1, B2), 0, B1);
  CHECK(max_abs(left.coeffs() - right.coeffs()) <= 1e-12 * max_abs(left.coeffs()));
  CHECK(throws_code([&] { (void)mode_mul(A, 0, randn(2, 4, rng)); }, ErrorCode::DimensionMismatch));

  // Unfolding of a full multilinear product against the explicit Kronecker form.
  const BTensor T = test::random_btensor({2, 3, 2}, ip, rng);
  const std::vector<Eigen::MatrixXd> B = {randn(3, 2, rng), randn(2, 3, rng), randn(4, 2, rng)};
  BTensor C = T;
  for (std::size_t k = 0; k < 3; ++k) C = mode_mul(C, k, B[k]);
  for (std::size_t k = 0; k < 3; ++k) {
    for (Eigen::Index c = 0; c < 2; ++c) {
      const test::ScalarTensor oracle = test::multilinear_oracle(test::component(T, c), B, k);
      const Eigen::VectorXd got = C.coeffs().row(c).transpose();
      CHECK((got - oracle.data).cwiseAbs().maxCoeff() <= 1e-10 * oracle.data.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("tucker rank") {
  std::mt19937_64 rng(14);
  const auto ip = test::random_ip(GramKind::Diagonal, 3, rng);
  CHECK(tucker_rank(BTensor({3, 4, 5}, ip)) == Rank{0, 0, 0});
  for (GramKind g : test::kAllGrams) {
    const auto ipg = test::random_ip(g, 4, rng);
    const BTensor A = test::tucker_tensor({6, 7, 5}, {2, 3, 4}, ipg, rng);
    CHECK(tucker_rank(A) == Rank{2, 3, 4});
  }
  const auto ip3 = InnerProduct::identity(3);
  const BTensor A = test::tucker_tensor({6, 6, 6}, {3, 3, 3}, ip3, rng);
  CHECK(tucker_rank(A) == Rank{3, 3, 3});

  const auto ip1 = InnerProduct::identity(1);
  for (std::size_t r = 1; r <= 4; ++r) {
    const Eigen::MatrixXd M = randn(5, Eigen::Index(r), rng) * randn(Eigen::Index(r), 6, rng);
    BTensor S({5, 6}, ip1);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        const std::size_t idx[] = {i, j};
        S.entry(idx)(0) = M(Eigen::Index(i), Eigen::Index(j));
      }
    }
    const std::size_t oracle = test::numerical_rank(M);
    CHECK(tucker_rank(S) == Rank{oracle, oracle});
  }
}

TEST_CASE("row matrices") {
  std::mt19937_64 rng(15);
  const auto ip = test::random_ip(GramKind::Dense, 2, rng);

  const BTensor M = test::random_btensor({4, 5}, ip, rng);
  const IndexSet J = {1, 3};
  const BMatrix R0 = row_matrix(M, {{}, J}, 0);
  REQUIRE(R0.rows() == 2);
  REQUIRE(R0.cols() == 4);
  for (std::size_t p = 0; p < J.size(); ++p) {
    for (std::size_t i = 0; i < 4; ++i) {
      const std::size_t idx[] = {i, J[p]};
      CHECK(R0.entry(p, i) == M.entry(idx));
    }
  }

  const BTensor A = test::random_btensor({3, 4, 5}, ip, rng);
  const BMatrix fiber = row_matrix(A, {{2}, {0}, {3}}, 1);
  REQUIRE(fiber.rows() == 1);
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t idx[] = {2, i, 3};
    CHECK(fiber.entry(0, i) == A.entry(idx));
  }

  const std::vector<IndexSet> sets = {{0, 2}, {1, 3}, {0, 2, 4}};
  const BTensor G = A.subtensor(sets);
  for (std::size_t k = 0; k < 3; ++k) {
    const BMatrix Rk = row_matrix(A, sets, k);
    const BMatrix Gt = transpose(unfold(G, k));
    CHECK(Rk.rows() == Gt.rows());
    for (std::size_t q = 0; q < sets[k].size(); ++q) {
      for (std::size_t r = 0; r < Rk.rows(); ++r) CHECK(Rk.entry(r, sets[k][q]) == Gt.entry(r, q));
    }
  }
  CHECK(throws_code([&] { (void)row_matrix(A, {{0}, {}, {1}}, 0); }, ErrorCode::EmptyIndexSet));
}

TEST_CASE("tucker cross reduces to matrix cross") {
  std::mt19937_64 rng(16);
  const auto ip = test::random_ip(GramKind::Dense, 4, rng);
  const BTensor A = test::random_btensor({5, 6}, ip, rng);
  BMatrix M(5, 6, ip);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      const std::size_t idx[] = {i, j};
      M.entry(i, j) = A.entry(idx);
    }
  }
  const IndexSet I = {0, 3}, J = {1, 2, 5};
  const BMatrix ref = cross_matrix(M, I, J).assemble();
  const BTensor got = tucker_cross(A, {I, J}).assemble();
  double worst = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      const std::size_t idx[] = {i, j};
      worst = std::max(worst, (ref.entry(i, j) - got.entry(idx)).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst <= 1e-12 * max_abs(ref.coeffs()));
}

TEST_CASE("tucker cross interpolation and access pattern") {
  std::mt19937_64 rng(17);
  for (GramKind g : test::kAllGrams) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto ip = test::random_ip(g, 3, rng);
      const Shape dims = {5, 4, 6};
      const BTensor A = test::random_btensor(dims, ip, rng);
      const auto sets = random_sets(dims, {2, 3, 2}, rng);
      RecordingSource src(A);
      const TuckerCrossModel model = tucker_cross(src, sets);
      for (std::size_t lin : src.seen) CHECK(in_cross(dims, sets, lin));

      CHECK(model.core().coeffs() == A.subtensor(sets).coeffs());
      const BTensor B = model.assemble();
      const BTensor BI = B.subtensor(sets);
      CHECK(max_abs(BI.coeffs() - model.core().coeffs()) <= 1e-9 * max_abs(model.core().coeffs()));
    }
  }
  const auto ip = InnerProduct::identity(2);
  const BTensor A = test::random_btensor({3, 3, 3}, ip, rng);
  CHECK(throws_code([&] { (void)tucker_cross(A, {{0}, {}, {1}}); }, ErrorCode::EmptyIndexSet));
}

TEST_CASE("tucker cross exact at the tensor's rank") {
  std::mt19937_64 rng(18);
  for (GramKind g : test::kAllGrams) {
    const auto ip = test::random_ip(g, 4, rng);
    const Shape dims = {7, 6, 8};
    const BTensor A = test::tucker_tensor(dims, {2, 3, 2}, ip, rng);
    for (const Rank& sizes : {Rank{2, 3, 2}, Rank{3, 4, 3}}) {
      const auto sets = random_sets(dims, sizes, rng);
      REQUIRE(tucker_rank(A.subtensor(sets)) == tucker_rank(A));
      CHECK(test::rel_err(A, tucker_cross(A, sets).assemble()) <= 1e-8);
    }
    // A singleton in one mode loses rank, so the approximant cannot be exact.
    const std::vector<IndexSet> thin = {{1}, {0, 2, 4}, {1, 5}};
    REQUIRE(tucker_rank(A.subtensor(thin)) != tucker_rank(A));
    CHECK(test::rel_err(A, tucker_cross(A, thin).assemble()) > 1e-3);
  }
}

TEST_CASE("row slabs are reproduced exactly when ranks match") {
  std::mt19937_64 rng(19);
  for (GramKind g : test::kAllGrams) {
    const auto ip = test::random_ip(g, 3, rng);
    const Shape dims = {5, 5, 5};
    // Mode 0 has rank 2; modes 1 and 2 are full.
    const BTensor A = test::tucker_tensor(dims, {2, 5, 5}, ip, rng);
    const auto sets = random_sets(dims, {2, 2, 2}, rng);
    const BTensor G = A.subtensor(sets);
    const BTensor B = tucker_cross(A, sets).assemble();
    for (std::size_t k = 0; k < 3; ++k) {
      const BMatrix RA = row_matrix(A, sets, k);
      const BMatrix RB = row_matrix(B, sets, k);
      const std::size_t row_rank_g = oracle_column_rank(transpose(unfold(G, k)));
      const std::size_t col_rank_r = oracle_column_rank(RA);
      const double err = (RA - RB).norm() / RA.norm();
      if (k == 0) {
        CHECK(row_rank_g == col_rank_r);
        CHECK(err <= 1e-9);
      } else {
        CHECK(row_rank_g < col_rank_r);
        CHECK(err > 1e-3);
      }
    }
  }
}

TEST_CASE("tucker decomposition entries") {
  std::mt19937_64 rng(20);
  const auto ip = test::random_ip(GramKind::Dense, 3, rng);
  TuckerDecomp one{test::random_btensor({1, 1, 1}, ip, rng), {randn(3, 1, rng), randn(4, 1, rng), randn(2, 1, rng)}};
  const std::size_t idx[] = {2, 1, 0};
  const HVec expect = one.factors[0](2, 0) * one.factors[1](1, 0) * one.factors[2](0, 0) * one.core.entry(0);
  CHECK((one.entry(idx) - expect).cwiseAbs().maxCoeff() <= 1e-14 * expect.cwiseAbs().maxCoeff());

  TuckerDecomp T{test::random_btensor({2, 3, 2}, ip, rng), {randn(5, 2, rng), randn(4, 3, rng), randn(6, 2, rng)}};
  CHECK(T.dims() == Shape{5, 4, 6});
  CHECK(T.ranks() == Rank{2, 3, 2});
  const BTensor full = T.assemble();
  std::vector<std::size_t> lins;
  for (int t = 0; t < 20; ++t) {
    const std::size_t lin = test::uniform_int(0, full.size() - 1, rng);
    lins.push_back(lin);
    const MultiIndex mi = multi_index(full.dims(), lin);
    CHECK((T.entry(mi) - full.entry(lin)).cwiseAbs().maxCoeff() <= 1e-12 * max_abs(full.coeffs()));
  }
  const Eigen::MatrixXd many = T.entries(lins);
  for (std::size_t c = 0; c < lins.size(); ++c) {
    CHECK((many.col(Eigen::Index(c)) - full.entry(lins[c])).cwiseAbs().maxCoeff() <= 1e-12 * max_abs(full.coeffs()));
  }
  TuckerDecomp zero{BTensor({2, 3, 2}, ip), T.factors};
  CHECK(zero.entry(idx).norm() == 0.0);
  const std::size_t bad[] = {5, 0, 0};
  CHECK(throws_code([&] { (void)T.entry(bad); }, ErrorCode::IndexOutOfRange));
}

TEST_CASE("hosvd against per-mode scalar SVD") {
  std::mt19937_64 rng(21);
  for (GramKind g : test::kAllGrams) {
    const auto ip = test::random_ip(g, 3, rng);
    const BTensor A = test::random_btensor({4, 5, 3}, ip, rng);
    const HosvdResult res = hosvd(A, {2, 2, 2});
    CHECK_FALSE(res.clamped);
    CHECK(res.ranks == Rank{2, 2, 2});
    for (std::size_t k = 0; k < 3; ++k) {
      const Eigen::VectorXd s = test::singular_values(test::stack(unfold_transposed(A, k)));
      REQUIRE(res.sigma[k].size() == s.size());
      CHECK((res.sigma[k] - s).cwiseAbs().maxCoeff() <= 1e-10 * s(0));
      const Eigen::MatrixXd& F = res.decomp.factors[k];
      CHECK((F.transpose() * F - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);
    }
    // Core is the projection of A onto the factor spaces.
    BTensor core = A;
    for (std::size_t k = 0; k < 3; ++k) core = mode_mul(core, k, res.decomp.factors[k].transpose());
    CHECK(max_abs(core.coeffs() - res.decomp.core.coeffs()) <= 1e-10 * max_abs(core.coeffs()));
  }
}

TEST_CASE("hosvd exact and clamped ranks") {
  std::mt19937_64 rng(22);
  const auto ip = test::random_ip(GramKind::Diagonal, 3, rng);
  const BTensor A = test::tucker_tensor({4, 5, 6}, {1, 1, 1}, ip, rng);
  const HosvdResult one = hosvd(A, {1, 1, 1});
  CHECK(test::rel_err(A, one.decomp.assemble()) <= 1e-10);

  const BTensor B = test::tucker_tensor({4, 5, 6}, {2, 2, 3}, ip, rng);
  const HosvdResult big = hosvd(B, {4, 5, 6});
  CHECK(big.clamped);
  CHECK(big.requested == Rank{4, 5, 6});
  CHECK(big.ranks == Rank{2, 2, 3});
  CHECK(test::rel_err(B, big.decomp.assemble()) <= 1e-10);
}

TEST_CASE("hosvd error bound") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const GramKind g = test::kAllGrams[trial % 3];
    const auto ip = test::random_ip(g, test::uniform_int(1, 4, rng), rng);
    const Shape dims = {test::uniform_int(2, 6, rng), test::uniform_int(2, 6, rng), test::uniform_int(2, 6, rng)};
    const BTensor A = test::random_btensor(dims, ip, rng);
    Rank r(3);
    for (std::size_t k = 0; k < 3; ++k) r[k] = test::uniform_int(1, dims[k], rng);
    const HosvdResult res = hosvd(A, r);
    const double err = fro_distance(A, res.decomp.assemble());
    CHECK(err <= res.tail_bound() * (1 + 1e-8) + 1e-13 * fro_norm(A));
  }
}

TEST_CASE("hosvd of a scalar matrix is the truncated SVD") {
  std::mt19937_64 rng(24);
  const auto ip = InnerProduct::identity(1);
  const BTensor A = test::random_btensor({6, 5}, ip, rng);
  const Eigen::MatrixXd M = test::unfold_oracle(scalar(A), 0);
  const Eigen::VectorXd s = test::singular_values(M);
  for (std::size_t r = 1; r <= 5; ++r) {
    double tail = 0;
    for (Eigen::Index i = Eigen::Index(r); i < s.size(); ++i) tail += s(i) * s(i);
    const double err = fro_distance(A, hosvd(A, {r, r}).decomp.assemble());
    CHECK(std::abs(err - std::sqrt(tail)) <= 1e-10 * s(0));
  }
}

TEST_CASE("frobenius norm") {
  std::mt19937_64 rng(25);
  const auto ip = test::random_ip(GramKind::Dense, 3, rng);
  CHECK(fro_norm(BTensor({2, 3}, ip)) == 0.0);
  BTensor one({1, 1, 1}, ip);
  const HVec v = randn(3, 1, rng);
  one.entry(0) = v;
  CHECK(fro_norm(one) == doctest::Approx(std::sqrt(ip.dot(v, v))).epsilon(1e-14));

  const auto ip1 = InnerProduct::identity(1);
  const BTensor S = test::random_btensor({3, 4, 2}, ip1, rng);
  CHECK(fro_norm(S) == doctest::Approx(scalar(S).data.norm()).epsilon(1e-14));

  const BTensor A = test::random_btensor({3, 4, 2}, ip, rng);
  const BTensor B = test::random_btensor({3, 4, 2}, ip, rng);
  CHECK(fro_distance(A, B) == doctest::Approx(test::stack(unfold(A, 0) - unfold(B, 0)).norm()).epsilon(1e-12));
}

TEST_CASE("rank monotonicity and subtensor bound") {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ip = test::random_ip(test::kAllGrams[trial % 3], 2, rng);
    const Rank cr = {test::uniform_int(1, 3, rng), test::uniform_int(1, 3, rng), test::uniform_int(1, 3, rng)};
    TuckerDecomp T{test::random_btensor(cr, ip, rng), {}};
    for (std::size_t k = 0; k < 3; ++k) {
      // Rank-deficient factors now and then.
      Eigen::MatrixXd F = randn(5, Eigen::Index(cr[k]), rng);
      if (trial % 2 == 0 && cr[k] > 1) F.col(0) = F.col(1);
      T.factors.push_back(F);
    }
    const Rank full = tucker_rank(T.assemble(), 1e-10);
    const Rank core = tucker_rank(T.core, 1e-10);
    for (std::size_t k = 0; k < 3; ++k) CHECK(full[k] <= core[k]);

    const BTensor A = test::tucker_tensor({5, 6, 4}, cr, ip, rng);
    const Rank ra = tucker_rank(A, 1e-10);
    const auto sets = random_sets(A.dims(), {3, 2, 3}, rng);
    const Rank rs = tucker_rank(A.subtensor(sets), 1e-10);
    for (std::size_t k = 0; k < 3; ++k) CHECK(rs[k] <= ra[k]);
  }
}

TEST_CASE("scalar consistency of the cross factors") {
  std::mt19937_64 rng(27);
  const auto ip = InnerProduct::identity(1);
  const Shape dims = {5, 4, 6};
  const BTensor A = test::random_btensor(dims, ip, rng);
  const std::vector<IndexSet> sets = {{0, 3}, {1, 2, 3}, {2, 5}};
  const TuckerCrossModel model = tucker_cross(A, sets);
  const test::ScalarTensor G = scalar(A.subtensor(sets));
  for (std::size_t k = 0; k < 3; ++k) {
    const Eigen::MatrixXd Gk = test::unfold_oracle(G, k);
    // R_k oracle: fibers A(I.., :, I..) by definition.
    const BMatrix Rk = row_matrix(A, sets, k);
    Eigen::MatrixXd R(Eigen::Index(Rk.rows()), Eigen::Index(Rk.cols()));
    std::size_t row = 0;
    const std::size_t a = k == 0 ? 1 : 0, b = k == 2 ? 1 : 2;
    for (std::size_t p : sets[a]) {
      for (std::size_t q : sets[b]) {
        for (std::size_t i = 0; i < dims[k]; ++i) {
          MultiIndex mi(3);
          mi[k] = i;
          mi[a] = p;
          mi[b] = q;
          R(Eigen::Index(row), Eigen::Index(i)) = A.entry(mi)(0);
        }
        ++row;
      }
    }
    const Eigen::MatrixXd F = (test::pinv(Gk.transpose()) * R).transpose();
    CHECK((F - model.factors()[k]).cwiseAbs().maxCoeff() <= 1e-10 * F.cwiseAbs().maxCoeff());
  }
}
