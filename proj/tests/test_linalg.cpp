#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <random>

#include "msfem/linalg.hpp"

using namespace msfem;

namespace {

SparseMatrix dense_to_csr(const std::vector<std::vector<double>>& a) {
  std::vector<Triplet> t;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j)
      if (a[i][j] != 0.0) t.push_back({static_cast<int>(i), static_cast<int>(j), a[i][j]});
  return csr_from_triplets(static_cast<int>(a.size()), t);
}

// 1D path-graph Laplacian with free ends: kernel = constants.
SparseMatrix path_laplacian(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i + 1 < n; ++i) {
    t.push_back({i, i, 1.0});
    t.push_back({i + 1, i + 1, 1.0});
    t.push_back({i, i + 1, -1.0});
    t.push_back({i + 1, i, -1.0});
  }
  return csr_from_triplets(n, t);
}

SparseMatrix random_spd(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 4.0 + std::abs(u(rng))});
    for (int j : {i + 1, i + 3})
      if (j < n) {
        const double v = 0.8 * u(rng);
        t.push_back({i, j, v});
        t.push_back({j, i, v});
      }
  }
  return csr_from_triplets(n, t);
}

std::vector<double> residual(const SparseMatrix& A, const std::vector<double>& x,
                             const std::vector<double>& b) {
  std::vector<double> r = A * x;
  for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

}  // namespace

TEST(Csr, DuplicatesAreSummed) {
  const SparseMatrix A = csr_from_triplets(1, {{0, 0, 1.0}, {0, 0, 1.0}});
  EXPECT_EQ(A.nnz(), 1u);
  EXPECT_EQ(A.at(0, 0), 2.0);
}

TEST(Csr, EmptyListGivesZeroMatrix) {
  const SparseMatrix A = csr_from_triplets(2, {});
  EXPECT_EQ(A.rows, 2);
  EXPECT_EQ(A.nnz(), 0u);
  EXPECT_EQ(A.at(1, 0), 0.0);
}

TEST(Csr, RejectsOutOfRangeIndices) {
  EXPECT_THROW(csr_from_triplets(2, {{2, 0, 1.0}}), InvalidArgument);
  EXPECT_THROW(csr_from_triplets(2, {{0, -1, 1.0}}), InvalidArgument);
}

TEST(Csr, OrderIndependentBitwise) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> id(0, 9);
  std::vector<Triplet> t;
  for (int k = 0; k < 400; ++k) t.push_back({id(rng), id(rng), u(rng)});
  const SparseMatrix A = csr_from_triplets(10, t);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(t.begin(), t.end(), rng);
    const SparseMatrix B = csr_from_triplets(10, t);
    EXPECT_EQ(A.ptr, B.ptr);
    EXPECT_EQ(A.idx, B.idx);
    ASSERT_EQ(A.val.size(), B.val.size());
    EXPECT_EQ(0, std::memcmp(A.val.data(), B.val.data(), A.val.size() * sizeof(double)));
  }
  for (int r = 0; r < A.rows; ++r)
    for (int p = A.ptr[r] + 1; p < A.ptr[r + 1]; ++p) EXPECT_LT(A.idx[p - 1], A.idx[p]);
}

TEST(Csr, BuilderMatchesTriplets) {
  const std::vector<std::array<int, 3>> tris{{0, 1, 2}, {1, 3, 2}};
  const std::vector<int> dof{0, -1, 1, 2};
  CsrBuilder b(3, tris, dof);
  Mat3 k1{{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}};
  Mat3 k2{{{10, 11, 12}, {13, 14, 15}, {16, 17, 18}}};
  b.add(tris[0], k1);
  b.add(tris[1], k2);
  const SparseMatrix A = b.take();
  // Node 1 is dropped; dofs: node0->0, node2->1, node3->2.
  EXPECT_EQ(A.at(0, 0), 1.0);
  EXPECT_EQ(A.at(0, 1), 3.0);
  EXPECT_EQ(A.at(1, 1), 9.0 + 18.0);
  EXPECT_EQ(A.at(1, 2), 17.0);
  EXPECT_EQ(A.at(2, 1), 15.0);
  EXPECT_EQ(A.at(2, 2), 14.0);
}

TEST(Cg, IdentityReturnsRhs) {
  const auto x = cg_solve(dense_to_csr({{1, 0}, {0, 1}}), {3, 4});
  EXPECT_NEAR(x[0], 3, 1e-14);
  EXPECT_NEAR(x[1], 4, 1e-14);
}

TEST(Cg, HandSolvedTwoByTwo) {
  const auto x = cg_solve(dense_to_csr({{4, 1}, {1, 3}}), {1, 2});
  EXPECT_NEAR(x[0], 1.0 / 11.0, 1e-13);
  EXPECT_NEAR(x[1], 7.0 / 11.0, 1e-13);
}

TEST(Cg, ZeroMatrixFails) {
  const SparseMatrix Z = csr_from_triplets(2, {{0, 0, 0.0}, {1, 1, 0.0}});
  EXPECT_THROW(cg_solve(Z, {1, 1}), Error);
}

TEST(Cg, NoConvergenceCarriesResidual) {
  std::mt19937 rng(3);
  const SparseMatrix A = random_spd(200, rng);
  std::vector<double> b(200, 1.0);
  SolveOptions opt;
  opt.maxit = 2;
  try {
    cg_solve(A, b, opt);
    FAIL() << "expected NoConvergence";
  } catch (const NoConvergence& e) {
    EXPECT_GT(e.residual, 0.0);
  }
}

TEST(Cg, ReportedResidualIsTheTrueResidual) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const SparseMatrix A = random_spd(300, rng);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> b(300);
    for (auto& v : b) v = u(rng);
    SolveInfo info;
    const auto x = cg_solve(A, b, {}, &info);
    const double r = norm2(residual(A, x, b));
    EXPECT_NEAR(info.residual, r, 1e-14);
    EXPECT_LE(r, 1e-12 * norm2(b));
  }
}

TEST(BiCgStab, IdentityReturnsRhs) {
  const auto x = bicgstab_solve(dense_to_csr({{1, 0}, {0, 1}}), {3, 4});
  EXPECT_NEAR(x[0], 3, 1e-14);
  EXPECT_NEAR(x[1], 4, 1e-14);
}

TEST(BiCgStab, UpperTriangular) {
  const auto x = bicgstab_solve(dense_to_csr({{2, 1}, {0, 2}}), {3, 2});
  EXPECT_NEAR(x[0], 1.0, 1e-13);
  EXPECT_NEAR(x[1], 1.0, 1e-13);
}

TEST(BiCgStab, RandomNonsymmetricResidual) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 150;
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
      t.push_back({i, i, 5.0});
      for (int j : {i - 2, i + 1, i + 4})
        if (j >= 0 && j < n) t.push_back({i, j, u(rng)});
    }
    const SparseMatrix A = csr_from_triplets(n, t);
    std::vector<double> b(n);
    for (auto& v : b) v = u(rng);
    const auto x = bicgstab_solve(A, b);
    EXPECT_LE(norm2(residual(A, x, b)), 1e-12 * norm2(b));
  }
}

TEST(DenseLu, IdentityReturnsRhs) {
  DenseMatrix I(3);
  for (int i = 0; i < 3; ++i) I(i, i) = 1.0;
  const auto X = dense_lu_solve(I, {{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(X[0], (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(X[1], (std::vector<double>{4, 5, 6}));
}

TEST(DenseLu, PermutationNeedsPivoting) {
  DenseMatrix A(2);
  A(0, 1) = A(1, 0) = 1.0;
  const auto x = dense_lu_solve(A, std::vector<double>{5, 7});
  EXPECT_NEAR(x[0], 7, 1e-15);
  EXPECT_NEAR(x[1], 5, 1e-15);
}

TEST(DenseLu, SingularThrows) {
  DenseMatrix A(2);
  A(0, 0) = A(0, 1) = A(1, 0) = A(1, 1) = 1.0;
  EXPECT_THROW(dense_lu_solve(A, std::vector<double>{1, 1}), SingularMatrix);
}

TEST(DenseLu, InverseOfModeratelyConditionedMatrix) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = 12;
  DenseMatrix A(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = u(rng) + (i == j ? 4.0 : 0.0);
  std::vector<std::vector<double>> I(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) I[i][i] = 1.0;
  const auto X = dense_lu_solve(A, I);  // columns of the inverse
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += A(i, k) * X[j][k];
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  EXPECT_LE(worst, 1e-10);
}

TEST(Constrained, HandSolvedKkt) {
  ConstraintBlock cb;
  cb.C = {{1.0, 0.0}};
  cb.g = {0.0};
  const auto s = constrained_solve(dense_to_csr({{1, 0}, {0, 1}}), std::vector<double>{1, 1}, cb);
  EXPECT_NEAR(s.x[0], 0.0, 1e-12);
  EXPECT_NEAR(s.x[1], 1.0, 1e-12);
  ASSERT_EQ(s.lambda.size(), 1u);
  EXPECT_NEAR(s.lambda[0], 1.0, 1e-12);
}

TEST(Constrained, NoConstraintsEqualsCg) {
  std::mt19937 rng(9);
  const SparseMatrix A = random_spd(50, rng);
  std::vector<double> b(50, 1.0);
  const auto s = constrained_solve(A, b, ConstraintBlock{});
  const auto x = cg_solve(A, b);
  for (int i = 0; i < 50; ++i) EXPECT_NEAR(s.x[i], x[i], 1e-10);
}

TEST(Constrained, LaplacianWithZeroMean) {
  const int n = 40;
  const SparseMatrix L = path_laplacian(n);
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) b[i] = std::sin(0.3 * i) - std::sin(0.3 * (n - 1 - i));
  double mean_b = 0;
  for (double v : b) mean_b += v / n;
  for (auto& v : b) v -= mean_b;  // compatible load
  ConstraintBlock cb;
  cb.C = {std::vector<double>(n, 1.0 / std::sqrt(n))};
  cb.g = {0.0};
  const auto s = constrained_solve(L, b, cb);
  double mean = 0;
  for (double v : s.x) mean += v / n;
  EXPECT_NEAR(mean, 0.0, 1e-10);
  EXPECT_LE(norm2(residual(L, s.x, b)), 1e-9 * norm2(b));
}

TEST(Constrained, IndependentOfAugmentationWeight) {
  const int n = 60;
  const SparseMatrix L = path_laplacian(n);
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) b[i] = std::cos(0.17 * i);
  ConstraintBlock cb;
  std::vector<double> c1(n, 0.0), c2(n, 0.0);
  for (int i = 0; i < 5; ++i) c1[i] = 1.0 / std::sqrt(5.0);
  for (int i = n - 7; i < n; ++i) c2[i] = 1.0 / std::sqrt(7.0);
  cb.C = {c1, c2};
  cb.g = {0.3, -0.2};
  ConstrainedOptions o1, o2;
  o1.gamma = 4.0;   // about the norm of the operator
  o2.gamma = 40.0;
  const auto s1 = constrained_solve(L, b, cb, o1);
  const auto s2 = constrained_solve(L, b, cb, o2);
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = s1.x[i] - s2.x[i];
  EXPECT_LE(norm2(d), 1e-8 * norm2(s1.x));
  for (int k = 0; k < 2; ++k) {
    double cx = 0.0;
    for (int i = 0; i < n; ++i) cx += cb.C[k][i] * s1.x[i];
    EXPECT_LE(std::abs(cx - cb.g[k]), 1e-9 * (1 + 0.3));
  }
}

TEST(Constrained, DegenerateConstraintsThrow) {
  const SparseMatrix L = path_laplacian(10);
  ConstraintBlock cb;
  std::vector<double> c(10, 0.0);
  c[0] = 1.0;
  cb.C = {c, c};
  cb.g = {0.0, 0.0};
  EXPECT_THROW(constrained_solve(L, std::vector<double>(10, 0.0), cb), ConstraintDegenerate);
}

TEST(SolveCoarse, DenseAndIterativePathsAgree) {
  std::mt19937 rng(4);
  const SparseMatrix small = random_spd(100, rng);
  std::vector<double> b(100, 1.0);
  const auto x = solve_coarse(small, b);
  const auto y = cg_solve(small, b);
  for (int i = 0; i < 100; ++i) EXPECT_NEAR(x[i], y[i], 1e-10);
  const SparseMatrix big = random_spd(2500, rng);
  std::vector<double> bb(2500, 1.0);
  const auto z = solve_coarse(big, bb);
  EXPECT_LE(norm2(residual(big, z, bb)), 1e-11 * norm2(bb));
}

TEST(ConditionEstimate, DetectsIllConditioning) {
  const SparseMatrix I = csr_from_triplets(3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
  EXPECT_NEAR(condition_estimate(I), 1.0, 1e-12);
  const SparseMatrix D = csr_from_triplets(2, {{0, 0, 1.0}, {1, 1, 1e-16}});
  EXPECT_GT(condition_estimate(D), 1e14);
}

TEST(SparseDirect, MatchesKrylovSolvers) {
  std::mt19937 rng(9);
  const SparseMatrix A = random_spd(40, rng);
  std::vector<double> b(40);
  for (int i = 0; i < 40; ++i) b[i] = std::sin(0.3 * i);
  const auto x = sparse_direct_solve(A, {b}, true)[0];
  const auto y = cg_solve(A, b);
  for (int i = 0; i < 40; ++i) EXPECT_NEAR(x[i], y[i], 1e-10);
  const auto z = sparse_direct_solve(A, {b}, false)[0];
  for (int i = 0; i < 40; ++i) EXPECT_NEAR(x[i], z[i], 1e-10);
  const SparseMatrix S = csr_from_triplets(2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
  EXPECT_THROW(sparse_direct_solve(S, {{1.0, 2.0}}, false), SingularMatrix);
}

TEST(ConstrainedSolve, DirectPathMatchesIterativePath) {
  const int n = 30;
  const SparseMatrix A = path_laplacian(n);
  ConstraintBlock cb;
  cb.C.assign(2, std::vector<double>(n, 0.0));
  for (int i = 0; i < 5; ++i) cb.C[0][i] = 1.0 / std::sqrt(5.0);
  for (int i = n - 7; i < n; ++i) cb.C[1][i] = 1.0 / std::sqrt(7.0);
  cb.g = {0.2, -0.1};
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) b[i] = std::cos(0.2 * i);
  ConstrainedOptions it, dir;
  dir.direct = true;
  const auto a = constrained_solve(A, b, cb, it);
  const auto d = constrained_solve(A, b, cb, dir);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(a.x[i], d.x[i], 1e-8);
  for (int r = 0; r < 2; ++r) EXPECT_NEAR(a.lambda[r], d.lambda[r], 1e-8);
  ConstraintBlock dup = cb;
  dup.C[1] = dup.C[0];
  EXPECT_THROW(constrained_solve(A, b, dup, dir), ConstraintDegenerate);
}
