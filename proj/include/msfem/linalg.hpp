#pragma once

#include <functional>
#include <vector>

#include "msfem/common.hpp"

namespace msfem {

struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> ptr;  // row offsets, size rows + 1
  std::vector<int> idx;  // column indices, strictly increasing per row
  std::vector<double> val;

  void multiply(const double* x, double* y) const;
  std::vector<double> operator*(const std::vector<double>& x) const;
  std::vector<double> diagonal() const;
  double at(int i, int j) const;
  size_t nnz() const { return val.size(); }
};

struct Triplet {
  int row;
  int col;
  double value;
};

// Duplicates are summed in a canonical order, so the result does not depend
// on the order of the input.
SparseMatrix csr_from_triplets(int n, std::vector<Triplet> triplets);
SparseMatrix csr_from_triplets(int rows, int cols, std::vector<Triplet> triplets);

// Pattern-first assembly for meshes: element contributions are added in the
// given order, which keeps the result deterministic without sorting values.
class CsrBuilder {
 public:
  CsrBuilder(int n, const std::vector<std::array<int, 3>>& tris, const std::vector<int>& dof);
  void add(const std::array<int, 3>& t, const Mat3& ke);
  SparseMatrix take();

 private:
  int find(int row, int col) const;
  std::vector<int> dof_;
  SparseMatrix m_;
};

struct SolveOptions {
  double tol = 1e-12;  // relative residual
  int maxit = 200000;
};

struct SolveInfo {
  double residual = 0.0;  // final ||Ax - b||, recomputed
  int iterations = 0;
};

using LinearOperator = std::function<void(const std::vector<double>&, std::vector<double>&)>;

// Jacobi-preconditioned conjugate gradients.
std::vector<double> cg_solve(const SparseMatrix& A, const std::vector<double>& b,
                             const SolveOptions& opt = {}, SolveInfo* info = nullptr);
std::vector<double> cg_solve(const LinearOperator& A, const std::vector<double>& diag,
                             const std::vector<double>& b, const SolveOptions& opt = {},
                             SolveInfo* info = nullptr);

// Jacobi-preconditioned BiCGStab.
std::vector<double> bicgstab_solve(const SparseMatrix& A, const std::vector<double>& b,
                                   const SolveOptions& opt = {}, SolveInfo* info = nullptr);
std::vector<double> bicgstab_solve(const LinearOperator& A, const std::vector<double>& diag,
                                   const std::vector<double>& b, const SolveOptions& opt = {},
                                   SolveInfo* info = nullptr);

struct DenseMatrix {
  int n = 0;
  std::vector<double> a;  // row-major n x n
  DenseMatrix() = default;
  explicit DenseMatrix(int n) : n(n), a(static_cast<size_t>(n) * n, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

DenseMatrix to_dense(const SparseMatrix& A);

// LU with partial pivoting. Throws SingularMatrix when a pivot falls below
// 1e-14 * ||A||_inf.
std::vector<std::vector<double>> dense_lu_solve(const DenseMatrix& A,
                                                const std::vector<std::vector<double>>& B);
std::vector<double> dense_lu_solve(const DenseMatrix& A, const std::vector<double>& b);

struct ConstraintBlock {
  std::vector<std::vector<double>> C;  // k rows of length n
  std::vector<double> g;
  int k() const { return static_cast<int>(C.size()); }
};

struct ConstrainedSolution {
  std::vector<double> x;
  std::vector<double> lambda;
};

struct ConstrainedOptions {
  double gamma = -1.0;  // augmentation weight; <= 0 selects trace(A) / n
  bool symmetric = true;
  bool direct = false;  // sparse LU of the bordered system instead of the iterative path
  SolveOptions solve;
};

// Solves Ax + C^T lambda = b, Cx = g through the augmented operator
// A + gamma C^T C and a k x k Schur complement for the multipliers. Several
// right-hand sides share the Schur factorization.
std::vector<ConstrainedSolution> constrained_solve(const SparseMatrix& A,
                                                   const std::vector<std::vector<double>>& bs,
                                                   const ConstraintBlock& cb,
                                                   const ConstrainedOptions& opt = {});
ConstrainedSolution constrained_solve(const SparseMatrix& A, const std::vector<double>& b,
                                      const ConstraintBlock& cb,
                                      const ConstrainedOptions& opt = {});

// Sparse factorization, reused for every right-hand side: LDL^T when
// symmetric, LU otherwise. Throws SingularMatrix when factorization fails.
std::vector<std::vector<double>> sparse_direct_solve(const SparseMatrix& A,
                                                     const std::vector<std::vector<double>>& B,
                                                     bool symmetric);

// Coarse-system policy: dense LU up to 2000 unknowns, BiCGStab above.
std::vector<double> solve_coarse(const SparseMatrix& A, const std::vector<double>& b,
                                 const SolveOptions& opt = {});

// 1-norm condition number estimate from a dense LU; infinity if singular.
double condition_estimate(const SparseMatrix& A);

double norm2(const std::vector<double>& v);

}  // namespace msfem
