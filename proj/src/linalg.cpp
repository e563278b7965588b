#include "msfem/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <limits>
#include <numeric>

namespace msfem {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

namespace {

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

LinearOperator as_operator(const SparseMatrix& A) {
  return [&A](const std::vector<double>& x, std::vector<double>& y) {
    A.multiply(x.data(), y.data());
  };
}

double true_residual(const LinearOperator& A, const std::vector<double>& x,
                     const std::vector<double>& b, std::vector<double>& r) {
  A(x, r);
  for (size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r);
}

std::vector<double> inverse_diagonal(const std::vector<double>& d, bool require_positive) {
  std::vector<double> inv(d.size());
  for (size_t i = 0; i < d.size(); ++i) {
    if (require_positive && !(d[i] > 0.0))
      throw InvalidArgument("cg_solve: nonpositive diagonal entry at row " + std::to_string(i));
    inv[i] = d[i] != 0.0 ? 1.0 / d[i] : 1.0;
  }
  return inv;
}

// Once restarts stop reducing the true residual, the iteration has hit the
// rounding floor. Accept if the normwise backward error is within tol, with
// max |a_ii| standing in for ||A|| (a lower bound, so the test is strict).
bool at_rounding_floor(double res, double prev, double tol, double bn,
                       const std::vector<double>& diag, const std::vector<double>& x) {
  if (!(res > 0.5 * prev)) return false;
  double dmax = 0.0;
  for (double d : diag) dmax = std::max(dmax, std::abs(d));
  return res <= tol * (bn + dmax * norm2(x));
}

}  // namespace

void SparseMatrix::multiply(const double* x, double* y) const {
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (int p = ptr[i]; p < ptr[i + 1]; ++p) s += val[p] * x[idx[p]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::operator*(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != cols) throw InvalidArgument("SparseMatrix: size mismatch");
  std::vector<double> y(rows);
  multiply(x.data(), y.data());
  return y;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(std::min(rows, cols), 0.0);
  for (int i = 0; i < static_cast<int>(d.size()); ++i) d[i] = at(i, i);
  return d;
}

double SparseMatrix::at(int i, int j) const {
  auto b = idx.begin() + ptr[i], e = idx.begin() + ptr[i + 1];
  auto it = std::lower_bound(b, e, j);
  return (it != e && *it == j) ? val[it - idx.begin()] : 0.0;
}

SparseMatrix csr_from_triplets(int n, std::vector<Triplet> t) {
  return csr_from_triplets(n, n, std::move(t));
}

SparseMatrix csr_from_triplets(int rows, int cols, std::vector<Triplet> t) {
  if (rows < 0 || cols < 0) throw InvalidArgument("csr_from_triplets: negative dimension");
  for (const auto& x : t)
    if (x.row < 0 || x.row >= rows || x.col < 0 || x.col >= cols)
      throw InvalidArgument("csr_from_triplets: index out of range");
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.value < b.value;
  });
  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.ptr.assign(rows + 1, 0);
  for (size_t i = 0; i < t.size();) {
    size_t j = i;
    double s = 0.0;
    while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) s += t[j++].value;
    m.idx.push_back(t[i].col);
    m.val.push_back(s);
    ++m.ptr[t[i].row + 1];
    i = j;
  }
  for (int i = 0; i < rows; ++i) m.ptr[i + 1] += m.ptr[i];
  return m;
}

CsrBuilder::CsrBuilder(int n, const std::vector<std::array<int, 3>>& tris,
                       const std::vector<int>& dof)
    : dof_(dof) {
  std::vector<std::vector<int>> cols(n);
  for (const auto& t : tris)
    for (int a = 0; a < 3; ++a) {
      const int i = dof_[t[a]];
      if (i < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int j = dof_[t[b]];
        if (j >= 0) cols[i].push_back(j);
      }
    }
  m_.rows = m_.cols = n;
  m_.ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& c = cols[i];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    m_.ptr[i + 1] = m_.ptr[i] + static_cast<int>(c.size());
  }
  m_.idx.reserve(m_.ptr[n]);
  for (auto& c : cols) m_.idx.insert(m_.idx.end(), c.begin(), c.end());
  m_.val.assign(m_.idx.size(), 0.0);
}

int CsrBuilder::find(int row, int col) const {
  auto b = m_.idx.begin() + m_.ptr[row], e = m_.idx.begin() + m_.ptr[row + 1];
  return static_cast<int>(std::lower_bound(b, e, col) - m_.idx.begin());
}

void CsrBuilder::add(const std::array<int, 3>& t, const Mat3& ke) {
  for (int a = 0; a < 3; ++a) {
    const int i = dof_[t[a]];
    if (i < 0) continue;
    for (int b = 0; b < 3; ++b) {
      const int j = dof_[t[b]];
      if (j >= 0) m_.val[find(i, j)] += ke[a][b];
    }
  }
}

SparseMatrix CsrBuilder::take() { return std::move(m_); }

std::vector<double> cg_solve(const SparseMatrix& A, const std::vector<double>& b,
                             const SolveOptions& opt, SolveInfo* info) {
  if (A.rows != A.cols || static_cast<int>(b.size()) != A.rows)
    throw InvalidArgument("cg_solve: size mismatch");
  return cg_solve(as_operator(A), A.diagonal(), b, opt, info);
}

std::vector<double> cg_solve(const LinearOperator& A, const std::vector<double>& diag,
                             const std::vector<double>& b, const SolveOptions& opt,
                             SolveInfo* info) {
  const size_t n = b.size();
  std::vector<double> x(n, 0.0), r = b, z(n), p(n), Ap(n);
  const double bn = norm2(b);
  if (info) *info = {};
  if (bn == 0.0) return x;
  const auto dinv = inverse_diagonal(diag, true);
  const double target = opt.tol * bn;
  int it = 0, restarts = 0;
  double prev = std::numeric_limits<double>::infinity();
  while (true) {
    // (Re)start from the current true residual.
    for (size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    p = z;
    double rz = dotv(r, z);
    bool converged = false;
    for (; it < opt.maxit; ++it) {
      A(p, Ap);
      const double pAp = dotv(p, Ap);
      if (!(pAp > 0.0)) break;
      const double alpha = rz / pAp;
      for (size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
      }
      if (norm2(r) <= target) {
        ++it;
        converged = true;
        break;
      }
      for (size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
      const double rz_new = dotv(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    const double res = true_residual(A, x, b, r);
    if (info) *info = {res, it};
    if (res <= target) return x;
    if (converged && at_rounding_floor(res, prev, opt.tol, bn, diag, x)) return x;
    prev = res;
    if (!converged || it >= opt.maxit || ++restarts > 50)
      throw NoConvergence("cg_solve: no convergence, residual " + std::to_string(res), res, it);
  }
}

std::vector<double> bicgstab_solve(const SparseMatrix& A, const std::vector<double>& b,
                                   const SolveOptions& opt, SolveInfo* info) {
  if (A.rows != A.cols || static_cast<int>(b.size()) != A.rows)
    throw InvalidArgument("bicgstab_solve: size mismatch");
  return bicgstab_solve(as_operator(A), A.diagonal(), b, opt, info);
}

std::vector<double> bicgstab_solve(const LinearOperator& A, const std::vector<double>& diag,
                                   const std::vector<double>& b, const SolveOptions& opt,
                                   SolveInfo* info) {
  const size_t n = b.size();
  std::vector<double> x(n, 0.0), r = b;
  const double bn = norm2(b);
  if (info) *info = {};
  if (bn == 0.0) return x;
  const auto dinv = inverse_diagonal(diag, false);
  const double target = opt.tol * bn;
  std::vector<double> rhat(n), p(n), v(n), s(n), t(n), ph(n), sh(n);
  int it = 0;
  int restarts = 0;
  double prev = std::numeric_limits<double>::infinity();
  while (true) {
    rhat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    bool converged = false, breakdown = false;
    for (; it < opt.maxit; ++it) {
      const double rho_new = dotv(rhat, r);
      if (std::abs(rho_new) < 1e-300 || omega == 0.0) {
        breakdown = true;
        break;
      }
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      for (size_t i = 0; i < n; ++i) ph[i] = dinv[i] * p[i];
      A(ph, v);
      const double rv = dotv(rhat, v);
      if (rv == 0.0) {
        breakdown = true;
        break;
      }
      alpha = rho / rv;
      for (size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      if (norm2(s) <= target) {
        for (size_t i = 0; i < n; ++i) x[i] += alpha * ph[i];
        ++it;
        converged = true;
        break;
      }
      for (size_t i = 0; i < n; ++i) sh[i] = dinv[i] * s[i];
      A(sh, t);
      const double tt = dotv(t, t);
      omega = tt > 0.0 ? dotv(t, s) / tt : 0.0;
      for (size_t i = 0; i < n; ++i) {
        x[i] += alpha * ph[i] + omega * sh[i];
        r[i] = s[i] - omega * t[i];
      }
      if (norm2(r) <= target) {
        ++it;
        converged = true;
        break;
      }
    }
    const double res = true_residual(A, x, b, r);
    if (info) *info = {res, it};
    if (res <= target) return x;
    if (converged && at_rounding_floor(res, prev, opt.tol, bn, diag, x)) return x;
    prev = res;
    if (it >= opt.maxit || (!converged && !breakdown) || ++restarts > 50)
      throw NoConvergence("bicgstab_solve: no convergence, residual " + std::to_string(res), res,
                          it);
  }
}

DenseMatrix to_dense(const SparseMatrix& A) {
  if (A.rows != A.cols) throw InvalidArgument("to_dense: square matrix expected");
  DenseMatrix D(A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) D(i, A.idx[p]) = A.val[p];
  return D;
}

std::vector<std::vector<double>> dense_lu_solve(const DenseMatrix& A,
                                                const std::vector<std::vector<double>>& B) {
  const int n = A.n;
  for (const auto& b : B)
    if (static_cast<int>(b.size()) != n) throw InvalidArgument("dense_lu_solve: size mismatch");
  if (n == 0) return B;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
      A.a.data(), n, n);
  const double anorm = M.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  const auto& U = lu.matrixLU();
  for (int i = 0; i < n; ++i)
    if (!(std::abs(U(i, i)) >= 1e-14 * anorm))
      throw SingularMatrix("dense_lu_solve: pivot below 1e-14 * ||A|| at step " +
                           std::to_string(i));
  Eigen::MatrixXd R(n, static_cast<Eigen::Index>(B.size()));
  for (size_t j = 0; j < B.size(); ++j)
    for (int i = 0; i < n; ++i) R(i, static_cast<Eigen::Index>(j)) = B[j][i];
  const Eigen::MatrixXd X = lu.solve(R);
  std::vector<std::vector<double>> out(B.size(), std::vector<double>(n));
  for (size_t j = 0; j < B.size(); ++j)
    for (int i = 0; i < n; ++i) out[j][i] = X(i, static_cast<Eigen::Index>(j));
  return out;
}

std::vector<double> dense_lu_solve(const DenseMatrix& A, const std::vector<double>& b) {
  return dense_lu_solve(A, std::vector<std::vector<double>>{b})[0];
}

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenSparse to_eigen(const SparseMatrix& A, int extra) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(A.nnz());
  for (int i = 0; i < A.rows; ++i)
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) t.emplace_back(i, A.idx[p], A.val[p]);
  EigenSparse M(A.rows + extra, A.cols + extra);
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

// The bordered system [A C^T; C 0] [x; lambda] = [b; g], factorized once.
std::vector<ConstrainedSolution> constrained_direct(const SparseMatrix& A,
                                                    const std::vector<std::vector<double>>& bs,
                                                    const ConstraintBlock& cb) {
  const int n = A.rows, k = cb.k();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(A.nnz() + 2 * k * 64);
  for (int i = 0; i < n; ++i)
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) t.emplace_back(i, A.idx[p], A.val[p]);
  for (int r = 0; r < k; ++r)
    for (int i = 0; i < n; ++i)
      if (cb.C[r][i] != 0.0) {
        t.emplace_back(n + r, i, cb.C[r][i]);
        t.emplace_back(i, n + r, cb.C[r][i]);
      }
  EigenSparse M(n + k, n + k);
  M.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<EigenSparse> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success)
    throw ConstraintDegenerate("constrained_solve: singular bordered system");
  std::vector<ConstrainedSolution> out(bs.size());
  Eigen::VectorXd rhs(n + k);
  for (size_t j = 0; j < bs.size(); ++j) {
    for (int i = 0; i < n; ++i) rhs[i] = bs[j][i];
    for (int r = 0; r < k; ++r) rhs[n + r] = cb.g[r];
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !sol.allFinite())
      throw ConstraintDegenerate("constrained_solve: bordered solve failed");
    out[j].x.assign(sol.data(), sol.data() + n);
    out[j].lambda.assign(sol.data() + n, sol.data() + n + k);
    double err = 0.0;
    for (int r = 0; r < k; ++r) err = std::max(err, std::abs(dotv(cb.C[r], out[j].x) - cb.g[r]));
    if (!(err <= 1e-9 * (1.0 + norm2(cb.g))))
      throw ConstraintDegenerate("constrained_solve: constraint violation " + std::to_string(err));
    const auto Ax = A * out[j].x;
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
      double v = Ax[i] - bs[j][i];
      for (int r = 0; r < k; ++r) v += out[j].lambda[r] * cb.C[r][i];
      res += v * v;
    }
    if (!(std::sqrt(res) <= 1e-8 * (norm2(bs[j]) + 1e-300) + 1e-14))
      throw ConstraintDegenerate("constrained_solve: inaccurate bordered solve");
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> sparse_direct_solve(const SparseMatrix& A,
                                                     const std::vector<std::vector<double>>& B,
                                                     bool symmetric) {
  if (A.rows != A.cols) throw InvalidArgument("sparse_direct_solve: square matrix expected");
  for (const auto& b : B)
    if (static_cast<int>(b.size()) != A.rows) throw InvalidArgument("sparse_direct_solve: size mismatch");
  const EigenSparse M = to_eigen(A, 0);
  std::vector<std::vector<double>> X(B.size());
  auto run = [&](auto& solver) {
    solver.compute(M);
    if (solver.info() != Eigen::Success) throw SingularMatrix("sparse_direct_solve: factorization failed");
    for (size_t j = 0; j < B.size(); ++j) {
      const Eigen::VectorXd x =
          solver.solve(Eigen::Map<const Eigen::VectorXd>(B[j].data(), A.rows));
      if (solver.info() != Eigen::Success || !x.allFinite())
        throw SingularMatrix("sparse_direct_solve: solve failed");
      X[j].assign(x.data(), x.data() + A.rows);
    }
  };
  if (symmetric) {
    Eigen::SimplicialLDLT<EigenSparse> ldlt;
    run(ldlt);
  } else {
    Eigen::SparseLU<EigenSparse> lu;
    run(lu);
  }
  return X;
}

std::vector<ConstrainedSolution> constrained_solve(const SparseMatrix& A,
                                                   const std::vector<std::vector<double>>& bs,
                                                   const ConstraintBlock& cb,
                                                   const ConstrainedOptions& opt) {
  const int n = A.rows, k = cb.k();
  if (A.cols != n) throw InvalidArgument("constrained_solve: square matrix expected");
  if (static_cast<int>(cb.g.size()) != k) throw InvalidArgument("constrained_solve: bad g");
  for (const auto& row : cb.C)
    if (static_cast<int>(row.size()) != n) throw InvalidArgument("constrained_solve: bad C");
  for (const auto& b : bs)
    if (static_cast<int>(b.size()) != n) throw InvalidArgument("constrained_solve: bad b");

  const auto diagA = A.diagonal();
  double gamma = opt.gamma;
  if (!(gamma > 0.0)) gamma = std::accumulate(diagA.begin(), diagA.end(), 0.0) / std::max(n, 1);

  auto solve = [&](const LinearOperator& op, const std::vector<double>& d,
                   const std::vector<double>& rhs) {
    return opt.symmetric ? cg_solve(op, d, rhs, opt.solve) : bicgstab_solve(op, d, rhs, opt.solve);
  };

  if (opt.direct) return constrained_direct(A, bs, cb);

  std::vector<ConstrainedSolution> out(bs.size());
  if (k == 0) {
    LinearOperator op = as_operator(A);
    for (size_t j = 0; j < bs.size(); ++j) out[j].x = solve(op, diagA, bs[j]);
    return out;
  }

  std::vector<double> diag = diagA, tmp(k);
  for (const auto& row : cb.C)
    for (int i = 0; i < n; ++i) diag[i] += gamma * row[i] * row[i];
  LinearOperator op = [&](const std::vector<double>& x, std::vector<double>& y) {
    A.multiply(x.data(), y.data());
    for (int r = 0; r < k; ++r) tmp[r] = gamma * dotv(cb.C[r], x);
    for (int r = 0; r < k; ++r)
      for (int i = 0; i < n; ++i) y[i] += tmp[r] * cb.C[r][i];
  };

  std::vector<std::vector<double>> Y(k);
  for (int r = 0; r < k; ++r) Y[r] = solve(op, diag, cb.C[r]);
  DenseMatrix S(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) S(i, j) = dotv(cb.C[i], Y[j]);

  for (size_t j = 0; j < bs.size(); ++j) {
    std::vector<double> rhs = bs[j];
    for (int r = 0; r < k; ++r)
      for (int i = 0; i < n; ++i) rhs[i] += gamma * cb.g[r] * cb.C[r][i];
    std::vector<double> x = solve(op, diag, rhs);
    std::vector<double> viol(k);
    for (int r = 0; r < k; ++r) viol[r] = dotv(cb.C[r], x) - cb.g[r];
    std::vector<double> lambda;
    try {
      lambda = dense_lu_solve(S, viol);
    } catch (const SingularMatrix&) {
      throw ConstraintDegenerate("constrained_solve: singular Schur complement");
    }
    for (int r = 0; r < k; ++r)
      for (int i = 0; i < n; ++i) x[i] -= lambda[r] * Y[r][i];
    double err = 0.0;
    for (int r = 0; r < k; ++r) err = std::max(err, std::abs(dotv(cb.C[r], x) - cb.g[r]));
    if (!(err <= 1e-9 * (1.0 + norm2(cb.g))))
      throw ConstraintDegenerate("constrained_solve: constraint violation " + std::to_string(err));
    out[j] = {std::move(x), std::move(lambda)};
  }
  return out;
}

ConstrainedSolution constrained_solve(const SparseMatrix& A, const std::vector<double>& b,
                                      const ConstraintBlock& cb, const ConstrainedOptions& opt) {
  return constrained_solve(A, std::vector<std::vector<double>>{b}, cb, opt)[0];
}

std::vector<double> solve_coarse(const SparseMatrix& A, const std::vector<double>& b,
                                 const SolveOptions& opt) {
  if (A.rows <= 2000) return dense_lu_solve(to_dense(A), b);
  return bicgstab_solve(A, b, opt);
}

double condition_estimate(const SparseMatrix& A) {
  const DenseMatrix D = to_dense(A);
  const int n = D.n;
  if (n == 0) return 1.0;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
      D.a.data(), n, n);
  const double rc = Eigen::PartialPivLU<Eigen::MatrixXd>(M).rcond();
  return rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

}  // namespace msfem
