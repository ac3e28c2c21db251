#pragma once

#include <stdexcept>
#include <string>

#include "shoestring/dense_matrix.hpp"
#include "shoestring/sparse_matrix.hpp"

namespace shoestring {

/// Raised when an iterative solver exhausts its iteration budget; carries the
/// worst column residual at the point of failure.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Sparse-dense product a * b.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);

/// a^T * b without materializing the transpose.
DenseMatrix spmm_transpose_a(const SparseMatrix& a, const DenseMatrix& b);

/// Dense product a * b.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// a^T * b.
DenseMatrix matmul_transpose_a(const DenseMatrix& a, const DenseMatrix& b);

/// a * b^T.
DenseMatrix matmul_transpose_b(const DenseMatrix& a, const DenseMatrix& b);

/// Row-wise softmax with per-row max subtraction.
DenseMatrix row_softmax(const DenseMatrix& m);

/// Elementwise max(0, x).
DenseMatrix relu(const DenseMatrix& m);

/// Solves a * x = b for symmetric positive-definite a, one conjugate-gradient
/// run per column of b. Each column satisfies
/// ||a*x - b_col||_2 / max(||b_col||_2, 1) <= tol on return.
/// max_iter == 0 means 10 * a.rows(). Throws SolverError on non-convergence.
DenseMatrix conjugate_gradient_solve(const SparseMatrix& a,
                                     const DenseMatrix& b, double tol = 1e-8,
                                     std::size_t max_iter = 0);

}  // namespace shoestring
