#include "shoestring/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace shoestring {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

std::string shape(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "spmm: inner dimensions " +
                                    shape(a.rows(), a.cols()) + " * " +
                                    shape(b.rows(), b.cols()));
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t bc = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out_row = out.row(i).data();
    for (std::size_t k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      const double v = a.values()[k];
      const double* b_row = b.row(a.col_indices()[k]).data();
      for (std::size_t j = 0; j < bc; ++j) {
        out_row[j] += v * b_row[j];
      }
    }
  }
  return out;
}

DenseMatrix spmm_transpose_a(const SparseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "spmm_transpose_a: inner dimensions " +
                                    shape(a.cols(), a.rows()) + " * " +
                                    shape(b.rows(), b.cols()));
  DenseMatrix out(a.cols(), b.cols());
  const std::size_t bc = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* b_row = b.row(i).data();
    for (std::size_t k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      const double v = a.values()[k];
      double* out_row = out.row(a.col_indices()[k]).data();
      for (std::size_t j = 0; j < bc; ++j) {
        out_row[j] += v * b_row[j];
      }
    }
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions " +
                                    shape(a.rows(), a.cols()) + " * " +
                                    shape(b.rows(), b.cols()));
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t bc = b.cols();
  // i-k-j order: unit-stride access on both b and out.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out_row = out.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double v = a(i, k);
      if (v == 0.0) continue;
      const double* b_row = b.row(k).data();
      for (std::size_t j = 0; j < bc; ++j) {
        out_row[j] += v * b_row[j];
      }
    }
  }
  return out;
}

DenseMatrix matmul_transpose_a(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "matmul_transpose_a: inner dimensions " +
                                    shape(a.cols(), a.rows()) + " * " +
                                    shape(b.rows(), b.cols()));
  DenseMatrix out(a.cols(), b.cols());
  const std::size_t bc = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* a_row = a.row(k).data();
    const double* b_row = b.row(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double v = a_row[i];
      if (v == 0.0) continue;
      double* out_row = out.row(i).data();
      for (std::size_t j = 0; j < bc; ++j) {
        out_row[j] += v * b_row[j];
      }
    }
  }
  return out;
}

DenseMatrix matmul_transpose_b(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.cols(), "matmul_transpose_b: inner dimensions " +
                                    shape(a.rows(), a.cols()) + " * " +
                                    shape(b.cols(), b.rows()));
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* a_row = a.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* b_row = b.row(j).data();
      double sum = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        sum += a_row[k] * b_row[k];
      }
      out(i, j) = sum;
    }
  }
  return out;
}

DenseMatrix row_softmax(const DenseMatrix& m) {
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    double row_max = -HUGE_VAL;
    for (double v : row) row_max = std::max(row_max, v);
    double total = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double e = std::exp(row[j] - row_max);
      out(i, j) = e;
      total += e;
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(i, j) /= total;
    }
  }
  return out;
}

DenseMatrix relu(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (double& v : out.values()) v = std::max(0.0, v);
  return out;
}

namespace {

// y = a * x for one dense column vector.
void spmv(const SparseMatrix& a, const std::vector<double>& x,
          std::vector<double>& y) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      sum += a.values()[k] * x[a.col_indices()[k]];
    }
    y[i] = sum;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

DenseMatrix conjugate_gradient_solve(const SparseMatrix& a,
                                     const DenseMatrix& b, double tol,
                                     std::size_t max_iter) {
  require(a.rows() == a.cols(), "conjugate_gradient_solve: matrix not square");
  require(a.rows() == b.rows(),
          "conjugate_gradient_solve: dimensions " + shape(a.rows(), a.cols()) +
              " vs rhs " + shape(b.rows(), b.cols()));
  if (!a.is_symmetric(1e-10)) {
    throw std::invalid_argument(
        "conjugate_gradient_solve: matrix not symmetric within 1e-10");
  }
  if (max_iter == 0) max_iter = 10 * a.rows();

  const std::size_t n = a.rows();
  DenseMatrix result(n, b.cols());
  std::vector<double> x(n), r(n), p(n), q(n), rhs(n);

  for (std::size_t col = 0; col < b.cols(); ++col) {
    for (std::size_t i = 0; i < n; ++i) rhs[i] = b(i, col);
    const double rhs_norm = std::sqrt(dot(rhs, rhs));
    const double target = tol * std::max(rhs_norm, 1.0);

    // x0 = 0, so r0 = rhs.
    std::fill(x.begin(), x.end(), 0.0);
    r = rhs;
    p = r;
    double rr = dot(r, r);
    double residual = std::sqrt(rr);

    std::size_t iter = 0;
    while (residual > target) {
      if (iter++ >= max_iter) {
        throw SolverError("conjugate_gradient_solve: column " +
                              std::to_string(col) + " residual " +
                              std::to_string(residual) + " after " +
                              std::to_string(max_iter) + " iterations",
                          residual);
      }
      spmv(a, p, q);
      const double alpha = rr / dot(p, q);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      const double rr_next = dot(r, r);
      const double beta = rr_next / rr;
      rr = rr_next;
      residual = std::sqrt(rr);
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = r[i] + beta * p[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) result(i, col) = x[i];
  }
  return result;
}

}  // namespace shoestring
