#include "shoestring/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shoestring {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_offsets_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  for (const Triplet& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw std::invalid_argument(
          "SparseMatrix::from_triplets: entry (" + std::to_string(t.row) +
          ", " + std::to_string(t.col) + ") outside " + std::to_string(rows) +
          "x" + std::to_string(cols));
    }
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });

  SparseMatrix m(rows, cols);
  m.col_indices_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (i < triplets.size() && triplets[i].row == r) {
      const std::size_t c = triplets[i].col;
      double sum = 0.0;
      while (i < triplets.size() && triplets[i].row == r &&
             triplets[i].col == c) {
        sum += triplets[i].value;
        ++i;
      }
      if (sum != 0.0) {
        m.col_indices_.push_back(c);
        m.values_.push_back(sum);
      }
    }
    m.row_offsets_[r + 1] = m.col_indices_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m(n, n);
  m.col_indices_.resize(n);
  m.values_.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.col_indices_[i] = i;
    m.row_offsets_[i + 1] = i + 1;
  }
  return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  SparseMatrix m(dense.rows(), dense.cols());
  for (std::size_t i = 0; i < dense.rows(); ++i) {
    for (std::size_t j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) != 0.0) {
        m.col_indices_.push_back(j);
        m.values_.push_back(dense(i, j));
      }
    }
    m.row_offsets_[i + 1] = m.col_indices_.size();
  }
  return m;
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = col_indices_.begin() + row_offsets_[i];
  const auto end = col_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      out(i, col_indices_[k]) = values_[k];
    }
  }
  return out;
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const std::size_t j = col_indices_[k];
      if (std::fabs(values_[k] - at(j, i)) > tol) return false;
    }
  }
  return true;
}

bool SparseMatrix::operator==(const SparseMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ &&
         row_offsets_ == other.row_offsets_ &&
         col_indices_ == other.col_indices_ && values_ == other.values_;
}

SparseMatrix identity_plus_scaled(const SparseMatrix& m, double scale) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("identity_plus_scaled: matrix must be square");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(m.nnz() + m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    triplets.push_back({i, i, 1.0});
    for (std::size_t k = m.row_offsets()[i]; k < m.row_offsets()[i + 1]; ++k) {
      triplets.push_back({i, m.col_indices()[k], scale * m.values()[k]});
    }
  }
  return SparseMatrix::from_triplets(m.rows(), m.cols(), std::move(triplets));
}

}  // namespace shoestring
