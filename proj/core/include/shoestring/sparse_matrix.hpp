#pragma once

#include <cstddef>
#include <vector>

#include "shoestring/dense_matrix.hpp"

namespace shoestring {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix of doubles.
///
/// Invariants after construction: column indices strictly increase within
/// each row, the row offset array is monotone of length rows + 1, and no
/// explicit zeros are stored.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Empty (all-zero) rows x cols matrix.
  SparseMatrix(std::size_t rows, std::size_t cols);

  /// Builds from unordered triplets. Duplicates are summed; entries that are
  /// (or cancel to) zero are dropped. Throws on out-of-range indices.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);

  static SparseMatrix identity(std::size_t n);

  static SparseMatrix from_dense(const DenseMatrix& dense);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  /// Entry lookup by binary search within the row; zero when absent.
  double at(std::size_t i, std::size_t j) const;

  DenseMatrix to_dense() const;

  bool is_symmetric(double tol = 0.0) const;

  /// Structural and value equality (used by order-invariance checks).
  bool operator==(const SparseMatrix& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

/// I + scale * m for square m, preserving CSR invariants.
SparseMatrix identity_plus_scaled(const SparseMatrix& m, double scale);

}  // namespace shoestring
