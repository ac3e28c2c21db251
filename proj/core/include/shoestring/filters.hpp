#pragma once

#include <cstddef>
#include <string_view>

#include "shoestring/graph.hpp"
#include "shoestring/linalg.hpp"

namespace shoestring {

enum class FilterKind { None, Rnm, Ar };

FilterKind parse_filter_kind(std::string_view name);
std::string_view to_string(FilterKind kind);

/// Low-pass graph filter choice and strength. RNM smooths by repeated
/// application of the renormalized adjacency (k applications); AR smooths by
/// solving (I + alpha * L) x_bar = x.
struct FilterSpec {
  FilterKind kind = FilterKind::None;
  std::size_t k = 1;
  double alpha = 1.0;

  void validate() const;
};

/// A_hat^k * x via k successive sparse products; A_hat^k is never formed.
DenseMatrix rnm_filter(const SparseMatrix& a_hat, const DenseMatrix& x,
                       std::size_t k);

/// (I + alpha * L)^{-1} * x via conjugate gradient.
DenseMatrix ar_filter(const SparseMatrix& lap, const DenseMatrix& x,
                      double alpha, double tol = 1e-8,
                      std::size_t max_iter = 0);

/// Dispatch on spec.kind; FilterKind::None returns x unchanged.
DenseMatrix apply_filter(const FilterSpec& spec, const Graph& g,
                         const DenseMatrix& x);

/// Symmetric propagation operator of a GCN layer: the identity, the k-th
/// power of a sparse matrix applied product-by-product, or the action of
/// (I + alpha * L)^{-1}. Powers and inverses are never materialized.
class PropagationOp {
 public:
  static PropagationOp identity(std::size_t n);
  static PropagationOp matrix_power(SparseMatrix m, std::size_t k = 1);
  static PropagationOp ar_inverse(const SparseMatrix& lap, double alpha,
                                  double tol = 1e-8, std::size_t max_iter = 0);

  DenseMatrix apply(const DenseMatrix& x) const;
  std::size_t dim() const { return n_; }

 private:
  enum class Mode { Identity, Power, ArInverse };

  PropagationOp(Mode mode, std::size_t n) : mode_(mode), n_(n) {}

  Mode mode_;
  std::size_t n_ = 0;
  SparseMatrix matrix_;  // base matrix (Power) or I + alpha*L (ArInverse)
  std::size_t k_ = 1;
  double tol_ = 1e-8;
  std::size_t max_iter_ = 0;
};

}  // namespace shoestring
