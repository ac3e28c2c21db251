#include "shoestring/filters.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace shoestring {

FilterKind parse_filter_kind(std::string_view name) {
  if (name == "none") return FilterKind::None;
  if (name == "rnm") return FilterKind::Rnm;
  if (name == "ar") return FilterKind::Ar;
  throw std::invalid_argument("unknown filter kind: " + std::string(name));
}

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::None: return "none";
    case FilterKind::Rnm: return "rnm";
    case FilterKind::Ar: return "ar";
  }
  return "none";
}

void FilterSpec::validate() const {
  if (kind == FilterKind::Rnm && k < 1) {
    throw std::invalid_argument("FilterSpec: RNM needs k >= 1");
  }
  if (kind == FilterKind::Ar && !(alpha > 0.0)) {
    throw std::invalid_argument("FilterSpec: AR needs alpha > 0");
  }
}

DenseMatrix rnm_filter(const SparseMatrix& a_hat, const DenseMatrix& x,
                       std::size_t k) {
  if (a_hat.rows() != a_hat.cols()) {
    throw std::invalid_argument("rnm_filter: operator must be square");
  }
  if (k < 1) {
    throw std::invalid_argument("rnm_filter: k must be >= 1");
  }
  DenseMatrix out = spmm(a_hat, x);
  for (std::size_t i = 1; i < k; ++i) {
    out = spmm(a_hat, out);
  }
  return out;
}

DenseMatrix ar_filter(const SparseMatrix& lap, const DenseMatrix& x,
                      double alpha, double tol, std::size_t max_iter) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("ar_filter: alpha must be > 0");
  }
  return conjugate_gradient_solve(identity_plus_scaled(lap, alpha), x, tol,
                                  max_iter);
}

DenseMatrix apply_filter(const FilterSpec& spec, const Graph& g,
                         const DenseMatrix& x) {
  spec.validate();
  switch (spec.kind) {
    case FilterKind::None:
      return x;
    case FilterKind::Rnm:
      return rnm_filter(renormalized_adjacency(g), x, spec.k);
    case FilterKind::Ar:
      return ar_filter(laplacian(g), x, spec.alpha);
  }
  return x;
}

PropagationOp PropagationOp::identity(std::size_t n) {
  return PropagationOp(Mode::Identity, n);
}

PropagationOp PropagationOp::matrix_power(SparseMatrix m, std::size_t k) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("PropagationOp: matrix must be square");
  }
  if (k < 1) {
    throw std::invalid_argument("PropagationOp: power must be >= 1");
  }
  PropagationOp op(Mode::Power, m.rows());
  op.matrix_ = std::move(m);
  op.k_ = k;
  return op;
}

PropagationOp PropagationOp::ar_inverse(const SparseMatrix& lap, double alpha,
                                        double tol, std::size_t max_iter) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("PropagationOp: AR alpha must be > 0");
  }
  PropagationOp op(Mode::ArInverse, lap.rows());
  op.matrix_ = identity_plus_scaled(lap, alpha);
  op.tol_ = tol;
  op.max_iter_ = max_iter;
  return op;
}

DenseMatrix PropagationOp::apply(const DenseMatrix& x) const {
  if (x.rows() != n_) {
    throw std::invalid_argument("PropagationOp::apply: operand has " +
                                std::to_string(x.rows()) + " rows, expected " +
                                std::to_string(n_));
  }
  switch (mode_) {
    case Mode::Identity:
      return x;
    case Mode::Power:
      return rnm_filter(matrix_, x, k_);
    case Mode::ArInverse:
      return conjugate_gradient_solve(matrix_, x, tol_, max_iter_);
  }
  return x;
}

}  // namespace shoestring
