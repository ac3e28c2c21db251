#include "shoestring/labelprop.hpp"

#include <stdexcept>
#include <string>

namespace shoestring {

LabelMatrix make_label_matrix(const LabelVector& labels,
                              const IndexSet& labeled,
                              std::size_t num_classes) {
  if (labeled.empty()) {
    throw std::invalid_argument("make_label_matrix: labeled set is empty");
  }
  LabelMatrix out{DenseMatrix(labels.size(), num_classes)};
  for (std::size_t i : labeled) {
    if (i >= labels.size()) {
      throw std::invalid_argument("make_label_matrix: labeled index " +
                                  std::to_string(i) + " out of range");
    }
    if (labels[i] >= num_classes) {
      throw std::invalid_argument("make_label_matrix: label " +
                                  std::to_string(labels[i]) + " out of range");
    }
    out.y(i, labels[i]) = 1.0;
  }
  return out;
}

DenseMatrix lp_solve(const Graph& g, const LabelMatrix& y, double alpha,
                     double tol, std::size_t max_iter) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("lp_solve: alpha must be > 0");
  }
  if (y.y.rows() != g.n) {
    throw std::invalid_argument("lp_solve: label matrix has " +
                                std::to_string(y.y.rows()) +
                                " rows for a graph of " + std::to_string(g.n));
  }
  return conjugate_gradient_solve(identity_plus_scaled(laplacian(g), alpha),
                                  y.y, tol, max_iter);
}

LabelVector lp_predict(const DenseMatrix& z) {
  LabelVector pred(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < z.cols(); ++k) {
      if (z(i, k) > z(i, best)) best = k;
    }
    pred[i] = best;
  }
  return pred;
}

}  // namespace shoestring
