#pragma once

#include "shoestring/graph.hpp"
#include "shoestring/linalg.hpp"
#include "shoestring/types.hpp"

namespace shoestring {

/// n x K label matrix: one-hot rows for labeled nodes, zero rows elsewhere.
struct LabelMatrix {
  DenseMatrix y;
};

LabelMatrix make_label_matrix(const LabelVector& labels,
                              const IndexSet& labeled,
                              std::size_t num_classes);

/// Graph-regularized label spreading: solves (I + alpha * L) Z = Y, the
/// stationarity condition of min ||Z - Y||^2 + alpha * tr(Z^T L Z).
DenseMatrix lp_solve(const Graph& g, const LabelMatrix& y, double alpha,
                     double tol = 1e-8, std::size_t max_iter = 0);

/// Per-row argmax; ties break toward the lowest class index.
LabelVector lp_predict(const DenseMatrix& z);

}  // namespace shoestring
