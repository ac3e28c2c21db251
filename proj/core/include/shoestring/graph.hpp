#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "shoestring/sparse_matrix.hpp"

namespace shoestring {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected, unweighted graph: a binary symmetric adjacency matrix with an
/// empty diagonal plus the per-node degree vector. Immutable once built.
struct Graph {
  std::size_t n = 0;
  SparseMatrix adjacency;
  std::vector<double> degrees;
};

/// Canonicalizes an edge list into a Graph: every directed pair is inserted
/// both ways, duplicates collapse, self-loops are dropped. Throws on an
/// endpoint outside [0, n), naming the offending pair.
Graph build_graph(std::size_t n, const std::vector<Edge>& edges);

/// Number of undirected edges (adjacency stores each twice).
std::size_t edge_count(const Graph& g);

/// Renormalized propagation operator D~^{-1/2} (A + I) D~^{-1/2}.
/// Symmetric, eigenvalues in [-1, 1], strictly positive diagonal.
SparseMatrix renormalized_adjacency(const Graph& g);

/// Graph Laplacian L = D - A (default), or the symmetric-normalized
/// variant I - D^{-1/2} A D^{-1/2} when normalized is set.
SparseMatrix laplacian(const Graph& g, bool normalized = false);

}  // namespace shoestring
