#include "shoestring/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shoestring {

Graph build_graph(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<Edge> canonical;
  canonical.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.first >= n || e.second >= n) {
      throw std::invalid_argument(
          "build_graph: edge (" + std::to_string(e.first) + ", " +
          std::to_string(e.second) + ") outside node range [0, " +
          std::to_string(n) + ")");
    }
    if (e.first == e.second) continue;  // self-loops dropped
    canonical.emplace_back(std::min(e.first, e.second),
                           std::max(e.first, e.second));
  }
  std::sort(canonical.begin(), canonical.end());
  canonical.erase(std::unique(canonical.begin(), canonical.end()),
                  canonical.end());

  std::vector<Triplet> triplets;
  triplets.reserve(2 * canonical.size());
  for (const Edge& e : canonical) {
    triplets.push_back({e.first, e.second, 1.0});
    triplets.push_back({e.second, e.first, 1.0});
  }

  Graph g;
  g.n = n;
  g.adjacency = SparseMatrix::from_triplets(n, n, std::move(triplets));
  g.degrees.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.degrees[i] = static_cast<double>(g.adjacency.row_offsets()[i + 1] -
                                       g.adjacency.row_offsets()[i]);
  }
  return g;
}

std::size_t edge_count(const Graph& g) { return g.adjacency.nnz() / 2; }

SparseMatrix renormalized_adjacency(const Graph& g) {
  // Self-loop degrees: d~_i = d_i + 1, so isolated nodes stay well defined.
  std::vector<double> inv_sqrt(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    inv_sqrt[i] = 1.0 / std::sqrt(g.degrees[i] + 1.0);
  }
  std::vector<Triplet> triplets;
  triplets.reserve(g.adjacency.nnz() + g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    triplets.push_back({i, i, inv_sqrt[i] * inv_sqrt[i]});
    const auto& offsets = g.adjacency.row_offsets();
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      const std::size_t j = g.adjacency.col_indices()[k];
      triplets.push_back({i, j, inv_sqrt[i] * inv_sqrt[j]});
    }
  }
  return SparseMatrix::from_triplets(g.n, g.n, std::move(triplets));
}

SparseMatrix laplacian(const Graph& g, bool normalized) {
  std::vector<Triplet> triplets;
  triplets.reserve(g.adjacency.nnz() + g.n);
  if (!normalized) {
    for (std::size_t i = 0; i < g.n; ++i) {
      if (g.degrees[i] > 0.0) triplets.push_back({i, i, g.degrees[i]});
      const auto& offsets = g.adjacency.row_offsets();
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        triplets.push_back({i, g.adjacency.col_indices()[k], -1.0});
      }
    }
  } else {
    // I - D^{-1/2} A D^{-1/2}; isolated nodes contribute a bare identity row.
    std::vector<double> inv_sqrt(g.n, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) {
      if (g.degrees[i] > 0.0) inv_sqrt[i] = 1.0 / std::sqrt(g.degrees[i]);
    }
    for (std::size_t i = 0; i < g.n; ++i) {
      triplets.push_back({i, i, 1.0});
      const auto& offsets = g.adjacency.row_offsets();
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        const std::size_t j = g.adjacency.col_indices()[k];
        triplets.push_back({i, j, -inv_sqrt[i] * inv_sqrt[j]});
      }
    }
  }
  return SparseMatrix::from_triplets(g.n, g.n, std::move(triplets));
}

}  // namespace shoestring
