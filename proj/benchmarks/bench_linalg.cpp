#include <benchmark/benchmark.h>

#include "shoestring/filters.hpp"
#include "shoestring/graph.hpp"
#include "shoestring/linalg.hpp"
#include "shoestring/rng.hpp"

using namespace shoestring;

namespace {

SparseMatrix random_sparse(std::size_t n, double density, Rng& rng) {
  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.uniform() < density) triplets.push_back({i, j, rng.uniform()});
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(triplets));
}

DenseMatrix random_dense(std::size_t rows, std::size_t cols, Rng& rng) {
  DenseMatrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(-1.0, 1.0);
  return m;
}

Graph random_graph(std::size_t n, double density, Rng& rng) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < density) edges.emplace_back(i, j);
    }
  }
  return build_graph(n, edges);
}

}  // namespace

static void BM_spmm(benchmark::State& state) {
  const std::size_t n = state.range(0);
  Rng rng(1);
  const SparseMatrix a = random_sparse(n, 0.01, rng);
  const DenseMatrix b = random_dense(n, 16, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spmm(a, b));
  }
}
BENCHMARK(BM_spmm)->Arg(512)->Arg(2048);

static void BM_matmul(benchmark::State& state) {
  const std::size_t n = state.range(0);
  Rng rng(2);
  const DenseMatrix a = random_dense(n, n, rng);
  const DenseMatrix b = random_dense(n, 16, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(matmul(a, b));
  }
}
BENCHMARK(BM_matmul)->Arg(256)->Arg(1024);

static void BM_conjugate_gradient(benchmark::State& state) {
  const std::size_t n = state.range(0);
  Rng rng(3);
  const Graph g = random_graph(n, 8.0 / static_cast<double>(n), rng);
  const SparseMatrix system = identity_plus_scaled(laplacian(g), 2.0);
  const DenseMatrix b = random_dense(n, 4, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(conjugate_gradient_solve(system, b));
  }
}
BENCHMARK(BM_conjugate_gradient)->Arg(512)->Arg(2048);

static void BM_rnm_filter(benchmark::State& state) {
  const std::size_t n = 1024;
  Rng rng(4);
  const Graph g = random_graph(n, 8.0 / n, rng);
  const SparseMatrix a_hat = renormalized_adjacency(g);
  const DenseMatrix x = random_dense(n, 32, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rnm_filter(a_hat, x, state.range(0)));
  }
}
BENCHMARK(BM_rnm_filter)->Arg(2)->Arg(4);

BENCHMARK_MAIN();
