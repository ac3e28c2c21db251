#include "shoestring/linalg.hpp"

#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "shoestring/graph.hpp"
#include "shoestring/rng.hpp"

using namespace shoestring;

TEST_CASE("spmm: identity passes the dense operand through") {
  Rng rng(7);
  const DenseMatrix b = oracles::random_dense(3, 2, rng);
  const DenseMatrix out = spmm(SparseMatrix::identity(3), b);
  CHECK(max_abs_diff(out, b) == 0.0);
}

TEST_CASE("spmm: empty sparse matrix annihilates") {
  Rng rng(8);
  const DenseMatrix b = oracles::random_dense(2, 2, rng);
  const DenseMatrix out = spmm(SparseMatrix(2, 2), b);
  for (double v : out.values()) CHECK(v == 0.0);
}

TEST_CASE("spmm matches densify-and-multiply oracle") {
  Rng rng(9);
  const SparseMatrix a = oracles::random_sparse(8, 8, 0.3, rng);
  const DenseMatrix b = oracles::random_dense(8, 4, rng);
  const DenseMatrix expected = oracles::matmul_naive(a.to_dense(), b);
  CHECK(max_abs_diff(spmm(a, b), expected) < 1e-12);
}

TEST_CASE("spmm rejects mismatched dimensions") {
  CHECK_THROWS_AS(spmm(SparseMatrix::identity(3), DenseMatrix(4, 2)),
                  std::invalid_argument);
}

TEST_CASE("spmm equals dense product for random operands (property)") {
  Rng rng(10);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + rng.below(32);
    const std::size_t m = 1 + rng.below(32);
    const std::size_t c = 1 + rng.below(6);
    const SparseMatrix a = oracles::random_sparse(n, m, rng.uniform(), rng);
    const DenseMatrix b = oracles::random_dense(m, c, rng);
    CHECK(max_abs_diff(spmm(a, b), oracles::matmul_naive(a.to_dense(), b)) <
          1e-12);
  }
}

TEST_CASE("spmm_transpose_a matches the transposed oracle") {
  Rng rng(11);
  const SparseMatrix a = oracles::random_sparse(6, 9, 0.4, rng);
  const DenseMatrix b = oracles::random_dense(6, 3, rng);
  const DenseMatrix expected =
      oracles::matmul_naive(a.to_dense().transposed(), b);
  CHECK(max_abs_diff(spmm_transpose_a(a, b), expected) < 1e-12);
}

TEST_CASE("matmul: multiplying by the identity is a no-op") {
  Rng rng(12);
  const DenseMatrix a = oracles::random_dense(4, 5, rng);
  CHECK(max_abs_diff(matmul(a, DenseMatrix::identity(5)), a) == 0.0);
}

TEST_CASE("matmul: scalar case") {
  const DenseMatrix a(1, 1, {2.0});
  const DenseMatrix b(1, 1, {3.0});
  CHECK(matmul(a, b)(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("matmul matches the triple-loop oracle") {
  Rng rng(13);
  const DenseMatrix a = oracles::random_dense(5, 4, rng);
  const DenseMatrix b = oracles::random_dense(4, 3, rng);
  CHECK(max_abs_diff(matmul(a, b), oracles::matmul_naive(a, b)) < 1e-12);
}

TEST_CASE("matmul rejects mismatched dimensions") {
  CHECK_THROWS_AS(matmul(DenseMatrix(2, 3), DenseMatrix(4, 2)),
                  std::invalid_argument);
}

TEST_CASE("matmul transpose variants match the oracle") {
  Rng rng(14);
  const DenseMatrix a = oracles::random_dense(6, 4, rng);
  const DenseMatrix b = oracles::random_dense(6, 3, rng);
  CHECK(max_abs_diff(matmul_transpose_a(a, b),
                     oracles::matmul_naive(a.transposed(), b)) < 1e-12);
  const DenseMatrix c = oracles::random_dense(5, 4, rng);
  CHECK(max_abs_diff(matmul_transpose_b(a, c),
                     oracles::matmul_naive(a, c.transposed())) < 1e-12);
}

TEST_CASE("row_softmax: constant row is uniform") {
  const DenseMatrix m(1, 3, {0.0, 0.0, 0.0});
  const DenseMatrix p = row_softmax(m);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(p(0, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("row_softmax: large logits do not overflow") {
  const DenseMatrix m(1, 2, {1000.0, 0.0});
  const DenseMatrix p = row_softmax(m);
  CHECK(p.all_finite());
  CHECK(p(0, 0) == doctest::Approx(1.0));
  CHECK(p(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("row_softmax: hand-evaluated two-way case") {
  const DenseMatrix m(1, 2, {std::log(2.0), std::log(1.0)});
  const DenseMatrix p = row_softmax(m);
  CHECK(p(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("row_softmax rows sum to 1 and shift invariance holds (property)") {
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 1 + rng.below(8);
    const std::size_t cols = 1 + rng.below(8);
    const DenseMatrix m = oracles::random_dense(rows, cols, rng, -30.0, 30.0);
    const DenseMatrix p = row_softmax(m);
    for (std::size_t i = 0; i < rows; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < cols; ++j) sum += p(i, j);
      CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
    DenseMatrix shifted = m;
    const double c = rng.uniform(-5.0, 5.0);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) shifted(i, j) += c;
    }
    CHECK(max_abs_diff(row_softmax(shifted), p) < 1e-12);
  }
}

TEST_CASE("relu clips negatives and preserves shape") {
  const DenseMatrix m(1, 3, {-1.0, 0.0, 2.0});
  const DenseMatrix r = relu(m);
  CHECK(r(0, 0) == 0.0);
  CHECK(r(0, 1) == 0.0);
  CHECK(r(0, 2) == 2.0);

  const DenseMatrix neg(2, 2, {-3.0, -0.5, -1.0, -2.0});
  const DenseMatrix clipped = relu(neg);
  for (double v : clipped.values()) CHECK(v == 0.0);

  const DenseMatrix eye = DenseMatrix::identity(2);
  CHECK(max_abs_diff(relu(eye), eye) == 0.0);
}

TEST_CASE("conjugate gradient: identity system returns the rhs") {
  Rng rng(16);
  const DenseMatrix b = oracles::random_dense(5, 2, rng);
  const DenseMatrix x = conjugate_gradient_solve(SparseMatrix::identity(5), b);
  CHECK(max_abs_diff(x, b) < 1e-12);
}

TEST_CASE("conjugate gradient: diagonal system") {
  const SparseMatrix a = SparseMatrix::from_triplets(
      2, 2, {{0, 0, 2.0}, {1, 1, 4.0}});
  const DenseMatrix b(2, 1, {2.0, 4.0});
  const DenseMatrix x = conjugate_gradient_solve(a, b);
  CHECK(x(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(x(1, 0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("conjugate gradient matches a dense direct solve on random SPD") {
  Rng rng(17);
  const SparseMatrix a = oracles::random_spd(20, rng);
  const DenseMatrix b = oracles::random_dense(20, 3, rng);
  const DenseMatrix expected = oracles::gauss_solve(a.to_dense(), b);
  const DenseMatrix x = conjugate_gradient_solve(a, b, 1e-10);
  CHECK(max_abs_diff(x, expected) / expected.frobenius_norm() < 1e-8);
}

TEST_CASE("conjugate gradient honors the residual contract") {
  Rng rng(18);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 4 + rng.below(24);
    const SparseMatrix a = oracles::random_spd(n, rng);
    const DenseMatrix b = oracles::random_dense(n, 2, rng);
    const double tol = 1e-8;
    const DenseMatrix x = conjugate_gradient_solve(a, b, tol);
    const DenseMatrix residual = spmm(a, x) - b;
    for (std::size_t col = 0; col < b.cols(); ++col) {
      double rnorm = 0.0;
      double bnorm = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        rnorm += residual(i, col) * residual(i, col);
        bnorm += b(i, col) * b(i, col);
      }
      CHECK(std::sqrt(rnorm) <= tol * std::max(std::sqrt(bnorm), 1.0));
    }
  }
}

TEST_CASE("conjugate gradient reports non-convergence with the residual") {
  Rng rng(19);
  const SparseMatrix a = oracles::random_spd(12, rng);
  const DenseMatrix b = oracles::random_dense(12, 1, rng);
  try {
    conjugate_gradient_solve(a, b, 1e-14, 1);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("conjugate gradient rejects asymmetric input") {
  const SparseMatrix a = SparseMatrix::from_triplets(
      2, 2, {{0, 0, 1.0}, {0, 1, 0.5}, {1, 1, 1.0}});
  CHECK_THROWS_AS(conjugate_gradient_solve(a, DenseMatrix(2, 1)),
                  std::invalid_argument);
}

TEST_CASE("DenseMatrix rejects a value array of the wrong length") {
  CHECK_THROWS_AS(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("SparseMatrix::from_triplets sums duplicates and drops zeros") {
  const SparseMatrix m = SparseMatrix::from_triplets(
      2, 2, {{0, 0, 1.5}, {0, 0, 0.5}, {1, 1, 1.0}, {1, 1, -1.0}, {0, 1, 0.0}});
  CHECK(m.nnz() == 1);
  CHECK(m.at(0, 0) == 2.0);
  CHECK(m.at(1, 1) == 0.0);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, 5, 1.0}}),
                  std::invalid_argument);
}

TEST_CASE("identity_plus_scaled merges the diagonal into the pattern") {
  const Graph g = build_graph(3, {{0, 1}, {1, 2}});
  const SparseMatrix system = identity_plus_scaled(laplacian(g), 2.0);
  CHECK(system.at(0, 0) == 3.0);   // 1 + 2 * deg
  CHECK(system.at(1, 1) == 5.0);
  CHECK(system.at(0, 1) == -2.0);
  CHECK_THROWS_AS(identity_plus_scaled(SparseMatrix(2, 3), 1.0),
                  std::invalid_argument);
}

TEST_CASE("core operations are deterministic (bit-identical reruns)") {
  Rng rng_a(20);
  Rng rng_b(20);
  const SparseMatrix a1 = oracles::random_sparse(10, 10, 0.4, rng_a);
  const SparseMatrix a2 = oracles::random_sparse(10, 10, 0.4, rng_b);
  const DenseMatrix b1 = oracles::random_dense(10, 4, rng_a);
  const DenseMatrix b2 = oracles::random_dense(10, 4, rng_b);
  CHECK(a1 == a2);
  CHECK(spmm(a1, b1).values() == spmm(a2, b2).values());
  CHECK(row_softmax(b1).values() == row_softmax(b2).values());
}
