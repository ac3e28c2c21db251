#include "shoestring/metric_head.hpp"

#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "shoestring/rng.hpp"

using namespace shoestring;

TEST_CASE("class_centroids: single sample per class is its own centroid") {
  DenseMatrix z(2, 3, {1.0, 2.0, 3.0, -1.0, 0.5, 4.0});
  const Prototypes protos = class_centroids(z, {0, 1}, {0, 1}, 2);
  CHECK(max_abs_diff(protos.centroids, z) == 0.0);
  CHECK(protos.counts == std::vector<std::size_t>{1, 1});
}

TEST_CASE("class_centroids averages within a class") {
  DenseMatrix z(2, 2, {1.0, 0.0, 0.0, 1.0});
  const Prototypes protos = class_centroids(z, {0, 0}, {0, 1}, 1);
  CHECK(protos.centroids(0, 0) == doctest::Approx(0.5));
  CHECK(protos.centroids(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("class_centroids matches an accumulate-and-divide oracle") {
  Rng rng(80);
  const std::size_t classes = 3;
  const std::size_t per_class = 5;
  const std::size_t n = classes * per_class;
  const DenseMatrix z = oracles::random_dense(n, 4, rng);
  LabelVector labels(n);
  IndexSet labeled(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = i % classes;
    labeled[i] = i;
  }
  const Prototypes protos = class_centroids(z, labels, labeled, classes);
  for (std::size_t k = 0; k < classes; ++k) {
    for (std::size_t j = 0; j < 4; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == k) sum += z(i, j);
      }
      CHECK(std::fabs(protos.centroids(k, j) - sum / per_class) < 1e-12);
    }
  }
}

TEST_CASE("class_centroids names the empty class") {
  DenseMatrix z(3, 2);
  CHECK_THROWS_WITH_AS(class_centroids(z, {0, 0, 1}, {0, 1}, 2),
                       doctest::Contains("class 1"), std::invalid_argument);
}

TEST_CASE("similarity of identical vectors") {
  const std::vector<double> v = {0.3, -1.2, 2.0};
  CHECK(similarity(v, v, Similarity::Cos) == doctest::Approx(1.0));
  CHECK(similarity(v, v, Similarity::L1) == 0.0);
  CHECK(similarity(v, v, Similarity::L2) == 0.0);
}

TEST_CASE("similarity of orthogonal unit vectors under cosine") {
  const std::vector<double> a = {1.0, 0.0};
  const std::vector<double> b = {0.0, 1.0};
  CHECK(similarity(a, b, Similarity::Cos) == doctest::Approx(0.0));
}

TEST_CASE("similarity hand-computed case") {
  const std::vector<double> a = {1.0, 2.0};
  const std::vector<double> b = {3.0, 1.0};
  CHECK(similarity(a, b, Similarity::L1) == doctest::Approx(-3.0));
  CHECK(similarity(a, b, Similarity::L2) == doctest::Approx(-5.0));
  CHECK(similarity(a, b, Similarity::Cos) ==
        doctest::Approx(5.0 / std::sqrt(50.0)).epsilon(1e-10));
}

TEST_CASE("similarity guards zero vectors under cosine") {
  const std::vector<double> zero = {0.0, 0.0};
  const std::vector<double> v = {1.0, 1.0};
  CHECK(std::isfinite(similarity(zero, v, Similarity::Cos)));
  CHECK(similarity(zero, v, Similarity::Cos) == 0.0);
}

TEST_CASE("prototype_probs: node on a centroid wins under L2") {
  DenseMatrix z(1, 2, {1.0, 0.0});
  Prototypes protos;
  protos.centroids = DenseMatrix(3, 2, {1.0, 0.0, 0.0, 1.0, -1.0, -1.0});
  protos.counts = {1, 1, 1};
  const DenseMatrix p = prototype_probs(z, protos, Similarity::L2);
  CHECK(p(0, 0) > p(0, 1));
  CHECK(p(0, 0) > p(0, 2));
}

TEST_CASE("prototype_probs: equal similarities give a uniform row") {
  DenseMatrix z(1, 2, {0.0, 0.0});
  Prototypes protos;
  protos.centroids = DenseMatrix(4, 2, {1.0, 0.0, -1.0, 0.0, 0.0, 1.0,
                                        0.0, -1.0});
  protos.counts = {1, 1, 1, 1};
  const DenseMatrix p = prototype_probs(z, protos, Similarity::L2);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(p(0, k) == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("prototype softmax with similarities (0, ln 3)") {
  // Two centroids at L2 distances giving sims 0 and ln 3 from the node.
  DenseMatrix z(1, 1, {0.0});
  Prototypes protos;
  protos.centroids = DenseMatrix(2, 1, {0.0, std::sqrt(-std::log(3.0) * -1.0)});
  protos.counts = {1, 1};
  // sim to c0 = 0, sim to c1 = -(sqrt(ln 3))^2 = -ln 3; softmax of (0, -ln 3)
  // equals (0.75, 0.25), i.e. the (0.25, 0.75) example with roles swapped.
  const DenseMatrix p = prototype_probs(z, protos, Similarity::L2);
  CHECK(p(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(p(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("prototype_probs rows sum to one (property)") {
  Rng rng(81);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const std::size_t d = 1 + rng.below(6);
    const std::size_t classes = 1 + rng.below(5);
    const DenseMatrix z = oracles::random_dense(n, d, rng, -4.0, 4.0);
    Prototypes protos;
    protos.centroids = oracles::random_dense(classes, d, rng, -4.0, 4.0);
    protos.counts.assign(classes, 1);
    for (Similarity kind :
         {Similarity::Cos, Similarity::L1, Similarity::L2}) {
      const DenseMatrix p = prototype_probs(z, protos, kind);
      for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < classes; ++k) sum += p(i, k);
        CHECK(std::fabs(sum - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("metric_loss: samples on their own centroids, K=2, distance sqrt(2)") {
  DenseMatrix z(2, 2, {0.0, 0.0, 1.0, 1.0});  // L2 distance^2 = 2
  const LabelVector labels = {0, 1};
  const IndexSet labeled = {0, 1};
  const Prototypes protos = class_centroids(z, labels, labeled, 2);
  const double loss = metric_loss(z, labels, labeled, protos, Similarity::L2);
  const double per_sample = -std::log(1.0 / (1.0 + std::exp(-2.0)));
  CHECK(loss == doctest::Approx(2.0 * per_sample).epsilon(1e-12));
}

TEST_CASE("metric_loss: identical centroids cost |V_l| ln K") {
  DenseMatrix z(4, 2);  // all embeddings zero -> all centroids zero
  const LabelVector labels = {0, 1, 0, 1};
  const IndexSet labeled = {0, 1, 2, 3};
  const Prototypes protos = class_centroids(z, labels, labeled, 2);
  const double loss = metric_loss(z, labels, labeled, protos, Similarity::L2);
  CHECK(loss == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("metric_loss is strictly positive for finite similarities") {
  Rng rng(82);
  const DenseMatrix z = oracles::random_dense(6, 3, rng);
  const LabelVector labels = {0, 1, 2, 0, 1, 2};
  const IndexSet labeled = {0, 1, 2, 3, 4, 5};
  const Prototypes protos = class_centroids(z, labels, labeled, 3);
  for (Similarity kind : {Similarity::Cos, Similarity::L1, Similarity::L2}) {
    CHECK(metric_loss(z, labels, labeled, protos, kind) > 0.0);
  }
}

TEST_CASE("combined_loss") {
  CHECK(combined_loss(2.0, 3.0, 0.0) == 2.0);
  CHECK(combined_loss(2.0, 3.0, 1.0) == 5.0);
  CHECK_THROWS_AS(combined_loss(1.0, 1.0, -0.1), std::invalid_argument);
}

TEST_CASE("per-metric default lambdas") {
  CHECK(default_lambda(Similarity::Cos) == 0.01);
  CHECK(default_lambda(Similarity::L1) == 0.05);
  CHECK(default_lambda(Similarity::L2) == 0.001);
}

TEST_CASE("metric_backward: unlabeled nodes receive zero gradient") {
  Rng rng(83);
  const DenseMatrix z = oracles::random_dense(6, 3, rng);
  const LabelVector labels = {0, 1, 0, 1, 0, 1};
  const IndexSet labeled = {0, 1};
  const DenseMatrix d_z = metric_backward(z, labels, labeled, Similarity::L2);
  for (std::size_t i = 2; i < 6; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(d_z(i, j) == 0.0);
  }
}

TEST_CASE("metric_backward matches finite differences for every metric") {
  Rng rng(84);
  DenseMatrix z = oracles::random_dense(7, 3, rng, -1.5, 1.5);
  const LabelVector labels = {0, 1, 2, 0, 1, 2, 0};
  const IndexSet labeled = {0, 1, 2, 3, 4};
  for (Similarity kind : {Similarity::Cos, Similarity::L1, Similarity::L2}) {
    const auto loss_of = [&]() {
      const Prototypes protos = class_centroids(z, labels, labeled, 3);
      return metric_loss(z, labels, labeled, protos, kind);
    };
    const DenseMatrix d_z = metric_backward(z, labels, labeled, kind);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double fd =
          oracles::central_difference(loss_of, z.values()[i], 1e-5);
      CHECK(oracles::relative_error(d_z.values()[i], fd) < 1e-4);
    }
  }
}

TEST_CASE("metric_backward with frozen centroids matches the frozen oracle") {
  Rng rng(85);
  DenseMatrix z = oracles::random_dense(6, 3, rng, -1.5, 1.5);
  const LabelVector labels = {0, 1, 0, 1, 0, 1};
  const IndexSet labeled = {0, 1, 2, 3};
  const Prototypes frozen = class_centroids(z, labels, labeled, 2);
  const auto loss_of = [&]() {
    return metric_loss(z, labels, labeled, frozen, Similarity::L2);
  };
  const DenseMatrix d_z = metric_backward(z, labels, labeled, Similarity::L2,
                                          /*through_centroids=*/false);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double fd =
        oracles::central_difference(loss_of, z.values()[i], 1e-5);
    CHECK(oracles::relative_error(d_z.values()[i], fd) < 1e-4);
  }
}

TEST_CASE("cosine metric loss is invariant to global scaling of embeddings") {
  Rng rng(86);
  const DenseMatrix z = oracles::random_dense(6, 3, rng, -2.0, 2.0);
  const LabelVector labels = {0, 1, 0, 1, 0, 1};
  const IndexSet labeled = {0, 1, 2, 3};
  // The gradient must be orthogonal to the radial direction.
  const DenseMatrix d_z = metric_backward(z, labels, labeled, Similarity::Cos);
  double radial = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    radial += d_z.values()[i] * z.values()[i];
  }
  CHECK(std::fabs(radial) < 1e-8);
}

TEST_CASE("shoestring_predict: node on a centroid takes that class") {
  DenseMatrix z(1, 2, {0.0, 1.0});
  Prototypes protos;
  protos.centroids = DenseMatrix(2, 2, {1.0, 0.0, 0.0, 1.0});
  protos.counts = {1, 1};
  for (Similarity kind : {Similarity::Cos, Similarity::L1, Similarity::L2}) {
    CHECK(shoestring_predict(z, protos, kind) == LabelVector{1});
  }
}

TEST_CASE("shoestring_predict breaks ties toward the lowest class") {
  DenseMatrix z(1, 2, {0.0, 0.0});
  Prototypes protos;
  protos.centroids = DenseMatrix(2, 2, {1.0, 0.0, -1.0, 0.0});
  protos.counts = {1, 1};
  CHECK(shoestring_predict(z, protos, Similarity::L2) == LabelVector{0});
}

TEST_CASE("shoestring_predict agrees with exhaustive nearest-centroid search "
          "(property)") {
  Rng rng(87);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    const std::size_t d = 1 + rng.below(5);
    const std::size_t classes = 2 + rng.below(4);
    const DenseMatrix z = oracles::random_dense(n, d, rng, -3.0, 3.0);
    Prototypes protos;
    protos.centroids = oracles::random_dense(classes, d, rng, -3.0, 3.0);
    protos.counts.assign(classes, 1);

    for (Similarity kind :
         {Similarity::Cos, Similarity::L1, Similarity::L2}) {
      const LabelVector pred = shoestring_predict(z, protos, kind);
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        double best_sim =
            similarity(z.row(i), protos.centroids.row(0), kind);
        for (std::size_t k = 1; k < classes; ++k) {
          const double s =
              similarity(z.row(i), protos.centroids.row(k), kind);
          if (s > best_sim) {
            best_sim = s;
            best = k;
          }
        }
        CHECK(pred[i] == best);
      }
    }
  }
}

TEST_CASE("cosine prediction is scale-invariant per node (property)") {
  Rng rng(88);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng.below(5);
    const std::size_t classes = 2 + rng.below(4);
    DenseMatrix z = oracles::random_dense(3, d, rng, -3.0, 3.0);
    Prototypes protos;
    protos.centroids = oracles::random_dense(classes, d, rng, -3.0, 3.0);
    protos.counts.assign(classes, 1);
    const LabelVector before = shoestring_predict(z, protos, Similarity::Cos);
    const double scale = rng.uniform(0.1, 10.0);
    for (std::size_t j = 0; j < d; ++j) z(1, j) *= scale;
    const LabelVector after = shoestring_predict(z, protos, Similarity::Cos);
    CHECK(before[1] == after[1]);
  }
}

TEST_CASE("L2 prototype probabilities are translation invariant") {
  Rng rng(89);
  const std::size_t d = 4;
  DenseMatrix z = oracles::random_dense(5, d, rng);
  Prototypes protos;
  protos.centroids = oracles::random_dense(3, d, rng);
  protos.counts = {1, 1, 1};
  const DenseMatrix before = prototype_probs(z, protos, Similarity::L2);

  std::vector<double> shift(d);
  for (double& s : shift) s = rng.uniform(-2.0, 2.0);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) z(i, j) += shift[j];
  }
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t j = 0; j < d; ++j) protos.centroids(k, j) += shift[j];
  }
  const DenseMatrix after = prototype_probs(z, protos, Similarity::L2);
  CHECK(max_abs_diff(before, after) < 1e-12);
}
