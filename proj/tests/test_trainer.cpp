#include "shoestring/trainer.hpp"

#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "shoestring/data_io.hpp"
#include "shoestring/labelprop.hpp"

using namespace shoestring;

namespace {

struct Problem {
  Dataset data;
  SplitSpec split;
};

Problem small_problem(std::uint64_t seed = 3) {
  Problem p;
  p.data = sbm_generate(32, 2, 0.3, 0.02, 8, 0.3, seed);
  p.split = sample_split(p.data, 2, seed + 1);
  return p;
}

TrainConfig fast_config(Method method) {
  TrainConfig config;
  config.method = method;
  config.epochs = 8;
  config.hidden = 6;
  config.seed = 11;
  return config;
}

}  // namespace

TEST_CASE("lambda = 0 shoestring training is bit-identical to the baseline "
          "for every backbone") {
  const Problem p = small_problem();
  for (Method method : {Method::Gcn, Method::IgcnRnm, Method::IgcnAr,
                        Method::GlpRnm, Method::GlpAr}) {
    TrainConfig baseline = fast_config(method);
    baseline.lambda = 0.0;
    TrainConfig with_head = baseline;
    with_head.shoestring = true;

    const ModelState a =
        train(baseline, p.data.graph, p.data.features, p.data.labels,
              p.split.labeled);
    const ModelState b =
        train(with_head, p.data.graph, p.data.features, p.data.labels,
              p.split.labeled);
    CHECK(a.params.w0.values() == b.params.w0.values());
    CHECK(a.params.w1.values() == b.params.w1.values());
    CHECK(a.loss_history == b.loss_history);
  }
}

TEST_CASE("training loss decreases over the budget on a seeded instance") {
  const Problem p = small_problem(17);
  TrainConfig config = fast_config(Method::Gcn);
  config.epochs = 200;
  config.shoestring = true;
  const ModelState model = train(config, p.data.graph, p.data.features,
                                 p.data.labels, p.split.labeled);
  REQUIRE(model.loss_history.size() == 200);
  CHECK(model.loss_history.back() < model.loss_history.front());
}

TEST_CASE("epochs = 0 is rejected; epochs = 1 takes exactly one Adam step") {
  const Problem p = small_problem();
  TrainConfig config = fast_config(Method::Gcn);
  config.epochs = 0;
  CHECK_THROWS_AS(train(config, p.data.graph, p.data.features, p.data.labels,
                        p.split.labeled),
                  std::invalid_argument);
  config.epochs = 1;
  const ModelState model = train(config, p.data.graph, p.data.features,
                                 p.data.labels, p.split.labeled);
  CHECK(model.adam.step == 1);
}

TEST_CASE("identical configs produce identical predictions (determinism)") {
  const Problem p = small_problem(23);
  for (Method method : {Method::Gcn, Method::Lp, Method::GlpRnm}) {
    TrainConfig config = fast_config(method);
    config.shoestring = true;
    const ModelState m1 = train(config, p.data.graph, p.data.features,
                                p.data.labels, p.split.labeled);
    const ModelState m2 = train(config, p.data.graph, p.data.features,
                                p.data.labels, p.split.labeled);
    CHECK(predict(m1, p.data.graph, p.data.features, p.data.labels,
                  p.split.labeled) ==
          predict(m2, p.data.graph, p.data.features, p.data.labels,
                  p.split.labeled));
  }
}

TEST_CASE("weight decay alone shrinks parameter norms step by step") {
  GcnParams params;
  params.w0 = DenseMatrix(3, 3);
  params.w1 = DenseMatrix(3, 2);
  for (std::size_t i = 0; i < params.w0.size(); ++i) {
    params.w0.values()[i] = (i % 2 == 0 ? 0.5 : -0.4);
  }
  AdamState state;
  const double wd = 5e-4;
  double previous = params.w0.frobenius_norm();
  const double w1_norm = params.w1.frobenius_norm();
  for (int step = 0; step < 5; ++step) {
    GradientSet grads;
    grads.g_w0 = params.w0 * wd;  // decay is the only signal
    grads.g_w1 = DenseMatrix(3, 2);
    adam_step(params, grads, state, 0.01);
    const double current = params.w0.frobenius_norm();
    CHECK(current < previous);
    previous = current;
  }
  CHECK(params.w1.frobenius_norm() == w1_norm);  // zero gradient, no decay
}

TEST_CASE("shoestring training requires labeled coverage of every class") {
  const Problem p = small_problem();
  TrainConfig config = fast_config(Method::Gcn);
  config.shoestring = true;
  IndexSet only_class_zero;
  for (std::size_t i : p.split.labeled) {
    if (p.data.labels[i] == 0) only_class_zero.push_back(i);
  }
  CHECK_THROWS_WITH_AS(train(config, p.data.graph, p.data.features,
                             p.data.labels, only_class_zero),
                       doctest::Contains("class 1"), std::invalid_argument);
}

TEST_CASE("diverging optimization raises DivergenceError with the epoch") {
  const Problem p = small_problem();
  TrainConfig config = fast_config(Method::Gcn);
  config.lr = 1e200;  // one step overflows the second-layer product
  config.epochs = 20;
  try {
    train(config, p.data.graph, p.data.features, p.data.labels,
          p.split.labeled);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.epoch() >= 1);
    CHECK(e.epoch() <= 20);
  }
}

TEST_CASE("predict: single-node graph with one class") {
  Dataset data;
  data.graph = build_graph(1, {});
  data.features = DenseMatrix(1, 2, {1.0, 0.5});
  data.labels = {0};
  data.class_names = {"only"};
  TrainConfig config = fast_config(Method::Gcn);
  const ModelState model =
      train(config, data.graph, data.features, data.labels, {0});
  CHECK(predict(model, data.graph, data.features, data.labels, {0}) ==
        LabelVector{0});
}

TEST_CASE("baseline predict equals the backbone's own argmax") {
  const Problem p = small_problem(29);
  TrainConfig config = fast_config(Method::Lp);
  const ModelState model = train(config, p.data.graph, p.data.features,
                                 p.data.labels, p.split.labeled);
  CHECK(predict(model, p.data.graph, p.data.features, p.data.labels,
                p.split.labeled) == lp_predict(model.lp_embedding));
}

TEST_CASE("shoestring separates a well-clustered SBM with one label per "
          "block") {
  const Dataset data = sbm_generate(200, 2, 0.2, 0.01, 16, 0.5, 5);
  const SplitSpec split = sample_split(data, 1, 6);
  TrainConfig config;
  config.method = Method::Gcn;
  config.shoestring = true;
  config.metric = Similarity::Cos;
  config.seed = 7;
  const ModelState model = train(config, data.graph, data.features,
                                 data.labels, split.labeled);
  const LabelVector pred = predict(model, data.graph, data.features,
                                   data.labels, split.labeled);
  CHECK(evaluate(pred, data.labels, split.test) >= 0.9);
}

TEST_CASE("GLP-RNM on an edgeless graph reduces to an MLP on raw features") {
  Dataset data = sbm_generate(16, 2, 0.5, 0.1, 6, 0.2, 9);
  data.graph = build_graph(16, {});  // strip the edges
  const SplitSpec split = sample_split(data, 2, 10);
  TrainConfig config = fast_config(Method::GlpRnm);
  const ModelState model = train(config, data.graph, data.features,
                                 data.labels, split.labeled);
  CHECK(model.glp_features.values() == data.features.values());
}

TEST_CASE("graph filtering separates SBM classes in feature space") {
  const Dataset data = sbm_generate(80, 2, 0.25, 0.02, 8, 1.0, 13);
  const auto ratio = [&](const DenseMatrix& x) {
    // Between-centroid distance over mean within-class spread.
    IndexSet all(data.graph.n);
    for (std::size_t i = 0; i < data.graph.n; ++i) all[i] = i;
    const Prototypes protos = class_centroids(x, data.labels, all, 2);
    double between = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double d = protos.centroids(0, j) - protos.centroids(1, j);
      between += d * d;
    }
    double within = 0.0;
    for (std::size_t i = 0; i < data.graph.n; ++i) {
      for (std::size_t j = 0; j < x.cols(); ++j) {
        const double d = x(i, j) - protos.centroids(data.labels[i], j);
        within += d * d;
      }
    }
    return between / (within / static_cast<double>(data.graph.n));
  };
  const double raw = ratio(data.features);
  const DenseMatrix filtered =
      apply_filter({FilterKind::Rnm, 4, 1.0}, data.graph, data.features);
  CHECK(ratio(filtered) > raw);
}

TEST_CASE("evaluate counts correct test predictions") {
  const LabelVector truth = {0, 1, 2, 0, 1, 2, 0, 1, 2, 0};
  CHECK(evaluate(truth, truth, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}) == 1.0);
  LabelVector wrong = truth;
  for (std::size_t& v : wrong) v = (v + 1) % 3;
  CHECK(evaluate(wrong, truth, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}) == 0.0);
  LabelVector half = truth;
  for (std::size_t i = 0; i < 5; ++i) half[i] = (half[i] + 1) % 3;
  CHECK(evaluate(half, truth, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}) == 0.5);
  CHECK_THROWS_AS(evaluate(truth, truth, {}), std::invalid_argument);
}

TEST_CASE("filter strengths resolve from the label budget when unset") {
  const Problem tight = small_problem(31);
  TrainConfig config = fast_config(Method::IgcnRnm);
  SplitSpec one = sample_split(tight.data, 1, 32);
  ModelState model = train(config, tight.data.graph, tight.data.features,
                           tight.data.labels, one.labeled);
  CHECK(model.config.filter_k == 4);

  SplitSpec five = sample_split(tight.data, 5, 33);
  model = train(config, tight.data.graph, tight.data.features,
                tight.data.labels, five.labeled);
  CHECK(model.config.filter_k == 2);

  config.filter_k = 3;  // explicit value wins
  model = train(config, tight.data.graph, tight.data.features,
                tight.data.labels, one.labeled);
  CHECK(model.config.filter_k == 3);
}
