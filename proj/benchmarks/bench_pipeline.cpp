#include <benchmark/benchmark.h>

#include "shoestring/data_io.hpp"
#include "shoestring/metric_head.hpp"
#include "shoestring/trainer.hpp"

using namespace shoestring;

static void BM_train_gcn(benchmark::State& state) {
  const Dataset data = sbm_generate(400, 4, 0.10, 0.01, 16, 0.5, 1);
  const SplitSpec split = sample_split(data, 2, 1);
  TrainConfig config;
  config.method = Method::Gcn;
  config.epochs = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(config, data.graph, data.features,
                                   data.labels, split.labeled));
  }
}
BENCHMARK(BM_train_gcn)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_train_shoestring_gcn(benchmark::State& state) {
  const Dataset data = sbm_generate(400, 4, 0.10, 0.01, 16, 0.5, 1);
  const SplitSpec split = sample_split(data, 2, 1);
  TrainConfig config;
  config.method = Method::Gcn;
  config.shoestring = true;
  config.metric = Similarity::Cos;
  config.epochs = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(config, data.graph, data.features,
                                   data.labels, split.labeled));
  }
}
BENCHMARK(BM_train_shoestring_gcn)
    ->Arg(50)
    ->Arg(200)
    ->Unit(benchmark::kMillisecond);

static void BM_lp_solve_pipeline(benchmark::State& state) {
  const Dataset data = sbm_generate(1000, 4, 0.04, 0.004, 16, 0.5, 2);
  const SplitSpec split = sample_split(data, 4, 2);
  TrainConfig config;
  config.method = Method::Lp;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(config, data.graph, data.features,
                                   data.labels, split.labeled));
  }
}
BENCHMARK(BM_lp_solve_pipeline)->Unit(benchmark::kMillisecond);

static void BM_metric_backward(benchmark::State& state) {
  const Dataset data = sbm_generate(1000, 4, 0.04, 0.004, 16, 0.5, 3);
  const SplitSpec split = sample_split(data, 20, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(metric_backward(data.features, data.labels,
                                             split.labeled, Similarity::Cos));
  }
}
BENCHMARK(BM_metric_backward);
