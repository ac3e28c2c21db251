#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "shoestring/filters.hpp"
#include "shoestring/gcn.hpp"
#include "shoestring/graph.hpp"
#include "shoestring/metric_head.hpp"
#include "shoestring/types.hpp"

namespace shoestring {

enum class Method { Gcn, IgcnRnm, IgcnAr, Lp, GlpRnm, GlpAr };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

/// LP has no trainable parameters; everything else runs the gradient loop.
bool is_parametric(Method method);

/// Which embedding feeds the metric head.
enum class EmbeddingLayer { Final, Hidden };

EmbeddingLayer parse_embedding_layer(std::string_view name);
std::string_view to_string(EmbeddingLayer layer);

struct TrainConfig {
  Method method = Method::Gcn;
  bool shoestring = false;
  Similarity metric = Similarity::Cos;
  double lambda = -1.0;  // < 0: per-metric default (0.01 cos, 0.05 l1, 0.001 l2)
  double lr = 0.01;
  double dropout = 0.5;
  double weight_decay = 5e-4;
  bool weight_decay_all = false;  // default regularizes the first layer only
  std::size_t epochs = 200;
  std::size_t hidden = 16;
  std::size_t filter_k = 0;      // 0: auto (4 when <= 2 labels/class, else 2)
  double filter_alpha = 0.0;     // 0: auto (4.0 when <= 2 labels/class, else 2.0)
  double lp_alpha = 1.0;
  EmbeddingLayer embedding_layer = EmbeddingLayer::Final;
  bool stop_gradient_centroids = false;
  std::uint64_t seed = 0;

  void validate() const;
  double resolved_lambda() const;
};

/// Thrown when the training loss leaves the finite range.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

/// Adam accumulators for the two weight matrices.
struct AdamState {
  static constexpr double beta1 = 0.9;
  static constexpr double beta2 = 0.999;
  static constexpr double epsilon = 1e-8;

  DenseMatrix m_w0, v_w0, m_w1, v_w1;
  std::size_t step = 0;
};

/// One Adam update in place; bumps params.version.
void adam_step(GcnParams& params, const GradientSet& grads, AdamState& state,
               double lr);

/// Everything needed to reproduce predictions after training.
struct ModelState {
  TrainConfig config;  // with lambda / filter strengths resolved
  FilterSpec filter;   // resolved filter (GLP feature filter or IGCN operator)
  GcnParams params;
  AdamState adam;
  DenseMatrix glp_features;  // GLP only: filtered features the MLP was fit on
  DenseMatrix lp_embedding;  // LP only: the closed-form solution Z
  std::vector<double> loss_history;  // combined loss per epoch
};

/// Trains the configured backbone (with the metric head attached when
/// shoestring is set). Deterministic given config.seed.
ModelState train(const TrainConfig& config, const Graph& g,
                 const DenseMatrix& x, const LabelVector& labels,
                 const IndexSet& labeled);

/// Final label assignment: metric-head prediction when shoestring is set,
/// otherwise the backbone's own argmax (lp_predict for LP).
LabelVector predict(const ModelState& model, const Graph& g,
                    const DenseMatrix& x, const LabelVector& labels,
                    const IndexSet& labeled);

/// Embeddings the metric head sees at inference (export hook).
DenseMatrix embed(const ModelState& model, const Graph& g,
                  const DenseMatrix& x);

/// Fraction of test_set indices where pred agrees with truth.
double evaluate(const LabelVector& pred, const LabelVector& truth,
                const IndexSet& test_set);

}  // namespace shoestring
