#include "shoestring/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "shoestring/labelprop.hpp"
#include "shoestring/linalg.hpp"

namespace shoestring {

Method parse_method(std::string_view name) {
  if (name == "gcn") return Method::Gcn;
  if (name == "igcn_rnm") return Method::IgcnRnm;
  if (name == "igcn_ar") return Method::IgcnAr;
  if (name == "lp") return Method::Lp;
  if (name == "glp_rnm") return Method::GlpRnm;
  if (name == "glp_ar") return Method::GlpAr;
  throw std::invalid_argument("unknown method: " + std::string(name));
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Gcn: return "gcn";
    case Method::IgcnRnm: return "igcn_rnm";
    case Method::IgcnAr: return "igcn_ar";
    case Method::Lp: return "lp";
    case Method::GlpRnm: return "glp_rnm";
    case Method::GlpAr: return "glp_ar";
  }
  return "gcn";
}

bool is_parametric(Method method) { return method != Method::Lp; }

EmbeddingLayer parse_embedding_layer(std::string_view name) {
  if (name == "final") return EmbeddingLayer::Final;
  if (name == "hidden") return EmbeddingLayer::Hidden;
  throw std::invalid_argument("unknown embedding layer: " + std::string(name));
}

std::string_view to_string(EmbeddingLayer layer) {
  return layer == EmbeddingLayer::Final ? "final" : "hidden";
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be > 0");
  if (dropout < 0.0 || dropout >= 1.0) {
    throw std::invalid_argument("TrainConfig: dropout must be in [0, 1)");
  }
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (hidden < 1) throw std::invalid_argument("TrainConfig: hidden must be >= 1");
  if (weight_decay < 0.0) {
    throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
  }
  if (method == Method::Lp && !(lp_alpha > 0.0)) {
    throw std::invalid_argument("TrainConfig: lp_alpha must be > 0");
  }
}

double TrainConfig::resolved_lambda() const {
  return lambda < 0.0 ? default_lambda(metric) : lambda;
}

void adam_step(GcnParams& params, const GradientSet& grads, AdamState& state,
               double lr) {
  if (state.m_w0.size() == 0) {
    state.m_w0 = DenseMatrix(params.w0.rows(), params.w0.cols());
    state.v_w0 = DenseMatrix(params.w0.rows(), params.w0.cols());
    state.m_w1 = DenseMatrix(params.w1.rows(), params.w1.cols());
    state.v_w1 = DenseMatrix(params.w1.rows(), params.w1.cols());
  }
  state.step += 1;
  const double b1_corr = 1.0 - std::pow(AdamState::beta1, state.step);
  const double b2_corr = 1.0 - std::pow(AdamState::beta2, state.step);

  auto update = [&](DenseMatrix& w, const DenseMatrix& g, DenseMatrix& m,
                    DenseMatrix& v) {
    if (!w.same_shape(g)) {
      throw std::logic_error("adam_step: gradient shape mismatch");
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g.values()[i];
      double& mi = m.values()[i];
      double& vi = v.values()[i];
      mi = AdamState::beta1 * mi + (1.0 - AdamState::beta1) * gi;
      vi = AdamState::beta2 * vi + (1.0 - AdamState::beta2) * gi * gi;
      const double m_hat = mi / b1_corr;
      const double v_hat = vi / b2_corr;
      w.values()[i] -= lr * m_hat / (std::sqrt(v_hat) + AdamState::epsilon);
    }
  };
  update(params.w0, grads.g_w0, state.m_w0, state.v_w0);
  update(params.w1, grads.g_w1, state.m_w1, state.v_w1);
  params.version += 1;
}

namespace {

std::size_t label_budget(const IndexSet& labeled, std::size_t num_classes) {
  if (num_classes == 0) return 1;
  return std::max<std::size_t>(1, labeled.size() / num_classes);
}

void check_class_coverage(const LabelVector& labels, const IndexSet& labeled,
                          std::size_t num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (std::size_t i : labeled) counts[labels[i]] += 1;
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (counts[k] == 0) {
      throw std::invalid_argument(
          "shoestring training needs at least one labeled sample per class; "
          "class " +
          std::to_string(k) + " has none");
    }
  }
}

// The citation corpora are bags of words; the dense path would spend almost
// all its time multiplying zeros.
bool prefer_sparse(const DenseMatrix& x) {
  if (x.size() == 0) return false;
  std::size_t nnz = 0;
  for (double v : x.values()) nnz += v != 0.0 ? 1 : 0;
  return nnz * 4 < x.size();
}

struct BackboneSetup {
  PropagationOp op = PropagationOp::identity(0);
  const DenseMatrix* features = nullptr;
  FilterSpec filter;
};

BackboneSetup setup_backbone(const TrainConfig& config, const Graph& g,
                             const DenseMatrix& x,
                             const DenseMatrix* glp_features) {
  BackboneSetup setup;
  setup.features = &x;
  switch (config.method) {
    case Method::Gcn:
      setup.op = PropagationOp::matrix_power(renormalized_adjacency(g), 1);
      break;
    case Method::IgcnRnm:
      setup.filter = {FilterKind::Rnm, config.filter_k, 1.0};
      setup.op = PropagationOp::matrix_power(renormalized_adjacency(g),
                                             config.filter_k);
      break;
    case Method::IgcnAr:
      setup.filter = {FilterKind::Ar, 1, config.filter_alpha};
      setup.op = PropagationOp::ar_inverse(laplacian(g), config.filter_alpha);
      break;
    case Method::GlpRnm:
    case Method::GlpAr:
      setup.filter = config.method == Method::GlpRnm
                         ? FilterSpec{FilterKind::Rnm, config.filter_k, 1.0}
                         : FilterSpec{FilterKind::Ar, 1, config.filter_alpha};
      setup.op = PropagationOp::identity(g.n);
      setup.features = glp_features;  // pre-filtered
      break;
    case Method::Lp:
      throw std::logic_error("setup_backbone: LP has no backbone");
  }
  return setup;
}

}  // namespace

ModelState train(const TrainConfig& config, const Graph& g,
                 const DenseMatrix& x, const LabelVector& labels,
                 const IndexSet& labeled) {
  config.validate();
  if (labeled.empty()) {
    throw std::invalid_argument("train: labeled set is empty");
  }
  if (labels.size() != g.n || x.rows() != g.n) {
    throw std::invalid_argument("train: node count mismatch between graph, "
                                "features and labels");
  }
  const std::size_t num_classes = class_count(labels);
  if (config.shoestring) {
    check_class_coverage(labels, labeled, num_classes);
  }

  ModelState model;
  model.config = config;
  model.config.lambda = config.resolved_lambda();
  const std::size_t budget = label_budget(labeled, num_classes);
  if (model.config.filter_k == 0) {
    model.config.filter_k = budget <= 2 ? 4 : 2;
  }
  if (!(model.config.filter_alpha > 0.0)) {
    model.config.filter_alpha = budget <= 2 ? 4.0 : 2.0;
  }

  if (config.method == Method::Lp) {
    const LabelMatrix y = make_label_matrix(labels, labeled, num_classes);
    model.lp_embedding = lp_solve(g, y, config.lp_alpha);
    return model;
  }

  if (config.method == Method::GlpRnm || config.method == Method::GlpAr) {
    const FilterSpec spec =
        config.method == Method::GlpRnm
            ? FilterSpec{FilterKind::Rnm, model.config.filter_k, 1.0}
            : FilterSpec{FilterKind::Ar, 1, model.config.filter_alpha};
    model.glp_features = apply_filter(spec, g, x);
  }

  const BackboneSetup setup =
      setup_backbone(model.config, g, x, &model.glp_features);
  model.filter = setup.filter;
  const DenseMatrix& features = *setup.features;

  Rng rng(config.seed);
  GcnParams params =
      init_gcn_params(features.cols(), config.hidden, num_classes, rng);

  const bool sparse_features = prefer_sparse(features);
  SparseMatrix features_csr;
  if (sparse_features) features_csr = SparseMatrix::from_dense(features);

  AdamState adam;
  const double lambda = model.config.lambda;
  const bool use_metric = config.shoestring && lambda > 0.0;
  model.loss_history.reserve(config.epochs);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    ForwardCache cache =
        sparse_features
            ? gcn_forward(setup.op, features_csr, params, config.dropout,
                          /*training=*/true, rng)
            : gcn_forward(setup.op, features, params, config.dropout,
                          /*training=*/true, rng);

    const double ce = ce_loss(cache.probs, labels, labeled);
    DenseMatrix d_logits = ce_loss_grad(cache.probs, labels, labeled);

    double me = 0.0;
    DenseMatrix d_hidden;
    bool has_d_hidden = false;
    if (use_metric) {
      const DenseMatrix& z = config.embedding_layer == EmbeddingLayer::Final
                                 ? cache.logits
                                 : cache.hidden;
      const Prototypes protos =
          class_centroids(z, labels, labeled, num_classes);
      me = metric_loss(z, labels, labeled, protos, config.metric);
      DenseMatrix d_me = metric_backward(z, labels, labeled, config.metric,
                                         !config.stop_gradient_centroids);
      d_me *= lambda;
      if (config.embedding_layer == EmbeddingLayer::Final) {
        d_logits += d_me;
      } else {
        d_hidden = std::move(d_me);
        has_d_hidden = true;
      }
    }

    const double loss = combined_loss(ce, me, lambda);
    model.loss_history.push_back(loss);
    if (!std::isfinite(loss)) {
      throw DivergenceError(
          "training diverged (non-finite loss) at epoch " +
              std::to_string(epoch) + " of " + std::to_string(config.epochs),
          epoch);
    }

    GradientSet grads =
        sparse_features
            ? gcn_backward(cache, setup.op, features_csr, params, d_logits,
                           has_d_hidden ? &d_hidden : nullptr)
            : gcn_backward(cache, setup.op, features, params, d_logits,
                           has_d_hidden ? &d_hidden : nullptr);

    if (config.weight_decay > 0.0) {
      for (std::size_t i = 0; i < params.w0.size(); ++i) {
        grads.g_w0.values()[i] += config.weight_decay * params.w0.values()[i];
      }
      if (config.weight_decay_all) {
        for (std::size_t i = 0; i < params.w1.size(); ++i) {
          grads.g_w1.values()[i] +=
              config.weight_decay * params.w1.values()[i];
        }
      }
    }
    adam_step(params, grads, adam, config.lr);
  }

  model.params = std::move(params);
  model.adam = std::move(adam);
  return model;
}

namespace {

ForwardCache infer_cache(const ModelState& model, const Graph& g,
                         const DenseMatrix& x) {
  const BackboneSetup setup =
      setup_backbone(model.config, g, x, &model.glp_features);
  const DenseMatrix& features = *setup.features;
  if (prefer_sparse(features)) {
    return gcn_infer(setup.op, SparseMatrix::from_dense(features),
                     model.params);
  }
  return gcn_infer(setup.op, features, model.params);
}

}  // namespace

LabelVector predict(const ModelState& model, const Graph& g,
                    const DenseMatrix& x, const LabelVector& labels,
                    const IndexSet& labeled) {
  const TrainConfig& config = model.config;
  const std::size_t num_classes = class_count(labels);

  if (config.method == Method::Lp) {
    if (!config.shoestring) return lp_predict(model.lp_embedding);
    const Prototypes protos =
        class_centroids(model.lp_embedding, labels, labeled, num_classes);
    return shoestring_predict(model.lp_embedding, protos, config.metric);
  }

  const ForwardCache cache = infer_cache(model, g, x);
  if (!config.shoestring) {
    return lp_predict(cache.probs);  // row argmax, lowest-index ties
  }
  const DenseMatrix& z = config.embedding_layer == EmbeddingLayer::Final
                             ? cache.logits
                             : cache.hidden;
  const Prototypes protos = class_centroids(z, labels, labeled, num_classes);
  return shoestring_predict(z, protos, config.metric);
}

DenseMatrix embed(const ModelState& model, const Graph& g,
                  const DenseMatrix& x) {
  if (model.config.method == Method::Lp) return model.lp_embedding;
  const ForwardCache cache = infer_cache(model, g, x);
  return model.config.embedding_layer == EmbeddingLayer::Final ? cache.logits
                                                               : cache.hidden;
}

double evaluate(const LabelVector& pred, const LabelVector& truth,
                const IndexSet& test_set) {
  if (test_set.empty()) {
    throw std::invalid_argument("evaluate: test set is empty");
  }
  std::size_t correct = 0;
  for (std::size_t i : test_set) {
    if (i >= pred.size() || i >= truth.size()) {
      throw std::invalid_argument("evaluate: test index " + std::to_string(i) +
                                  " out of range");
    }
    correct += pred[i] == truth[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(test_set.size());
}

}  // namespace shoestring
