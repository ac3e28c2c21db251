#include "shoestring/gcn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "shoestring/linalg.hpp"

namespace shoestring {

DenseMatrix glorot_init(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("glorot_init: dimensions must be positive");
  }
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  DenseMatrix m(rows, cols);
  for (double& v : m.values()) {
    v = rng.uniform(-bound, bound);
  }
  return m;
}

GcnParams init_gcn_params(std::size_t in_dim, std::size_t hidden,
                          std::size_t classes, Rng& rng) {
  GcnParams params;
  params.w0 = glorot_init(in_dim, hidden, rng);
  params.w1 = glorot_init(hidden, classes, rng);
  return params;
}

namespace {

// Shared tail of every forward pass, starting from xw0 = x * w0.
ForwardCache forward_from_xw0(const PropagationOp& op, DenseMatrix xw0,
                              const GcnParams& params,
                              std::vector<std::uint8_t> mask,
                              double dropout_rate) {
  ForwardCache cache;
  cache.pre_hidden = op.apply(xw0);
  cache.hidden = relu(cache.pre_hidden);
  if (mask.size() != cache.hidden.size()) {
    throw std::invalid_argument("gcn_forward: dropout mask has " +
                                std::to_string(mask.size()) +
                                " entries, hidden layer has " +
                                std::to_string(cache.hidden.size()));
  }
  cache.dropout_mask = std::move(mask);
  cache.dropout_rate = dropout_rate;
  if (dropout_rate > 0.0) {
    const double scale = 1.0 / (1.0 - dropout_rate);
    auto& h = cache.hidden.values();
    for (std::size_t i = 0; i < h.size(); ++i) {
      h[i] = cache.dropout_mask[i] ? h[i] * scale : 0.0;
    }
  }
  cache.logits = op.apply(matmul(cache.hidden, params.w1));
  cache.probs = row_softmax(cache.logits);
  cache.param_version = params.version;
  return cache;
}

std::vector<std::uint8_t> draw_mask(std::size_t entries, double dropout_rate,
                                    bool training, Rng& rng) {
  if (!training || dropout_rate <= 0.0) {
    return std::vector<std::uint8_t>(entries, 1);
  }
  if (dropout_rate >= 1.0) {
    throw std::invalid_argument("gcn_forward: dropout_rate must be in [0, 1)");
  }
  std::vector<std::uint8_t> mask(entries);
  for (std::size_t i = 0; i < entries; ++i) {
    mask[i] = rng.uniform() >= dropout_rate ? 1 : 0;
  }
  return mask;
}

void check_feature_shape(std::size_t x_rows, std::size_t x_cols,
                         const PropagationOp& op, const GcnParams& params) {
  if (x_cols != params.w0.rows()) {
    throw std::invalid_argument(
        "gcn_forward: feature dim " + std::to_string(x_cols) +
        " does not match w0 rows " + std::to_string(params.w0.rows()));
  }
  if (x_rows != op.dim()) {
    throw std::invalid_argument("gcn_forward: " + std::to_string(x_rows) +
                                " nodes vs operator dim " +
                                std::to_string(op.dim()));
  }
  if (params.w0.cols() != params.w1.rows()) {
    throw std::invalid_argument("gcn_forward: w0 cols " +
                                std::to_string(params.w0.cols()) +
                                " do not match w1 rows " +
                                std::to_string(params.w1.rows()));
  }
}

}  // namespace

ForwardCache gcn_forward_masked(const PropagationOp& op, const DenseMatrix& x,
                                const GcnParams& params,
                                std::vector<std::uint8_t> mask,
                                double dropout_rate) {
  check_feature_shape(x.rows(), x.cols(), op, params);
  return forward_from_xw0(op, matmul(x, params.w0), params, std::move(mask),
                          dropout_rate);
}

ForwardCache gcn_forward_masked(const PropagationOp& op, const SparseMatrix& x,
                                const GcnParams& params,
                                std::vector<std::uint8_t> mask,
                                double dropout_rate) {
  check_feature_shape(x.rows(), x.cols(), op, params);
  return forward_from_xw0(op, spmm(x, params.w0), params, std::move(mask),
                          dropout_rate);
}

ForwardCache gcn_forward(const PropagationOp& op, const DenseMatrix& x,
                         const GcnParams& params, double dropout_rate,
                         bool training, Rng& rng) {
  check_feature_shape(x.rows(), x.cols(), op, params);
  auto mask =
      draw_mask(x.rows() * params.w0.cols(), dropout_rate, training, rng);
  const double rate = training ? dropout_rate : 0.0;
  return forward_from_xw0(op, matmul(x, params.w0), params, std::move(mask),
                          rate);
}

ForwardCache gcn_forward(const PropagationOp& op, const SparseMatrix& x,
                         const GcnParams& params, double dropout_rate,
                         bool training, Rng& rng) {
  check_feature_shape(x.rows(), x.cols(), op, params);
  auto mask =
      draw_mask(x.rows() * params.w0.cols(), dropout_rate, training, rng);
  const double rate = training ? dropout_rate : 0.0;
  return forward_from_xw0(op, spmm(x, params.w0), params, std::move(mask),
                          rate);
}

ForwardCache gcn_forward(const SparseMatrix& op, const DenseMatrix& x,
                         const GcnParams& params, double dropout_rate,
                         bool training, Rng& rng) {
  return gcn_forward(PropagationOp::matrix_power(op, 1), x, params,
                     dropout_rate, training, rng);
}

ForwardCache gcn_infer(const PropagationOp& op, const DenseMatrix& x,
                       const GcnParams& params) {
  check_feature_shape(x.rows(), x.cols(), op, params);
  return forward_from_xw0(
      op, matmul(x, params.w0), params,
      std::vector<std::uint8_t>(x.rows() * params.w0.cols(), 1), 0.0);
}

ForwardCache gcn_infer(const PropagationOp& op, const SparseMatrix& x,
                       const GcnParams& params) {
  check_feature_shape(x.rows(), x.cols(), op, params);
  return forward_from_xw0(
      op, spmm(x, params.w0), params,
      std::vector<std::uint8_t>(x.rows() * params.w0.cols(), 1), 0.0);
}

double ce_loss(const DenseMatrix& probs, const LabelVector& labels,
               const IndexSet& labeled) {
  if (labeled.empty()) {
    throw std::invalid_argument("ce_loss: labeled set is empty");
  }
  double loss = 0.0;
  for (std::size_t i : labeled) {
    if (i >= probs.rows() || i >= labels.size()) {
      throw std::invalid_argument("ce_loss: labeled index " +
                                  std::to_string(i) + " out of range");
    }
    const std::size_t k = labels[i];
    if (k >= probs.cols()) {
      throw std::invalid_argument("ce_loss: label " + std::to_string(k) +
                                  " out of range for " +
                                  std::to_string(probs.cols()) + " classes");
    }
    loss -= std::log(std::max(probs(i, k), 1e-12));
  }
  return loss;
}

DenseMatrix ce_loss_grad(const DenseMatrix& probs, const LabelVector& labels,
                         const IndexSet& labeled) {
  if (labeled.empty()) {
    throw std::invalid_argument("ce_loss_grad: labeled set is empty");
  }
  DenseMatrix grad(probs.rows(), probs.cols());
  for (std::size_t i : labeled) {
    for (std::size_t k = 0; k < probs.cols(); ++k) {
      grad(i, k) = probs(i, k) - (labels[i] == k ? 1.0 : 0.0);
    }
  }
  return grad;
}

namespace {

// Everything after dLoss/d(pre_hidden) is the only part that depends on the
// feature storage, so backward is split around it.
struct BackwardCore {
  DenseMatrix g_w1;
  DenseMatrix op_d_pre;  // op( dLoss/d(pre_hidden) ), ready for x^T * (.)
};

BackwardCore backward_core(const ForwardCache& cache, const PropagationOp& op,
                           const GcnParams& params,
                           const DenseMatrix& d_logits,
                           const DenseMatrix* d_hidden) {
  if (cache.param_version != params.version) {
    throw std::logic_error(
        "gcn_backward: forward cache is stale (parameter version " +
        std::to_string(cache.param_version) + " vs " +
        std::to_string(params.version) + ")");
  }
  if (!d_logits.same_shape(cache.logits)) {
    throw std::invalid_argument("gcn_backward: d_logits shape mismatch");
  }

  BackwardCore core;
  // logits = op(hidden * w1); op is symmetric, so op^T == op.
  const DenseMatrix op_d_logits = op.apply(d_logits);
  core.g_w1 = matmul_transpose_a(cache.hidden, op_d_logits);

  DenseMatrix d_hidden_total = matmul_transpose_b(op_d_logits, params.w1);
  if (d_hidden != nullptr) {
    d_hidden_total += *d_hidden;
  }

  // Through inverted dropout and relu; relu'(0) is taken as 0.
  const double scale =
      cache.dropout_rate > 0.0 ? 1.0 / (1.0 - cache.dropout_rate) : 1.0;
  auto& d = d_hidden_total.values();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double keep = cache.dropout_mask[i] ? scale : 0.0;
    const double active = cache.pre_hidden.values()[i] > 0.0 ? 1.0 : 0.0;
    d[i] *= keep * active;
  }
  core.op_d_pre = op.apply(d_hidden_total);
  return core;
}

}  // namespace

GradientSet gcn_backward(const ForwardCache& cache, const PropagationOp& op,
                         const DenseMatrix& x, const GcnParams& params,
                         const DenseMatrix& d_logits,
                         const DenseMatrix* d_hidden) {
  BackwardCore core = backward_core(cache, op, params, d_logits, d_hidden);
  GradientSet grads;
  grads.g_w0 = matmul_transpose_a(x, core.op_d_pre);
  grads.g_w1 = std::move(core.g_w1);
  return grads;
}

GradientSet gcn_backward(const ForwardCache& cache, const PropagationOp& op,
                         const SparseMatrix& x, const GcnParams& params,
                         const DenseMatrix& d_logits,
                         const DenseMatrix* d_hidden) {
  BackwardCore core = backward_core(cache, op, params, d_logits, d_hidden);
  GradientSet grads;
  grads.g_w0 = spmm_transpose_a(x, core.op_d_pre);
  grads.g_w1 = std::move(core.g_w1);
  return grads;
}

}  // namespace shoestring
