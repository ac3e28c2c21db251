#pragma once

#include <cstdint>
#include <vector>

#include "shoestring/filters.hpp"
#include "shoestring/rng.hpp"
#include "shoestring/types.hpp"

namespace shoestring {

/// Two-layer network weights. `version` stamps every forward cache so a
/// backward pass against mutated parameters is rejected.
struct GcnParams {
  DenseMatrix w0;  // in_dim x hidden
  DenseMatrix w1;  // hidden x classes
  std::uint64_t version = 0;
};

/// Uniform Glorot initialization: entries in +-sqrt(6 / (rows + cols)).
DenseMatrix glorot_init(std::size_t rows, std::size_t cols, Rng& rng);

GcnParams init_gcn_params(std::size_t in_dim, std::size_t hidden,
                          std::size_t classes, Rng& rng);

/// Intermediate tensors of one forward pass.
///
/// pre_hidden = op(x * w0); hidden = relu(pre_hidden) with inverted dropout
/// applied (kept units scaled by 1/(1-rate), so inference needs no rescale);
/// logits = op(hidden * w1); probs = row_softmax(logits).
struct ForwardCache {
  DenseMatrix pre_hidden;
  DenseMatrix hidden;
  std::vector<std::uint8_t> dropout_mask;  // one flag per hidden entry
  double dropout_rate = 0.0;
  DenseMatrix logits;
  DenseMatrix probs;
  std::uint64_t param_version = 0;
};

/// Forward pass. With training set, a fresh dropout mask is drawn from rng
/// (no draws when dropout_rate is 0); otherwise the mask is all ones and rng
/// is not touched.
ForwardCache gcn_forward(const PropagationOp& op, const DenseMatrix& x,
                         const GcnParams& params, double dropout_rate,
                         bool training, Rng& rng);

/// Convenience overload matching the plain two-layer GCN: op applied once.
ForwardCache gcn_forward(const SparseMatrix& op, const DenseMatrix& x,
                         const GcnParams& params, double dropout_rate,
                         bool training, Rng& rng);

/// Forward with a caller-supplied dropout mask (finite-difference harnesses
/// need to re-evaluate the loss under a frozen mask).
ForwardCache gcn_forward_masked(const PropagationOp& op, const DenseMatrix& x,
                                const GcnParams& params,
                                std::vector<std::uint8_t> mask,
                                double dropout_rate);

/// Sparse-feature variants: same computation with x in CSR form, used when
/// the feature matrix is mostly zeros (citation-network bags of words).
ForwardCache gcn_forward_masked(const PropagationOp& op, const SparseMatrix& x,
                                const GcnParams& params,
                                std::vector<std::uint8_t> mask,
                                double dropout_rate);
ForwardCache gcn_forward(const PropagationOp& op, const SparseMatrix& x,
                         const GcnParams& params, double dropout_rate,
                         bool training, Rng& rng);

/// Dropout-free deterministic forward (inference path).
ForwardCache gcn_infer(const PropagationOp& op, const DenseMatrix& x,
                       const GcnParams& params);
ForwardCache gcn_infer(const PropagationOp& op, const SparseMatrix& x,
                       const GcnParams& params);

/// Cross-entropy over the labeled rows: -sum ln probs[i][label_i], with
/// probabilities clamped at 1e-12 before the log. Throws on an empty set.
double ce_loss(const DenseMatrix& probs, const LabelVector& labels,
               const IndexSet& labeled);

/// d(ce_loss)/d(logits): probs - onehot on labeled rows, zero elsewhere.
DenseMatrix ce_loss_grad(const DenseMatrix& probs, const LabelVector& labels,
                         const IndexSet& labeled);

struct GradientSet {
  DenseMatrix g_w0;
  DenseMatrix g_w1;
};

/// Analytic gradients of the loss given d_logits = dLoss/d(logits).
/// d_hidden, when non-null, is an extra dLoss/d(hidden) term injected at the
/// post-dropout hidden activation (metric head attached to the hidden layer).
/// Throws std::logic_error if the cache is stale against params.version.
GradientSet gcn_backward(const ForwardCache& cache, const PropagationOp& op,
                         const DenseMatrix& x, const GcnParams& params,
                         const DenseMatrix& d_logits,
                         const DenseMatrix* d_hidden = nullptr);

GradientSet gcn_backward(const ForwardCache& cache, const PropagationOp& op,
                         const SparseMatrix& x, const GcnParams& params,
                         const DenseMatrix& d_logits,
                         const DenseMatrix* d_hidden = nullptr);

}  // namespace shoestring
