#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "shoestring/dense_matrix.hpp"
#include "shoestring/types.hpp"

namespace shoestring {

/// Similarity measure between embeddings. L1 and L2 are negated distances
/// (larger = more similar); L2 is the negative *squared* Euclidean distance.
enum class Similarity { Cos, L1, L2 };

Similarity parse_similarity(std::string_view name);
std::string_view to_string(Similarity kind);

/// Per-metric default weight of the metric loss in the combined objective.
double default_lambda(Similarity kind);

/// Per-class centroids: row k is the element-wise mean of the embeddings of
/// the labeled nodes in class k.
struct Prototypes {
  DenseMatrix centroids;            // classes x dim
  std::vector<std::size_t> counts;  // labeled nodes per class, all >= 1
};

/// Throws (naming the class) if any class has no labeled sample.
Prototypes class_centroids(const DenseMatrix& z, const LabelVector& labels,
                           const IndexSet& labeled, std::size_t num_classes);

/// Cos: a.b / (max(|a|, eps) * max(|b|, eps)) with eps = 1e-12;
/// L1: -sum |a_i - b_i|; L2: -sum (a_i - b_i)^2.
double similarity(std::span<const double> a, std::span<const double> b,
                  Similarity kind);

/// Row-stochastic class distribution: softmax over similarities to each
/// prototype, per node.
DenseMatrix prototype_probs(const DenseMatrix& z, const Prototypes& protos,
                            Similarity kind);

/// Cross-entropy of the prototype softmax over the labeled set, probabilities
/// clamped at 1e-12 before the log.
double metric_loss(const DenseMatrix& z, const LabelVector& labels,
                   const IndexSet& labeled, const Prototypes& protos,
                   Similarity kind);

/// ce + lambda * me.
double combined_loss(double ce, double me, double lambda);

/// Gradient of metric_loss with respect to every embedding row. Centroids
/// are recomputed from z and, unless through_centroids is cleared,
/// differentiated through (they are functions of the labeled embeddings).
/// The L1 subgradient uses sign(0) = 0; Cos uses the eps-guarded norms.
DenseMatrix metric_backward(const DenseMatrix& z, const LabelVector& labels,
                            const IndexSet& labeled, Similarity kind,
                            bool through_centroids = true);

/// Per-node argmax of the prototype softmax; ties break toward the lowest
/// class index.
LabelVector shoestring_predict(const DenseMatrix& z, const Prototypes& protos,
                               Similarity kind);

}  // namespace shoestring
