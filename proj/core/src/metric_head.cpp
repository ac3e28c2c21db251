#include "shoestring/metric_head.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "shoestring/linalg.hpp"

namespace shoestring {

namespace {
constexpr double kNormEps = 1e-12;
constexpr double kProbClamp = 1e-12;
}  // namespace

Similarity parse_similarity(std::string_view name) {
  if (name == "cos") return Similarity::Cos;
  if (name == "l1") return Similarity::L1;
  if (name == "l2") return Similarity::L2;
  throw std::invalid_argument("unknown similarity metric: " +
                              std::string(name));
}

std::string_view to_string(Similarity kind) {
  switch (kind) {
    case Similarity::Cos: return "cos";
    case Similarity::L1: return "l1";
    case Similarity::L2: return "l2";
  }
  return "cos";
}

double default_lambda(Similarity kind) {
  switch (kind) {
    case Similarity::Cos: return 0.01;
    case Similarity::L1: return 0.05;
    case Similarity::L2: return 0.001;
  }
  return 0.01;
}

Prototypes class_centroids(const DenseMatrix& z, const LabelVector& labels,
                           const IndexSet& labeled, std::size_t num_classes) {
  Prototypes protos;
  protos.centroids = DenseMatrix(num_classes, z.cols());
  protos.counts.assign(num_classes, 0);
  for (std::size_t i : labeled) {
    const std::size_t k = labels[i];
    if (k >= num_classes) {
      throw std::invalid_argument("class_centroids: label " +
                                  std::to_string(k) + " out of range");
    }
    protos.counts[k] += 1;
    auto row = protos.centroids.row(k);
    const auto zi = z.row(i);
    for (std::size_t j = 0; j < z.cols(); ++j) row[j] += zi[j];
  }
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (protos.counts[k] == 0) {
      throw std::invalid_argument("class_centroids: class " +
                                  std::to_string(k) +
                                  " has no labeled sample");
    }
    auto row = protos.centroids.row(k);
    const double inv = 1.0 / static_cast<double>(protos.counts[k]);
    for (std::size_t j = 0; j < z.cols(); ++j) row[j] *= inv;
  }
  return protos;
}

namespace {

double norm(std::span<const double> a) {
  double sum = 0.0;
  for (double v : a) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace

double similarity(std::span<const double> a, std::span<const double> b,
                  Similarity kind) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("similarity: dimension mismatch");
  }
  switch (kind) {
    case Similarity::Cos: {
      double dot = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
      const double na = std::max(norm(a), kNormEps);
      const double nb = std::max(norm(b), kNormEps);
      return dot / (na * nb);
    }
    case Similarity::L1: {
      double sum = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) sum += std::fabs(a[i] - b[i]);
      return -sum;
    }
    case Similarity::L2: {
      double sum = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
      }
      return -sum;
    }
  }
  return 0.0;
}

namespace {

DenseMatrix similarity_table(const DenseMatrix& z, const Prototypes& protos,
                             Similarity kind) {
  if (z.cols() != protos.centroids.cols()) {
    throw std::invalid_argument("prototype similarities: embedding dim " +
                                std::to_string(z.cols()) +
                                " vs centroid dim " +
                                std::to_string(protos.centroids.cols()));
  }
  const std::size_t num_classes = protos.centroids.rows();
  DenseMatrix sims(z.rows(), num_classes);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t k = 0; k < num_classes; ++k) {
      sims(i, k) = similarity(z.row(i), protos.centroids.row(k), kind);
    }
  }
  return sims;
}

}  // namespace

DenseMatrix prototype_probs(const DenseMatrix& z, const Prototypes& protos,
                            Similarity kind) {
  return row_softmax(similarity_table(z, protos, kind));
}

double metric_loss(const DenseMatrix& z, const LabelVector& labels,
                   const IndexSet& labeled, const Prototypes& protos,
                   Similarity kind) {
  if (labeled.empty()) {
    throw std::invalid_argument("metric_loss: labeled set is empty");
  }
  DenseMatrix sims(labeled.size(), protos.centroids.rows());
  for (std::size_t li = 0; li < labeled.size(); ++li) {
    for (std::size_t k = 0; k < protos.centroids.rows(); ++k) {
      sims(li, k) =
          similarity(z.row(labeled[li]), protos.centroids.row(k), kind);
    }
  }
  const DenseMatrix probs = row_softmax(sims);
  double loss = 0.0;
  for (std::size_t li = 0; li < labeled.size(); ++li) {
    const std::size_t k = labels[labeled[li]];
    if (k >= probs.cols()) {
      throw std::invalid_argument("metric_loss: label " + std::to_string(k) +
                                  " has no prototype");
    }
    loss -= std::log(std::max(probs(li, k), kProbClamp));
  }
  return loss;
}

double combined_loss(double ce, double me, double lambda) {
  if (lambda < 0.0) {
    throw std::invalid_argument("combined_loss: lambda must be >= 0");
  }
  return ce + lambda * me;
}

namespace {

// d sim(a, b) / da and / db accumulated as g * (partial), for one pair.
void accumulate_similarity_grad(std::span<const double> a,
                                std::span<const double> b, Similarity kind,
                                double g, std::span<double> da,
                                std::span<double> db) {
  const std::size_t d = a.size();
  switch (kind) {
    case Similarity::L2: {
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        da[j] += g * (-2.0 * diff);
        db[j] += g * (2.0 * diff);
      }
      return;
    }
    case Similarity::L1: {
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        const double s = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        da[j] += g * (-s);
        db[j] += g * s;
      }
      return;
    }
    case Similarity::Cos: {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += a[j] * b[j];
      const double raw_na = norm(a);
      const double raw_nb = norm(b);
      const double na = std::max(raw_na, kNormEps);
      const double nb = std::max(raw_nb, kNormEps);
      const double inv = 1.0 / (na * nb);
      // When a norm sits on the eps clamp the norm is constant, so only the
      // bilinear term survives.
      const double a_term = raw_na > kNormEps ? dot / (na * na * na * nb) : 0.0;
      const double b_term = raw_nb > kNormEps ? dot / (na * nb * nb * nb) : 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        da[j] += g * (b[j] * inv - a_term * a[j]);
        db[j] += g * (a[j] * inv - b_term * b[j]);
      }
      return;
    }
  }
}

}  // namespace

DenseMatrix metric_backward(const DenseMatrix& z, const LabelVector& labels,
                            const IndexSet& labeled, Similarity kind,
                            bool through_centroids) {
  if (labeled.empty()) {
    throw std::invalid_argument("metric_backward: labeled set is empty");
  }
  const std::size_t num_classes = class_count(labels);
  const Prototypes protos = class_centroids(z, labels, labeled, num_classes);

  DenseMatrix sims(labeled.size(), num_classes);
  for (std::size_t li = 0; li < labeled.size(); ++li) {
    for (std::size_t k = 0; k < num_classes; ++k) {
      sims(li, k) =
          similarity(z.row(labeled[li]), protos.centroids.row(k), kind);
    }
  }
  const DenseMatrix probs = row_softmax(sims);

  DenseMatrix d_z(z.rows(), z.cols());
  DenseMatrix d_centroids(num_classes, z.cols());
  for (std::size_t li = 0; li < labeled.size(); ++li) {
    const std::size_t node = labeled[li];
    for (std::size_t k = 0; k < num_classes; ++k) {
      // Softmax cross-entropy: dLoss/dsim = p - 1[k == true class].
      const double g = probs(li, k) - (labels[node] == k ? 1.0 : 0.0);
      accumulate_similarity_grad(z.row(node), protos.centroids.row(k), kind, g,
                                 d_z.row(node), d_centroids.row(k));
    }
  }
  if (through_centroids) {
    // c_k is the mean of its labeled embeddings, so each contributes 1/|V_k|.
    for (std::size_t i : labeled) {
      const std::size_t k = labels[i];
      const double inv = 1.0 / static_cast<double>(protos.counts[k]);
      auto dst = d_z.row(i);
      const auto src = d_centroids.row(k);
      for (std::size_t j = 0; j < z.cols(); ++j) dst[j] += inv * src[j];
    }
  }
  return d_z;
}

LabelVector shoestring_predict(const DenseMatrix& z, const Prototypes& protos,
                               Similarity kind) {
  const DenseMatrix sims = similarity_table(z, protos, kind);
  LabelVector pred(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < sims.cols(); ++k) {
      if (sims(i, k) > sims(i, best)) best = k;
    }
    pred[i] = best;
  }
  return pred;
}

}  // namespace shoestring
