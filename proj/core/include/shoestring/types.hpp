#pragma once

#include <cstddef>
#include <vector>

namespace shoestring {

/// Per-node class labels, values in [0, K).
using LabelVector = std::vector<std::size_t>;

/// A set of node indices (labeled set, test set). Kept sorted by convention.
using IndexSet = std::vector<std::size_t>;

/// Number of classes implied by a full label vector (max label + 1).
inline std::size_t class_count(const LabelVector& labels) {
  std::size_t k = 0;
  for (std::size_t label : labels) k = label + 1 > k ? label + 1 : k;
  return k;
}

}  // namespace shoestring
