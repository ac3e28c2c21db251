#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "shoestring/dense_matrix.hpp"
#include "shoestring/graph.hpp"
#include "shoestring/types.hpp"

namespace shoestring {

/// A node-classification dataset: topology, features, one label per node.
struct Dataset {
  Graph graph;
  DenseMatrix features;  // n x m, rows aligned with graph node indices
  LabelVector labels;    // n entries in [0, K)
  std::vector<std::string> class_names;
  std::string name;

  std::size_t num_classes() const { return class_names.size(); }
};

/// A labeled/test partition sampled at a fixed label budget.
struct SplitSpec {
  std::size_t labels_per_class = 0;
  std::uint64_t seed = 0;
  IndexSet labeled;
  IndexSet test;  // all nodes not in labeled
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CitationLoadOptions {
  bool row_normalize = true;  // divide each feature row by its sum
};

struct CitationLoadStats {
  std::size_t skipped_edges = 0;  // cite lines referencing unknown ids
};

/// Loads the plain-text citation format: content lines `<id> <f_1..f_m>
/// <label>`, cites lines `<cited_id> <citing_id>`. String ids map to dense
/// indices in first-seen order; edges naming unknown ids are skipped and
/// counted. Throws ParseError with the line number on malformed input.
Dataset load_citation(const std::filesystem::path& content_path,
                      const std::filesystem::path& cites_path,
                      const CitationLoadOptions& options = {},
                      CitationLoadStats* stats = nullptr);

/// Planted-partition random graph with equal-size blocks (k must divide n).
/// Features are the one-hot block signature tiled to feature_dim plus
/// uniform noise in [0, noise). Deterministic per seed.
Dataset sbm_generate(std::size_t n, std::size_t k, double p_in, double p_out,
                     std::size_t feature_dim, double noise,
                     std::uint64_t seed);

/// Uniform per-class sampling without replacement; the test set is every
/// remaining node. Throws if any class has fewer than labels_per_class
/// members.
SplitSpec sample_split(const Dataset& dataset, std::size_t labels_per_class,
                       std::uint64_t seed);

/// Writes one row per node: `node_index,label,z_1,...,z_d` with
/// 17-significant-digit floats, so a reparse reproduces the values exactly.
void export_embeddings(const DenseMatrix& z, const LabelVector& labels,
                       const std::filesystem::path& path);

/// $SHOESTRING_DATA_DIR when set, else ./data.
std::filesystem::path default_data_dir();

/// Loads <data_dir>/<name>/<name>.content and .cites.
Dataset load_named_dataset(const std::string& name,
                           const std::filesystem::path& data_dir,
                           const CitationLoadOptions& options = {},
                           CitationLoadStats* stats = nullptr);

/// Writes a dataset back out in the citation content/cites format
/// (gen-sbm output; round-trips through load_citation).
void write_citation_files(const Dataset& dataset,
                          const std::filesystem::path& dir,
                          const std::string& name);

}  // namespace shoestring
