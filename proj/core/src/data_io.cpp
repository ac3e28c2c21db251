#include "shoestring/data_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "shoestring/rng.hpp"

namespace shoestring {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) tokens.push_back(std::move(token));
  return tokens;
}

double parse_double(const std::string& token,
                    const std::filesystem::path& path, std::size_t line_no) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != token.size()) {
    throw ParseError(path.string() + ":" + std::to_string(line_no) +
                     ": not a number: '" + token + "'");
  }
  return value;
}

}  // namespace

Dataset load_citation(const std::filesystem::path& content_path,
                      const std::filesystem::path& cites_path,
                      const CitationLoadOptions& options,
                      CitationLoadStats* stats) {
  std::ifstream content(content_path);
  if (!content) {
    throw ParseError("cannot open " + content_path.string());
  }

  std::unordered_map<std::string, std::size_t> node_ids;
  std::unordered_map<std::string, std::size_t> class_ids;
  std::vector<std::vector<double>> feature_rows;
  Dataset ds;

  std::string line;
  std::size_t line_no = 0;
  std::size_t feature_dim = 0;
  while (std::getline(content, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 3) {
      throw ParseError(content_path.string() + ":" + std::to_string(line_no) +
                       ": expected `<id> <features...> <label>`, got " +
                       std::to_string(tokens.size()) + " fields");
    }
    const std::size_t m = tokens.size() - 2;
    if (feature_rows.empty()) {
      feature_dim = m;
    } else if (m != feature_dim) {
      throw ParseError(content_path.string() + ":" + std::to_string(line_no) +
                       ": feature width " + std::to_string(m) +
                       " differs from first row's " +
                       std::to_string(feature_dim));
    }
    if (!node_ids.emplace(tokens.front(), feature_rows.size()).second) {
      throw ParseError(content_path.string() + ":" + std::to_string(line_no) +
                       ": duplicate node id '" + tokens.front() + "'");
    }
    std::vector<double> row(m);
    for (std::size_t j = 0; j < m; ++j) {
      row[j] = parse_double(tokens[j + 1], content_path, line_no);
    }
    feature_rows.push_back(std::move(row));

    const std::string& label = tokens.back();
    auto [it, inserted] = class_ids.emplace(label, ds.class_names.size());
    if (inserted) ds.class_names.push_back(label);
    ds.labels.push_back(it->second);
  }
  if (feature_rows.empty()) {
    throw ParseError(content_path.string() + ": no content rows");
  }

  const std::size_t n = feature_rows.size();
  ds.features = DenseMatrix(n, feature_dim);
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (double v : feature_rows[i]) row_sum += v;
    const double scale =
        options.row_normalize && row_sum != 0.0 ? 1.0 / row_sum : 1.0;
    for (std::size_t j = 0; j < feature_dim; ++j) {
      ds.features(i, j) = feature_rows[i][j] * scale;
    }
  }

  std::ifstream cites(cites_path);
  if (!cites) {
    throw ParseError("cannot open " + cites_path.string());
  }
  std::vector<Edge> edges;
  std::size_t skipped = 0;
  line_no = 0;
  while (std::getline(cites, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) {
      throw ParseError(cites_path.string() + ":" + std::to_string(line_no) +
                       ": expected `<cited_id> <citing_id>`, got " +
                       std::to_string(tokens.size()) + " fields");
    }
    const auto a = node_ids.find(tokens[0]);
    const auto b = node_ids.find(tokens[1]);
    if (a == node_ids.end() || b == node_ids.end()) {
      ++skipped;  // dangling reference; CiteSeer is known to contain these
      continue;
    }
    edges.emplace_back(a->second, b->second);
  }
  if (skipped > 0) {
    std::fprintf(stderr, "%s: skipped %zu cite lines with unknown ids\n",
                 cites_path.string().c_str(), skipped);
  }
  if (stats != nullptr) stats->skipped_edges = skipped;

  ds.graph = build_graph(n, edges);
  ds.name = content_path.stem().string();
  return ds;
}

Dataset sbm_generate(std::size_t n, std::size_t k, double p_in, double p_out,
                     std::size_t feature_dim, double noise,
                     std::uint64_t seed) {
  if (k == 0 || n == 0 || n % k != 0) {
    throw std::invalid_argument(
        "sbm_generate: class count must be positive and divide n");
  }
  if (!(0.0 <= p_out && p_out < p_in && p_in <= 1.0)) {
    throw std::invalid_argument(
        "sbm_generate: need 0 <= p_out < p_in <= 1");
  }
  if (feature_dim == 0) {
    throw std::invalid_argument("sbm_generate: feature_dim must be positive");
  }
  if (noise < 0.0) {
    throw std::invalid_argument("sbm_generate: noise must be >= 0");
  }

  Dataset ds;
  ds.name = "sbm";
  const std::size_t block = n / k;
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.labels[i] = i / block;
  for (std::size_t c = 0; c < k; ++c) ds.class_names.push_back(std::to_string(c));

  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = ds.labels[i] == ds.labels[j] ? p_in : p_out;
      if (rng.uniform() < p) edges.emplace_back(i, j);
    }
  }
  ds.graph = build_graph(n, edges);

  ds.features = DenseMatrix(n, feature_dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < feature_dim; ++j) {
      const double signature = j % k == ds.labels[i] ? 1.0 : 0.0;
      ds.features(i, j) = signature + (noise > 0.0 ? noise * rng.uniform() : 0.0);
    }
  }
  return ds;
}

SplitSpec sample_split(const Dataset& dataset, std::size_t labels_per_class,
                       std::uint64_t seed) {
  if (labels_per_class == 0) {
    throw std::invalid_argument("sample_split: labels_per_class must be >= 1");
  }
  const std::size_t num_classes = dataset.num_classes();
  std::vector<IndexSet> members(num_classes);
  for (std::size_t i = 0; i < dataset.labels.size(); ++i) {
    members[dataset.labels[i]].push_back(i);
  }

  SplitSpec split;
  split.labels_per_class = labels_per_class;
  split.seed = seed;
  Rng rng(seed);
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& pool = members[c];
    if (pool.size() < labels_per_class) {
      throw std::invalid_argument(
          "sample_split: class " + std::string(dataset.class_names[c]) +
          " has " + std::to_string(pool.size()) + " members, need " +
          std::to_string(labels_per_class));
    }
    // Partial Fisher-Yates: the first labels_per_class slots become the draw.
    for (std::size_t i = 0; i < labels_per_class; ++i) {
      const std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      split.labeled.push_back(pool[i]);
    }
  }
  std::sort(split.labeled.begin(), split.labeled.end());

  std::vector<bool> is_labeled(dataset.labels.size(), false);
  for (std::size_t i : split.labeled) is_labeled[i] = true;
  for (std::size_t i = 0; i < dataset.labels.size(); ++i) {
    if (!is_labeled[i]) split.test.push_back(i);
  }
  return split;
}

void export_embeddings(const DenseMatrix& z, const LabelVector& labels,
                       const std::filesystem::path& path) {
  if (labels.size() != z.rows()) {
    throw std::invalid_argument("export_embeddings: " +
                                std::to_string(labels.size()) +
                                " labels for " + std::to_string(z.rows()) +
                                " embedding rows");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("export_embeddings: cannot open " +
                             path.string());
  }
  char buffer[64];
  for (std::size_t i = 0; i < z.rows(); ++i) {
    out << i << ',' << labels[i];
    for (std::size_t j = 0; j < z.cols(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", z(i, j));
      out << ',' << buffer;
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("export_embeddings: write failed for " +
                             path.string());
  }
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("SHOESTRING_DATA_DIR")) {
    return std::filesystem::path(env);
  }
  return std::filesystem::path("data");
}

Dataset load_named_dataset(const std::string& name,
                           const std::filesystem::path& data_dir,
                           const CitationLoadOptions& options,
                           CitationLoadStats* stats) {
  const auto base = data_dir / name / name;
  Dataset ds = load_citation(base.string() + ".content",
                             base.string() + ".cites", options, stats);
  ds.name = name;
  return ds;
}

void write_citation_files(const Dataset& dataset,
                          const std::filesystem::path& dir,
                          const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto base = dir / name;

  std::ofstream content(base.string() + ".content");
  if (!content) {
    throw std::runtime_error("write_citation_files: cannot open " +
                             base.string() + ".content");
  }
  char buffer[64];
  for (std::size_t i = 0; i < dataset.graph.n; ++i) {
    content << i;
    for (std::size_t j = 0; j < dataset.features.cols(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", dataset.features(i, j));
      content << '\t' << buffer;
    }
    content << '\t' << dataset.class_names[dataset.labels[i]] << '\n';
  }

  std::ofstream cites(base.string() + ".cites");
  if (!cites) {
    throw std::runtime_error("write_citation_files: cannot open " +
                             base.string() + ".cites");
  }
  const auto& adj = dataset.graph.adjacency;
  for (std::size_t i = 0; i < dataset.graph.n; ++i) {
    for (std::size_t k = adj.row_offsets()[i]; k < adj.row_offsets()[i + 1];
         ++k) {
      const std::size_t j = adj.col_indices()[k];
      if (i < j) cites << i << '\t' << j << '\n';
    }
  }
}

}  // namespace shoestring
