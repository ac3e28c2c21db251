#include "shoestring/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace shoestring {

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double sum = 0.0;
  for (double x : v) sum += (x - m) * (x - m);
  return std::sqrt(sum / static_cast<double>(v.size()));
}

std::string format_g17(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace

double ExperimentResult::mean_accuracy() const { return mean_of(accuracies); }
double ExperimentResult::std_accuracy() const { return std_of(accuracies); }
double ExperimentResult::mean_seconds() const { return mean_of(seconds); }

GridConfig GridConfig::from_config(const KeyValueConfig& kv) {
  GridConfig grid;
  grid.dataset = kv.get_string("dataset", grid.dataset);
  grid.data_dir = kv.get_string("data_dir", "");

  if (kv.has("methods")) {
    grid.methods.clear();
    for (const auto& name : kv.get_list("methods")) {
      grid.methods.push_back(parse_method(name));
    }
  } else if (kv.has("method")) {
    grid.methods = {parse_method(kv.get_string("method", "gcn"))};
  }
  if (grid.methods.empty()) {
    throw ConfigError("grid: no methods requested");
  }

  // `filter` is an alternative spelling of the method's filter suffix:
  // gcn + rnm/ar selects the IGCN variant; on filtered methods the value
  // must agree with the suffix.
  if (kv.has("filter")) {
    const FilterKind kind = parse_filter_kind(kv.get_string("filter", "none"));
    for (Method& method : grid.methods) {
      switch (method) {
        case Method::Gcn:
          if (kind == FilterKind::Rnm) method = Method::IgcnRnm;
          if (kind == FilterKind::Ar) method = Method::IgcnAr;
          break;
        case Method::IgcnRnm:
        case Method::GlpRnm:
          if (kind != FilterKind::Rnm) {
            throw ConfigError("grid: filter '" +
                              std::string(to_string(kind)) +
                              "' conflicts with method " +
                              std::string(to_string(method)));
          }
          break;
        case Method::IgcnAr:
        case Method::GlpAr:
          if (kind != FilterKind::Ar) {
            throw ConfigError("grid: filter '" +
                              std::string(to_string(kind)) +
                              "' conflicts with method " +
                              std::string(to_string(method)));
          }
          break;
        case Method::Lp:
          if (kind != FilterKind::None) {
            throw ConfigError("grid: LP does not take a graph filter");
          }
          break;
      }
    }
  }

  if (kv.has("metrics")) {
    grid.metrics.clear();
    for (const auto& name : kv.get_list("metrics")) {
      grid.metrics.push_back(parse_similarity(name));
    }
  } else if (kv.has("metric")) {
    grid.metrics = {parse_similarity(kv.get_string("metric", "cos"))};
  }

  if (kv.has("budgets")) {
    grid.budgets.clear();
    for (const auto& b : kv.get_list("budgets")) {
      KeyValueConfig one;
      one.set("b", b);
      grid.budgets.push_back(one.get_size("b", 1));
    }
  } else if (kv.has("labels_per_class")) {
    grid.budgets = {kv.get_size("labels_per_class", 1)};
  }
  if (grid.budgets.empty()) {
    throw ConfigError("grid: no label budgets requested");
  }

  const std::string mode = kv.get_string("shoestring", "both");
  if (mode == "both") {
    grid.mode = ShoestringMode::Both;
  } else if (mode == "true" || mode == "on" || mode == "1") {
    grid.mode = ShoestringMode::ShoestringOnly;
  } else if (mode == "false" || mode == "off" || mode == "0") {
    grid.mode = ShoestringMode::BaselineOnly;
  } else {
    throw ConfigError("grid: shoestring must be both|true|false, got '" +
                      mode + "'");
  }

  grid.num_seeds = kv.get_size("seeds", grid.num_seeds);
  if (grid.num_seeds == 0) throw ConfigError("grid: seeds must be >= 1");
  grid.base_seed = kv.get_u64("base_seed", grid.base_seed);

  grid.base.lambda = kv.get_double("lambda", grid.base.lambda);
  grid.base.lr = kv.get_double("lr", grid.base.lr);
  grid.base.dropout = kv.get_double("dropout", grid.base.dropout);
  grid.base.weight_decay = kv.get_double("weight_decay", grid.base.weight_decay);
  grid.base.weight_decay_all =
      kv.get_bool("weight_decay_all", grid.base.weight_decay_all);
  grid.base.epochs = kv.get_size("epochs", grid.base.epochs);
  grid.base.hidden = kv.get_size("hidden", grid.base.hidden);
  grid.base.filter_k = kv.get_size("filter_k", grid.base.filter_k);
  grid.base.filter_alpha = kv.get_double("filter_alpha", grid.base.filter_alpha);
  grid.base.lp_alpha = kv.get_double("lp_alpha", grid.base.lp_alpha);
  grid.base.embedding_layer = parse_embedding_layer(
      kv.get_string("embedding_layer", "final"));
  grid.base.stop_gradient_centroids =
      kv.get_bool("stop_gradient_centroids", false);
  grid.row_normalize = kv.get_bool("row_normalize", grid.row_normalize);

  grid.sbm_n = kv.get_size("sbm_n", grid.sbm_n);
  grid.sbm_classes = kv.get_size("sbm_classes", grid.sbm_classes);
  grid.sbm_p_in = kv.get_double("sbm_p_in", grid.sbm_p_in);
  grid.sbm_p_out = kv.get_double("sbm_p_out", grid.sbm_p_out);
  grid.sbm_feature_dim = kv.get_size("sbm_feature_dim", grid.sbm_feature_dim);
  grid.sbm_noise = kv.get_double("sbm_noise", grid.sbm_noise);
  grid.sbm_seed = kv.get_u64("sbm_seed", grid.sbm_seed);

  grid.out_dir = kv.get_string("out_dir", grid.out_dir.string());
  grid.jobs = kv.get_size("jobs", grid.jobs);
  if (grid.jobs == 0) throw ConfigError("grid: jobs must be >= 1");
  return grid;
}

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace

std::string config_fingerprint(const GridConfig& grid, Method method,
                               bool shoestring, Similarity metric,
                               std::size_t labels_per_class) {
  std::ostringstream canon;
  canon << "dataset=" << grid.dataset << ";method=" << to_string(method)
        << ";shoestring=" << (shoestring ? 1 : 0)
        << ";metric=" << (shoestring ? to_string(metric) : "none")
        << ";labels_per_class=" << labels_per_class
        << ";lambda=" << format_g17(grid.base.lambda)
        << ";lr=" << format_g17(grid.base.lr)
        << ";dropout=" << format_g17(grid.base.dropout)
        << ";weight_decay=" << format_g17(grid.base.weight_decay)
        << ";weight_decay_all=" << (grid.base.weight_decay_all ? 1 : 0)
        << ";epochs=" << grid.base.epochs << ";hidden=" << grid.base.hidden
        << ";filter_k=" << grid.base.filter_k
        << ";filter_alpha=" << format_g17(grid.base.filter_alpha)
        << ";lp_alpha=" << format_g17(grid.base.lp_alpha)
        << ";embedding_layer=" << to_string(grid.base.embedding_layer)
        << ";stop_gradient_centroids="
        << (grid.base.stop_gradient_centroids ? 1 : 0)
        << ";row_normalize=" << (grid.row_normalize ? 1 : 0)
        << ";seeds=" << grid.num_seeds << ";base_seed=" << grid.base_seed;
  if (grid.dataset == "sbm") {
    canon << ";sbm_n=" << grid.sbm_n << ";sbm_classes=" << grid.sbm_classes
          << ";sbm_p_in=" << format_g17(grid.sbm_p_in)
          << ";sbm_p_out=" << format_g17(grid.sbm_p_out)
          << ";sbm_feature_dim=" << grid.sbm_feature_dim
          << ";sbm_noise=" << format_g17(grid.sbm_noise)
          << ";sbm_seed=" << grid.sbm_seed;
  }
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(fnv1a(canon.str())));
  return buffer;
}

namespace {

struct GridCell {
  Method method;
  bool shoestring;
  Similarity metric;
  std::size_t labels_per_class;
  std::string fingerprint;
};

std::vector<GridCell> enumerate_cells(const GridConfig& grid) {
  std::vector<GridCell> cells;
  const std::vector<Similarity> metrics =
      grid.metrics.empty() ? std::vector<Similarity>{Similarity::Cos}
                           : grid.metrics;
  for (Method method : grid.methods) {
    for (std::size_t budget : grid.budgets) {
      if (grid.mode != ShoestringMode::ShoestringOnly) {
        cells.push_back({method, false, Similarity::Cos, budget,
                         config_fingerprint(grid, method, false,
                                            Similarity::Cos, budget)});
      }
      if (grid.mode != ShoestringMode::BaselineOnly) {
        for (Similarity metric : metrics) {
          cells.push_back({method, true, metric, budget,
                           config_fingerprint(grid, method, true, metric,
                                              budget)});
        }
      }
    }
  }
  return cells;
}

std::string describe_cell(const GridConfig& grid, const GridCell& cell,
                          std::uint64_t seed) {
  std::ostringstream out;
  out << grid.dataset << "/" << to_string(cell.method)
      << (cell.shoestring
              ? "+shoestring-" + std::string(to_string(cell.metric))
              : "")
      << "/" << cell.labels_per_class << " labels/seed " << seed;
  return out.str();
}

}  // namespace

GridOutcome run_grid_on(const GridConfig& grid, const Dataset& dataset) {
  const std::vector<GridCell> cells = enumerate_cells(grid);
  const std::size_t total = cells.size() * grid.num_seeds;

  struct Slot {
    RunRecord record;
    bool failed = false;
    std::string message;
  };
  std::vector<Slot> slots(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const GridCell& cell = cells[idx / grid.num_seeds];
      const std::size_t seed_index = idx % grid.num_seeds;
      const std::uint64_t seed = grid.base_seed + seed_index;

      Slot& slot = slots[idx];
      slot.record.dataset = dataset.name;
      slot.record.method = cell.method;
      slot.record.shoestring = cell.shoestring;
      slot.record.metric = cell.metric;
      slot.record.labels_per_class = cell.labels_per_class;
      slot.record.seed = seed;
      try {
        const auto start = std::chrono::steady_clock::now();
        const SplitSpec split =
            sample_split(dataset, cell.labels_per_class, seed);
        TrainConfig config = grid.base;
        config.method = cell.method;
        config.shoestring = cell.shoestring;
        config.metric = cell.metric;
        config.seed = seed;
        const ModelState model = train(config, dataset.graph,
                                       dataset.features, dataset.labels,
                                       split.labeled);
        const LabelVector pred = predict(model, dataset.graph,
                                         dataset.features, dataset.labels,
                                         split.labeled);
        slot.record.accuracy = evaluate(pred, dataset.labels, split.test);
        slot.record.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
      } catch (const std::exception& e) {
        slot.failed = true;
        slot.message = e.what();
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, grid.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(jobs, total); ++t) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) t.join();
  }

  GridOutcome outcome;
  for (std::size_t idx = 0; idx < total; ++idx) {
    const GridCell& cell = cells[idx / grid.num_seeds];
    if (slots[idx].failed) {
      outcome.failures.push_back(
          {cell.fingerprint,
           describe_cell(grid, cell, slots[idx].record.seed),
           slots[idx].message});
      std::fprintf(stderr, "run failed [%s]: %s\n",
                   outcome.failures.back().description.c_str(),
                   slots[idx].message.c_str());
    } else {
      outcome.runs.push_back(slots[idx].record);
    }
  }
  outcome.results = aggregate_runs(outcome.runs, &grid);

  std::filesystem::create_directories(grid.out_dir);
  outcome.csv_path = grid.out_dir / "results.csv";
  outcome.summary_path = grid.out_dir / "summary.json";
  write_results_csv(outcome.csv_path, outcome.runs);
  write_summary_json(outcome.summary_path, outcome);
  return outcome;
}

GridOutcome run_grid(const GridConfig& grid) {
  if (grid.dataset == "sbm") {
    return run_grid_on(grid, sbm_generate(grid.sbm_n, grid.sbm_classes,
                                          grid.sbm_p_in, grid.sbm_p_out,
                                          grid.sbm_feature_dim, grid.sbm_noise,
                                          grid.sbm_seed));
  }
  const auto dir = grid.data_dir.empty() ? default_data_dir() : grid.data_dir;
  CitationLoadOptions options;
  options.row_normalize = grid.row_normalize;
  return run_grid_on(grid, load_named_dataset(grid.dataset, dir, options));
}

void write_results_csv(const std::filesystem::path& path,
                       const std::vector<RunRecord>& runs) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << "dataset,method,shoestring,metric,labels_per_class,seed,accuracy,"
         "seconds\n";
  for (const RunRecord& run : runs) {
    out << run.dataset << ',' << to_string(run.method) << ','
        << (run.shoestring ? "true" : "false") << ','
        << (run.shoestring ? to_string(run.metric) : "none") << ','
        << run.labels_per_class << ',' << run.seed << ','
        << format_g17(run.accuracy) << ',' << format_g17(run.seconds) << '\n';
  }
}

std::vector<RunRecord> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<RunRecord> runs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line_no == 1) continue;  // header
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (fields.size() != 8) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 8 CSV fields, got " +
                               std::to_string(fields.size()));
    }
    RunRecord run;
    run.dataset = fields[0];
    run.method = parse_method(fields[1]);
    run.shoestring = fields[2] == "true";
    run.metric =
        fields[3] == "none" ? Similarity::Cos : parse_similarity(fields[3]);
    run.labels_per_class = std::stoull(fields[4]);
    run.seed = std::stoull(fields[5]);
    run.accuracy = std::stod(fields[6]);
    run.seconds = std::stod(fields[7]);
    runs.push_back(std::move(run));
  }
  return runs;
}

namespace {

std::tuple<std::string, int, int, int, std::size_t> sort_key(
    const std::string& dataset, Method method, bool shoestring,
    Similarity metric, std::size_t budget) {
  return {dataset, static_cast<int>(method), shoestring ? 1 : 0,
          static_cast<int>(metric), budget};
}

}  // namespace

std::vector<ExperimentResult> aggregate_runs(const std::vector<RunRecord>& runs,
                                             const GridConfig* config) {
  std::vector<ExperimentResult> results;
  for (const RunRecord& run : runs) {
    const Similarity metric = run.shoestring ? run.metric : Similarity::Cos;
    auto it = std::find_if(results.begin(), results.end(),
                           [&](const ExperimentResult& r) {
                             return r.dataset == run.dataset &&
                                    r.method == run.method &&
                                    r.shoestring == run.shoestring &&
                                    (!run.shoestring || r.metric == metric) &&
                                    r.labels_per_class == run.labels_per_class;
                           });
    if (it == results.end()) {
      ExperimentResult r;
      r.dataset = run.dataset;
      r.method = run.method;
      r.shoestring = run.shoestring;
      r.metric = metric;
      r.labels_per_class = run.labels_per_class;
      if (config != nullptr) {
        r.fingerprint = config_fingerprint(*config, run.method, run.shoestring,
                                           metric, run.labels_per_class);
      }
      results.push_back(std::move(r));
      it = results.end() - 1;
    }
    it->seeds.push_back(run.seed);
    it->accuracies.push_back(run.accuracy);
    it->seconds.push_back(run.seconds);
  }
  std::sort(results.begin(), results.end(),
            [](const ExperimentResult& a, const ExperimentResult& b) {
              return sort_key(a.dataset, a.method, a.shoestring, a.metric,
                              a.labels_per_class) <
                     sort_key(b.dataset, b.method, b.shoestring, b.metric,
                              b.labels_per_class);
            });
  return results;
}

void write_summary_json(const std::filesystem::path& path,
                        const GridOutcome& outcome) {
  nlohmann::json summary;
  summary["results"] = nlohmann::json::array();
  for (const ExperimentResult& r : outcome.results) {
    nlohmann::json entry;
    entry["dataset"] = r.dataset;
    entry["method"] = std::string(to_string(r.method));
    entry["shoestring"] = r.shoestring;
    entry["metric"] =
        r.shoestring ? std::string(to_string(r.metric)) : "none";
    entry["labels_per_class"] = r.labels_per_class;
    entry["fingerprint"] = r.fingerprint;
    entry["seeds"] = r.seeds;
    entry["accuracies"] = r.accuracies;
    entry["seconds"] = r.seconds;
    entry["mean_accuracy"] = r.mean_accuracy();
    entry["std_accuracy"] = r.std_accuracy();
    entry["mean_seconds"] = r.mean_seconds();
    summary["results"].push_back(entry);
  }

  // Paired shoestring-vs-baseline gains, matched on (dataset, method,
  // budget) with aligned seed lists.
  summary["paired_gains"] = nlohmann::json::array();
  for (const ExperimentResult& r : outcome.results) {
    if (!r.shoestring) continue;
    for (const ExperimentResult& base : outcome.results) {
      if (base.shoestring || base.dataset != r.dataset ||
          base.method != r.method ||
          base.labels_per_class != r.labels_per_class ||
          base.seeds != r.seeds) {
        continue;
      }
      nlohmann::json entry;
      entry["dataset"] = r.dataset;
      entry["method"] = std::string(to_string(r.method));
      entry["metric"] = std::string(to_string(r.metric));
      entry["labels_per_class"] = r.labels_per_class;
      entry["baseline_mean"] = base.mean_accuracy();
      entry["shoestring_mean"] = r.mean_accuracy();
      entry["mean_gain"] = r.mean_accuracy() - base.mean_accuracy();
      std::vector<double> per_seed;
      for (std::size_t i = 0; i < r.accuracies.size(); ++i) {
        per_seed.push_back(r.accuracies[i] - base.accuracies[i]);
      }
      entry["per_seed_gain"] = per_seed;
      summary["paired_gains"].push_back(entry);
    }
  }

  summary["failures"] = nlohmann::json::array();
  for (const GridFailure& f : outcome.failures) {
    summary["failures"].push_back({{"fingerprint", f.fingerprint},
                                   {"run", f.description},
                                   {"error", f.message}});
  }

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << summary.dump(2) << '\n';
}

std::string report_table(const std::vector<ExperimentResult>& results) {
  if (results.empty()) {
    throw std::invalid_argument("report_table: no results");
  }
  std::vector<std::size_t> budgets;
  for (const auto& r : results) budgets.push_back(r.labels_per_class);
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());

  struct Row {
    std::string label;
    std::tuple<std::string, int, int, int, std::size_t> key;
    std::vector<std::string> cells;
  };
  std::vector<Row> rows;
  auto row_for = [&](const ExperimentResult& r) -> Row& {
    std::string label = r.dataset + " " + std::string(to_string(r.method));
    if (r.shoestring) {
      label += "+shoestring-" + std::string(to_string(r.metric));
    }
    for (Row& row : rows) {
      if (row.label == label) return row;
    }
    rows.push_back({label,
                    sort_key(r.dataset, r.method, r.shoestring, r.metric, 0),
                    std::vector<std::string>(budgets.size(), "-")});
    return rows.back();
  };
  char cell[64];
  for (const auto& r : results) {
    const auto col = static_cast<std::size_t>(
        std::find(budgets.begin(), budgets.end(), r.labels_per_class) -
        budgets.begin());
    std::snprintf(cell, sizeof(cell), "%.1f(%.1f)", 100.0 * r.mean_accuracy(),
                  100.0 * r.std_accuracy());
    row_for(r).cells[col] = cell;
  }
  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return a.key < b.key; });

  std::size_t label_width = std::string("method").size();
  for (const Row& row : rows) label_width = std::max(label_width, row.label.size());
  std::size_t cell_width = 12;

  std::ostringstream out;
  out << std::string(label_width, ' ');
  for (std::size_t b : budgets) {
    const std::string head = std::to_string(b) + " labels";
    out << "  " << head << std::string(cell_width > head.size()
                                           ? cell_width - head.size()
                                           : 0, ' ');
  }
  out << '\n';
  for (const Row& row : rows) {
    out << row.label << std::string(label_width - row.label.size(), ' ');
    for (const std::string& c : row.cells) {
      out << "  " << c
          << std::string(cell_width > c.size() ? cell_width - c.size() : 0,
                         ' ');
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace shoestring
