// Experiment CLI: grid execution, report tables, embedding export and
// synthetic dataset generation. Exit codes: 0 success, 1 at least one run
// failed, 2 configuration error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "shoestring/config.hpp"
#include "shoestring/data_io.hpp"
#include "shoestring/experiment.hpp"
#include "shoestring/trainer.hpp"

namespace {

using namespace shoestring;

constexpr int kExitOk = 0;
constexpr int kExitRunFailed = 1;
constexpr int kExitConfigError = 2;

// Known keys a config file or CLI override may set for `run` and
// `export-embeddings`; mirrors TrainConfig plus grid controls.
const std::vector<std::string> kConfigKeys = {
    "dataset", "data_dir", "method", "methods", "metric", "metrics",
    "budgets", "labels_per_class", "shoestring", "seeds", "base_seed",
    "lambda", "lr", "dropout", "weight_decay", "weight_decay_all", "epochs",
    "hidden", "filter", "filter_k", "filter_alpha", "lp_alpha",
    "embedding_layer", "stop_gradient_centroids", "row_normalize", "sbm_n",
    "sbm_classes", "sbm_p_in", "sbm_p_out", "sbm_feature_dim", "sbm_noise",
    "sbm_seed", "out_dir", "jobs", "seed"};

struct KeyOverrides {
  std::map<std::string, std::string> values;
};

// Registers one --flag per config key; flags given on the command line
// override the config file.
void add_override_flags(CLI::App* cmd, KeyOverrides& overrides) {
  for (const std::string& key : kConfigKeys) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    cmd->add_option_function<std::string>(
           flag,
           [&overrides, key](const std::string& value) {
             overrides.values[key] = value;
           },
           "override config key '" + key + "'")
        ->expected(1);
  }
}

KeyValueConfig merge_config(const std::string& config_path,
                            const KeyOverrides& overrides) {
  KeyValueConfig kv;
  if (!config_path.empty()) {
    kv = KeyValueConfig::from_file(config_path);
  }
  for (const auto& [key, value] : overrides.values) {
    kv.set(key, value);
  }
  return kv;
}

Dataset load_grid_dataset(const GridConfig& grid) {
  if (grid.dataset == "sbm") {
    return sbm_generate(grid.sbm_n, grid.sbm_classes, grid.sbm_p_in,
                        grid.sbm_p_out, grid.sbm_feature_dim, grid.sbm_noise,
                        grid.sbm_seed);
  }
  const auto dir = grid.data_dir.empty() ? default_data_dir() : grid.data_dir;
  CitationLoadOptions options;
  options.row_normalize = grid.row_normalize;
  return load_named_dataset(grid.dataset, dir, options);
}

int cmd_run(const std::string& config_path, const KeyOverrides& overrides) {
  const KeyValueConfig kv = merge_config(config_path, overrides);
  const GridConfig grid = GridConfig::from_config(kv);
  const GridOutcome outcome = run_grid(grid);

  std::cout << report_table(outcome.results);
  std::cout << "\nwrote " << outcome.csv_path.string() << " and "
            << outcome.summary_path.string() << "\n";
  if (!outcome.failures.empty()) {
    std::cout << outcome.failures.size() << " run(s) failed\n";
    return kExitRunFailed;
  }
  return kExitOk;
}

int cmd_report(const std::string& csv_path) {
  const auto runs = read_results_csv(csv_path);
  std::cout << report_table(aggregate_runs(runs));
  return kExitOk;
}

int cmd_export(const std::string& config_path, const KeyOverrides& overrides,
               const std::string& out_path) {
  const KeyValueConfig kv = merge_config(config_path, overrides);
  GridConfig grid = GridConfig::from_config(kv);
  const Dataset dataset = load_grid_dataset(grid);

  TrainConfig config = grid.base;
  config.method = grid.methods.front();
  config.shoestring = kv.get_bool("shoestring", true);
  config.metric = grid.metrics.empty() ? Similarity::Cos : grid.metrics.front();
  config.seed = kv.get_u64("seed", grid.base_seed);

  const SplitSpec split =
      sample_split(dataset, grid.budgets.front(), config.seed);
  const ModelState model = train(config, dataset.graph, dataset.features,
                                 dataset.labels, split.labeled);
  const DenseMatrix z = embed(model, dataset.graph, dataset.features);
  export_embeddings(z, dataset.labels, out_path);
  std::cout << "wrote " << z.rows() << " embedding rows to " << out_path
            << "\n";
  return kExitOk;
}

int cmd_gen_sbm(std::size_t n, std::size_t classes, double p_in, double p_out,
                std::size_t feature_dim, double noise, std::uint64_t seed,
                const std::string& out_dir, const std::string& name) {
  const Dataset ds =
      sbm_generate(n, classes, p_in, p_out, feature_dim, noise, seed);
  write_citation_files(ds, out_dir, name);
  std::cout << "wrote " << name << ".content / " << name << ".cites ("
            << ds.graph.n << " nodes, " << edge_count(ds.graph)
            << " edges) under " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shoestring: graph semi-supervised learning experiments"};
  app.require_subcommand(1);

  std::string config_path;
  KeyOverrides run_overrides;
  CLI::App* run = app.add_subcommand("run", "execute an experiment grid");
  run->add_option("--config", config_path, "key = value config file");
  add_override_flags(run, run_overrides);

  std::string csv_path;
  CLI::App* report =
      app.add_subcommand("report", "print a results table from a CSV");
  report->add_option("--csv", csv_path, "results.csv from a previous run")
      ->required();

  std::string export_config;
  std::string export_out = "embeddings.csv";
  KeyOverrides export_overrides;
  CLI::App* exp = app.add_subcommand(
      "export-embeddings", "train one model and export its embeddings");
  exp->add_option("--config", export_config, "key = value config file");
  exp->add_option("--out", export_out, "output CSV path");
  add_override_flags(exp, export_overrides);

  std::size_t sbm_n = 400;
  std::size_t sbm_classes = 4;
  double sbm_p_in = 0.10;
  double sbm_p_out = 0.01;
  std::size_t sbm_feature_dim = 16;
  double sbm_noise = 0.5;
  std::uint64_t sbm_seed = 1;
  std::string sbm_out = "data/sbm";
  std::string sbm_name = "sbm";
  CLI::App* gen =
      app.add_subcommand("gen-sbm", "write a synthetic SBM dataset");
  gen->add_option("--n", sbm_n, "node count");
  gen->add_option("--classes", sbm_classes, "number of blocks");
  gen->add_option("--p-in", sbm_p_in, "intra-block edge probability");
  gen->add_option("--p-out", sbm_p_out, "inter-block edge probability");
  gen->add_option("--feature-dim", sbm_feature_dim, "feature dimension");
  gen->add_option("--noise", sbm_noise, "feature noise amplitude");
  gen->add_option("--seed", sbm_seed, "generator seed");
  gen->add_option("--out-dir", sbm_out, "output directory");
  gen->add_option("--name", sbm_name, "dataset name (file prefix)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, run_overrides);
    if (report->parsed()) return cmd_report(csv_path);
    if (exp->parsed()) {
      return cmd_export(export_config, export_overrides, export_out);
    }
    if (gen->parsed()) {
      return cmd_gen_sbm(sbm_n, sbm_classes, sbm_p_in, sbm_p_out,
                         sbm_feature_dim, sbm_noise, sbm_seed, sbm_out,
                         sbm_name);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailed;
  }
  return kExitOk;
}
