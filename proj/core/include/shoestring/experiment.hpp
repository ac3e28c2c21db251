#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shoestring/config.hpp"
#include "shoestring/data_io.hpp"
#include "shoestring/trainer.hpp"

namespace shoestring {

/// One executed training run (one CSV row).
struct RunRecord {
  std::string dataset;
  Method method = Method::Gcn;
  bool shoestring = false;
  Similarity metric = Similarity::Cos;  // meaningful when shoestring is set
  std::size_t labels_per_class = 1;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double seconds = 0.0;
};

/// Per-configuration aggregate over the seed list.
struct ExperimentResult {
  std::string dataset;
  Method method = Method::Gcn;
  bool shoestring = false;
  Similarity metric = Similarity::Cos;
  std::size_t labels_per_class = 1;
  std::string fingerprint;  // hash of every setting that shaped the runs
  std::vector<std::uint64_t> seeds;
  std::vector<double> accuracies;
  std::vector<double> seconds;

  double mean_accuracy() const;
  double std_accuracy() const;  // population standard deviation
  double mean_seconds() const;
};

/// Which sides of the baseline/shoestring comparison a grid runs.
enum class ShoestringMode { BaselineOnly, ShoestringOnly, Both };

struct GridConfig {
  std::string dataset = "sbm";
  std::filesystem::path data_dir;  // empty: default_data_dir()
  std::vector<Method> methods{Method::Gcn};
  std::vector<Similarity> metrics{Similarity::Cos};
  std::vector<std::size_t> budgets{1};
  ShoestringMode mode = ShoestringMode::Both;
  std::size_t num_seeds = 20;
  std::uint64_t base_seed = 0;
  TrainConfig base;  // shared hyperparameters (method/metric/seed overwritten)
  bool row_normalize = true;

  // Synthetic substrate used when dataset == "sbm".
  std::size_t sbm_n = 400;
  std::size_t sbm_classes = 4;
  double sbm_p_in = 0.10;
  double sbm_p_out = 0.01;
  std::size_t sbm_feature_dim = 16;
  double sbm_noise = 0.5;
  std::uint64_t sbm_seed = 1;

  std::filesystem::path out_dir = "results";
  std::size_t jobs = 1;

  static GridConfig from_config(const KeyValueConfig& kv);
};

struct GridFailure {
  std::string fingerprint;
  std::string description;  // config summary
  std::string message;
};

struct GridOutcome {
  std::vector<RunRecord> runs;
  std::vector<ExperimentResult> results;
  std::vector<GridFailure> failures;
  std::filesystem::path csv_path;
  std::filesystem::path summary_path;
};

/// Executes the full method x metric x budget x seed grid, writes
/// results.csv and summary.json under out_dir, and keeps going past
/// individual run failures (recorded in the outcome).
GridOutcome run_grid(const GridConfig& config);

/// Runs a grid against an already-loaded dataset (no file I/O).
GridOutcome run_grid_on(const GridConfig& config, const Dataset& dataset);

void write_results_csv(const std::filesystem::path& path,
                       const std::vector<RunRecord>& runs);
std::vector<RunRecord> read_results_csv(const std::filesystem::path& path);

/// Groups per-run rows back into per-configuration aggregates.
std::vector<ExperimentResult> aggregate_runs(const std::vector<RunRecord>& runs,
                                             const GridConfig* config = nullptr);

void write_summary_json(const std::filesystem::path& path,
                        const GridOutcome& outcome);

/// Fixed-width text table: one row per (method, shoestring, metric), one
/// column per label budget, cells mean(std) in percent.
std::string report_table(const std::vector<ExperimentResult>& results);

/// FNV-1a hash (hex) over the canonical form of all settings of one grid
/// cell; stable across runs and machines.
std::string config_fingerprint(const GridConfig& grid, Method method,
                               bool shoestring, Similarity metric,
                               std::size_t labels_per_class);

}  // namespace shoestring
