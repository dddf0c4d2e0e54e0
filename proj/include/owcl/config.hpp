#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "owcl/birch.hpp"
#include "owcl/labeler.hpp"
#include "owcl/numeric.hpp"
#include "owcl/types.hpp"

namespace owcl {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ModelConfig {
  Index hidden1 = 64;
  Index hidden2 = 32;
  Index embedding_dim = 32;               // token path only
  std::vector<int> filter_windows = {2, 3, 4};
  int padded_length = 32;
};

struct ClusteringConfig {
  CFTreeParams tree;
  std::optional<Scalar> rebuild_threshold;
  int outlier_floor = 2;
  Scalar outlier_multiplier = 3.0;
  /// When true the number of clusters comes from the merge-distance gap rule
  /// instead of the arrival schedule.
  bool auto_cluster_count = false;
};

/// One experiment: dataset, openness split, arrival schedule, and every knob
/// the pipeline exposes. Loaded from a JSON file whose unknown keys are
/// rejected.
struct ExperimentConfig {
  std::string dataset_path;
  std::uint64_t seed = 1;
  Scalar openness = 0.25;
  std::vector<Index> schedule;            // cumulative class counts; empty = single iteration
  std::vector<Index> memory_budgets = {250, 500, 1000, 1500};
  Scalar eval_fraction = 0.3;
  Scalar temperature = 2.0;
  Scalar rejection_gamma = 0.5;
  bool use_distillation = true;
  OptimizerConfig optimizer;
  int batch_size = 32;
  ModelConfig model;
  ClusteringConfig clustering;
  LabelerParams labeler;
  std::string stopwords_path;             // empty = embedded default list
  std::vector<int> ablation_ks = {2, 3, 4};

  void validate() const;
};

/// Parses and validates a config file. Syntax errors carry `path:line:`;
/// schema errors name the offending key. Relative dataset and stopword paths
/// resolve against the config file's directory.
ExperimentConfig load_config(const std::string& path);

}  // namespace owcl
