#pragma once

#include <map>
#include <string>
#include <vector>

#include "owcl/checkpoint.hpp"
#include "owcl/config.hpp"
#include "owcl/dataset.hpp"
#include "owcl/metrics.hpp"

namespace owcl {

struct DriverError : std::runtime_error {
  explicit DriverError(const std::string& what) : std::runtime_error(what) {}
};

/// Class-level openness split plus per-class train/eval document splits.
/// Known labels are sorted; hidden labels are listed in their arrival order.
struct DataSplit {
  std::vector<std::string> known_labels;
  std::vector<std::string> hidden_labels;
  std::map<std::string, std::vector<Index>> train_docs;  // label -> doc indices
  std::map<std::string, std::vector<Index>> eval_docs;
};

/// Withholds ceil(openness * |classes|) classes entirely from initial
/// training; the rest become the known set. Per class, roughly
/// eval_fraction of the documents are held out for evaluation (at least one
/// on each side once a class has two documents). Deterministic under seed.
/// Throws when either side ends up with fewer than two classes.
DataSplit split_openness(const LabeledDataset& dataset, Scalar openness,
                         Scalar eval_fraction, std::uint64_t seed);

struct IterationReport {
  int iteration = 0;
  Index active_classes = 0;          // heads after the update
  Scalar accuracy = 0.0;             // closed accuracy over scheduled eval docs
  Scalar old_class_accuracy = 0.0;   // same, restricted to the seed classes
  OpenSetScores open_set;            // scored before the update (after, at iteration 1)
  std::vector<std::string> discovered_labels;
  bool clustering_scored = false;
  ClusteringScores clustering;       // refined assignments vs pooled gold
  Index memory_total = 0;
  std::map<std::string, Index> memory_per_class;  // label -> stored exemplars
  std::vector<Scalar> epoch_losses;
};

struct ExperimentReport {
  Index memory_budget = 0;
  std::vector<IterationReport> iterations;
  Scalar average_incremental_accuracy = 0.0;
};

struct ExperimentResult {
  ExperimentReport report;
  Checkpoint checkpoint;  // final model + memory for this budget
};

/// One full schedule at a fixed memory budget: seed-class training, then per
/// iteration score -> reject -> cluster -> label -> extend -> distill-retrain
/// -> rebalance. State is rebuilt from scratch (fresh generator seeded with
/// config.seed), so iteration 1 is identical across budgets.
ExperimentResult run_experiment(const LabeledDataset& dataset,
                                const ExperimentConfig& config, Index memory_budget);

struct RunReport {
  std::vector<ExperimentReport> budgets;
};

struct RunResult {
  RunReport report;
  std::vector<Checkpoint> checkpoints;  // one per budget, same order
};

/// run_experiment across every configured budget.
RunResult run_all_budgets(const LabeledDataset& dataset, const ExperimentConfig& config);

/// Aligned per-budget tables, every number rendered with three decimals.
std::string render_human_report(const RunReport& report);

/// Canonical structured rendering with full-precision numbers. Contains no
/// paths or timestamps, so identical runs produce identical bytes.
std::string render_machine_report(const RunReport& report);

/// Registry, head count, snapshot presence, and memory occupancy of a saved
/// checkpoint.
std::string render_checkpoint_summary(const Checkpoint& checkpoint);

}  // namespace owcl
