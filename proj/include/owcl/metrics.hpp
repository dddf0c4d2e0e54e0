#pragma once

#include <set>
#include <string>
#include <vector>

#include "owcl/classifier.hpp"
#include "owcl/types.hpp"

namespace owcl {

struct MetricError : std::runtime_error {
  explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

/// One-vs-rest confusion counts for a single class.
struct ConfusionCounts {
  long t_pos = 0;
  long f_pos = 0;
  long t_neg = 0;
  long f_neg = 0;
};

struct BasicScores {
  Scalar accuracy = 0.0;
  Scalar precision = 0.0;
  Scalar recall = 0.0;
  Scalar specificity = 0.0;
  Scalar f1 = 0.0;
  Scalar mcc = 0.0;
  Scalar gm1 = 0.0;  // sqrt(precision * recall)
  Scalar gm2 = 0.0;  // sqrt(recall * specificity)
};

/// Confusion-matrix scores with zero-denominator fallbacks: precision,
/// recall, specificity, f1, and mcc all fall back to 0 when undefined.
BasicScores basic_scores(const ConfusionCounts& counts);

struct OpenSetScores {
  Scalar acc_all = 0.0;   // accuracy over known classes plus the OOD class
  Scalar f1_ood = 0.0;    // F1 of the synthetic rejected/OOD class
  Scalar f1_known = 0.0;  // macro-F1 over the known classes
};

/// Scores open-set decisions against gold class ids. Every gold id outside
/// `known_classes` belongs to the synthetic OOD class, which a decision hits
/// by rejecting. f1_ood falls back to 0 when OOD never occurs.
OpenSetScores open_set_scores(const std::vector<Decision>& decisions,
                              const std::vector<int>& gold, const std::set<int>& known_classes);

struct ClusteringScores {
  Scalar ars = 0.0;
  Scalar nmi = 0.0;
  Scalar fms = 0.0;
  Scalar homogeneity = 0.0;
  Scalar completeness = 0.0;
  Scalar v_measure = 0.0;
};

/// Agreement between a predicted and a gold partition of the same points.
/// ARS and FMS count point pairs; NMI is mutual information normalized by
/// the arithmetic mean of the two entropies; v = 2hc/(h+c). All six are
/// invariant under relabeling on either side.
ClusteringScores clustering_scores(const std::vector<int>& predicted,
                                   const std::vector<int>& gold);

/// Arithmetic mean of per-iteration accuracies.
Scalar incremental_accuracy(const std::vector<Scalar>& per_iteration);

}  // namespace owcl
