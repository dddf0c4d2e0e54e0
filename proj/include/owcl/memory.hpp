#pragma once

#include <map>
#include <string>
#include <vector>

#include "owcl/classifier.hpp"
#include "owcl/dataset.hpp"
#include "owcl/types.hpp"

namespace owcl {

struct MemoryError : std::runtime_error {
  explicit MemoryError(const std::string& what) : std::runtime_error(what) {}
};

/// A stored sample: the original document plus the feature vector it had when
/// it was selected. Freezing the vector keeps the memory's contents
/// independent of later encoder drift.
struct Exemplar {
  EmbeddedDocument doc;
  Vector feature;
};

/// Fixed-budget exemplar store. Lists are kept in herding order, most
/// representative first, so trimming is always a prefix cut.
struct ExemplarMemory {
  Index budget = 0;                                // K
  std::map<int, std::vector<Exemplar>> per_class;  // class id -> herding order

  Index class_count() const { return static_cast<Index>(per_class.size()); }
  Index total_stored() const;
  /// Per-class cap floor(K / c) for the current class count; budget when empty.
  Index per_class_cap() const;
  /// Throws unless total <= K and every list fits the per-class cap.
  void check_budget() const;
};

/// Greedy herding order: at step i pick the unselected vector whose inclusion
/// maximizes the cosine similarity between the running mean of the selection
/// and the fixed class mean. Ties break toward the lower index. Throws on
/// zero vectors, a zero class mean, or n > |class_vectors|.
std::vector<Index> herd_select(const std::vector<Vector>& class_vectors, Index n);

/// Re-divides the budget over old plus new classes: every class keeps at most
/// floor(K / c') exemplars, existing lists are truncated to their prefix
/// (removed samples never return), and each new class is filled from its
/// candidates via herd_select. `new_data` must carry exactly the classes
/// named in `new_class_ids`; duplicate or already-stored ids are errors.
ExemplarMemory rebalance(const ExemplarMemory& memory, const std::vector<int>& new_class_ids,
                         const std::map<int, std::vector<Exemplar>>& new_data);

/// Multiset union of every stored exemplar and the incoming labeled data,
/// shuffled with the experiment's generator.
TrainingSet build_training_set(const ExemplarMemory& memory, const TrainingSet& new_data,
                               Rng& rng);

}  // namespace owcl
