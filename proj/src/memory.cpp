#include "owcl/memory.hpp"

#include <algorithm>
#include <set>

#include "owcl/numeric.hpp"

namespace owcl {

Index ExemplarMemory::total_stored() const {
  Index total = 0;
  for (const auto& [id, list] : per_class) {
    (void)id;
    total += static_cast<Index>(list.size());
  }
  return total;
}

Index ExemplarMemory::per_class_cap() const {
  return per_class.empty() ? budget : budget / class_count();
}

void ExemplarMemory::check_budget() const {
  if (budget <= 0) throw MemoryError("memory: budget must be positive");
  if (total_stored() > budget) throw MemoryError("memory: budget exceeded");
  const Index cap = per_class_cap();
  for (const auto& [id, list] : per_class)
    if (static_cast<Index>(list.size()) > cap)
      throw MemoryError("memory: class " + std::to_string(id) + " exceeds per-class cap");
}

std::vector<Index> herd_select(const std::vector<Vector>& class_vectors, Index n) {
  const Index total = static_cast<Index>(class_vectors.size());
  if (n < 0) throw MemoryError("herd_select: negative selection size");
  if (n > total) throw MemoryError("herd_select: asked for more vectors than available");
  if (n == 0) return {};

  const Index dim = class_vectors.front().size();
  Vector mean = Vector::Zero(dim);
  for (const Vector& v : class_vectors) {
    if (v.size() != dim) throw MemoryError("herd_select: inconsistent dimensions");
    if (v.norm() == 0.0) throw MemoryError("herd_select: zero vector present");
    mean += v;
  }
  mean /= static_cast<Scalar>(total);
  if (mean.norm() == 0.0) throw MemoryError("herd_select: class mean is zero");

  std::vector<Index> order;
  std::vector<bool> taken(static_cast<std::size_t>(total), false);
  Vector sum = Vector::Zero(dim);
  for (Index step = 0; step < n; ++step) {
    Index best = -1;
    Scalar best_score = 0.0;
    for (Index i = 0; i < total; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      // The running mean (sum + x)/(step+1) has the same direction as
      // sum + x, so the divisor can be dropped from the cosine.
      const Scalar score = cosine_similarity(sum + class_vectors[static_cast<std::size_t>(i)], mean);
      if (best < 0 || score > best_score) {
        best = i;
        best_score = score;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    order.push_back(best);
    sum += class_vectors[static_cast<std::size_t>(best)];
  }
  return order;
}

ExemplarMemory rebalance(const ExemplarMemory& memory, const std::vector<int>& new_class_ids,
                         const std::map<int, std::vector<Exemplar>>& new_data) {
  if (memory.budget <= 0) throw MemoryError("rebalance: budget must be positive");

  std::set<int> incoming;
  for (int id : new_class_ids) {
    if (!incoming.insert(id).second)
      throw MemoryError("rebalance: duplicate class id " + std::to_string(id));
    if (memory.per_class.count(id))
      throw MemoryError("rebalance: class " + std::to_string(id) + " already stored");
  }
  if (new_data.size() != incoming.size())
    throw MemoryError("rebalance: new_data does not match new_class_ids");
  for (const auto& [id, list] : new_data) {
    (void)list;
    if (!incoming.count(id))
      throw MemoryError("rebalance: data for unlisted class " + std::to_string(id));
  }

  ExemplarMemory next;
  next.budget = memory.budget;
  const Index classes = memory.class_count() + static_cast<Index>(incoming.size());
  if (classes == 0) return next;
  const Index cap = memory.budget / classes;

  for (const auto& [id, list] : memory.per_class) {
    std::vector<Exemplar> kept = list;
    if (static_cast<Index>(kept.size()) > cap) kept.resize(static_cast<std::size_t>(cap));
    next.per_class.emplace(id, std::move(kept));
  }
  for (int id : new_class_ids) {
    const std::vector<Exemplar>& candidates = new_data.at(id);
    std::vector<Vector> features;
    features.reserve(candidates.size());
    for (const Exemplar& e : candidates) features.push_back(e.feature);
    const Index take = std::min<Index>(cap, static_cast<Index>(candidates.size()));
    std::vector<Exemplar> chosen;
    chosen.reserve(static_cast<std::size_t>(take));
    for (Index idx : herd_select(features, take))
      chosen.push_back(candidates[static_cast<std::size_t>(idx)]);
    next.per_class.emplace(id, std::move(chosen));
  }
  next.check_budget();
  return next;
}

TrainingSet build_training_set(const ExemplarMemory& memory, const TrainingSet& new_data,
                               Rng& rng) {
  TrainingSet out;
  out.reserve(static_cast<std::size_t>(memory.total_stored()) + new_data.size());
  for (const auto& [id, list] : memory.per_class)
    for (const Exemplar& e : list) out.push_back({e.doc, id});
  out.insert(out.end(), new_data.begin(), new_data.end());
  rng.shuffle(out);
  return out;
}

}  // namespace owcl
