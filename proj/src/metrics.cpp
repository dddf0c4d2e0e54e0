#include "owcl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace owcl {
namespace {

Scalar safe_ratio(Scalar num, Scalar den) { return den == 0.0 ? 0.0 : num / den; }

Scalar entropy(const std::map<int, long>& counts, Scalar total) {
  Scalar h = 0.0;
  for (const auto& [label, count] : counts) {
    (void)label;
    if (count > 0) {
      const Scalar p = static_cast<Scalar>(count) / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

BasicScores basic_scores(const ConfusionCounts& counts) {
  if (counts.t_pos < 0 || counts.f_pos < 0 || counts.t_neg < 0 || counts.f_neg < 0)
    throw MetricError("basic_scores: negative count");
  const Scalar tp = static_cast<Scalar>(counts.t_pos);
  const Scalar fp = static_cast<Scalar>(counts.f_pos);
  const Scalar tn = static_cast<Scalar>(counts.t_neg);
  const Scalar fn = static_cast<Scalar>(counts.f_neg);

  BasicScores s;
  s.accuracy = safe_ratio(tp + tn, tp + tn + fp + fn);
  s.precision = safe_ratio(tp, tp + fp);
  s.recall = safe_ratio(tp, tp + fn);
  s.specificity = safe_ratio(tn, tn + fp);
  s.f1 = safe_ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
  const Scalar mcc_den =
      std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  s.mcc = safe_ratio(tp * tn - fp * fn, mcc_den);
  s.gm1 = std::sqrt(s.precision * s.recall);
  s.gm2 = std::sqrt(s.recall * s.specificity);
  return s;
}

OpenSetScores open_set_scores(const std::vector<Decision>& decisions,
                              const std::vector<int>& gold, const std::set<int>& known_classes) {
  if (decisions.size() != gold.size())
    throw MetricError("open_set_scores: decisions and gold differ in length");
  if (decisions.empty()) throw MetricError("open_set_scores: no instances");

  const std::size_t n = decisions.size();
  long correct = 0;
  long ood_tp = 0, ood_fp = 0, ood_fn = 0;
  std::map<int, ConfusionCounts> per_known;
  for (int c : known_classes) per_known.emplace(c, ConfusionCounts{});

  for (std::size_t i = 0; i < n; ++i) {
    const bool gold_ood = known_classes.count(gold[i]) == 0;
    const bool rejected = decisions[i].rejected;
    const int predicted = decisions[i].class_id;

    if (gold_ood) {
      if (rejected)
        ++ood_tp;
      else
        ++ood_fn;
      if (rejected) ++correct;
    } else {
      if (rejected)
        ++ood_fp;
      else if (predicted == gold[i])
        ++correct;
    }

    for (auto& [c, cc] : per_known) {
      const bool is_gold = !gold_ood && gold[i] == c;
      const bool is_pred = !rejected && predicted == c;
      if (is_gold && is_pred)
        ++cc.t_pos;
      else if (!is_gold && is_pred)
        ++cc.f_pos;
      else if (is_gold && !is_pred)
        ++cc.f_neg;
      else
        ++cc.t_neg;
    }
  }

  OpenSetScores out;
  out.acc_all = static_cast<Scalar>(correct) / static_cast<Scalar>(n);
  out.f1_ood = safe_ratio(2.0 * static_cast<Scalar>(ood_tp),
                          static_cast<Scalar>(2 * ood_tp + ood_fp + ood_fn));
  Scalar f1_sum = 0.0;
  for (const auto& [c, cc] : per_known) {
    (void)c;
    f1_sum += basic_scores(cc).f1;
  }
  out.f1_known =
      per_known.empty() ? 0.0 : f1_sum / static_cast<Scalar>(per_known.size());
  return out;
}

ClusteringScores clustering_scores(const std::vector<int>& predicted,
                                   const std::vector<int>& gold) {
  if (predicted.size() != gold.size())
    throw MetricError("clustering_scores: partitions differ in length");
  if (predicted.empty()) throw MetricError("clustering_scores: empty partitions");

  const Scalar total = static_cast<Scalar>(predicted.size());
  std::map<int, long> pred_counts, gold_counts;
  std::map<std::pair<int, int>, long> joint;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    ++pred_counts[predicted[i]];
    ++gold_counts[gold[i]];
    ++joint[{predicted[i], gold[i]}];
  }

  // Pair-confusion counts from the contingency table: pairs_both counts
  // pairs co-clustered on both sides, pairs_pred/pairs_gold on one side.
  auto pairs2 = [](Scalar m) { return m * (m - 1.0) / 2.0; };
  Scalar pairs_both = 0.0, pairs_pred = 0.0, pairs_gold = 0.0;
  for (const auto& [labels, count] : joint) {
    (void)labels;
    pairs_both += pairs2(static_cast<Scalar>(count));
  }
  for (const auto& [label, count] : pred_counts) {
    (void)label;
    pairs_pred += pairs2(static_cast<Scalar>(count));
  }
  for (const auto& [label, count] : gold_counts) {
    (void)label;
    pairs_gold += pairs2(static_cast<Scalar>(count));
  }
  const Scalar all_pairs = pairs2(total);
  const Scalar tp = pairs_both;
  const Scalar fp = pairs_pred - pairs_both;
  const Scalar fn = pairs_gold - pairs_both;
  const Scalar tn = all_pairs - pairs_pred - pairs_gold + pairs_both;

  ClusteringScores s;
  // Adjusted Rand via the pair-confusion form; when neither side splits or
  // merges any pair (fp = fn = 0) the partitions are equivalent.
  if (fp == 0.0 && fn == 0.0)
    s.ars = 1.0;
  else
    s.ars = 2.0 * (tp * tn - fn * fp) /
            ((tp + fn) * (fn + tn) + (tp + fp) * (fp + tn));
  s.fms = tp == 0.0 ? 0.0 : tp / std::sqrt((tp + fp) * (tp + fn));

  const Scalar h_pred = entropy(pred_counts, total);
  const Scalar h_gold = entropy(gold_counts, total);
  Scalar mutual = 0.0;
  for (const auto& [labels, count] : joint) {
    const Scalar p = static_cast<Scalar>(count) / total;
    const Scalar pp = static_cast<Scalar>(pred_counts.at(labels.first)) / total;
    const Scalar pg = static_cast<Scalar>(gold_counts.at(labels.second)) / total;
    mutual += p * std::log(p / (pp * pg));
  }
  mutual = std::max(0.0, mutual);
  if (h_pred == 0.0 && h_gold == 0.0)
    s.nmi = 1.0;
  else
    s.nmi = std::clamp(mutual / ((h_pred + h_gold) / 2.0), 0.0, 1.0);

  // Conditional entropies for homogeneity/completeness.
  Scalar h_gold_given_pred = 0.0, h_pred_given_gold = 0.0;
  for (const auto& [labels, count] : joint) {
    const Scalar p = static_cast<Scalar>(count) / total;
    const Scalar np = static_cast<Scalar>(pred_counts.at(labels.first));
    const Scalar ng = static_cast<Scalar>(gold_counts.at(labels.second));
    h_gold_given_pred -= p * std::log(static_cast<Scalar>(count) / np);
    h_pred_given_gold -= p * std::log(static_cast<Scalar>(count) / ng);
  }
  s.homogeneity = h_gold == 0.0 ? 1.0 : std::clamp(1.0 - h_gold_given_pred / h_gold, 0.0, 1.0);
  s.completeness = h_pred == 0.0 ? 1.0 : std::clamp(1.0 - h_pred_given_gold / h_pred, 0.0, 1.0);
  s.v_measure = safe_ratio(2.0 * s.homogeneity * s.completeness,
                           s.homogeneity + s.completeness);
  return s;
}

Scalar incremental_accuracy(const std::vector<Scalar>& per_iteration) {
  if (per_iteration.empty()) throw MetricError("incremental_accuracy: no iterations");
  Scalar sum = 0.0;
  for (Scalar a : per_iteration) sum += a;
  return sum / static_cast<Scalar>(per_iteration.size());
}

}  // namespace owcl
