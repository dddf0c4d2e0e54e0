#include "owcl/driver.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "owcl/birch.hpp"
#include "owcl/labeler.hpp"
#include "owcl/memory.hpp"

namespace owcl {
namespace {

using Json = nlohmann::ordered_json;

/// Feature vector used for clustering, herding, and memory storage. Documents
/// with precomputed embeddings use them directly so the stored geometry does
/// not drift with the encoder; token documents go through the encoder.
Vector representation(const EmbeddedDocument& doc, const ModelState& model) {
  if (doc.embedding) return *doc.embedding;
  return encode(doc, model.encoder);
}

/// Max-weight one-to-one matching between clusters (rows) and gold labels
/// (columns); zero-weight pairs never match. Exact bitmask DP up to 16
/// labels, greedy beyond that. Returns the matched column per row, -1 for
/// unmatched rows.
std::vector<int> best_assignment(const std::vector<std::vector<long>>& weight,
                                 std::size_t n_labels) {
  const std::size_t m = weight.size();
  std::vector<int> result(m, -1);
  if (m == 0 || n_labels == 0) return result;

  if (n_labels <= 16) {
    const std::size_t masks = std::size_t(1) << n_labels;
    std::vector<std::vector<long>> dp(m + 1, std::vector<long>(masks, -1));
    dp[0][0] = 0;
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t mask = 0; mask < masks; ++mask) {
        const long base = dp[j][mask];
        if (base < 0) continue;
        if (base > dp[j + 1][mask]) dp[j + 1][mask] = base;
        for (std::size_t l = 0; l < n_labels; ++l) {
          if (mask & (std::size_t(1) << l)) continue;
          if (weight[j][l] <= 0) continue;
          const std::size_t next = mask | (std::size_t(1) << l);
          if (base + weight[j][l] > dp[j + 1][next]) dp[j + 1][next] = base + weight[j][l];
        }
      }
    }
    std::size_t mask = 0;
    for (std::size_t cand = 1; cand < masks; ++cand)
      if (dp[m][cand] > dp[m][mask]) mask = cand;
    for (std::size_t j = m; j > 0; --j) {
      if (dp[j][mask] == dp[j - 1][mask]) continue;  // row j-1 left unmatched
      for (std::size_t l = 0; l < n_labels; ++l) {
        const std::size_t bit = std::size_t(1) << l;
        if (!(mask & bit) || weight[j - 1][l] <= 0) continue;
        if (dp[j - 1][mask ^ bit] >= 0 &&
            dp[j - 1][mask ^ bit] + weight[j - 1][l] == dp[j][mask]) {
          result[j - 1] = static_cast<int>(l);
          mask ^= bit;
          break;
        }
      }
    }
    return result;
  }

  std::vector<bool> row_used(m, false), col_used(n_labels, false);
  for (;;) {
    long best = 0;
    std::size_t bj = 0, bl = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (row_used[j]) continue;
      for (std::size_t l = 0; l < n_labels; ++l) {
        if (col_used[l]) continue;
        if (weight[j][l] > best) {
          best = weight[j][l];
          bj = j;
          bl = l;
        }
      }
    }
    if (best <= 0) break;
    result[bj] = static_cast<int>(bl);
    row_used[bj] = true;
    col_used[bl] = true;
  }
  return result;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

DataSplit split_openness(const LabeledDataset& dataset, Scalar openness,
                         Scalar eval_fraction, std::uint64_t seed) {
  if (!(openness > 0.0 && openness < 1.0))
    throw DriverError("split_openness: openness must lie strictly between 0 and 1");
  if (!(eval_fraction > 0.0 && eval_fraction < 1.0))
    throw DriverError("split_openness: eval_fraction must lie strictly between 0 and 1");
  const std::vector<std::string>& classes = dataset.class_labels;
  const std::size_t total = classes.size();
  const auto withheld =
      static_cast<std::size_t>(std::ceil(openness * static_cast<Scalar>(total) - 1e-9));
  if (withheld < 2)
    throw DriverError("split_openness: fewer than 2 classes withheld; raise openness");
  if (total - withheld < 2)
    throw DriverError("split_openness: fewer than 2 known classes remain; lower openness");

  Rng rng(seed);
  std::vector<std::string> order = classes;
  rng.shuffle(order);

  DataSplit split;
  split.hidden_labels.assign(order.begin(), order.begin() + static_cast<long>(withheld));
  split.known_labels.assign(order.begin() + static_cast<long>(withheld), order.end());
  std::sort(split.known_labels.begin(), split.known_labels.end());

  std::map<std::string, std::vector<Index>> by_label;
  for (std::size_t i = 0; i < dataset.docs.size(); ++i)
    by_label[dataset.docs[i].gold_label].push_back(static_cast<Index>(i));

  for (const std::string& label : classes) {
    std::vector<Index> indices = by_label[label];
    rng.shuffle(indices);
    const std::size_t n = indices.size();
    std::size_t eval_count = 0;
    if (n >= 2) {
      eval_count = static_cast<std::size_t>(std::floor(eval_fraction * static_cast<Scalar>(n)));
      eval_count = std::clamp<std::size_t>(eval_count, 1, n - 1);
    }
    std::vector<Index> eval_part(indices.begin(), indices.begin() + static_cast<long>(eval_count));
    std::vector<Index> train_part(indices.begin() + static_cast<long>(eval_count), indices.end());
    std::sort(eval_part.begin(), eval_part.end());
    std::sort(train_part.begin(), train_part.end());
    split.eval_docs[label] = std::move(eval_part);
    split.train_docs[label] = std::move(train_part);
  }
  return split;
}

ExperimentResult run_experiment(const LabeledDataset& dataset,
                                const ExperimentConfig& config, Index memory_budget) {
  if (memory_budget < 1) throw DriverError("run_experiment: memory budget must be positive");
  if (dataset.docs.empty()) throw DriverError("run_experiment: empty dataset");

  const DataSplit split =
      split_openness(dataset, config.openness, config.eval_fraction, config.seed);
  const auto known_count = static_cast<Index>(split.known_labels.size());
  const auto class_total = known_count + static_cast<Index>(split.hidden_labels.size());

  std::vector<Index> schedule = config.schedule;
  if (schedule.empty()) schedule = {known_count};
  if (schedule.front() != known_count)
    throw DriverError("run_experiment: schedule opens with " +
                      std::to_string(schedule.front()) + " classes but the openness split has " +
                      std::to_string(known_count) + " known classes");
  if (schedule.back() > class_total)
    throw DriverError("run_experiment: schedule exceeds the dataset's class count");

  const std::set<std::string> stopwords = config.stopwords_path.empty()
                                              ? default_stopwords()
                                              : load_stopwords(config.stopwords_path);

  Rng rng(config.seed);
  ModelState model =
      dataset.embedding_dim > 0
          ? make_external_model(dataset.embedding_dim, config.model.hidden1,
                                config.model.hidden2, rng)
          : make_token_model(dataset.vocab.size(), config.model.embedding_dim,
                             config.model.filter_windows, config.model.hidden1,
                             config.model.hidden2, rng);

  std::vector<ClassInfo> seed_infos;
  for (const std::string& label : split.known_labels)
    seed_infos.push_back({label, {ClassProvenance::kSeed, 0}});
  model = add_heads(model, seed_infos, rng);

  std::map<std::string, int> gold_to_class;
  for (std::size_t i = 0; i < split.known_labels.size(); ++i)
    gold_to_class[split.known_labels[i]] = static_cast<int>(i);
  const std::set<std::string> seed_set(split.known_labels.begin(), split.known_labels.end());

  ExemplarMemory memory;
  memory.budget = memory_budget;

  TrainOptions options;
  options.optimizer = config.optimizer;
  options.temperature = config.temperature;
  options.batch_size = config.batch_size;
  options.use_distillation = config.use_distillation;

  ExperimentReport report;
  report.memory_budget = memory_budget;

  const auto decide = [&](const EmbeddedDocument& doc) {
    const RejectionPolicy policy =
        RejectionPolicy::uniform(model.heads.count(), config.rejection_gamma);
    return classify_open(score(doc, model), policy);
  };

  // Closed accuracy over the eval documents of `labels`; a rejection or an
  // unmapped gold class counts as a miss.
  const auto closed_accuracy = [&](const std::vector<std::string>& labels, bool seeds_only) {
    long total = 0;
    long correct = 0;
    for (const std::string& label : labels) {
      if (seeds_only && !seed_set.count(label)) continue;
      const auto mapped = gold_to_class.find(label);
      for (Index idx : split.eval_docs.at(label)) {
        ++total;
        const Decision d = decide(dataset.docs[static_cast<std::size_t>(idx)]);
        if (!d.rejected && mapped != gold_to_class.end() && d.class_id == mapped->second)
          ++correct;
      }
    }
    return total == 0 ? 0.0 : static_cast<Scalar>(correct) / static_cast<Scalar>(total);
  };

  const auto fill_memory_stats = [&](IterationReport& ir) {
    ir.memory_total = memory.total_stored();
    for (const auto& [class_id, list] : memory.per_class) {
      const auto& label = model.heads.registry[static_cast<std::size_t>(class_id)].label;
      ir.memory_per_class[label] = static_cast<Index>(list.size());
    }
  };

  std::vector<std::string> active_labels = split.known_labels;
  std::size_t hidden_cursor = 0;

  // Iteration 1: supervised fit on the seed classes, then memory seeding.
  {
    TrainingSet fresh;
    for (const std::string& label : split.known_labels)
      for (Index idx : split.train_docs.at(label))
        fresh.push_back({dataset.docs[static_cast<std::size_t>(idx)], gold_to_class.at(label)});
    const TrainingSet ts = build_training_set(memory, fresh, rng);
    auto [trained, training_report] = train(model, ts, options, rng);
    model = std::move(trained);

    std::vector<int> seed_ids;
    std::map<int, std::vector<Exemplar>> seed_data;
    for (const std::string& label : split.known_labels) {
      const int class_id = gold_to_class.at(label);
      seed_ids.push_back(class_id);
      auto& list = seed_data[class_id];
      for (Index idx : split.train_docs.at(label)) {
        const EmbeddedDocument& doc = dataset.docs[static_cast<std::size_t>(idx)];
        list.push_back({doc, representation(doc, model)});
      }
    }
    memory = rebalance(memory, seed_ids, seed_data);

    IterationReport ir;
    ir.iteration = 1;
    ir.active_classes = model.heads.count();
    ir.epoch_losses = training_report.epoch_losses;
    ir.accuracy = closed_accuracy(active_labels, false);
    ir.old_class_accuracy = ir.accuracy;

    std::vector<Decision> decisions;
    std::vector<int> gold;
    for (const std::string& label : active_labels)
      for (Index idx : split.eval_docs.at(label)) {
        decisions.push_back(decide(dataset.docs[static_cast<std::size_t>(idx)]));
        gold.push_back(gold_to_class.at(label));
      }
    std::set<int> known_ids;
    for (int c = 0; c < static_cast<int>(model.heads.count()); ++c) known_ids.insert(c);
    ir.open_set = open_set_scores(decisions, gold, known_ids);

    fill_memory_stats(ir);
    report.iterations.push_back(ir);
  }

  for (std::size_t it = 2; it <= schedule.size(); ++it) {
    const Index arrival_count = schedule[it - 1] - schedule[it - 2];
    std::vector<std::string> arrival_labels;
    for (Index a = 0; a < arrival_count; ++a)
      arrival_labels.push_back(split.hidden_labels.at(hidden_cursor++));

    // Incoming stream: the new classes' training documents (the novelty to be
    // discovered) plus the eval documents of every class scheduled active
    // through this iteration. Eval documents are never trained on or stored.
    std::vector<std::pair<std::string, Index>> arrival_train;
    for (const std::string& label : arrival_labels)
      for (Index idx : split.train_docs.at(label)) arrival_train.emplace_back(label, idx);

    std::vector<std::pair<std::string, Index>> stream = arrival_train;
    for (const std::string& label : active_labels)
      for (Index idx : split.eval_docs.at(label)) stream.emplace_back(label, idx);
    for (const std::string& label : arrival_labels)
      for (Index idx : split.eval_docs.at(label)) stream.emplace_back(label, idx);

    // Pre-update open decisions over the whole stream.
    std::vector<Decision> decisions;
    std::vector<int> gold;
    decisions.reserve(stream.size());
    for (const auto& [label, idx] : stream) {
      decisions.push_back(decide(dataset.docs[static_cast<std::size_t>(idx)]));
      const auto mapped = gold_to_class.find(label);
      gold.push_back(mapped == gold_to_class.end() ? -1 : mapped->second);
    }
    std::set<int> known_ids;
    for (int c = 0; c < static_cast<int>(model.heads.count()); ++c) known_ids.insert(c);

    IterationReport ir;
    ir.iteration = static_cast<int>(it);
    ir.open_set = open_set_scores(decisions, gold, known_ids);

    std::vector<std::size_t> pooled;  // positions into arrival_train
    for (std::size_t p = 0; p < arrival_train.size(); ++p)
      if (decisions[p].rejected) pooled.push_back(p);

    if (!pooled.empty()) {
      std::vector<Vector> points;
      points.reserve(pooled.size());
      for (std::size_t p : pooled) {
        const auto idx = static_cast<std::size_t>(arrival_train[p].second);
        points.push_back(representation(dataset.docs[idx], model));
      }

      BirchOptions birch_options;
      birch_options.tree = config.clustering.tree;
      birch_options.rebuild_threshold = config.clustering.rebuild_threshold;
      birch_options.outlier_floor = config.clustering.outlier_floor;
      birch_options.outlier_multiplier = config.clustering.outlier_multiplier;
      std::optional<int> k;
      if (!config.clustering.auto_cluster_count)
        k = static_cast<int>(std::min<std::size_t>(
            static_cast<std::size_t>(arrival_count), pooled.size()));
      const ClusteringResult clusters = birch_fit(points, birch_options, k);

      const int cluster_total = clusters.cluster_count();
      std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(cluster_total));
      for (std::size_t p = 0; p < pooled.size(); ++p) {
        const int assignment = clusters.assignments[p];
        if (assignment >= 0) members[static_cast<std::size_t>(assignment)].push_back(p);
      }

      std::set<std::string> taken;
      for (const ClassInfo& info : model.heads.registry) taken.insert(info.label);

      std::vector<ClassInfo> new_infos;
      std::vector<int> head_clusters;             // cluster ids that earned a head
      std::vector<int> cluster_head(static_cast<std::size_t>(cluster_total), -1);
      int next_id = static_cast<int>(model.heads.count());
      for (int c = 0; c < cluster_total; ++c) {
        if (members[static_cast<std::size_t>(c)].empty()) continue;
        std::vector<std::vector<std::string>> cluster_docs;
        for (std::size_t p : members[static_cast<std::size_t>(c)]) {
          const auto idx = static_cast<std::size_t>(arrival_train[pooled[p]].second);
          cluster_docs.push_back(dataset.docs[idx].tokens);
        }
        const std::string label = label_cluster(cluster_docs, taken, config.labeler, stopwords);
        taken.insert(label);
        new_infos.push_back({label, {ClassProvenance::kDiscovered, static_cast<int>(it)}});
        cluster_head[static_cast<std::size_t>(c)] = next_id++;
        head_clusters.push_back(c);
        ir.discovered_labels.push_back(label);
      }

      if (!new_infos.empty()) {
        // The snapshot precedes the new heads so the distillation teacher is
        // the pre-increment model.
        model = snapshot(model);
        model = add_heads(model, new_infos, rng);

        // Evaluation-only mapping from discovered clusters to the arriving
        // gold classes; it feeds accuracy scoring, never training.
        std::vector<std::vector<long>> weight(head_clusters.size(),
                                              std::vector<long>(arrival_labels.size(), 0));
        std::map<std::string, int> arrival_index;
        for (std::size_t l = 0; l < arrival_labels.size(); ++l)
          arrival_index[arrival_labels[l]] = static_cast<int>(l);
        for (std::size_t row = 0; row < head_clusters.size(); ++row) {
          const auto c = static_cast<std::size_t>(head_clusters[row]);
          for (std::size_t p : members[c]) {
            const std::string& doc_label = arrival_train[pooled[p]].first;
            ++weight[row][static_cast<std::size_t>(arrival_index.at(doc_label))];
          }
        }
        const std::vector<int> matched = best_assignment(weight, arrival_labels.size());
        for (std::size_t row = 0; row < head_clusters.size(); ++row)
          if (matched[row] >= 0) {
            const auto c = static_cast<std::size_t>(head_clusters[row]);
            gold_to_class[arrival_labels[static_cast<std::size_t>(matched[row])]] =
                cluster_head[c];
          }

        // Training labels come from the refined assignments; outliers are
        // dropped, not learned.
        TrainingSet fresh;
        for (int c : head_clusters)
          for (std::size_t p : members[static_cast<std::size_t>(c)]) {
            const auto idx = static_cast<std::size_t>(arrival_train[pooled[p]].second);
            fresh.push_back({dataset.docs[idx], cluster_head[static_cast<std::size_t>(c)]});
          }
        const TrainingSet ts = build_training_set(memory, fresh, rng);
        auto [trained, training_report] = train(model, ts, options, rng);
        model = std::move(trained);
        ir.epoch_losses = training_report.epoch_losses;

        std::vector<int> new_ids;
        std::map<int, std::vector<Exemplar>> new_data;
        for (int c : head_clusters) {
          const int class_id = cluster_head[static_cast<std::size_t>(c)];
          new_ids.push_back(class_id);
          auto& list = new_data[class_id];
          for (std::size_t p : members[static_cast<std::size_t>(c)]) {
            const auto idx = static_cast<std::size_t>(arrival_train[pooled[p]].second);
            list.push_back({dataset.docs[idx], points[p]});
          }
        }
        memory = rebalance(memory, new_ids, new_data);

        std::vector<int> pred;
        std::vector<int> pool_gold;
        for (std::size_t p = 0; p < pooled.size(); ++p) {
          if (clusters.assignments[p] < 0) continue;
          pred.push_back(clusters.assignments[p]);
          pool_gold.push_back(arrival_index.at(arrival_train[pooled[p]].first));
        }
        if (!pred.empty()) {
          ir.clustering = clustering_scores(pred, pool_gold);
          ir.clustering_scored = true;
        }
      }
    }

    for (const std::string& label : arrival_labels) active_labels.push_back(label);

    ir.active_classes = model.heads.count();
    ir.accuracy = closed_accuracy(active_labels, false);
    ir.old_class_accuracy = closed_accuracy(active_labels, true);
    fill_memory_stats(ir);
    report.iterations.push_back(ir);
  }

  std::vector<Scalar> accuracies;
  for (const IterationReport& ir : report.iterations) accuracies.push_back(ir.accuracy);
  report.average_incremental_accuracy = incremental_accuracy(accuracies);

  ExperimentResult result;
  result.report = std::move(report);
  result.checkpoint.model = std::move(model);
  result.checkpoint.memory = std::move(memory);
  result.checkpoint.seed = config.seed;
  return result;
}

RunResult run_all_budgets(const LabeledDataset& dataset, const ExperimentConfig& config) {
  config.validate();
  RunResult result;
  for (Index budget : config.memory_budgets) {
    ExperimentResult experiment = run_experiment(dataset, config, budget);
    result.report.budgets.push_back(std::move(experiment.report));
    result.checkpoints.push_back(std::move(experiment.checkpoint));
  }
  return result;
}

std::string render_human_report(const RunReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  for (const ExperimentReport& er : report.budgets) {
    out << "== memory budget " << er.memory_budget << " ==\n";
    out << std::setw(5) << "iter" << std::setw(9) << "classes" << std::setw(10) << "accuracy"
        << std::setw(9) << "old_acc" << std::setw(9) << "os_acc" << std::setw(8) << "f1_ood"
        << std::setw(10) << "f1_known" << std::setw(6) << "new" << std::setw(8) << "stored"
        << "\n";
    for (const IterationReport& ir : er.iterations) {
      out << std::setw(5) << ir.iteration << std::setw(9) << ir.active_classes << std::setw(10)
          << ir.accuracy << std::setw(9) << ir.old_class_accuracy << std::setw(9)
          << ir.open_set.acc_all << std::setw(8) << ir.open_set.f1_ood << std::setw(10)
          << ir.open_set.f1_known << std::setw(6) << ir.discovered_labels.size() << std::setw(8)
          << ir.memory_total << "\n";
      if (!ir.discovered_labels.empty())
        out << "      discovered: " << join(ir.discovered_labels, ", ") << "\n";
      if (ir.clustering_scored)
        out << "      clustering: ars " << ir.clustering.ars << "  nmi " << ir.clustering.nmi
            << "  fms " << ir.clustering.fms << "  h " << ir.clustering.homogeneity << "  c "
            << ir.clustering.completeness << "  v " << ir.clustering.v_measure << "\n";
    }
    out << "average incremental accuracy: " << er.average_incremental_accuracy << "\n\n";
  }
  return out.str();
}

std::string render_machine_report(const RunReport& report) {
  Json root;
  root["format"] = "owcl-report";
  Json budgets = Json::array();
  for (const ExperimentReport& er : report.budgets) {
    Json b;
    b["memory_budget"] = er.memory_budget;
    b["average_incremental_accuracy"] = er.average_incremental_accuracy;
    Json iterations = Json::array();
    for (const IterationReport& ir : er.iterations) {
      Json j;
      j["iteration"] = ir.iteration;
      j["active_classes"] = ir.active_classes;
      j["accuracy"] = ir.accuracy;
      j["old_class_accuracy"] = ir.old_class_accuracy;
      j["open_set"] = Json{{"acc_all", ir.open_set.acc_all},
                           {"f1_ood", ir.open_set.f1_ood},
                           {"f1_known", ir.open_set.f1_known}};
      j["discovered"] = ir.discovered_labels;
      if (ir.clustering_scored)
        j["clustering"] = Json{{"ars", ir.clustering.ars},
                               {"nmi", ir.clustering.nmi},
                               {"fms", ir.clustering.fms},
                               {"homogeneity", ir.clustering.homogeneity},
                               {"completeness", ir.clustering.completeness},
                               {"v_measure", ir.clustering.v_measure}};
      else
        j["clustering"] = nullptr;
      Json per_class = Json::object();
      for (const auto& [label, count] : ir.memory_per_class) per_class[label] = count;
      j["memory"] = Json{{"total", ir.memory_total}, {"per_class", per_class}};
      j["epoch_losses"] = ir.epoch_losses;
      iterations.push_back(std::move(j));
    }
    b["iterations"] = std::move(iterations);
    budgets.push_back(std::move(b));
  }
  root["budgets"] = std::move(budgets);
  return root.dump(2) + "\n";
}

std::string render_checkpoint_summary(const Checkpoint& checkpoint) {
  std::ostringstream out;
  const ClassificationHeads& heads = checkpoint.model.heads;
  long seeds = 0;
  long discovered = 0;
  for (const ClassInfo& info : heads.registry)
    (info.provenance.kind == ClassProvenance::kSeed ? seeds : discovered) += 1;

  out << "checkpoint (format version " << kCheckpointVersion << ", seed " << checkpoint.seed
      << ")\n";
  out << "heads: " << heads.count() << " (" << seeds << " seed, " << discovered
      << " discovered)\n";
  if (checkpoint.model.snapshot)
    out << "snapshot: present (" << checkpoint.model.snapshot->heads.count() << " heads)\n";
  else
    out << "snapshot: absent\n";
  out << "memory: " << checkpoint.memory.total_stored() << "/" << checkpoint.memory.budget
      << " stored across " << checkpoint.memory.class_count() << " classes\n";
  out << std::setw(4) << "id" << "  " << std::left << std::setw(24) << "label" << std::setw(14)
      << "origin" << std::right << std::setw(7) << "stored" << "\n";
  for (std::size_t c = 0; c < heads.registry.size(); ++c) {
    const ClassInfo& info = heads.registry[c];
    std::string origin = "seed";
    if (info.provenance.kind == ClassProvenance::kDiscovered)
      origin = "discovered@" + std::to_string(info.provenance.iteration);
    const auto stored = checkpoint.memory.per_class.find(static_cast<int>(c));
    const std::size_t count =
        stored == checkpoint.memory.per_class.end() ? 0 : stored->second.size();
    out << std::setw(4) << c << "  " << std::left << std::setw(24) << info.label
        << std::setw(14) << origin << std::right << std::setw(7) << count << "\n";
  }
  return out.str();
}

}  // namespace owcl
