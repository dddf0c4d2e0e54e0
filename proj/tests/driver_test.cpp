#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "owcl/driver.hpp"
#include "synthetic.hpp"

using namespace owcl;

namespace {

// The regime used by the end-to-end checks: nine planted classes, four of
// them withheld, light training so scores stay informative across iterations.
ExperimentConfig planted_config(std::vector<Index> schedule) {
  ExperimentConfig cfg;
  cfg.dataset_path = "unused";
  cfg.seed = 8;
  cfg.openness = 0.444;
  cfg.schedule = std::move(schedule);
  cfg.memory_budgets = {250, 500, 1000, 1500};
  cfg.eval_fraction = 0.3;
  cfg.optimizer.learning_rate = 0.001;
  cfg.optimizer.weight_decay = 0.0;
  cfg.optimizer.epochs = 3;
  cfg.temperature = 0.5;
  cfg.rejection_gamma = 0.90;
  cfg.model.embedding_dim = 200;
  return cfg;
}

const LabeledDataset& planted() {
  static LabeledDataset ds = synthetic::planted_dataset(9, 200, 100, 913);
  return ds;
}

}  // namespace

TEST_CASE("split withholds ceil(openness * classes) and keeps the rest") {
  LabeledDataset ds = synthetic::planted_dataset(8, 64, 4, 3);
  // 8 classes at 0.25 -> 2 withheld, 6 known.
  DataSplit sp = split_openness(ds, 0.25, 0.3, 11);
  CHECK(sp.hidden_labels.size() == 2);
  CHECK(sp.known_labels.size() == 6);
  CHECK(std::is_sorted(sp.known_labels.begin(), sp.known_labels.end()));

  std::set<std::string> all(sp.known_labels.begin(), sp.known_labels.end());
  all.insert(sp.hidden_labels.begin(), sp.hidden_labels.end());
  CHECK(all.size() == 8);
}

TEST_CASE("split is deterministic under the seed") {
  LabeledDataset ds = synthetic::planted_dataset(8, 64, 5, 3);
  DataSplit a = split_openness(ds, 0.3, 0.3, 42);
  DataSplit b = split_openness(ds, 0.3, 0.3, 42);
  CHECK(a.known_labels == b.known_labels);
  CHECK(a.hidden_labels == b.hidden_labels);
  CHECK(a.train_docs == b.train_docs);
  CHECK(a.eval_docs == b.eval_docs);
  DataSplit c = split_openness(ds, 0.3, 0.3, 43);
  CHECK((a.hidden_labels != c.hidden_labels || a.eval_docs != c.eval_docs));
}

TEST_CASE("per-class document split arithmetic") {
  LabeledDataset ds = synthetic::planted_dataset(5, 40, 10, 7);
  DataSplit sp = split_openness(ds, 0.4, 0.3, 5);
  for (const auto& [label, train] : sp.train_docs) {
    const auto& eval = sp.eval_docs.at(label);
    // 10 docs at 0.3 -> 3 eval, 7 train, disjoint, all accounted for.
    CHECK(train.size() == 7);
    CHECK(eval.size() == 3);
    std::set<Index> seen(train.begin(), train.end());
    seen.insert(eval.begin(), eval.end());
    CHECK(seen.size() == 10);
    for (Index di : seen) CHECK(ds.docs[static_cast<std::size_t>(di)].gold_label == label);
  }
}

TEST_CASE("single-document classes stay on the training side") {
  LabeledDataset ds = synthetic::planted_dataset(4, 32, 1, 9);
  DataSplit sp = split_openness(ds, 0.5, 0.3, 2);
  for (const auto& [label, train] : sp.train_docs) {
    CHECK(train.size() == 1);
    CHECK(sp.eval_docs.at(label).empty());
  }
}

TEST_CASE("split rejects degenerate class counts") {
  LabeledDataset ds = synthetic::planted_dataset(4, 32, 3, 1);
  CHECK_THROWS_AS(split_openness(ds, 0.1, 0.3, 1), DriverError);   // <2 hidden
  CHECK_THROWS_AS(split_openness(ds, 0.9, 0.3, 1), DriverError);   // <2 known
  CHECK_THROWS_AS(split_openness(ds, 0.0, 0.3, 1), DriverError);
  CHECK_THROWS_AS(split_openness(ds, 0.5, 1.0, 1), DriverError);
}

TEST_CASE("schedule must open with the known-class count") {
  ExperimentConfig cfg = planted_config({6, 9});
  CHECK_THROWS_AS(run_experiment(planted(), cfg, 500), DriverError);
  cfg.schedule = {5, 7, 12};  // exceeds the dataset's nine classes
  CHECK_THROWS_AS(run_experiment(planted(), cfg, 500), DriverError);
}

TEST_CASE("empty schedule runs a single closed iteration") {
  LabeledDataset ds = synthetic::planted_dataset(5, 60, 12, 21);
  ExperimentConfig cfg = planted_config({});
  cfg.seed = 3;
  cfg.openness = 0.4;
  cfg.model.embedding_dim = 60;
  ExperimentResult res = run_experiment(ds, cfg, 200);
  REQUIRE(res.report.iterations.size() == 1);
  CHECK(res.report.iterations[0].active_classes == 3);
  CHECK(res.report.iterations[0].discovered_labels.empty());
  CHECK(res.report.average_incremental_accuracy ==
        doctest::Approx(res.report.iterations[0].accuracy));
}

TEST_CASE("discovery names at least two novel classes cleanly") {
  ExperimentConfig cfg = planted_config({5, 7});
  ExperimentResult res = run_experiment(planted(), cfg, 1000);
  REQUIRE(res.report.iterations.size() == 2);
  const IterationReport& it2 = res.report.iterations[1];
  CHECK(it2.discovered_labels.size() >= 2);
  for (const auto& label : it2.discovered_labels) CHECK_FALSE(label.empty());
  CHECK(it2.clustering_scored);
  CHECK(it2.clustering.homogeneity >= 0.9);
  CHECK(it2.active_classes == 5 + static_cast<Index>(it2.discovered_labels.size()));

  // The frozen teacher carries the pre-increment head count.
  REQUIRE(res.checkpoint.model.snapshot);
  CHECK(res.checkpoint.model.snapshot->heads.count() == 5);
  CHECK(res.checkpoint.model.heads.count() == it2.active_classes);
  CHECK_NOTHROW(res.checkpoint.memory.check_budget());
}

TEST_CASE("iteration one is identical across budgets") {
  ExperimentConfig cfg = planted_config({5, 7});
  ExperimentReport small = run_experiment(planted(), cfg, 250).report;
  ExperimentReport large = run_experiment(planted(), cfg, 1500).report;
  CHECK(small.iterations[0].accuracy == large.iterations[0].accuracy);
  CHECK(small.iterations[0].open_set.f1_ood == large.iterations[0].open_set.f1_ood);
}

TEST_CASE("identical runs render identical machine reports") {
  ExperimentConfig cfg = planted_config({5, 7});
  cfg.memory_budgets = {250, 500};
  RunResult a = run_all_budgets(planted(), cfg);
  RunResult b = run_all_budgets(planted(), cfg);
  CHECK(render_machine_report(a.report) == render_machine_report(b.report));
  REQUIRE(a.checkpoints.size() == 2);
  CHECK(render_checkpoint_summary(a.checkpoints[0]) ==
        render_checkpoint_summary(b.checkpoints[0]));

  // The human table renders one block per budget.
  std::string human = render_human_report(a.report);
  CHECK(human.find("250") != std::string::npos);
  CHECK(human.find("500") != std::string::npos);
}

TEST_CASE("memory rebalances within budget at every iteration") {
  ExperimentConfig cfg = planted_config({5, 7, 9});
  ExperimentResult res = run_experiment(planted(), cfg, 250);
  for (const IterationReport& it : res.report.iterations) {
    CHECK(it.memory_total <= 250);
    Index sum = 0;
    for (const auto& [label, count] : it.memory_per_class) {
      CHECK(count >= 1);
      sum += count;
    }
    CHECK(sum == it.memory_total);
  }
}
