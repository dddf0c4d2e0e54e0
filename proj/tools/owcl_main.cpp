#include <CLI11.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "owcl/birch.hpp"
#include "owcl/checkpoint.hpp"
#include "owcl/config.hpp"
#include "owcl/dataset.hpp"
#include "owcl/driver.hpp"
#include "owcl/labeler.hpp"
#include "owcl/metrics.hpp"

namespace {

using Json = nlohmann::ordered_json;

struct CommandOptions {
  std::string config_path;
  std::string out_dir = "owcl-out";
  std::string checkpoint_path;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

owcl::ExperimentConfig load_and_override(const CommandOptions& opts) {
  owcl::ExperimentConfig config = owcl::load_config(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  return config;
}

owcl::LabeledDataset load_dataset(const owcl::ExperimentConfig& config) {
  const auto records = owcl::load_jsonl_dataset(config.dataset_path);
  return owcl::build_dataset(records, config.model.padded_length);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

int cmd_run(const CommandOptions& opts) {
  const owcl::ExperimentConfig config = load_and_override(opts);
  const owcl::LabeledDataset dataset = load_dataset(config);

  const owcl::RunResult result = owcl::run_all_budgets(dataset, config);
  const std::string machine = owcl::render_machine_report(result.report);
  const std::string human = owcl::render_human_report(result.report);

  const std::filesystem::path dir(opts.out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", machine);
  write_file(dir / "report.txt", human);
  for (std::size_t i = 0; i < result.checkpoints.size(); ++i) {
    const auto budget = result.report.budgets[i].memory_budget;
    owcl::save_checkpoint(result.checkpoints[i],
                          (dir / ("checkpoint_" + std::to_string(budget) + ".json")).string());
  }
  if (!opts.quiet) std::cout << human;
  return 0;
}

/// Excludes positions flagged as outliers (assignment -1) from both sides.
owcl::ClusteringScores score_against_gold(const std::vector<int>& assignments,
                                          const std::vector<int>& gold) {
  std::vector<int> pred;
  std::vector<int> kept_gold;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] < 0) continue;
    pred.push_back(assignments[i]);
    kept_gold.push_back(gold[i]);
  }
  return owcl::clustering_scores(pred, kept_gold);
}

int cmd_ablate_clustering(const CommandOptions& opts) {
  const owcl::ExperimentConfig config = load_and_override(opts);
  const owcl::LabeledDataset dataset = load_dataset(config);
  if (dataset.embedding_dim == 0)
    throw owcl::ConfigError(
        "ablate-clustering needs a dataset with precomputed embedding vectors");

  std::map<std::string, int> label_index;
  for (std::size_t i = 0; i < dataset.class_labels.size(); ++i)
    label_index[dataset.class_labels[i]] = static_cast<int>(i);

  std::vector<owcl::Vector> points;
  std::vector<int> gold;
  for (const owcl::EmbeddedDocument& doc : dataset.docs) {
    points.push_back(*doc.embedding);
    gold.push_back(label_index.at(doc.gold_label));
  }

  owcl::BirchOptions birch_options;
  birch_options.tree = config.clustering.tree;
  birch_options.rebuild_threshold = config.clustering.rebuild_threshold;
  birch_options.outlier_floor = config.clustering.outlier_floor;
  birch_options.outlier_multiplier = config.clustering.outlier_multiplier;

  struct Row {
    int k;
    std::string method;
    owcl::ClusteringScores scores;
  };
  std::vector<Row> rows;
  for (int k : config.ablation_ks) {
    if (static_cast<std::size_t>(k) > points.size())
      throw owcl::ConfigError("ablation k exceeds the number of data points");
    const auto birch = owcl::birch_fit(points, birch_options, k);
    rows.push_back({k, "birch", score_against_gold(birch.assignments, gold)});
    const auto kmeans = owcl::kmeans_fit(points, k, config.seed);
    rows.push_back({k, "k-means", score_against_gold(kmeans.assignments, gold)});
  }

  std::ostringstream human;
  human << std::fixed << std::setprecision(3);
  human << "clustering ablation: " << points.size() << " points, "
        << dataset.class_labels.size() << " gold classes\n";
  human << std::setw(4) << "k" << std::setw(10) << "method" << std::setw(13) << "homogeneity"
        << std::setw(14) << "completeness" << std::setw(11) << "v_measure" << "\n";
  for (const Row& row : rows)
    human << std::setw(4) << row.k << std::setw(10) << row.method << std::setw(13)
          << row.scores.homogeneity << std::setw(14) << row.scores.completeness << std::setw(11)
          << row.scores.v_measure << "\n";

  Json machine;
  machine["format"] = "owcl-ablate-clustering";
  Json out_rows = Json::array();
  for (const Row& row : rows)
    out_rows.push_back(Json{{"k", row.k},
                            {"method", row.method},
                            {"homogeneity", row.scores.homogeneity},
                            {"completeness", row.scores.completeness},
                            {"v_measure", row.scores.v_measure}});
  machine["rows"] = std::move(out_rows);

  const std::filesystem::path dir(opts.out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "ablate_clustering.json", machine.dump(2) + "\n");
  write_file(dir / "ablate_clustering.txt", human.str());
  if (!opts.quiet) std::cout << human.str();
  return 0;
}

std::set<std::string> label_parts(const std::string& label) {
  std::set<std::string> parts;
  std::string current;
  for (char c : label) {
    if (c == '_' || c == ' ') {
      if (!current.empty()) parts.insert(current);
      current.clear();
    } else {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!current.empty()) parts.insert(current);
  return parts;
}

/// A produced label hits when it carries every token of the gold label.
bool label_hits(const std::string& produced, const std::string& gold) {
  const std::set<std::string> have = label_parts(produced);
  for (const std::string& want : label_parts(gold))
    if (!have.count(want)) return false;
  return true;
}

int cmd_ablate_labeler(const CommandOptions& opts) {
  const owcl::ExperimentConfig config = load_and_override(opts);
  const owcl::LabeledDataset dataset = load_dataset(config);
  const std::set<std::string> stopwords = config.stopwords_path.empty()
                                              ? owcl::default_stopwords()
                                              : owcl::load_stopwords(config.stopwords_path);

  // Clusters stand in for discovered classes: one per gold label.
  std::map<std::string, std::vector<std::vector<std::string>>> groups;
  std::vector<std::vector<std::string>> corpus;
  for (const owcl::EmbeddedDocument& doc : dataset.docs) {
    groups[doc.gold_label].push_back(doc.tokens);
    corpus.push_back(doc.tokens);
  }

  struct Row {
    std::string extractor;
    owcl::Scalar hit_rate;
    owcl::Scalar distinct_rate;
  };
  std::vector<Row> rows;

  const auto evaluate = [&](const std::string& name, const auto& labeler_fn) {
    long hits = 0;
    std::set<std::string> produced;
    for (const auto& [gold, docs] : groups) {
      const std::string label = labeler_fn(docs);
      if (label_hits(label, gold)) ++hits;
      produced.insert(label);
    }
    const auto n = static_cast<owcl::Scalar>(groups.size());
    rows.push_back({name, static_cast<owcl::Scalar>(hits) / n,
                    static_cast<owcl::Scalar>(produced.size()) / n});
  };

  evaluate("singlerank", [&](const std::vector<std::vector<std::string>>& docs) {
    return owcl::label_cluster(docs, {}, config.labeler, stopwords);
  });
  evaluate("tfidf", [&](const std::vector<std::vector<std::string>>& docs) {
    return owcl::tfidf_label_baseline(docs, corpus, stopwords);
  });

  std::ostringstream human;
  human << std::fixed << std::setprecision(3);
  human << "labeler ablation: " << groups.size() << " clusters from gold classes\n";
  human << std::setw(12) << "extractor" << std::setw(10) << "hit_rate" << std::setw(10)
        << "distinct" << "\n";
  for (const Row& row : rows)
    human << std::setw(12) << row.extractor << std::setw(10) << row.hit_rate << std::setw(10)
          << row.distinct_rate << "\n";

  Json machine;
  machine["format"] = "owcl-ablate-labeler";
  Json out_rows = Json::array();
  for (const Row& row : rows)
    out_rows.push_back(Json{{"extractor", row.extractor},
                            {"hit_rate", row.hit_rate},
                            {"distinct", row.distinct_rate}});
  machine["rows"] = std::move(out_rows);

  const std::filesystem::path dir(opts.out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "ablate_labeler.json", machine.dump(2) + "\n");
  write_file(dir / "ablate_labeler.txt", human.str());
  if (!opts.quiet) std::cout << human.str();
  return 0;
}

int cmd_inspect(const CommandOptions& opts) {
  const owcl::Checkpoint checkpoint = owcl::load_checkpoint(opts.checkpoint_path);
  std::cout << owcl::render_checkpoint_summary(checkpoint);
  return 0;
}

void add_common_flags(CLI::App* cmd, CommandOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", opts.out_dir, "Output directory")->envname("OWCL_OUT_DIR");
  cmd->add_option("--seed", opts.seed, "Override the config seed");
  cmd->add_flag("--quiet", opts.quiet, "Suppress stdout report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-world continual text classifier"};
  app.require_subcommand(1);
  CommandOptions opts;

  CLI::App* run = app.add_subcommand("run", "Run the experiment schedule end to end");
  add_common_flags(run, opts);
  CLI::App* ablate_clustering = app.add_subcommand(
      "ablate-clustering", "Compare BIRCH against k-means on the dataset's vectors");
  add_common_flags(ablate_clustering, opts);
  CLI::App* ablate_labeler = app.add_subcommand(
      "ablate-labeler", "Compare keyword extractors on gold-label clusters");
  add_common_flags(ablate_labeler, opts);
  CLI::App* inspect = app.add_subcommand("inspect", "Summarize a saved checkpoint");
  inspect->add_option("checkpoint", opts.checkpoint_path, "Checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(opts);
    if (ablate_clustering->parsed()) return cmd_ablate_clustering(opts);
    if (ablate_labeler->parsed()) return cmd_ablate_labeler(opts);
    if (inspect->parsed()) return cmd_inspect(opts);
  } catch (const owcl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const owcl::DatasetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
