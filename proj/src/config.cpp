#include "owcl/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace owcl {
namespace {

using Json = nlohmann::json;

void check_keys(const Json& obj, const std::set<std::string>& allowed,
                const std::string& section) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError("config: unknown key \"" + key + "\" in " + section);
  }
}

template <typename T>
T get_or(const Json& obj, const char* key, T fallback, const std::string& section) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("config: \"" + section + "." + key + "\" has the wrong type");
  }
}

std::string resolve_path(const std::string& raw, const std::filesystem::path& base) {
  if (raw.empty()) return raw;
  std::filesystem::path p(raw);
  if (p.is_absolute()) return raw;
  return (base / p).string();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset_path.empty()) throw ConfigError("config: missing dataset path");
  if (!(openness > 0.0 && openness < 1.0))
    throw ConfigError("config: openness must lie strictly between 0 and 1");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 2) throw ConfigError("config: schedule entries must be at least 2");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw ConfigError("config: schedule must be strictly increasing");
  }
  if (memory_budgets.empty()) throw ConfigError("config: memory_budgets must not be empty");
  for (Index k : memory_budgets)
    if (k < 1) throw ConfigError("config: memory budgets must be positive");
  if (!(eval_fraction > 0.0 && eval_fraction < 1.0))
    throw ConfigError("config: eval_fraction must lie strictly between 0 and 1");
  if (!(temperature > 0.0)) throw ConfigError("config: temperature must be positive");
  if (!(rejection_gamma > 0.0 && rejection_gamma < 1.0))
    throw ConfigError("config: rejection_gamma must lie strictly between 0 and 1");
  if (batch_size < 1) throw ConfigError("config: batch_size must be at least 1");
  try {
    optimizer.validate();
    clustering.tree.validate();
    labeler.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (model.hidden1 < 1 || model.hidden2 < 1)
    throw ConfigError("config: hidden layer widths must be positive");
  if (model.embedding_dim < 1) throw ConfigError("config: embedding_dim must be positive");
  if (model.filter_windows.empty())
    throw ConfigError("config: filter_windows must not be empty");
  for (int w : model.filter_windows)
    if (w < 1) throw ConfigError("config: filter windows must be positive");
  if (model.padded_length < 1) throw ConfigError("config: padded_length must be positive");
  if (clustering.rebuild_threshold &&
      *clustering.rebuild_threshold < clustering.tree.threshold)
    throw ConfigError("config: rebuild_threshold cannot shrink the tree threshold");
  if (clustering.outlier_floor < 0)
    throw ConfigError("config: outlier_floor must be non-negative");
  if (!(clustering.outlier_multiplier > 0.0))
    throw ConfigError("config: outlier_multiplier must be positive");
  if (ablation_ks.empty()) throw ConfigError("config: ablation_ks must not be empty");
  for (int k : ablation_ks)
    if (k < 2) throw ConfigError("config: ablation cluster counts must be at least 2");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError(path + ":" + std::to_string(line) + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  check_keys(j, {"dataset", "seed", "openness", "schedule", "memory_budgets", "eval_fraction",
                 "temperature", "rejection_gamma", "use_distillation", "optimizer", "model",
                 "clustering", "labeler", "stopwords", "ablation_ks"},
             "the top level");

  ExperimentConfig cfg;
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  cfg.dataset_path = resolve_path(get_or<std::string>(j, "dataset", "", "config"), base);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed, "config");
  cfg.openness = get_or<Scalar>(j, "openness", cfg.openness, "config");
  cfg.schedule = get_or<std::vector<Index>>(j, "schedule", cfg.schedule, "config");
  cfg.memory_budgets =
      get_or<std::vector<Index>>(j, "memory_budgets", cfg.memory_budgets, "config");
  cfg.eval_fraction = get_or<Scalar>(j, "eval_fraction", cfg.eval_fraction, "config");
  cfg.temperature = get_or<Scalar>(j, "temperature", cfg.temperature, "config");
  cfg.rejection_gamma = get_or<Scalar>(j, "rejection_gamma", cfg.rejection_gamma, "config");
  cfg.use_distillation = get_or<bool>(j, "use_distillation", cfg.use_distillation, "config");
  cfg.stopwords_path = resolve_path(get_or<std::string>(j, "stopwords", "", "config"), base);
  cfg.ablation_ks = get_or<std::vector<int>>(j, "ablation_ks", cfg.ablation_ks, "config");

  if (j.contains("optimizer")) {
    const Json& o = j.at("optimizer");
    if (!o.is_object()) throw ConfigError("config: \"optimizer\" must be an object");
    check_keys(o, {"learning_rate", "weight_decay", "epochs", "beta1", "beta2", "epsilon",
                   "batch_size"},
               "\"optimizer\"");
    cfg.optimizer.learning_rate =
        get_or<Scalar>(o, "learning_rate", cfg.optimizer.learning_rate, "optimizer");
    cfg.optimizer.weight_decay =
        get_or<Scalar>(o, "weight_decay", cfg.optimizer.weight_decay, "optimizer");
    cfg.optimizer.epochs = get_or<int>(o, "epochs", cfg.optimizer.epochs, "optimizer");
    cfg.optimizer.adam_beta1 = get_or<Scalar>(o, "beta1", cfg.optimizer.adam_beta1, "optimizer");
    cfg.optimizer.adam_beta2 = get_or<Scalar>(o, "beta2", cfg.optimizer.adam_beta2, "optimizer");
    cfg.optimizer.adam_epsilon =
        get_or<Scalar>(o, "epsilon", cfg.optimizer.adam_epsilon, "optimizer");
    cfg.batch_size = get_or<int>(o, "batch_size", cfg.batch_size, "optimizer");
  }

  if (j.contains("model")) {
    const Json& m = j.at("model");
    if (!m.is_object()) throw ConfigError("config: \"model\" must be an object");
    check_keys(m, {"hidden1", "hidden2", "embedding_dim", "filter_windows", "padded_length"},
               "\"model\"");
    cfg.model.hidden1 = get_or<Index>(m, "hidden1", cfg.model.hidden1, "model");
    cfg.model.hidden2 = get_or<Index>(m, "hidden2", cfg.model.hidden2, "model");
    cfg.model.embedding_dim =
        get_or<Index>(m, "embedding_dim", cfg.model.embedding_dim, "model");
    cfg.model.filter_windows =
        get_or<std::vector<int>>(m, "filter_windows", cfg.model.filter_windows, "model");
    cfg.model.padded_length = get_or<int>(m, "padded_length", cfg.model.padded_length, "model");
  }

  if (j.contains("clustering")) {
    const Json& c = j.at("clustering");
    if (!c.is_object()) throw ConfigError("config: \"clustering\" must be an object");
    check_keys(c, {"branching_factor", "leaf_capacity", "threshold", "rebuild_threshold",
                   "outlier_floor", "outlier_multiplier", "auto_cluster_count"},
               "\"clustering\"");
    cfg.clustering.tree.branching_factor =
        get_or<int>(c, "branching_factor", cfg.clustering.tree.branching_factor, "clustering");
    cfg.clustering.tree.leaf_capacity =
        get_or<int>(c, "leaf_capacity", cfg.clustering.tree.leaf_capacity, "clustering");
    cfg.clustering.tree.threshold =
        get_or<Scalar>(c, "threshold", cfg.clustering.tree.threshold, "clustering");
    if (c.contains("rebuild_threshold") && !c.at("rebuild_threshold").is_null())
      cfg.clustering.rebuild_threshold =
          get_or<Scalar>(c, "rebuild_threshold", 0.0, "clustering");
    cfg.clustering.outlier_floor =
        get_or<int>(c, "outlier_floor", cfg.clustering.outlier_floor, "clustering");
    cfg.clustering.outlier_multiplier =
        get_or<Scalar>(c, "outlier_multiplier", cfg.clustering.outlier_multiplier, "clustering");
    cfg.clustering.auto_cluster_count =
        get_or<bool>(c, "auto_cluster_count", cfg.clustering.auto_cluster_count, "clustering");
  }

  if (j.contains("labeler")) {
    const Json& l = j.at("labeler");
    if (!l.is_object()) throw ConfigError("config: \"labeler\" must be an object");
    check_keys(l, {"window", "damping", "tolerance", "max_iterations"}, "\"labeler\"");
    cfg.labeler.window = get_or<int>(l, "window", cfg.labeler.window, "labeler");
    cfg.labeler.damping = get_or<Scalar>(l, "damping", cfg.labeler.damping, "labeler");
    cfg.labeler.tolerance = get_or<Scalar>(l, "tolerance", cfg.labeler.tolerance, "labeler");
    cfg.labeler.max_iterations =
        get_or<int>(l, "max_iterations", cfg.labeler.max_iterations, "labeler");
  }

  cfg.validate();
  return cfg;
}

}  // namespace owcl
