#include "owcl/labeler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace owcl {
namespace {

std::string lowercased(const std::string& token) {
  std::string out = token;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_candidate(const std::string& lower, const std::set<std::string>& stopwords) {
  return lower.size() >= 3 && stopwords.count(lower) == 0;
}

/// Lowercases a document and marks which positions hold candidate tokens.
/// Window distances are measured on the original sequence, so stopwords still
/// separate words even though they never become nodes.
std::vector<std::string> candidate_view(const std::vector<std::string>& doc,
                                        const std::set<std::string>& stopwords) {
  std::vector<std::string> out(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    std::string lower = lowercased(doc[i]);
    out[i] = is_candidate(lower, stopwords) ? lower : std::string();
  }
  return out;
}

}  // namespace

void LabelerParams::validate() const {
  if (window < 2) throw LabelError("labeler: window must be at least 2");
  if (!(damping > 0.0 && damping < 1.0))
    throw LabelError("labeler: damping must lie strictly between 0 and 1");
  if (!(tolerance > 0.0)) throw LabelError("labeler: tolerance must be positive");
  if (max_iterations < 1) throw LabelError("labeler: max_iterations must be at least 1");
}

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> kWords = {
      "a",     "about", "after", "again",  "all",   "also",  "an",    "and",   "any",
      "are",   "as",    "at",    "be",     "been",  "being", "but",   "by",    "can",
      "could", "did",   "do",    "does",   "down",  "each",  "few",   "for",   "from",
      "had",   "has",   "have",  "he",     "her",   "here",  "his",   "how",   "i",
      "if",    "in",    "into",  "is",     "it",    "its",   "just",  "may",   "me",
      "might", "more",  "most",  "must",   "my",    "no",    "not",   "now",   "of",
      "off",   "on",    "once",  "only",   "or",    "other", "our",   "out",   "over",
      "own",   "same",  "shall", "she",    "should", "so",   "some",  "such",  "than",
      "that",  "the",   "their", "them",   "then",  "there", "these", "they",  "this",
      "those", "to",    "too",   "under",  "up",    "us",    "very",  "was",   "we",
      "were",  "what",  "when",  "where",  "which", "while", "who",   "whom",  "why",
      "will",  "with",  "would", "you",    "your"};
  return kWords;
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LabelError("stopwords: cannot open " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    // Trim whitespace (including a trailing \r from CRLF files).
    const auto begin = line.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r\n");
    words.insert(lowercased(line.substr(begin, end - begin + 1)));
  }
  return words;
}

CooccurrenceGraph build_graph(const std::vector<std::vector<std::string>>& docs, int window,
                              const std::set<std::string>& stopwords) {
  if (window < 2) throw LabelError("build_graph: window must be at least 2");
  if (docs.empty()) throw LabelError("build_graph: empty corpus");

  CooccurrenceGraph graph;
  auto node_id = [&graph](const std::string& word) {
    auto [it, inserted] = graph.index.emplace(word, static_cast<int>(graph.words.size()));
    if (inserted) {
      graph.words.push_back(word);
      graph.adjacency.emplace_back();
    }
    return it->second;
  };

  for (const auto& doc : docs) {
    const std::vector<std::string> view = candidate_view(doc, stopwords);
    for (std::size_t i = 0; i < view.size(); ++i) {
      if (view[i].empty()) continue;
      const int u = node_id(view[i]);
      const std::size_t last = std::min(view.size(), i + static_cast<std::size_t>(window));
      for (std::size_t j = i + 1; j < last; ++j) {
        if (view[j].empty()) continue;
        const int v = node_id(view[j]);
        if (u == v) continue;  // no self-loops
        graph.adjacency[u][v] += 1.0;
        graph.adjacency[v][u] += 1.0;
      }
    }
  }
  return graph;
}

std::vector<Scalar> weighted_pagerank(const CooccurrenceGraph& graph, Scalar damping,
                                      Scalar tolerance, int max_iterations) {
  const Index n = graph.size();
  if (n == 0) throw LabelError("weighted_pagerank: empty graph");
  if (!(damping > 0.0 && damping < 1.0))
    throw LabelError("weighted_pagerank: damping must lie strictly between 0 and 1");
  if (!(tolerance > 0.0)) throw LabelError("weighted_pagerank: tolerance must be positive");
  if (max_iterations < 1) throw LabelError("weighted_pagerank: max_iterations must be at least 1");

  std::vector<Scalar> degree(n, 0.0);
  for (Index v = 0; v < n; ++v)
    for (const auto& [u, w] : graph.adjacency[v]) {
      (void)u;
      degree[v] += w;
    }

  const Scalar teleport = (1.0 - damping) / static_cast<Scalar>(n);
  std::vector<Scalar> scores(n, 1.0 / static_cast<Scalar>(n));
  std::vector<Scalar> next(n, 0.0);

  for (int iter = 0; iter < max_iterations; ++iter) {
    Scalar dangling = 0.0;
    for (Index v = 0; v < n; ++v)
      if (degree[v] == 0.0) dangling += scores[v];
    const Scalar base = teleport + damping * dangling / static_cast<Scalar>(n);

    std::fill(next.begin(), next.end(), base);
    for (Index u = 0; u < n; ++u) {
      if (degree[u] == 0.0) continue;
      const Scalar share = damping * scores[u] / degree[u];
      for (const auto& [v, w] : graph.adjacency[u]) next[v] += share * w;
    }

    Scalar delta = 0.0;
    for (Index v = 0; v < n; ++v) delta += std::abs(next[v] - scores[v]);
    scores.swap(next);
    if (delta < tolerance) return scores;
  }
  throw PagerankDivergence("weighted_pagerank: no convergence within " +
                               std::to_string(max_iterations) + " iterations",
                           scores);
}

std::vector<ScoredPhrase> extract_keywords(const std::vector<std::vector<std::string>>& docs,
                                           int top_k, const LabelerParams& params,
                                           const std::set<std::string>& stopwords) {
  params.validate();
  if (top_k < 1) throw LabelError("extract_keywords: top_k must be positive");

  const CooccurrenceGraph graph = build_graph(docs, params.window, stopwords);
  if (graph.size() == 0) return {};
  std::vector<Scalar> scores;
  try {
    scores = weighted_pagerank(graph, params.damping, params.tolerance, params.max_iterations);
  } catch (const PagerankDivergence& e) {
    // Ranking keywords needs far less precision than the convergence
    // tolerance asks for; the partially converged iterate is still
    // deterministic and orders words the same way.
    scores = e.last_iterate;
  }

  // Candidate items: every contiguous run of 1..3 candidate tokens. A phrase
  // scores the sum of its member word scores.
  std::map<std::string, Scalar> items;
  for (const auto& doc : docs) {
    const std::vector<std::string> view = candidate_view(doc, stopwords);
    for (std::size_t i = 0; i < view.size(); ++i) {
      if (view[i].empty()) continue;
      std::string text;
      Scalar total = 0.0;
      for (std::size_t j = i; j < std::min(view.size(), i + 3); ++j) {
        if (view[j].empty()) break;
        if (j > i) text += ' ';
        text += view[j];
        total += scores[static_cast<std::size_t>(graph.index.at(view[j]))];
        items.emplace(text, total);
      }
    }
  }

  std::vector<ScoredPhrase> ranked;
  ranked.reserve(items.size());
  for (const auto& [text, score] : items) ranked.push_back({text, score});
  std::sort(ranked.begin(), ranked.end(), [](const ScoredPhrase& a, const ScoredPhrase& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.text < b.text;
  });
  if (static_cast<int>(ranked.size()) > top_k) ranked.resize(static_cast<std::size_t>(top_k));
  return ranked;
}

std::string label_cluster(const std::vector<std::vector<std::string>>& cluster_docs,
                          const std::set<std::string>& existing_labels,
                          const LabelerParams& params, const std::set<std::string>& stopwords) {
  if (cluster_docs.empty()) throw LabelError("label_cluster: empty cluster");
  const std::vector<ScoredPhrase> top = extract_keywords(cluster_docs, 1, params, stopwords);
  if (top.empty()) throw LabelError("label_cluster: cluster has no candidate keywords");

  std::string base = top.front().text;
  std::replace(base.begin(), base.end(), ' ', '_');
  if (existing_labels.count(base) == 0) return base;
  for (int suffix = 2;; ++suffix) {
    const std::string candidate = base + "_" + std::to_string(suffix);
    if (existing_labels.count(candidate) == 0) return candidate;
  }
}

std::string tfidf_label_baseline(const std::vector<std::vector<std::string>>& cluster_docs,
                                 const std::vector<std::vector<std::string>>& corpus_docs,
                                 const std::set<std::string>& stopwords) {
  if (cluster_docs.empty()) throw LabelError("tfidf_label_baseline: empty cluster");
  if (corpus_docs.empty()) throw LabelError("tfidf_label_baseline: empty corpus");

  std::map<std::string, Scalar> tf;
  for (const auto& doc : cluster_docs) {
    const std::vector<std::string> view = candidate_view(doc, stopwords);
    for (const std::string& word : view)
      if (!word.empty()) tf[word] += 1.0;
  }
  if (tf.empty()) throw LabelError("tfidf_label_baseline: cluster has no candidate terms");

  std::map<std::string, Scalar> df;
  for (const auto& doc : corpus_docs) {
    std::set<std::string> seen;
    const std::vector<std::string> view = candidate_view(doc, stopwords);
    for (const std::string& word : view)
      if (!word.empty()) seen.insert(word);
    for (const std::string& word : seen) df[word] += 1.0;
  }

  const Scalar n_docs = static_cast<Scalar>(corpus_docs.size());
  std::string best;
  Scalar best_score = -1.0;
  for (const auto& [word, count] : tf) {
    const auto it = df.find(word);
    const Scalar doc_freq = std::max<Scalar>(1.0, it == df.end() ? 0.0 : it->second);
    const Scalar score = count * std::log(n_docs / doc_freq);
    if (score > best_score || (score == best_score && word < best)) {
      best = word;
      best_score = score;
    }
  }
  return best;
}

}  // namespace owcl
