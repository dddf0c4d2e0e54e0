#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "owcl/types.hpp"

namespace owcl {

struct LabelError : std::runtime_error {
  explicit LabelError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when PageRank fails to converge; carries the last iterate so
/// callers can inspect how far the computation got.
struct PagerankDivergence : LabelError {
  PagerankDivergence(const std::string& what, std::vector<Scalar> iterate)
      : LabelError(what), last_iterate(std::move(iterate)) {}
  std::vector<Scalar> last_iterate;
};

/// Undirected word co-occurrence graph. Node ids are assigned in order of
/// first appearance; adjacency weights count co-occurrences.
struct CooccurrenceGraph {
  std::vector<std::string> words;                // node id -> token
  std::map<std::string, int> index;              // token -> node id
  std::vector<std::map<int, Scalar>> adjacency;  // node id -> neighbor -> weight

  Index size() const { return static_cast<Index>(words.size()); }
};

struct ScoredPhrase {
  std::string text;  // tokens joined by single spaces
  Scalar score = 0.0;
};

struct LabelerParams {
  int window = 10;
  Scalar damping = 0.85;
  Scalar tolerance = 1e-8;
  int max_iterations = 100;

  void validate() const;
};

/// The stopword list shipped with the library: a small set of high-frequency
/// English function words.
const std::set<std::string>& default_stopwords();

/// Loads a stopword file, one token per line (lowercased, blank lines skipped).
std::set<std::string> load_stopwords(const std::string& path);

/// Builds the co-occurrence graph over all documents. Candidate tokens are
/// lowercased, at least three characters long, and not stopwords; an edge
/// (u, v) gains one unit of weight for every pair of candidate positions that
/// fall within a window of `window` consecutive tokens of the original
/// sequence. No self-loops.
CooccurrenceGraph build_graph(const std::vector<std::vector<std::string>>& docs,
                              int window, const std::set<std::string>& stopwords);

/// Weighted PageRank on the co-occurrence graph:
///   score_v = (1-d)/N + d * sum_u w(u,v)/deg_w(u) * score_u
/// iterated from the uniform vector until the L1 change drops below
/// `tolerance`. Mass sitting on isolated nodes is redistributed uniformly
/// (the usual dangling-node treatment), so scores always sum to one.
/// Throws PagerankDivergence after `max_iterations` sweeps without
/// convergence.
std::vector<Scalar> weighted_pagerank(const CooccurrenceGraph& graph, Scalar damping,
                                      Scalar tolerance, int max_iterations);

/// Ranks single candidate words and adjacent candidate runs of up to three
/// tokens. A phrase scores the sum of its member word scores; items are
/// unique, ordered by score with lexicographic tie-break, and at most `top_k`
/// are returned. If PageRank stops short of the tolerance the last iterate is
/// used; rankings are insensitive to that residual.
std::vector<ScoredPhrase> extract_keywords(const std::vector<std::vector<std::string>>& docs,
                                           int top_k, const LabelerParams& params,
                                           const std::set<std::string>& stopwords);

/// Names a cluster after its top keyword phrase: tokens lowercased and joined
/// with underscores. If the name is already taken a numeric suffix (_2, _3,
/// ...) disambiguates. Throws LabelError when the cluster is empty or yields
/// no candidate keywords.
std::string label_cluster(const std::vector<std::vector<std::string>>& cluster_docs,
                          const std::set<std::string>& existing_labels,
                          const LabelerParams& params, const std::set<std::string>& stopwords);

/// Baseline labeler: the candidate term of the cluster with the highest
/// tf * log(N / df) score against the corpus, ties broken lexicographically.
std::string tfidf_label_baseline(const std::vector<std::vector<std::string>>& cluster_docs,
                                 const std::vector<std::vector<std::string>>& corpus_docs,
                                 const std::set<std::string>& stopwords);

}  // namespace owcl
