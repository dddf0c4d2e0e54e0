#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "owcl/types.hpp"

namespace owcl {

struct ClusterError : std::runtime_error {
  explicit ClusterError(const std::string& what) : std::runtime_error(what) {}
};

/// Additive cluster summary: count, linear sum and squared sum (the squared
/// sum is the scalar sum of ‖x_i‖²).
struct ClusterFeature {
  long n = 0;
  Vector ls;
  Scalar ss = 0.0;
};

ClusterFeature cf_from_points(const std::vector<Vector>& points);
ClusterFeature cf_merge(const ClusterFeature& a, const ClusterFeature& b);
Vector cf_centroid(const ClusterFeature& cf);

/// Average pairwise distance form sqrt((2n·ss − 2‖ls‖²)/(n(n−1))); 0 for a
/// singleton. Clamped at 0 against Cauchy–Schwarz roundoff.
Scalar cf_diameter(const ClusterFeature& cf);

struct CFTreeParams {
  int branching_factor = 50;  // internal node entry cap
  int leaf_capacity = 50;     // leaf entry cap
  Scalar threshold = 0.5;     // absorb when the merged diameter stays below this

  void validate() const;
};

/// Height-balanced tree of ClusterFeatures. Points descend by nearest
/// centroid; a leaf entry absorbs the point when the merged diameter stays
/// within the threshold, otherwise a fresh entry is made and overfull nodes
/// split by farthest-pair seeding. Leaves are chained for linear scans.
class CFTree {
 public:
  CFTree(Index dim, const CFTreeParams& params);
  CFTree(CFTree&&) noexcept;
  CFTree& operator=(CFTree&&) noexcept;
  ~CFTree();

  void insert(const Vector& point);
  void insert_entry(const ClusterFeature& cf);  // reinsertion during rebuild
  /// Absorb-only insertion used when re-testing parked outliers: succeeds iff
  /// the closest leaf entry can take the feature within the threshold.
  bool try_absorb(const ClusterFeature& cf);

  Index dim() const { return dim_; }
  const CFTreeParams& params() const { return params_; }
  /// Sum of everything inserted; n=0 for an empty tree.
  ClusterFeature root_cf() const;
  /// Leaf entries in leaf-chain order.
  std::vector<ClusterFeature> leaf_entries() const;
  /// Structured text dump (one node per line) for golden-file comparisons.
  std::string dump() const;
  /// Throws ClusterError when any structural invariant is violated.
  void check_structure() const;

 private:
  struct Node;
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Index dim_ = 0;
  CFTreeParams params_;
};

struct RebuildResult {
  CFTree tree;
  std::vector<ClusterFeature> outliers;  // parked entries that fit nowhere
};

/// Reinserts every leaf entry into a fresh tree with the larger threshold.
/// Entries with n below `outlier_floor` are parked first and re-tested at the
/// end: each may be absorbed into its closest surviving leaf entry if the
/// merged diameter fits, otherwise it stays in the outlier buffer.
RebuildResult rebuild(const CFTree& tree, Scalar new_threshold, int outlier_floor = 2);

/// Groups of leaf-entry indices produced by the global clustering phase.
using EntryGrouping = std::vector<std::vector<std::size_t>>;

/// Average-linkage agglomeration over entry centroids, each entry weighted by
/// its point count. Stops at k groups when k is given; otherwise cuts the
/// merge sequence at its largest distance gap (ties resolved toward fewer
/// groups; fewer than two merges collapse to a single group).
EntryGrouping global_cluster(const std::vector<ClusterFeature>& entries,
                             std::optional<int> k);

struct ClusteringResult {
  std::vector<int> assignments;  // per input point; -1 marks an outlier
  std::vector<Vector> centroids;
  std::vector<int> sizes;

  int cluster_count() const { return static_cast<int>(centroids.size()); }
};

/// Redistribution pass: every raw point moves to its nearest seed centroid,
/// points farther than outlier_multiplier × the seed cluster's diameter are
/// flagged as outliers, and centroids are recomputed once from the survivors.
ClusteringResult refine(const std::vector<ClusterFeature>& entries,
                        const EntryGrouping& grouping,
                        const std::vector<Vector>& points,
                        Scalar outlier_multiplier = 3.0);

struct BirchOptions {
  CFTreeParams tree;
  /// When set, the CF-tree is rebuilt at this larger threshold between the
  /// insertion and global phases.
  std::optional<Scalar> rebuild_threshold;
  int outlier_floor = 2;
  Scalar outlier_multiplier = 3.0;
};

/// Full pipeline: insert all → optional rebuild → global_cluster → refine.
ClusteringResult birch_fit(const std::vector<Vector>& points,
                           const BirchOptions& options, std::optional<int> k);

/// Lloyd iterations with k-means++ seeding; runs to convergence (max centroid
/// shift < 1e-6) or 300 iterations. Never produces outliers.
ClusteringResult kmeans_fit(const std::vector<Vector>& points, int k,
                            std::uint64_t seed);

}  // namespace owcl
