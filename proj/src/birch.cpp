#include "owcl/birch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace owcl {
namespace {

Scalar centroid_distance(const ClusterFeature& a, const ClusterFeature& b) {
  return (cf_centroid(a) - cf_centroid(b)).norm();
}

}  // namespace

ClusterFeature cf_from_points(const std::vector<Vector>& points) {
  if (points.empty()) {
    throw ClusterError("cf_from_points: empty point set");
  }
  ClusterFeature cf;
  cf.n = static_cast<long>(points.size());
  cf.ls = Vector::Zero(points.front().size());
  for (const Vector& p : points) {
    if (p.size() != cf.ls.size()) {
      throw ClusterError("cf_from_points: dimension mismatch");
    }
    cf.ls += p;
    cf.ss += p.squaredNorm();
  }
  return cf;
}

ClusterFeature cf_merge(const ClusterFeature& a, const ClusterFeature& b) {
  if (a.n == 0) return b;
  if (b.n == 0) return a;
  if (a.ls.size() != b.ls.size()) {
    throw ClusterError("cf_merge: dimension mismatch");
  }
  ClusterFeature out;
  out.n = a.n + b.n;
  out.ls = a.ls + b.ls;
  out.ss = a.ss + b.ss;
  return out;
}

Vector cf_centroid(const ClusterFeature& cf) {
  if (cf.n < 1) {
    throw ClusterError("cf_centroid: empty cluster feature");
  }
  return cf.ls / static_cast<Scalar>(cf.n);
}

Scalar cf_diameter(const ClusterFeature& cf) {
  if (cf.n < 1) {
    throw ClusterError("cf_diameter: empty cluster feature");
  }
  if (cf.n == 1) {
    return 0.0;
  }
  const Scalar nn = static_cast<Scalar>(cf.n);
  const Scalar num = 2.0 * nn * cf.ss - 2.0 * cf.ls.squaredNorm();
  const Scalar sq = num / (nn * (nn - 1.0));
  return std::sqrt(std::max(sq, 0.0));  // Cauchy–Schwarz can go -1e-16
}

void CFTreeParams::validate() const {
  if (branching_factor < 2) {
    throw ClusterError("cf-tree: branching factor must be at least 2");
  }
  if (leaf_capacity < 1) {
    throw ClusterError("cf-tree: leaf capacity must be at least 1");
  }
  if (threshold < 0.0) {
    throw ClusterError("cf-tree: threshold must be non-negative");
  }
}

struct CFTree::Node {
  bool leaf = true;
  std::vector<ClusterFeature> cfs;
  std::vector<std::unique_ptr<Node>> kids;  // parallel to cfs; empty in leaves
  Node* prev = nullptr;
  Node* next = nullptr;

  ClusterFeature total() const {
    ClusterFeature sum;
    for (const ClusterFeature& cf : cfs) sum = cf_merge(sum, cf);
    return sum;
  }
};

struct CFTree::Impl {
  std::unique_ptr<Node> root;
  Node* leaf_head = nullptr;

  struct Split {
    ClusterFeature cf;
    std::unique_ptr<Node> node;
  };

  /// Splits an overfull node in place: the farthest centroid pair seeds the
  /// original node and a fresh sibling, everything else joins the nearer seed.
  Split split_node(Node* node) {
    std::size_t si = 0, sj = 1;
    Scalar best = -1.0;
    for (std::size_t i = 0; i < node->cfs.size(); ++i) {
      for (std::size_t j = i + 1; j < node->cfs.size(); ++j) {
        const Scalar d = centroid_distance(node->cfs[i], node->cfs[j]);
        if (d > best) {
          best = d;
          si = i;
          sj = j;
        }
      }
    }
    const Vector left_seed = cf_centroid(node->cfs[si]);
    const Vector right_seed = cf_centroid(node->cfs[sj]);

    auto right = std::make_unique<Node>();
    right->leaf = node->leaf;
    std::vector<ClusterFeature> left_cfs;
    std::vector<std::unique_ptr<Node>> left_kids;
    for (std::size_t i = 0; i < node->cfs.size(); ++i) {
      const Vector c = cf_centroid(node->cfs[i]);
      const bool to_left =
          i == si ||
          (i != sj && (c - left_seed).norm() <= (c - right_seed).norm());
      if (to_left) {
        left_cfs.push_back(std::move(node->cfs[i]));
        if (!node->leaf) left_kids.push_back(std::move(node->kids[i]));
      } else {
        right->cfs.push_back(std::move(node->cfs[i]));
        if (!node->leaf) right->kids.push_back(std::move(node->kids[i]));
      }
    }
    node->cfs = std::move(left_cfs);
    node->kids = std::move(left_kids);

    if (node->leaf) {
      right->next = node->next;
      if (right->next) right->next->prev = right.get();
      right->prev = node;
      node->next = right.get();
    }
    Split out;
    out.cf = right->total();
    out.node = std::move(right);
    return out;
  }

  std::optional<Split> insert_rec(Node* node, const ClusterFeature& cf,
                                  const CFTreeParams& params) {
    if (node->leaf) {
      if (!node->cfs.empty()) {
        std::size_t closest = 0;
        Scalar best = std::numeric_limits<Scalar>::infinity();
        for (std::size_t i = 0; i < node->cfs.size(); ++i) {
          const Scalar d = centroid_distance(node->cfs[i], cf);
          if (d < best) {
            best = d;
            closest = i;
          }
        }
        const ClusterFeature merged = cf_merge(node->cfs[closest], cf);
        if (cf_diameter(merged) <= params.threshold) {
          node->cfs[closest] = merged;
          return std::nullopt;
        }
      }
      node->cfs.push_back(cf);
      if (static_cast<int>(node->cfs.size()) > params.leaf_capacity) {
        return split_node(node);
      }
      return std::nullopt;
    }

    std::size_t closest = 0;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (std::size_t i = 0; i < node->cfs.size(); ++i) {
      const Scalar d = centroid_distance(node->cfs[i], cf);
      if (d < best) {
        best = d;
        closest = i;
      }
    }
    auto split = insert_rec(node->kids[closest].get(), cf, params);
    node->cfs[closest] = node->kids[closest]->total();
    if (split) {
      node->cfs.insert(node->cfs.begin() + static_cast<long>(closest) + 1,
                       std::move(split->cf));
      node->kids.insert(node->kids.begin() + static_cast<long>(closest) + 1,
                        std::move(split->node));
      if (static_cast<int>(node->cfs.size()) > params.branching_factor) {
        return split_node(node);
      }
    }
    return std::nullopt;
  }

  void insert_cf(const ClusterFeature& cf, const CFTreeParams& params) {
    auto split = insert_rec(root.get(), cf, params);
    if (split) {
      auto old_root = std::move(root);
      root = std::make_unique<Node>();
      root->leaf = false;
      root->cfs.push_back(old_root->total());
      root->kids.push_back(std::move(old_root));
      root->cfs.push_back(std::move(split->cf));
      root->kids.push_back(std::move(split->node));
    }
  }

  bool try_absorb_rec(Node* node, const ClusterFeature& cf,
                      const CFTreeParams& params) {
    if (node->cfs.empty()) {
      return false;
    }
    std::size_t closest = 0;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (std::size_t i = 0; i < node->cfs.size(); ++i) {
      const Scalar d = centroid_distance(node->cfs[i], cf);
      if (d < best) {
        best = d;
        closest = i;
      }
    }
    if (node->leaf) {
      const ClusterFeature merged = cf_merge(node->cfs[closest], cf);
      if (cf_diameter(merged) <= params.threshold) {
        node->cfs[closest] = merged;
        return true;
      }
      return false;
    }
    if (try_absorb_rec(node->kids[closest].get(), cf, params)) {
      node->cfs[closest] = node->kids[closest]->total();
      return true;
    }
    return false;
  }
};

CFTree::CFTree(Index dim, const CFTreeParams& params)
    : impl_(std::make_unique<Impl>()), dim_(dim), params_(params) {
  if (dim < 1) {
    throw ClusterError("cf-tree: dimension must be positive");
  }
  params_.validate();
  impl_->root = std::make_unique<Node>();
  impl_->leaf_head = impl_->root.get();
}

CFTree::CFTree(CFTree&&) noexcept = default;
CFTree& CFTree::operator=(CFTree&&) noexcept = default;
CFTree::~CFTree() = default;

void CFTree::insert(const Vector& point) {
  if (point.size() != dim_) {
    throw ClusterError("cf-tree insert: dimension mismatch");
  }
  ClusterFeature cf;
  cf.n = 1;
  cf.ls = point;
  cf.ss = point.squaredNorm();
  impl_->insert_cf(cf, params_);
}

void CFTree::insert_entry(const ClusterFeature& cf) {
  if (cf.n < 1) {
    throw ClusterError("cf-tree insert_entry: empty cluster feature");
  }
  if (cf.ls.size() != dim_) {
    throw ClusterError("cf-tree insert_entry: dimension mismatch");
  }
  impl_->insert_cf(cf, params_);
}

bool CFTree::try_absorb(const ClusterFeature& cf) {
  if (cf.n < 1 || cf.ls.size() != dim_) {
    throw ClusterError("cf-tree try_absorb: bad cluster feature");
  }
  return impl_->try_absorb_rec(impl_->root.get(), cf, params_);
}

ClusterFeature CFTree::root_cf() const { return impl_->root->total(); }

std::vector<ClusterFeature> CFTree::leaf_entries() const {
  std::vector<ClusterFeature> out;
  for (const Node* leaf = impl_->leaf_head; leaf != nullptr; leaf = leaf->next) {
    for (const ClusterFeature& cf : leaf->cfs) {
      out.push_back(cf);
    }
  }
  return out;
}

std::string CFTree::dump() const {
  std::ostringstream os;
  const auto fmt = [&os](const ClusterFeature& cf) {
    os << "n=" << cf.n << " ls=(";
    for (Index i = 0; i < cf.ls.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", cf.ls[i]);
      os << (i ? ", " : "") << buf;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", cf.ss);
    os << ") ss=" << buf;
  };
  const std::function<void(const Node*, int)> walk = [&](const Node* node,
                                                         int depth) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    os << pad << (node->leaf ? "leaf" : "internal") << " entries="
       << node->cfs.size() << "\n";
    for (std::size_t i = 0; i < node->cfs.size(); ++i) {
      os << pad << "  entry ";
      fmt(node->cfs[i]);
      os << "\n";
      if (!node->leaf) {
        walk(node->kids[i].get(), depth + 2);
      }
    }
  };
  walk(impl_->root.get(), 0);
  return os.str();
}

void CFTree::check_structure() const {
  std::vector<const Node*> walk_leaves;
  std::set<int> leaf_depths;
  const std::function<void(const Node*, int)> verify = [&](const Node* node,
                                                           int depth) {
    if (node->leaf) {
      if (static_cast<int>(node->cfs.size()) > params_.leaf_capacity) {
        throw ClusterError("cf-tree invariant: leaf over capacity");
      }
      for (const ClusterFeature& cf : node->cfs) {
        if (cf.n > 1 && cf_diameter(cf) > params_.threshold + 1e-9) {
          throw ClusterError("cf-tree invariant: leaf entry diameter exceeds threshold");
        }
      }
      walk_leaves.push_back(node);
      leaf_depths.insert(depth);
      return;
    }
    if (node->cfs.size() != node->kids.size()) {
      throw ClusterError("cf-tree invariant: entry/child count mismatch");
    }
    if (static_cast<int>(node->cfs.size()) > params_.branching_factor) {
      throw ClusterError("cf-tree invariant: internal node over capacity");
    }
    for (std::size_t i = 0; i < node->cfs.size(); ++i) {
      const ClusterFeature sum = node->kids[i]->total();
      const Scalar scale = std::max(1.0, node->cfs[i].ls.norm());
      if (node->cfs[i].n != sum.n ||
          (node->cfs[i].ls - sum.ls).norm() > 1e-9 * scale ||
          std::abs(node->cfs[i].ss - sum.ss) > 1e-9 * std::max(1.0, sum.ss)) {
        throw ClusterError("cf-tree invariant: internal entry out of sync");
      }
      verify(node->kids[i].get(), depth + 1);
    }
  };
  verify(impl_->root.get(), 0);
  if (leaf_depths.size() > 1) {
    throw ClusterError("cf-tree invariant: leaves at differing depths");
  }

  // The chain must visit every leaf exactly once with symmetric links; its
  // order legitimately diverges from the tree walk once internal splits
  // shuffle subtrees.
  std::vector<const Node*> chain_leaves;
  const Node* prev = nullptr;
  for (const Node* leaf = impl_->leaf_head; leaf != nullptr; leaf = leaf->next) {
    if (leaf->prev != prev) {
      throw ClusterError("cf-tree invariant: leaf chain prev link broken");
    }
    chain_leaves.push_back(leaf);
    prev = leaf;
    if (chain_leaves.size() > walk_leaves.size()) {
      throw ClusterError("cf-tree invariant: leaf chain longer than leaf set");
    }
  }
  std::set<const Node*> chain_set(chain_leaves.begin(), chain_leaves.end());
  std::set<const Node*> walk_set(walk_leaves.begin(), walk_leaves.end());
  if (chain_set.size() != chain_leaves.size() || chain_set != walk_set) {
    throw ClusterError("cf-tree invariant: leaf chain does not cover the leaves");
  }
}

RebuildResult rebuild(const CFTree& tree, Scalar new_threshold, int outlier_floor) {
  if (new_threshold < tree.params().threshold) {
    throw ClusterError("rebuild: new threshold must not shrink");
  }
  CFTreeParams params = tree.params();
  params.threshold = new_threshold;
  CFTree fresh(tree.dim(), params);

  std::vector<ClusterFeature> parked;
  for (const ClusterFeature& cf : tree.leaf_entries()) {
    if (cf.n < outlier_floor) {
      parked.push_back(cf);
    } else {
      fresh.insert_entry(cf);
    }
  }

  RebuildResult out{std::move(fresh), {}};
  for (const ClusterFeature& cf : parked) {
    // Re-test: an outlier may rejoin only by absorption, never as a new entry.
    if (!out.tree.try_absorb(cf)) {
      out.outliers.push_back(cf);
    }
  }
  return out;
}

EntryGrouping global_cluster(const std::vector<ClusterFeature>& entries,
                             std::optional<int> k) {
  const std::size_t m = entries.size();
  if (m == 0) {
    throw ClusterError("global_cluster: no entries");
  }
  if (k && (*k < 1 || static_cast<std::size_t>(*k) > m)) {
    throw ClusterError("global_cluster: cluster count out of range");
  }

  // Pairwise centroid distances, reused across every linkage evaluation.
  std::vector<Vector> centroids(m);
  std::vector<Scalar> weights(m);
  for (std::size_t i = 0; i < m; ++i) {
    centroids[i] = cf_centroid(entries[i]);
    weights[i] = static_cast<Scalar>(entries[i].n);
  }
  std::vector<std::vector<Scalar>> dist(m, std::vector<Scalar>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      dist[i][j] = dist[j][i] = (centroids[i] - centroids[j]).norm();
    }
  }

  struct Cluster {
    std::vector<std::size_t> members;
    Scalar weight = 0.0;
  };
  const auto linkage = [&](const Cluster& a, const Cluster& b) {
    Scalar sum = 0.0;
    for (std::size_t i : a.members) {
      for (std::size_t j : b.members) {
        sum += weights[i] * weights[j] * dist[i][j];
      }
    }
    return sum / (a.weight * b.weight);
  };

  const auto run = [&](std::size_t stop_at, std::vector<Scalar>* merge_dists) {
    std::vector<Cluster> active;
    for (std::size_t i = 0; i < m; ++i) {
      active.push_back({{i}, weights[i]});
    }
    while (active.size() > stop_at) {
      std::size_t bi = 0, bj = 1;
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (std::size_t i = 0; i < active.size(); ++i) {
        for (std::size_t j = i + 1; j < active.size(); ++j) {
          const Scalar d = linkage(active[i], active[j]);
          if (d < best) {
            best = d;
            bi = i;
            bj = j;
          }
        }
      }
      if (merge_dists) merge_dists->push_back(best);
      Cluster merged;
      merged.members = active[bi].members;
      merged.members.insert(merged.members.end(), active[bj].members.begin(),
                            active[bj].members.end());
      std::sort(merged.members.begin(), merged.members.end());
      merged.weight = active[bi].weight + active[bj].weight;
      active.erase(active.begin() + static_cast<long>(bj));
      active[bi] = std::move(merged);
    }
    return active;
  };

  std::size_t target;
  if (k) {
    target = static_cast<std::size_t>(*k);
  } else if (m <= 2) {
    target = 1;  // no interior gap to inspect
  } else {
    std::vector<Scalar> merge_dists;
    run(1, &merge_dists);
    // Cut after the merge preceding the largest distance jump; equal gaps
    // resolve toward the later cut, i.e. fewer clusters.
    std::size_t cut = 0;
    Scalar best_gap = -std::numeric_limits<Scalar>::infinity();
    for (std::size_t i = 0; i + 1 < merge_dists.size(); ++i) {
      const Scalar gap = merge_dists[i + 1] - merge_dists[i];
      if (gap >= best_gap) {
        best_gap = gap;
        cut = i + 1;  // number of merges performed before stopping
      }
    }
    target = m - cut;
  }

  auto final_active = run(target, nullptr);
  std::sort(final_active.begin(), final_active.end(),
            [](const auto& a, const auto& b) {
              return a.members.front() < b.members.front();
            });
  EntryGrouping out;
  for (auto& cluster : final_active) {
    out.push_back(std::move(cluster.members));
  }
  return out;
}

ClusteringResult refine(const std::vector<ClusterFeature>& entries,
                        const EntryGrouping& grouping,
                        const std::vector<Vector>& points,
                        Scalar outlier_multiplier) {
  if (grouping.empty()) {
    throw ClusterError("refine: empty grouping");
  }
  if (points.empty()) {
    throw ClusterError("refine: no points to redistribute");
  }
  std::vector<Vector> seeds;
  std::vector<Scalar> diameters;
  for (const auto& group : grouping) {
    if (group.empty()) {
      throw ClusterError("refine: empty group");
    }
    ClusterFeature merged;
    for (std::size_t idx : group) {
      if (idx >= entries.size()) {
        throw ClusterError("refine: group references a missing entry");
      }
      merged = cf_merge(merged, entries[idx]);
    }
    seeds.push_back(cf_centroid(merged));
    diameters.push_back(cf_diameter(merged));
  }

  ClusteringResult result;
  result.assignments.assign(points.size(), -1);
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (points[p].size() != seeds.front().size()) {
      throw ClusterError("refine: point dimension mismatch");
    }
    std::size_t nearest = 0;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (std::size_t c = 0; c < seeds.size(); ++c) {
      const Scalar d = (points[p] - seeds[c]).norm();
      if (d < best) {
        best = d;
        nearest = c;
      }
    }
    if (best > outlier_multiplier * diameters[nearest]) {
      result.assignments[p] = -1;
    } else {
      result.assignments[p] = static_cast<int>(nearest);
    }
  }

  result.centroids.assign(seeds.begin(), seeds.end());
  result.sizes.assign(seeds.size(), 0);
  std::vector<Vector> sums(seeds.size(),
                           Vector::Zero(seeds.front().size()));
  for (std::size_t p = 0; p < points.size(); ++p) {
    const int c = result.assignments[p];
    if (c >= 0) {
      sums[static_cast<std::size_t>(c)] += points[p];
      ++result.sizes[static_cast<std::size_t>(c)];
    }
  }
  for (std::size_t c = 0; c < seeds.size(); ++c) {
    if (result.sizes[c] > 0) {
      result.centroids[c] = sums[c] / static_cast<Scalar>(result.sizes[c]);
    }
  }
  return result;
}

ClusteringResult birch_fit(const std::vector<Vector>& points,
                           const BirchOptions& options, std::optional<int> k) {
  if (points.empty()) {
    throw ClusterError("birch_fit: empty point set");
  }
  CFTree tree(points.front().size(), options.tree);
  for (const Vector& p : points) {
    tree.insert(p);
  }
  std::vector<ClusterFeature> entries;
  if (options.rebuild_threshold) {
    RebuildResult rebuilt =
        rebuild(tree, *options.rebuild_threshold, options.outlier_floor);
    entries = rebuilt.tree.leaf_entries();
  } else {
    entries = tree.leaf_entries();
  }
  if (entries.empty()) {
    throw ClusterError("birch_fit: every entry was parked as an outlier");
  }
  const EntryGrouping grouping = global_cluster(entries, k);
  return refine(entries, grouping, points, options.outlier_multiplier);
}

ClusteringResult kmeans_fit(const std::vector<Vector>& points, int k,
                            std::uint64_t seed) {
  const std::size_t n = points.size();
  if (n == 0) {
    throw ClusterError("kmeans_fit: empty point set");
  }
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw ClusterError("kmeans_fit: cluster count out of range");
  }
  const Index dim = points.front().size();
  for (const Vector& p : points) {
    if (p.size() != dim) {
      throw ClusterError("kmeans_fit: dimension mismatch");
    }
  }

  Rng rng(seed);
  std::vector<Vector> centers;
  centers.push_back(points[rng.uniform_index(n)]);
  std::vector<Scalar> d2(n);
  while (static_cast<int>(centers.size()) < k) {
    Scalar total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (const Vector& c : centers) {
        best = std::min(best, (points[i] - c).squaredNorm());
      }
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      // All remaining points coincide with existing centers; duplicate one.
      centers.push_back(points[centers.size() % n]);
      continue;
    }
    const Scalar r = rng.uniform() * total;
    Scalar acc = 0.0;
    std::size_t chosen = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc >= r) {
        chosen = i;
        break;
      }
    }
    centers.push_back(points[chosen]);
  }

  std::vector<int> assign(n, 0);
  for (int iter = 0; iter < 300; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      int nearest = 0;
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (int c = 0; c < k; ++c) {
        const Scalar d = (points[i] - centers[static_cast<std::size_t>(c)]).squaredNorm();
        if (d < best) {
          best = d;
          nearest = c;
        }
      }
      assign[i] = nearest;
    }
    std::vector<Vector> sums(static_cast<std::size_t>(k), Vector::Zero(dim));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[static_cast<std::size_t>(assign[i])] += points[i];
      ++counts[static_cast<std::size_t>(assign[i])];
    }
    Scalar shift = 0.0;
    for (int c = 0; c < k; ++c) {
      Vector updated;
      if (counts[static_cast<std::size_t>(c)] > 0) {
        updated = sums[static_cast<std::size_t>(c)] /
                  static_cast<Scalar>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Re-seed an empty cluster at the point farthest from its center.
        std::size_t far = 0;
        Scalar far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const Scalar d =
              (points[i] - centers[static_cast<std::size_t>(assign[i])]).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        updated = points[far];
      }
      shift = std::max(shift, (updated - centers[static_cast<std::size_t>(c)]).norm());
      centers[static_cast<std::size_t>(c)] = updated;
    }
    if (shift < 1e-6) {
      break;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    int nearest = 0;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (int c = 0; c < k; ++c) {
      const Scalar d = (points[i] - centers[static_cast<std::size_t>(c)]).squaredNorm();
      if (d < best) {
        best = d;
        nearest = c;
      }
    }
    assign[i] = nearest;
  }

  ClusteringResult result;
  result.assignments = std::move(assign);
  result.centroids = std::move(centers);
  result.sizes.assign(static_cast<std::size_t>(k), 0);
  for (int a : result.assignments) {
    ++result.sizes[static_cast<std::size_t>(a)];
  }
  return result;
}

}  // namespace owcl
