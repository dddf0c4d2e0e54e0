#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "owcl/birch.hpp"
#include "owcl/types.hpp"

using namespace owcl;

namespace {

Vector v2(Scalar x, Scalar y) {
  Vector v(2);
  v << x, y;
  return v;
}

struct Blobs {
  std::vector<Vector> points;
  std::vector<int> gold;
};

Blobs make_blobs(const std::vector<Vector>& centers, Scalar sigma, int per_center,
                 std::uint64_t seed) {
  Blobs out;
  Rng rng(seed);
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int i = 0; i < per_center; ++i) {
      out.points.push_back(centers[c] + sigma * rng.normal_vector(centers[c].size()));
      out.gold.push_back(static_cast<int>(c));
    }
  }
  return out;
}

/// Independent conditional-entropy homogeneity used as the clustering oracle.
double homogeneity_oracle(const std::vector<int>& gold, const std::vector<int>& pred) {
  std::map<int, int> class_count;
  std::map<std::pair<int, int>, int> joint;
  std::map<int, int> cluster_count;
  int n = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (pred[i] < 0) continue;  // outliers excluded
    ++class_count[gold[i]];
    ++cluster_count[pred[i]];
    ++joint[{gold[i], pred[i]}];
    ++n;
  }
  if (n == 0) return 0.0;
  double h_c = 0.0;
  for (auto& [c, cnt] : class_count) {
    const double p = static_cast<double>(cnt) / n;
    h_c -= p * std::log(p);
  }
  if (h_c == 0.0) return 1.0;
  double h_ck = 0.0;
  for (auto& [ck, cnt] : joint) {
    const double p_joint = static_cast<double>(cnt) / n;
    const double p_k = static_cast<double>(cluster_count[ck.second]) / n;
    h_ck -= p_joint * std::log(p_joint / p_k);
  }
  return 1.0 - h_ck / h_c;
}

double inertia(const std::vector<Vector>& points, const ClusteringResult& r) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    total += (points[i] - r.centroids[static_cast<std::size_t>(r.assignments[i])])
                 .squaredNorm();
  }
  return total;
}

std::multiset<std::string> entry_fingerprints(const std::vector<ClusterFeature>& entries) {
  std::multiset<std::string> out;
  for (const ClusterFeature& cf : entries) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "n=%ld ls=%.9g,%.9g ss=%.9g", cf.n, cf.ls[0],
                  cf.ls.size() > 1 ? cf.ls[1] : 0.0, cf.ss);
    out.insert(buf);
  }
  return out;
}

}  // namespace

TEST_CASE("cluster feature sums") {
  const ClusterFeature cf = cf_from_points({v2(1, 2), v2(3, 4)});
  CHECK(cf.n == 2);
  CHECK(cf.ls[0] == 4.0);
  CHECK(cf.ls[1] == 6.0);
  CHECK(cf.ss == doctest::Approx(30.0).epsilon(1e-12));  // 1+4+9+16

  const ClusterFeature single = cf_from_points({v2(2, -1)});
  CHECK(single.n == 1);
  CHECK(single.ls[0] == 2.0);
  CHECK(single.ss == doctest::Approx(5.0).epsilon(1e-12));

  CHECK_THROWS_AS(cf_from_points({}), ClusterError);
  Vector three(3);
  three << 1, 2, 3;
  CHECK_THROWS_AS(cf_from_points({v2(1, 2), three}), ClusterError);
}

TEST_CASE("cluster feature additivity over random partitions") {
  Rng rng(11);
  std::vector<Vector> points;
  for (int i = 0; i < 100; ++i) points.push_back(rng.normal_vector(3));
  const ClusterFeature whole = cf_from_points(points);

  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<Vector>> parts(1 + rng.uniform_index(5));
    for (const Vector& p : points) {
      parts[rng.uniform_index(parts.size())].push_back(p);
    }
    ClusterFeature merged;
    for (const auto& part : parts) {
      if (!part.empty()) merged = cf_merge(merged, cf_from_points(part));
    }
    CHECK(merged.n == whole.n);
    CHECK((merged.ls - whole.ls).norm() < 1e-9);
    CHECK(std::abs(merged.ss - whole.ss) < 1e-9 * std::max(1.0, whole.ss));
  }
}

TEST_CASE("cluster feature merge basics") {
  const ClusterFeature a = cf_from_points({v2(1, 2), v2(3, 4)});
  const ClusterFeature neutral;  // n = 0
  const ClusterFeature same = cf_merge(a, neutral);
  CHECK(same.n == a.n);
  CHECK((same.ls - a.ls).norm() == 0.0);

  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    const ClusterFeature x = cf_from_points({rng.normal_vector(2), rng.normal_vector(2)});
    const ClusterFeature y = cf_from_points({rng.normal_vector(2)});
    const ClusterFeature xy = cf_merge(x, y);
    const ClusterFeature yx = cf_merge(y, x);
    CHECK(xy.n == yx.n);
    CHECK((xy.ls - yx.ls).norm() == 0.0);
    CHECK(xy.ss == yx.ss);
  }
}

TEST_CASE("centroid and diameter") {
  ClusterFeature cf;
  cf.n = 2;
  cf.ls = v2(4, 6);
  cf.ss = 30.0;
  const Vector c = cf_centroid(cf);
  CHECK(c[0] == 2.0);
  CHECK(c[1] == 3.0);

  const ClusterFeature single = cf_from_points({v2(0.5, -0.25)});
  CHECK((cf_centroid(single) - v2(0.5, -0.25)).norm() == 0.0);
  CHECK(cf_diameter(single) == 0.0);

  // Mean oracle on random points.
  Rng rng(17);
  std::vector<Vector> pts;
  Vector mean = Vector::Zero(3);
  for (int i = 0; i < 25; ++i) {
    pts.push_back(rng.normal_vector(3));
    mean += pts.back();
  }
  mean /= 25.0;
  CHECK((cf_centroid(cf_from_points(pts)) - mean).norm() < 1e-12);

  const ClusterFeature twin = cf_from_points({v2(1, 1), v2(1, 1)});
  CHECK(cf_diameter(twin) == doctest::Approx(0.0).epsilon(1e-9));

  // Hand computation: points 0 and 2 on a line have diameter 2.
  Vector p0(1), p1(1);
  p0 << 0.0;
  p1 << 2.0;
  CHECK(cf_diameter(cf_from_points({p0, p1})) == doctest::Approx(2.0).epsilon(1e-12));

  for (int i = 0; i < 50; ++i) {
    std::vector<Vector> random_pts;
    for (int j = 0; j < 5; ++j) random_pts.push_back(rng.normal_vector(2));
    CHECK(cf_diameter(cf_from_points(random_pts)) >= 0.0);
  }
  ClusterFeature empty;
  CHECK_THROWS_AS(cf_centroid(empty), ClusterError);
  CHECK_THROWS_AS(cf_diameter(empty), ClusterError);
}

TEST_CASE("cf-tree insertion") {
  CFTreeParams params;
  params.branching_factor = 4;
  params.leaf_capacity = 4;
  params.threshold = 0.1;

  SUBCASE("empty tree then one point") {
    CFTree tree(2, params);
    CHECK(tree.root_cf().n == 0);
    tree.insert(v2(1, 1));
    const auto entries = tree.leaf_entries();
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].n == 1);
    tree.check_structure();
  }

  SUBCASE("infinite threshold absorbs everything") {
    CFTreeParams loose = params;
    loose.threshold = 1e18;
    CFTree tree(2, loose);
    Rng rng(19);
    std::vector<Vector> pts;
    for (int i = 0; i < 50; ++i) {
      pts.push_back(rng.normal_vector(2));
      tree.insert(pts.back());
    }
    CHECK(tree.leaf_entries().size() == 1);
    const ClusterFeature whole = cf_from_points(pts);
    const ClusterFeature root = tree.root_cf();
    CHECK(root.n == whole.n);
    CHECK((root.ls - whole.ls).norm() < 1e-9 * std::max(1.0, whole.ls.norm()));
    tree.check_structure();
  }

  SUBCASE("200 random points conserve global sums through splits") {
    CFTree tree(2, params);
    Rng rng(23);
    std::vector<Vector> pts;
    for (int i = 0; i < 200; ++i) {
      pts.push_back(rng.normal_vector(2));
      tree.insert(pts.back());
    }
    tree.check_structure();
    const ClusterFeature whole = cf_from_points(pts);
    const ClusterFeature root = tree.root_cf();
    CHECK(root.n == 200);
    CHECK((root.ls - whole.ls).norm() < 1e-9 * std::max(1.0, whole.ls.norm()));
    CHECK(std::abs(root.ss - whole.ss) < 1e-9 * std::max(1.0, whole.ss));
    CHECK(tree.leaf_entries().size() > 4);  // the fine threshold forces splits
  }

  SUBCASE("dimension mismatch") {
    CFTree tree(2, params);
    Vector three(3);
    three << 1, 2, 3;
    CHECK_THROWS_AS(tree.insert(three), ClusterError);
  }

  SUBCASE("dump lists every leaf entry") {
    CFTree tree(2, params);
    tree.insert(v2(0, 0));
    tree.insert(v2(5, 5));
    const std::string text = tree.dump();
    CHECK(text.find("leaf") != std::string::npos);
    CHECK(text.find("n=1") != std::string::npos);
  }
}

TEST_CASE("rebuild") {
  CFTreeParams params;
  params.branching_factor = 4;
  params.leaf_capacity = 4;
  params.threshold = 0.5;

  SUBCASE("same threshold, no outlier floor keeps the leaf multiset") {
    CFTree tree(2, params);
    // Three tight, well separated groups: no cross-group absorption possible.
    const Blobs blobs = make_blobs({v2(0, 0), v2(10, 0), v2(0, 10)}, 0.05, 8, 29);
    for (const Vector& p : blobs.points) tree.insert(p);
    const auto before = entry_fingerprints(tree.leaf_entries());

    RebuildResult rebuilt = rebuild(tree, params.threshold, /*outlier_floor=*/0);
    CHECK(rebuilt.outliers.empty());
    CHECK(entry_fingerprints(rebuilt.tree.leaf_entries()) == before);
    rebuilt.tree.check_structure();
  }

  SUBCASE("point count is conserved across tree plus outlier buffer") {
    CFTree tree(2, params);
    const Blobs blobs = make_blobs({v2(0, 0), v2(8, 8)}, 0.05, 10, 31);
    for (const Vector& p : blobs.points) tree.insert(p);
    tree.insert(v2(100, 100));  // isolated straggler becomes a singleton entry
    const long total = tree.root_cf().n;

    RebuildResult rebuilt = rebuild(tree, 1.0, /*outlier_floor=*/2);
    long kept = rebuilt.tree.root_cf().n;
    for (const ClusterFeature& cf : rebuilt.outliers) kept += cf.n;
    CHECK(kept == total);
    CHECK_FALSE(rebuilt.outliers.empty());
  }

  SUBCASE("larger threshold never increases the entry count") {
    for (std::uint64_t seed = 40; seed < 60; ++seed) {
      CFTree tree(2, params);
      Rng rng(seed);
      for (int i = 0; i < 120; ++i) tree.insert(rng.normal_vector(2) * 2.0);
      const std::size_t before = tree.leaf_entries().size();
      RebuildResult rebuilt = rebuild(tree, params.threshold * 3.0, 0);
      CHECK(rebuilt.tree.leaf_entries().size() <= before);
      rebuilt.tree.check_structure();
    }
  }

  SUBCASE("shrinking the threshold is rejected") {
    CFTree tree(2, params);
    tree.insert(v2(0, 0));
    CHECK_THROWS_AS(rebuild(tree, params.threshold / 2.0, 0), ClusterError);
  }
}

TEST_CASE("global clustering of leaf entries") {
  // Nine entries in three obvious groups.
  std::vector<ClusterFeature> entries;
  const std::vector<Vector> centers = {v2(0, 0), v2(10, 0), v2(0, 10)};
  Rng rng(37);
  for (const Vector& c : centers) {
    for (int i = 0; i < 3; ++i) {
      entries.push_back(cf_from_points({c + 0.05 * rng.normal_vector(2),
                                        c + 0.05 * rng.normal_vector(2)}));
    }
  }

  SUBCASE("known k recovers the groups") {
    const EntryGrouping grouping = global_cluster(entries, 3);
    REQUIRE(grouping.size() == 3);
    for (const auto& group : grouping) {
      std::set<std::size_t> owners;
      for (std::size_t idx : group) owners.insert(idx / 3);
      CHECK(owners.size() == 1);  // no group mixes source centers
    }
  }

  SUBCASE("gap rule finds k on its own") {
    const EntryGrouping grouping = global_cluster(entries, std::nullopt);
    CHECK(grouping.size() == 3);
  }

  SUBCASE("k equal to the entry count yields singletons") {
    const EntryGrouping grouping = global_cluster(entries, static_cast<int>(entries.size()));
    CHECK(grouping.size() == entries.size());
    for (const auto& group : grouping) CHECK(group.size() == 1);
  }

  SUBCASE("permutation of the entries permutes nothing but indices") {
    std::vector<std::size_t> perm(entries.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng shuffle_rng(41);
    shuffle_rng.shuffle(perm);
    std::vector<ClusterFeature> shuffled;
    for (std::size_t i : perm) shuffled.push_back(entries[i]);

    const EntryGrouping base = global_cluster(entries, 3);
    const EntryGrouping moved = global_cluster(shuffled, 3);
    const auto as_original_sets = [&](const EntryGrouping& grouping, bool mapped) {
      std::set<std::set<std::size_t>> out;
      for (const auto& group : grouping) {
        std::set<std::size_t> ids;
        for (std::size_t idx : group) ids.insert(mapped ? perm[idx] : idx);
        out.insert(ids);
      }
      return out;
    };
    CHECK(as_original_sets(base, false) == as_original_sets(moved, true));
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(global_cluster({}, std::nullopt), ClusterError);
    CHECK_THROWS_AS(global_cluster(entries, 0), ClusterError);
    CHECK_THROWS_AS(global_cluster(entries, 100), ClusterError);
  }
}

TEST_CASE("refinement pass") {
  SUBCASE("points already at their seeds stay put") {
    std::vector<Vector> points;
    for (int i = 0; i < 4; ++i) points.push_back(v2(0, 0));
    for (int i = 0; i < 4; ++i) points.push_back(v2(5, 5));
    const std::vector<ClusterFeature> entries = {
        cf_from_points({points[0], points[1], points[2], points[3]}),
        cf_from_points({points[4], points[5], points[6], points[7]})};
    const ClusteringResult r = refine(entries, {{0}, {1}}, points, 3.0);
    for (int i = 0; i < 4; ++i) CHECK(r.assignments[static_cast<std::size_t>(i)] == 0);
    for (int i = 4; i < 8; ++i) CHECK(r.assignments[static_cast<std::size_t>(i)] == 1);
    CHECK((r.centroids[0] - v2(0, 0)).norm() == 0.0);
    CHECK((r.centroids[1] - v2(5, 5)).norm() == 0.0);
  }

  SUBCASE("planted far point becomes an outlier") {
    const Blobs blobs = make_blobs({v2(0, 0), v2(6, 0)}, 0.1, 20, 43);
    std::vector<Vector> points = blobs.points;
    points.push_back(v2(100, 100));
    const std::vector<ClusterFeature> entries = {
        cf_from_points({points.begin(), points.begin() + 20}),
        cf_from_points({points.begin() + 20, points.begin() + 40})};
    const ClusteringResult r = refine(entries, {{0}, {1}}, points, 3.0);
    CHECK(r.assignments.back() == -1);
    int outliers = 0;
    for (int a : r.assignments) outliers += (a == -1);
    CHECK(outliers == 1);

    // Refined centroids equal the mean of their assigned points.
    for (int c = 0; c < 2; ++c) {
      Vector mean = Vector::Zero(2);
      int count = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (r.assignments[i] == c) {
          mean += points[i];
          ++count;
        }
      }
      mean /= static_cast<Scalar>(count);
      CHECK((r.centroids[static_cast<std::size_t>(c)] - mean).norm() < 1e-12);
    }
  }

  SUBCASE("errors") {
    const std::vector<ClusterFeature> entries = {cf_from_points({v2(0, 0)})};
    CHECK_THROWS_AS(refine(entries, {}, {v2(0, 0)}, 3.0), ClusterError);
    CHECK_THROWS_AS(refine(entries, {{0}}, {}, 3.0), ClusterError);
    CHECK_THROWS_AS(refine(entries, {{5}}, {v2(0, 0)}, 3.0), ClusterError);
  }
}

TEST_CASE("birch_fit end to end") {
  const Blobs blobs =
      make_blobs({v2(0, 0), v2(3, 0), v2(0, 3)}, 0.1, 50, 47);
  BirchOptions options;
  options.tree.branching_factor = 8;
  options.tree.leaf_capacity = 8;
  options.tree.threshold = 0.3;

  SUBCASE("planted gaussians come back homogeneous") {
    const ClusteringResult r = birch_fit(blobs.points, options, 3);
    CHECK(r.cluster_count() == 3);
    CHECK(homogeneity_oracle(blobs.gold, r.assignments) >= 0.95);
  }

  SUBCASE("automatic cluster count agrees") {
    const ClusteringResult r = birch_fit(blobs.points, options, std::nullopt);
    CHECK(r.cluster_count() == 3);
    CHECK(homogeneity_oracle(blobs.gold, r.assignments) >= 0.95);
  }

  SUBCASE("deterministic across runs") {
    const ClusteringResult a = birch_fit(blobs.points, options, 3);
    const ClusteringResult b = birch_fit(blobs.points, options, 3);
    CHECK(a.assignments == b.assignments);
    for (int c = 0; c < 3; ++c) {
      CHECK((a.centroids[static_cast<std::size_t>(c)] -
             b.centroids[static_cast<std::size_t>(c)])
                .norm() == 0.0);
    }
  }

  SUBCASE("rebuild pass between phases keeps quality") {
    BirchOptions with_rebuild = options;
    with_rebuild.tree.threshold = 0.15;
    with_rebuild.rebuild_threshold = 0.3;
    const ClusteringResult r = birch_fit(blobs.points, with_rebuild, 3);
    CHECK(homogeneity_oracle(blobs.gold, r.assignments) >= 0.95);
  }

  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(birch_fit({}, options, 3), ClusterError);
  }
}

TEST_CASE("kmeans baseline") {
  SUBCASE("k=1 is the global mean") {
    Rng rng(53);
    std::vector<Vector> pts;
    Vector mean = Vector::Zero(2);
    for (int i = 0; i < 30; ++i) {
      pts.push_back(rng.normal_vector(2));
      mean += pts.back();
    }
    mean /= 30.0;
    const ClusteringResult r = kmeans_fit(pts, 1, 7);
    CHECK((r.centroids[0] - mean).norm() < 1e-9);
    CHECK(r.sizes[0] == 30);
  }

  SUBCASE("k equal to the point count has zero inertia") {
    Rng rng(59);
    std::vector<Vector> pts;
    for (int i = 0; i < 8; ++i) pts.push_back(rng.normal_vector(2));
    const ClusteringResult r = kmeans_fit(pts, 8, 3);
    CHECK(inertia(pts, r) == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("single run lands near the best of twenty restarts") {
    const Blobs blobs = make_blobs({v2(0, 0), v2(4, 0), v2(0, 4)}, 0.15, 40, 61);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      best = std::min(best, inertia(blobs.points, kmeans_fit(blobs.points, 3, seed)));
    }
    const double chosen = inertia(blobs.points, kmeans_fit(blobs.points, 3, 5));
    CHECK(chosen <= best * 1.05);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(kmeans_fit({}, 1, 0), ClusterError);
    CHECK_THROWS_AS(kmeans_fit({v2(0, 0)}, 2, 0), ClusterError);
  }
}
