#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "chirpsep/dbscan.hpp"
#include "chirpsep/rng.hpp"

using namespace chirpsep;

namespace {

// Independent O(n^2) reference: core flags by counting, components over
// core-core reachability, borders joined to the earliest-discovered
// component (ordered by its smallest core index).
std::vector<int> dbscan_oracle(const std::vector<std::array<double, 2>>& pts, double eps,
                               int min_neighbors) {
  const int n = static_cast<int>(pts.size());
  const double eps2 = eps * eps;
  auto close = [&](int a, int b) {
    const double dx = pts[static_cast<std::size_t>(a)][0] - pts[static_cast<std::size_t>(b)][0];
    const double dy = pts[static_cast<std::size_t>(a)][1] - pts[static_cast<std::size_t>(b)][1];
    return dx * dx + dy * dy <= eps2;
  };

  std::vector<char> core(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    int count = 0;
    for (int j = 0; j < n; ++j) count += close(i, j);
    core[static_cast<std::size_t>(i)] = count >= min_neighbors;
  }

  // union-find over core points
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    if (!core[static_cast<std::size_t>(i)]) continue;
    for (int j = i + 1; j < n; ++j) {
      if (core[static_cast<std::size_t>(j)] && close(i, j)) {
        parent[static_cast<std::size_t>(find(j))] = find(i);
      }
    }
  }

  // order components by smallest core index
  std::map<int, int> label_of_root;
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (!core[static_cast<std::size_t>(i)]) continue;
    const int root = find(i);
    if (!label_of_root.count(root)) label_of_root[root] = ++next;
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    if (core[static_cast<std::size_t>(i)]) {
      labels[static_cast<std::size_t>(i)] = label_of_root[find(i)];
      continue;
    }
    int best = 0;  // border point: earliest cluster with a core within reach
    for (int j = 0; j < n; ++j) {
      if (!core[static_cast<std::size_t>(j)] || !close(i, j)) continue;
      const int candidate = label_of_root[find(j)];
      if (best == 0 || candidate < best) best = candidate;
    }
    labels[static_cast<std::size_t>(i)] = best == 0 ? -1 : best;
  }
  return labels;
}

std::vector<std::array<double, 2>> random_points(GaussianStream& g, int count, double spread) {
  std::vector<std::array<double, 2>> pts(static_cast<std::size_t>(count));
  for (auto& p : pts) p = {spread * g.next(), spread * g.next()};
  return pts;
}

}  // namespace

TEST_CASE("empty input") {
  const auto out = dbscan({}, 1.0, 3);
  CHECK(out.labels.empty());
  CHECK(out.cluster_count == 0);
}

TEST_CASE("two tight groups split cleanly") {
  std::vector<std::array<double, 2>> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({0.05 * i, 0.0});
  for (int i = 0; i < 5; ++i) pts.push_back({100.0 + 0.05 * i, 0.0});
  const auto out = dbscan(pts, 0.5, 3);
  const std::vector<int> expect{1, 1, 1, 1, 1, 2, 2, 2, 2, 2};
  CHECK(out.labels == expect);
  CHECK(out.cluster_count == 2);
}

TEST_CASE("matches the brute-force oracle exactly") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GaussianStream g(derive_seed(2024, {seed}));
    const int count = 20 + static_cast<int>(splitmix64(seed) % 181);
    const auto pts = random_points(g, count, 2.0);
    const double eps = 0.3 + 1.2 * std::abs(g.next());
    const int min_neighbors = 2 + static_cast<int>(splitmix64(seed * 31 + 7) % 6);

    const auto got = dbscan(pts, eps, min_neighbors);
    const auto want = dbscan_oracle(pts, eps, min_neighbors);
    CHECK(got.labels == want);
  }
}

TEST_CASE("labels are contiguous and cluster sets are permutation-stable") {
  GaussianStream g(7);
  const auto pts = random_points(g, 120, 1.5);
  const auto base = dbscan(pts, 0.8, 4);

  // contiguity 1..P
  std::vector<char> seen(static_cast<std::size_t>(base.cluster_count + 1), 0);
  for (int label : base.labels) {
    CHECK(label != 0);
    CHECK(label <= base.cluster_count);
    if (label > 0) seen[static_cast<std::size_t>(label)] = 1;
  }
  for (int l = 1; l <= base.cluster_count; ++l) CHECK(seen[static_cast<std::size_t>(l)] == 1);

  // permuted input produces the same partition as sets
  std::vector<int> perm(pts.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[splitmix64(1000 + i) % i]);
  }
  std::vector<std::array<double, 2>> shuffled(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) shuffled[i] = pts[static_cast<std::size_t>(perm[i])];
  const auto permuted = dbscan(shuffled, 0.8, 4);
  CHECK(permuted.cluster_count == base.cluster_count);

  auto cluster_sets = [](const LabeledPoints& lp, const std::vector<std::array<double, 2>>& coords) {
    std::map<int, std::vector<std::pair<double, double>>> sets;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      sets[lp.labels[i]].push_back({coords[i][0], coords[i][1]});
    }
    std::vector<std::vector<std::pair<double, double>>> out;
    for (auto& [label, members] : sets) {
      if (label < 0) continue;
      std::sort(members.begin(), members.end());
      out.push_back(members);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  CHECK(cluster_sets(base, pts) == cluster_sets(permuted, shuffled));
}

TEST_CASE("rigid translation does not change labels") {
  GaussianStream g(13);
  const auto pts = random_points(g, 80, 1.0);
  auto moved = pts;
  for (auto& p : moved) {
    p[0] += 1234.5;
    p[1] -= 987.25;
  }
  const auto a = dbscan(pts, 0.7, 3);
  const auto b = dbscan(moved, 0.7, 3);
  CHECK(a.labels == b.labels);
}

TEST_CASE("sub-minimum eps marks everything noise") {
  GaussianStream g(21);
  auto pts = random_points(g, 40, 5.0);
  double min_dist = 1e30;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dx = pts[i][0] - pts[j][0];
      const double dy = pts[i][1] - pts[j][1];
      min_dist = std::min(min_dist, std::sqrt(dx * dx + dy * dy));
    }
  }
  const auto out = dbscan(pts, 0.5 * min_dist, 2);
  for (int label : out.labels) CHECK(label == -1);
}
