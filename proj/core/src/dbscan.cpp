#include "chirpsep/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "chirpsep/errors.hpp"

namespace chirpsep {

namespace {

// Uniform grid over cells of side eps; neighbor candidates live in the 3x3
// cell block around a query point.
class GridIndex {
 public:
  GridIndex(std::span<const std::array<double, 2>> pts, double eps) : pts_(pts), eps_(eps) {
    cells_.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      cells_[key(cell_of(pts[i]))].push_back(static_cast<int>(i));
    }
  }

  std::vector<int> neighbors(int i) const {
    const auto& p = pts_[static_cast<std::size_t>(i)];
    const auto c = cell_of(p);
    std::vector<int> out;
    const double eps2 = eps_ * eps_;
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(key({c[0] + dx, c[1] + dy}));
        if (it == cells_.end()) continue;
        for (int j : it->second) {
          const auto& q = pts_[static_cast<std::size_t>(j)];
          const double ddx = p[0] - q[0];
          const double ddy = p[1] - q[1];
          if (ddx * ddx + ddy * ddy <= eps2) out.push_back(j);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::array<std::int64_t, 2> cell_of(const std::array<double, 2>& p) const {
    return {static_cast<std::int64_t>(std::floor(p[0] / eps_)),
            static_cast<std::int64_t>(std::floor(p[1] / eps_))};
  }
  static std::uint64_t key(const std::array<std::int64_t, 2>& c) {
    return static_cast<std::uint64_t>(c[0]) * 0x9e3779b97f4a7c15ULL ^
           static_cast<std::uint64_t>(c[1]);
  }

  std::span<const std::array<double, 2>> pts_;
  double eps_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace

LabeledPoints dbscan(std::span<const std::array<double, 2>> points, double eps,
                     int min_neighbors) {
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan eps must be positive");
  if (min_neighbors < 1) throw std::invalid_argument("dbscan min_neighbors must be >= 1");

  const int count = static_cast<int>(points.size());
  LabeledPoints out;
  out.coords.assign(points.begin(), points.end());
  out.labels.assign(points.size(), 0);
  if (count == 0) return out;

  GridIndex index(points, eps);

  std::vector<std::vector<int>> nbrs(points.size());
  std::vector<char> core(points.size(), 0);
  for (int i = 0; i < count; ++i) {
    nbrs[static_cast<std::size_t>(i)] = index.neighbors(i);
    core[static_cast<std::size_t>(i)] =
        static_cast<int>(nbrs[static_cast<std::size_t>(i)].size()) >= min_neighbors;
  }

  int next_label = 0;
  for (int i = 0; i < count; ++i) {
    if (!core[static_cast<std::size_t>(i)] || out.labels[static_cast<std::size_t>(i)] != 0)
      continue;
    ++next_label;
    std::deque<int> queue{i};
    out.labels[static_cast<std::size_t>(i)] = next_label;
    while (!queue.empty()) {
      const int q = queue.front();
      queue.pop_front();
      for (int j : nbrs[static_cast<std::size_t>(q)]) {
        if (out.labels[static_cast<std::size_t>(j)] != 0) continue;
        out.labels[static_cast<std::size_t>(j)] = next_label;
        if (core[static_cast<std::size_t>(j)]) queue.push_back(j);
      }
    }
  }

  for (auto& label : out.labels) {
    if (label == 0) label = -1;
  }
  out.cluster_count = next_label;
  return out;
}

std::vector<std::array<double, 2>> scale_axes(const Diagram& diagram, AxisMode mode, double eta) {
  if (diagram.points.empty()) throw std::invalid_argument("scale_axes: empty diagram");
  std::vector<std::array<double, 2>> out;
  out.reserve(diagram.points.size());
  if (mode == AxisMode::freq_only) {
    for (const auto& p : diagram.points) out.push_back({0.0, p.freq});
    return out;
  }
  if (!(eta > 0.0)) throw std::invalid_argument("scale_axes: time_freq needs eta > 0");
  const double spacing = diagram.center_spacing();
  const double scale = (eta / 4.0) / spacing;
  for (const auto& p : diagram.points) out.push_back({p.t * scale, p.freq});
  return out;
}

}  // namespace chirpsep
