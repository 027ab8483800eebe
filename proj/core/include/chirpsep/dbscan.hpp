#pragma once

#include <array>
#include <span>
#include <vector>

#include "chirpsep/snippet.hpp"

namespace chirpsep {

struct LabeledPoints {
  std::vector<std::array<double, 2>> coords;
  std::vector<int> labels;  // -1 noise, 1..cluster_count otherwise
  int cluster_count = 0;
};

// Density clustering. A point is core when at least min_neighbors points
// (itself included) lie within Euclidean distance eps. Clusters are connected
// components of core points plus reachable border points; a border reachable
// from several clusters joins the one discovered first in ascending input
// order. Deterministic.
LabeledPoints dbscan(std::span<const std::array<double, 2>> points, double eps, int min_neighbors);

enum class AxisMode { freq_only, time_freq };

// freq_only maps a point to (0, freq): band selection ignores time.
// time_freq maps to (t * s, freq) with s chosen so consecutive snippet
// centers land eta/4 apart, keeping one track eps-connected under eps = eta
// while eta-separated tracks stay apart.
std::vector<std::array<double, 2>> scale_axes(const Diagram& diagram, AxisMode mode,
                                              double eta = 0.0);

}  // namespace chirpsep
