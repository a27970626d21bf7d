#pragma once

// Connected components of the undirected GN graph, crossing detection on an
// inner box, and directed out-clusters.

#include <cstdint>
#include <optional>
#include <vector>

#include "gnperc/geometry.hpp"
#include "gnperc/gnmodel.hpp"

namespace gnp::cluster {

struct ClusterLabeling {
  std::vector<std::uint32_t> label;  // component id = smallest member index
  std::vector<std::pair<std::uint32_t, std::size_t>> sizes;  // (id, count)
  double largest_fraction = 0.0;

  std::size_t component_count() const { return sizes.size(); }
};

// Union-find over undirected edges. Labels are the smallest point index in
// each component, so the result is independent of edge order.
ClusterLabeling label_clusters(const model::GNGraph& graph);

struct CrossingReport {
  int axis = 0;
  geom::BoxRegion inner_box;
  double face_width = 0.0;  // face slab width used for contact
  bool crossing = false;
  std::optional<std::uint32_t> crossing_component;
};

// Crossing along `axis`: some component holds a point inside inner_box within
// face_width of the low face and one within face_width of the high face.
// Components come from the full (buffered) graph; only points inside
// inner_box count as face contacts. face_width <= 0 defaults to one grid
// cell, (1/lambda)^(1/d).
CrossingReport crossing_exists(const ClusterLabeling& labeling,
                               const geom::PointSet& points,
                               const geom::BoxRegion& inner_box, int axis,
                               double face_width = 0.0);

// BFS closure of the directed reach relation from `origin`.
std::vector<std::uint32_t> out_cluster(const model::GNGraph& graph,
                                       std::uint32_t origin);

}  // namespace gnp::cluster
