#include "gnperc/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace gnp::cluster {

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  std::vector<std::uint32_t> rank_;

  explicit UnionFind(std::size_t n) : parent(n), rank_(n, 0) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }
};

}  // namespace

ClusterLabeling label_clusters(const model::GNGraph& graph) {
  const std::size_t n = graph.n;
  UnionFind uf(n);
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v : graph.undirected[u])
      if (u < v) uf.unite(u, v);

  ClusterLabeling out;
  out.label.assign(n, 0);
  // Smallest member index per root.
  std::vector<std::uint32_t> min_member(n, ~0u);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t r = uf.find(i);
    min_member[r] = std::min(min_member[r], i);
  }
  std::unordered_map<std::uint32_t, std::size_t> counts;
  for (std::uint32_t i = 0; i < n; ++i) {
    out.label[i] = min_member[uf.find(i)];
    ++counts[out.label[i]];
  }
  out.sizes.assign(counts.begin(), counts.end());
  std::sort(out.sizes.begin(), out.sizes.end());
  std::size_t largest = 0;
  for (const auto& [id, c] : out.sizes) largest = std::max(largest, c);
  out.largest_fraction = n == 0 ? 0.0 : static_cast<double>(largest) / n;
  return out;
}

CrossingReport crossing_exists(const ClusterLabeling& labeling,
                               const geom::PointSet& points,
                               const geom::BoxRegion& inner_box, int axis,
                               double face_width) {
  if (axis < 0 || axis >= points.dim)
    throw std::domain_error("crossing_exists: axis out of range");
  if (inner_box.dim != points.dim)
    throw std::invalid_argument("crossing_exists: inner box dim mismatch");
  for (int a = 0; a < points.dim; ++a)
    if (inner_box.lower[a] < points.box.lower[a] ||
        inner_box.upper[a] > points.box.upper[a])
      throw std::invalid_argument("crossing_exists: inner box not inside sampling box");

  CrossingReport rep;
  rep.axis = axis;
  rep.inner_box = inner_box;
  rep.face_width = face_width > 0.0
                       ? face_width
                       : std::pow(1.0 / points.density, 1.0 / points.dim);

  // Per component: contact with the low and high face slab.
  std::unordered_map<std::uint32_t, std::pair<bool, bool>> contact;
  const double lo_edge = inner_box.lower[axis] + rep.face_width;
  const double hi_edge = inner_box.upper[axis] - rep.face_width;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points.point(i);
    if (!inner_box.contains(p)) continue;
    const bool lo = p[axis] <= lo_edge;
    const bool hi = p[axis] >= hi_edge;
    if (!lo && !hi) continue;
    auto& c = contact[labeling.label[i]];
    c.first |= lo;
    c.second |= hi;
  }
  std::uint32_t best = ~0u;
  for (const auto& [id, c] : contact)
    if (c.first && c.second) best = std::min(best, id);
  if (best != ~0u) {
    rep.crossing = true;
    rep.crossing_component = best;
  }
  return rep;
}

std::vector<std::uint32_t> out_cluster(const model::GNGraph& graph,
                                       std::uint32_t origin) {
  if (origin >= graph.n) throw std::invalid_argument("out_cluster: origin out of range");
  std::vector<char> seen(graph.n, 0);
  std::vector<std::uint32_t> queue{origin};
  seen[origin] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (std::uint32_t v : graph.reach[queue[head]]) {
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  return queue;
}

}  // namespace gnp::cluster
