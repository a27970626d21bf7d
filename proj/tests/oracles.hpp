#pragma once

// Brute-force reference implementations used as oracles in tests. These stay
// independent of the grid-index production paths they verify.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gnperc/geometry.hpp"
#include "gnperc/gnmodel.hpp"

namespace oracle {

struct BruteKnn {
  int cols = 0;
  std::vector<double> distances;
  std::vector<std::uint32_t> indices;
};

// All-pairs kNN: sort every row by (distance, index).
inline BruteKnn brute_knn(const gnp::geom::PointSet& ps, int kmax) {
  const std::size_t n = ps.size();
  BruteKnn out;
  out.cols = std::min<int>(kmax, static_cast<int>(n) - 1);
  out.distances.resize(n * out.cols);
  out.indices.resize(n * out.cols);
  std::vector<std::pair<double, std::uint32_t>> row;
  for (std::uint32_t i = 0; i < n; ++i) {
    row.clear();
    for (std::uint32_t j = 0; j < n; ++j) {
      if (j == i) continue;
      row.emplace_back(gnp::geom::pair_distance(ps.point(i), ps.point(j),
                                                ps.box, ps.metric),
                       j);
    }
    std::sort(row.begin(), row.end());
    for (int k = 0; k < out.cols; ++k) {
      out.distances[i * out.cols + k] = row[k].first;
      out.indices[i * out.cols + k] = row[k].second;
    }
  }
  return out;
}

// All-pairs GN graph in either variant.
inline gnp::model::GNGraph brute_graph(const gnp::geom::PointSet& ps,
                                       const std::vector<double>& r,
                                       gnp::model::Variant variant) {
  const std::size_t n = ps.size();
  gnp::model::GNGraph g;
  g.n = n;
  g.variant = variant;
  g.reach.assign(n, {});
  g.undirected.assign(n, {});
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = gnp::geom::pair_distance(ps.point(i), ps.point(j),
                                                ps.box, ps.metric);
      if (d <= r[i]) g.reach[i].push_back(j);
      const bool edge = variant == gnp::model::Variant::kReachUnion
                            ? d <= std::max(r[i], r[j])
                            : d <= r[i] + r[j];
      if (edge) g.undirected[i].push_back(j);
    }
  return g;
}

// BFS connected components over an undirected adjacency; labels are the
// smallest member index.
inline std::vector<std::uint32_t> bfs_components(
    const std::vector<std::vector<std::uint32_t>>& adj) {
  const std::size_t n = adj.size();
  std::vector<std::uint32_t> label(n, ~0u);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (label[s] != ~0u) continue;
    label[s] = s;
    queue.assign(1, s);
    while (!queue.empty()) {
      const std::uint32_t u = queue.back();
      queue.pop_back();
      for (std::uint32_t v : adj[u])
        if (label[v] == ~0u) {
          label[v] = s;
          queue.push_back(v);
        }
    }
  }
  return label;
}

// Intersection area of two unit-radius discs at centre distance 1, as a
// fraction of one disc: (2 pi / 3 - sqrt(3)/2) / pi.
inline double unit_lens_fraction() {
  return (2.0 * M_PI / 3.0 - std::sqrt(3.0) / 2.0) / M_PI;
}

inline double spearman(const std::vector<double>& xs,
                       const std::vector<double>& ys) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[idx[i]] = static_cast<double>(i);
    return r;
  };
  const auto rx = ranks(xs), ry = ranks(ys);
  const double n = static_cast<double>(xs.size());
  double mx = (n - 1) / 2.0;
  double num = 0.0, dx = 0.0, dy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (rx[i] - mx) * (ry[i] - mx);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - mx) * (ry[i] - mx);
  }
  return num / std::sqrt(dx * dy);
}

// Hand-built point set (unit density unless told otherwise).
inline gnp::geom::PointSet make_points(int dim, std::vector<double> coords,
                                       gnp::geom::BoxRegion box,
                                       double density = 1.0) {
  gnp::geom::PointSet ps;
  ps.dim = dim;
  ps.density = density;
  ps.box = std::move(box);
  ps.coords = std::move(coords);
  return ps;
}

}  // namespace oracle
