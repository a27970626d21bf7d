#pragma once

// Poisson point sampling on finite boxes, Euclidean/torus metrics, a uniform
// grid index, and exact k-nearest-neighbour distance tables.

#include <cstdint>
#include <span>
#include <vector>

namespace gnp::geom {

enum class Metric { kEuclidean, kTorus };

struct BoxRegion {
  int dim = 0;
  std::vector<double> lower;
  std::vector<double> upper;

  BoxRegion() = default;
  BoxRegion(std::vector<double> lo, std::vector<double> hi);

  // Cube [lo, hi]^d.
  static BoxRegion cube(int dim, double lo, double hi);

  double extent(int axis) const { return upper[axis] - lower[axis]; }
  double volume() const;
  bool contains(std::span<const double> p) const;
};

// A Poisson realization on a box. Coordinates are stored flat, point i at
// coords[i*dim .. i*dim+dim). Regeneration with the same (seed, box, density,
// dim) is bit-identical; generation is blocked so it parallelizes without
// changing the output.
struct PointSet {
  int dim = 0;
  double density = 0.0;
  BoxRegion box;
  Metric metric = Metric::kEuclidean;
  std::uint64_t seed = 0;
  std::vector<double> coords;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

PointSet sample_poisson(int dim, double density, const BoxRegion& box,
                        std::uint64_t seed, Metric metric = Metric::kEuclidean,
                        std::size_t threads = 0);

double pair_distance(std::span<const double> p, std::span<const double> q,
                     const BoxRegion& box, Metric metric);

// Volume of the d-dimensional unit ball, pi^{d/2} / Gamma(d/2 + 1).
double unit_ball_volume(int d);

// E[d_k] for an interior point of a rate-lambda Poisson process in d
// dimensions: Gamma(k + 1/d)/Gamma(k) * (lambda c(d))^{-1/d}.
double expected_knn_distance(int d, double lambda, int k);

// Margin inside which kNN statistics are edge-biased under the free
// (non-torus) metric: 3 * (k / (lambda c(d)))^{1/d}.
double interior_margin(int d, double lambda, int k);

// True for points at distance >= margin from every box face (all points
// under the torus metric).
std::vector<char> interior_mask(const PointSet& points, double margin);

// Exact kNN distance table. distances/indices are flat n x cols arrays with
// rows sorted ascending by (distance, index). If kmax > n - 1 the table is
// truncated to n - 1 columns and flagged.
struct NeighborTable {
  std::size_t n = 0;
  int cols = 0;            // min(kmax, n - 1)
  int kmax_requested = 0;
  bool truncated = false;  // kmax_requested > n - 1
  int dim = 0;
  double density = 0.0;
  Metric metric = Metric::kEuclidean;
  std::vector<double> distances;
  std::vector<std::uint32_t> indices;

  double dist(std::size_t i, int k) const {  // k is 1-based
    return distances[i * cols + (k - 1)];
  }
};

NeighborTable knn_table(const PointSet& points, int kmax,
                        std::size_t threads = 0);

// Uniform grid over the point set, used for kNN and range queries. Cell side
// targets one point per cell; kNN expands shells until the k-th candidate is
// certified closer than any unsearched cell.
class GridIndex {
 public:
  explicit GridIndex(const PointSet& points, double target_cell_side = 0.0);

  // k smallest (distance, index) pairs excluding `query_idx` itself,
  // ties broken by index. out_* are resized to min(k, n-1).
  void knn(std::size_t query_idx, int k, std::vector<double>& out_dist,
           std::vector<std::uint32_t>& out_idx) const;

  // All points within `radius` of point i (excluding i), unordered.
  void within(std::size_t query_idx, double radius,
              std::vector<std::uint32_t>& out) const;

  // Number of points within `radius` of an arbitrary location.
  std::size_t count_within(std::span<const double> center, double radius) const;

  const PointSet& points() const { return *points_; }
  double min_cell_side() const { return min_side_; }

 private:
  // Per-axis cell-offset window around a home cell; windows are clipped so
  // that no cell is ever visited twice (box clip for the free metric, one
  // complete residue window once a torus axis is covered).
  struct Window {
    int lo, hi;
    bool saturated;  // the whole axis is inside the window
  };
  Window axis_window(int axis, int home, int s) const;

  template <typename F>
  void for_cells(const std::vector<int>& home, int s, int s_prev, F&& f) const;

  const PointSet* points_;
  std::vector<int> ncells_;        // per axis
  std::vector<double> cell_side_;  // per axis
  double min_side_ = 0.0;
  std::vector<std::uint32_t> cell_start_;  // CSR over flattened cells
  std::vector<std::uint32_t> cell_points_;
  std::size_t total_cells_ = 0;
  std::vector<int> cell_of_point_;  // flattened home cell per point

  int cell_coord(int axis, double x) const;
};

}  // namespace gnp::geom
