#include "gnperc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gnperc/parallel.hpp"
#include "gnperc/rng.hpp"

namespace gnp::geom {

namespace {
constexpr double kPi = 3.14159265358979323846;

// log of the unit-ball volume, (d/2) log pi - lgamma(d/2 + 1).
double log_unit_ball_volume(int d) {
  return 0.5 * d * std::log(kPi) - std::lgamma(0.5 * d + 1.0);
}
}  // namespace

BoxRegion::BoxRegion(std::vector<double> lo, std::vector<double> hi)
    : dim(static_cast<int>(lo.size())), lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.empty() || lower.size() != upper.size())
    throw std::invalid_argument("BoxRegion: dimension mismatch");
  for (int a = 0; a < dim; ++a)
    if (!(upper[a] > lower[a]))
      throw std::invalid_argument("BoxRegion: upper must exceed lower on every axis");
}

BoxRegion BoxRegion::cube(int dim, double lo, double hi) {
  return BoxRegion(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

double BoxRegion::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= extent(a);
  return v;
}

bool BoxRegion::contains(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != dim) return false;
  for (int a = 0; a < dim; ++a)
    if (p[a] < lower[a] || p[a] > upper[a]) return false;
  return true;
}

PointSet sample_poisson(int dim, double density, const BoxRegion& box,
                        std::uint64_t seed, Metric metric, std::size_t threads) {
  if (dim < 1) throw std::invalid_argument("sample_poisson: dim must be >= 1");
  if (box.dim != dim) throw std::invalid_argument("sample_poisson: box dim mismatch");
  if (!(density > 0.0)) throw std::invalid_argument("sample_poisson: density must be > 0");

  const double mean = density * box.volume();
  // Blocks along axis 0: per-block counts are independent Poissons keyed by
  // (seed, block), so the realization is independent of generation order.
  const std::size_t nblocks =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(mean / 64.0)));
  const double slab = box.extent(0) / static_cast<double>(nblocks);
  const double block_mean = mean / static_cast<double>(nblocks);

  std::vector<std::uint64_t> counts(nblocks);
  parallel_for(nblocks, threads, [&](std::size_t b) {
    rng::Stream s(seed, 0xC0DEu, b);
    counts[b] = s.poisson(block_mean);
  });
  std::vector<std::uint64_t> offsets(nblocks + 1, 0);
  std::partial_sum(counts.begin(), counts.end(), offsets.begin() + 1);

  PointSet ps;
  ps.dim = dim;
  ps.density = density;
  ps.box = box;
  ps.metric = metric;
  ps.seed = seed;
  ps.coords.resize(offsets[nblocks] * dim);
  parallel_for(nblocks, threads, [&](std::size_t b) {
    rng::Stream s(seed, 0xC001u, b);
    double* out = ps.coords.data() + offsets[b] * dim;
    for (std::uint64_t i = 0; i < counts[b]; ++i) {
      out[0] = box.lower[0] + slab * (static_cast<double>(b) + s.uniform());
      for (int a = 1; a < dim; ++a)
        out[a] = s.uniform(box.lower[a], box.upper[a]);
      out += dim;
    }
  });
  return ps;
}

double pair_distance(std::span<const double> p, std::span<const double> q,
                     const BoxRegion& box, Metric metric) {
  double s = 0.0;
  if (metric == Metric::kTorus) {
    for (std::size_t a = 0; a < p.size(); ++a) {
      const double period = box.upper[a] - box.lower[a];
      double d = std::fabs(p[a] - q[a]);
      d = std::min(d, period - d);
      s += d * d;
    }
  } else {
    for (std::size_t a = 0; a < p.size(); ++a) {
      const double d = p[a] - q[a];
      s += d * d;
    }
  }
  return std::sqrt(s);
}

double unit_ball_volume(int d) {
  if (d < 1) throw std::domain_error("unit_ball_volume: d must be >= 1");
  if (d <= 170) return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  return std::exp(log_unit_ball_volume(d));
}

double expected_knn_distance(int d, double lambda, int k) {
  if (d < 1 || k < 1 || !(lambda > 0.0))
    throw std::domain_error("expected_knn_distance: bad arguments");
  // lambda c(d) d_k^d ~ Gamma(k,1), so E d_k = E[G^{1/d}] (lambda c(d))^{-1/d}.
  const double log_scale = -(std::log(lambda) + log_unit_ball_volume(d)) / d;
  return std::exp(std::lgamma(k + 1.0 / d) - std::lgamma(static_cast<double>(k)) +
                  log_scale);
}

double interior_margin(int d, double lambda, int k) {
  if (d < 1 || k < 1 || !(lambda > 0.0))
    throw std::domain_error("interior_margin: bad arguments");
  return 3.0 * std::exp((std::log(static_cast<double>(k)) - std::log(lambda) -
                         log_unit_ball_volume(d)) / d);
}

std::vector<char> interior_mask(const PointSet& points, double margin) {
  const std::size_t n = points.size();
  std::vector<char> mask(n, 1);
  if (points.metric == Metric::kTorus) return mask;
  for (std::size_t i = 0; i < n; ++i) {
    auto p = points.point(i);
    for (int a = 0; a < points.dim; ++a) {
      if (p[a] - points.box.lower[a] < margin ||
          points.box.upper[a] - p[a] < margin) {
        mask[i] = 0;
        break;
      }
    }
  }
  return mask;
}

// ---------------------------------------------------------------------------
// GridIndex

int GridIndex::cell_coord(int axis, double x) const {
  int c = static_cast<int>((x - points_->box.lower[axis]) / cell_side_[axis]);
  return std::clamp(c, 0, ncells_[axis] - 1);
}

GridIndex::GridIndex(const PointSet& points, double target_cell_side)
    : points_(&points) {
  const int dim = points.dim;
  if (dim < 1) throw std::invalid_argument("GridIndex: empty point set");
  double target = target_cell_side > 0.0
                      ? target_cell_side
                      : std::pow(1.0 / points.density, 1.0 / dim);
  ncells_.resize(dim);
  cell_side_.resize(dim);
  const std::size_t n = points.size();
  for (int a = 0; a < dim; ++a)
    ncells_[a] = std::max(1, static_cast<int>(points.box.extent(a) / target));
  // Cap total cells at ~4 points per cell's worth of memory.
  for (;;) {
    double prod = 1.0;
    for (int a = 0; a < dim; ++a) prod *= ncells_[a];
    if (prod <= std::max<double>(16.0, 4.0 * static_cast<double>(n))) break;
    auto it = std::max_element(ncells_.begin(), ncells_.end());
    if (*it <= 1) break;
    *it = (*it + 1) / 2;
  }
  total_cells_ = 1;
  for (int a = 0; a < dim; ++a) {
    cell_side_[a] = points.box.extent(a) / ncells_[a];
    total_cells_ *= static_cast<std::size_t>(ncells_[a]);
  }
  min_side_ = *std::min_element(cell_side_.begin(), cell_side_.end());

  cell_of_point_.resize(n);
  std::vector<std::uint32_t> count(total_cells_ + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = points.point(i);
    int flat = 0;
    for (int a = 0; a < dim; ++a) flat = flat * ncells_[a] + cell_coord(a, p[a]);
    cell_of_point_[i] = flat;
    ++count[flat + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  cell_start_ = count;
  cell_points_.resize(n);
  std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < n; ++i)
    cell_points_[fill[cell_of_point_[i]]++] = static_cast<std::uint32_t>(i);
}

GridIndex::Window GridIndex::axis_window(int axis, int home, int s) const {
  const int nc = ncells_[axis];
  if (points_->metric == Metric::kTorus) {
    if (2 * s + 1 >= nc) return {-(nc / 2), (nc - 1) / 2, true};
    return {-s, s, false};
  }
  const int lo = std::max(-s, -home);
  const int hi = std::min(s, nc - 1 - home);
  return {lo, hi, lo == -home && hi == nc - 1 - home};
}

// Enumerate cells in the offset box of radius s around `home`, skipping cells
// already covered by the radius-(s_prev) box. f receives the flat cell index.
template <typename F>
void GridIndex::for_cells(const std::vector<int>& home, int s, int s_prev,
                          F&& f) const {
  const int dim = points_->dim;
  std::vector<Window> now(dim), old(dim);
  for (int a = 0; a < dim; ++a) {
    now[a] = axis_window(a, home[a], s);
    old[a] = s_prev >= 0 ? axis_window(a, home[a], s_prev) : Window{1, 0, false};
  }
  std::vector<int> off(dim, 0);
  const bool torus = points_->metric == Metric::kTorus;
  auto recurse = [&](auto&& self, int axis, int flat, bool inside_old) -> void {
    if (axis == dim) {
      if (!inside_old || s_prev < 0) f(flat);
      return;
    }
    const int nc = ncells_[axis];
    for (int o = now[axis].lo; o <= now[axis].hi; ++o) {
      int c = home[axis] + o;
      if (torus) c = (c % nc + nc) % nc;
      const bool in_old =
          s_prev >= 0 && o >= old[axis].lo && o <= old[axis].hi;
      self(self, axis + 1, flat * nc + c, inside_old && in_old);
    }
  };
  recurse(recurse, 0, 0, true);
}

void GridIndex::knn(std::size_t query_idx, int k, std::vector<double>& out_dist,
                    std::vector<std::uint32_t>& out_idx) const {
  const PointSet& pts = *points_;
  const std::size_t n = pts.size();
  k = std::min<int>(k, static_cast<int>(n) - 1);
  out_dist.clear();
  out_idx.clear();
  if (k <= 0) return;

  const int dim = pts.dim;
  std::vector<int> home(dim);
  auto q = pts.point(query_idx);
  for (int a = 0; a < dim; ++a) home[a] = cell_coord(a, q[a]);

  // Max-heap of the best k (distance, index) candidates.
  std::vector<std::pair<double, std::uint32_t>> heap;
  heap.reserve(k + 1);
  auto consider = [&](std::uint32_t j) {
    if (j == query_idx) return;
    std::pair<double, std::uint32_t> cand{
        pair_distance(q, pts.point(j), pts.box, pts.metric), j};
    if (static_cast<int>(heap.size()) < k) {
      heap.push_back(cand);
      std::push_heap(heap.begin(), heap.end());
    } else if (cand < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = cand;
      std::push_heap(heap.begin(), heap.end());
    }
  };

  for (int s = 0;; ++s) {
    for_cells(home, s, s - 1, [&](int flat) {
      for (std::uint32_t u = cell_start_[flat]; u < cell_start_[flat + 1]; ++u)
        consider(cell_points_[u]);
    });
    bool all_saturated = true;
    double unsearched_side = min_side_;
    for (int a = 0; a < dim; ++a) {
      if (!axis_window(a, home[a], s).saturated) {
        all_saturated = false;
        unsearched_side = std::min(unsearched_side, cell_side_[a]);
      }
    }
    if (all_saturated) break;
    // Any unsearched point sits at least s full cells away along some
    // unsaturated axis.
    if (static_cast<int>(heap.size()) == k &&
        heap.front().first < s * unsearched_side)
      break;
  }
  std::sort(heap.begin(), heap.end());
  out_dist.resize(heap.size());
  out_idx.resize(heap.size());
  for (std::size_t i = 0; i < heap.size(); ++i) {
    out_dist[i] = heap[i].first;
    out_idx[i] = heap[i].second;
  }
}

void GridIndex::within(std::size_t query_idx, double radius,
                       std::vector<std::uint32_t>& out) const {
  const PointSet& pts = *points_;
  out.clear();
  if (radius < 0.0) return;
  const int dim = pts.dim;
  auto q = pts.point(query_idx);
  std::vector<int> home(dim);
  int s = 0;
  for (int a = 0; a < dim; ++a) {
    home[a] = cell_coord(a, q[a]);
    s = std::max(s, static_cast<int>(radius / cell_side_[a]) + 1);
  }
  for_cells(home, s, -1, [&](int flat) {
    for (std::uint32_t u = cell_start_[flat]; u < cell_start_[flat + 1]; ++u) {
      const std::uint32_t j = cell_points_[u];
      if (j == query_idx) continue;
      if (pair_distance(q, pts.point(j), pts.box, pts.metric) <= radius)
        out.push_back(j);
    }
  });
}

std::size_t GridIndex::count_within(std::span<const double> center,
                                    double radius) const {
  const PointSet& pts = *points_;
  if (radius < 0.0) return 0;
  const int dim = pts.dim;
  std::vector<int> home(dim);
  int s = 0;
  for (int a = 0; a < dim; ++a) {
    home[a] = cell_coord(a, center[a]);
    s = std::max(s, static_cast<int>(radius / cell_side_[a]) + 1);
  }
  std::size_t count = 0;
  for_cells(home, s, -1, [&](int flat) {
    for (std::uint32_t u = cell_start_[flat]; u < cell_start_[flat + 1]; ++u) {
      const std::uint32_t j = cell_points_[u];
      if (pair_distance(center, pts.point(j), pts.box, pts.metric) <= radius)
        ++count;
    }
  });
  return count;
}

NeighborTable knn_table(const PointSet& points, int kmax, std::size_t threads) {
  const std::size_t n = points.size();
  if (n < 2) throw std::invalid_argument("knn_table: need at least 2 points");
  if (kmax < 1) throw std::invalid_argument("knn_table: kmax must be >= 1");

  NeighborTable t;
  t.n = n;
  t.kmax_requested = kmax;
  t.cols = std::min<int>(kmax, static_cast<int>(n) - 1);
  t.truncated = kmax > static_cast<int>(n) - 1;
  t.dim = points.dim;
  t.density = points.density;
  t.metric = points.metric;
  t.distances.resize(n * t.cols);
  t.indices.resize(n * t.cols);

  GridIndex grid(points);
  parallel_for(n, threads, [&](std::size_t i) {
    thread_local std::vector<double> dbuf;
    thread_local std::vector<std::uint32_t> ibuf;
    grid.knn(i, t.cols, dbuf, ibuf);
    std::copy(dbuf.begin(), dbuf.end(), t.distances.begin() + i * t.cols);
    std::copy(ibuf.begin(), ibuf.end(), t.indices.begin() + i * t.cols);
  });
  return t;
}

}  // namespace gnp::geom
