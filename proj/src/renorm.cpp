#include "gnperc/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gnperc/rng.hpp"
#include "gnperc/stats.hpp"

namespace gnp::renorm {

namespace {

// extent / side must be a whole number of cells.
int exact_cell_count(double extent, double side, const char* what) {
  const double q = extent / side;
  const double r = std::round(q);
  if (r < 1.0 || std::fabs(q - r) > 1e-9 * std::max(1.0, r))
    throw std::domain_error(std::string(what) +
                            ": region is not an exact multiple of the cell side");
  return static_cast<int>(r);
}

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::size_t GoodBoxGrid::good_count() const {
  return static_cast<std::size_t>(std::count(good.begin(), good.end(), 1));
}

double GoodBoxGrid::good_fraction() const {
  return good.empty() ? 0.0 : static_cast<double>(good_count()) / good.size();
}

GoodBoxGrid banana_scan(const geom::PointSet& points, double delta, int n,
                        const geom::BoxRegion& region) {
  if (!(delta > 0.0)) throw std::domain_error("banana_scan: delta must be > 0");
  if (n < 1) throw std::domain_error("banana_scan: n must be >= 1");
  const int dim = region.dim;
  if (points.dim != dim) throw std::invalid_argument("banana_scan: dim mismatch");

  const double sub_side = 3.0 * delta;
  const double cell_side = sub_side * n;

  GoodBoxGrid grid;
  grid.criterion = Criterion::kBanana;
  grid.cell_side = cell_side;
  grid.delta = delta;
  grid.n = n;
  grid.region = region;
  grid.grid_dims.resize(dim);
  std::size_t total_cells = 1, total_subs = 1;
  std::vector<int> nsub(dim);
  for (int a = 0; a < dim; ++a) {
    grid.grid_dims[a] = exact_cell_count(region.extent(a), cell_side, "banana_scan");
    nsub[a] = grid.grid_dims[a] * n;
    total_cells *= grid.grid_dims[a];
    total_subs *= nsub[a];
  }

  // Per sub-box: point count and whether every point sits in the central
  // delta-box. A sub-box is a banana box iff count == 1 and centered.
  std::vector<std::uint32_t> count(total_subs, 0);
  std::vector<std::uint32_t> occupant(total_subs, 0);
  std::vector<char> centered(total_subs, 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points.point(i);
    std::size_t flat = 0;
    bool inside = true, in_center = true;
    for (int a = 0; a < dim; ++a) {
      const double rel = p[a] - region.lower[a];
      if (rel < 0.0 || rel >= region.extent(a)) {
        inside = false;
        break;
      }
      int s = std::min(static_cast<int>(rel / sub_side), nsub[a] - 1);
      const double off = rel - s * sub_side;
      if (off < delta || off > 2.0 * delta) in_center = false;
      flat = flat * nsub[a] + s;
    }
    if (!inside) continue;
    ++count[flat];
    occupant[flat] = static_cast<std::uint32_t>(i);
    if (!in_center) centered[flat] = 0;
  }

  grid.good.assign(total_cells, 0);
  grid.witness.assign(total_cells, -1);
  // Walk all sub-boxes once; a banana sub-box marks its macro cell good.
  std::vector<int> sub(dim, 0);
  for (std::size_t flat = 0; flat < total_subs; ++flat) {
    if (count[flat] == 1 && centered[flat]) {
      ++grid.banana_boxes;
      std::size_t rest = flat, cell = 0;
      for (int a = dim - 1; a >= 0; --a) {
        sub[a] = static_cast<int>(rest % nsub[a]);
        rest /= nsub[a];
      }
      for (int a = 0; a < dim; ++a) cell = cell * grid.grid_dims[a] + sub[a] / n;
      grid.good[cell] = 1;
      grid.witness[cell] = occupant[flat];
    }
  }
  return grid;
}

double banana_prob(double delta, int d) {
  if (!(delta > 0.0) || d < 1) throw std::domain_error("banana_prob: bad arguments");
  const double vol_sub = std::pow(3.0 * delta, d);
  return std::pow(delta, d) * std::exp(-vol_sub);
}

double good_box_prob(double delta, int n) {
  if (!(delta > 0.0)) throw std::domain_error("good_box_prob: delta must be > 0");
  if (n < 0) throw std::domain_error("good_box_prob: n must be >= 0");
  return 1.0 - std::pow(1.0 - banana_prob(delta, 2),
                        static_cast<double>(n) * n);
}

int n_tilde(double pc) {
  if (!(pc > 0.0 && pc < 1.0)) throw std::domain_error("n_tilde: pc must be in (0,1)");
  const double p_banana = 1.0 / (9.0 * std::exp(1.0));
  const double ratio = std::log1p(-pc) / std::log1p(-p_banana);
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(ratio))));
}

double alpha_bound_2d(double pc) { return n_tilde(pc) * std::sqrt(45.0); }

GoodBoxGrid subsquare_good_scan(const geom::PointSet& points, int n, double m,
                                const geom::BoxRegion& region) {
  if (n < 1 || n % 2 == 0)
    throw std::domain_error("subsquare_good_scan: n must be a positive odd integer");
  const int dim = region.dim;
  if (points.dim != dim)
    throw std::invalid_argument("subsquare_good_scan: dim mismatch");

  GoodBoxGrid grid;
  grid.criterion = Criterion::kSubsquare;
  grid.cell_side = 1.0;
  grid.n = n;
  grid.m = m;
  grid.region = region;
  grid.grid_dims.resize(dim);
  const double cap = std::floor(m / (static_cast<double>(n) * n));
  grid.vacuous = cap < 1.0;

  std::size_t total_cells = 1, total_subs = 1;
  std::vector<int> nsub(dim);
  for (int a = 0; a < dim; ++a) {
    grid.grid_dims[a] = exact_cell_count(region.extent(a), 1.0, "subsquare_good_scan");
    nsub[a] = grid.grid_dims[a] * n;
    total_cells *= grid.grid_dims[a];
    total_subs *= nsub[a];
  }
  grid.good.assign(total_cells, 0);
  if (grid.vacuous) return grid;

  const double sub_side = 1.0 / n;
  std::vector<std::uint32_t> count(total_subs, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points.point(i);
    std::size_t flat = 0;
    bool inside = true;
    for (int a = 0; a < dim; ++a) {
      const double rel = p[a] - region.lower[a];
      if (rel < 0.0 || rel >= region.extent(a)) {
        inside = false;
        break;
      }
      int s = std::min(static_cast<int>(rel / sub_side), nsub[a] - 1);
      flat = flat * nsub[a] + s;
    }
    if (inside) ++count[flat];
  }

  // A cell is good iff every subsquare count lies in [1, floor(m/n^2)].
  std::vector<int> sub(dim, 0);
  std::vector<char> bad(total_cells, 0);
  for (std::size_t flat = 0; flat < total_subs; ++flat) {
    std::size_t rest = flat, cell = 0;
    for (int a = dim - 1; a >= 0; --a) {
      sub[a] = static_cast<int>(rest % nsub[a]);
      rest /= nsub[a];
    }
    for (int a = 0; a < dim; ++a) cell = cell * grid.grid_dims[a] + sub[a] / n;
    if (count[flat] < 1 || static_cast<double>(count[flat]) > cap) bad[cell] = 1;
  }
  for (std::size_t c = 0; c < total_cells; ++c) grid.good[c] = !bad[c];
  return grid;
}

GoodBoxGrid subsquare_good_sample_counts(int squares_x, int squares_y, int n,
                                         double m, double lambda,
                                         std::uint64_t seed) {
  if (n < 1 || n % 2 == 0)
    throw std::domain_error("subsquare_good_sample_counts: n must be odd");
  if (squares_x < 1 || squares_y < 1 || !(lambda > 0.0))
    throw std::invalid_argument("subsquare_good_sample_counts: bad arguments");

  GoodBoxGrid grid;
  grid.criterion = Criterion::kSubsquare;
  grid.cell_side = 1.0;
  grid.n = n;
  grid.m = m;
  grid.grid_dims = {squares_x, squares_y};
  grid.region = geom::BoxRegion({0.0, 0.0},
                                {static_cast<double>(squares_x),
                                 static_cast<double>(squares_y)});
  const double cap = std::floor(m / (static_cast<double>(n) * n));
  grid.vacuous = cap < 1.0;
  grid.good.assign(static_cast<std::size_t>(squares_x) * squares_y, 0);
  if (grid.vacuous) return grid;

  const double mu = lambda / (static_cast<double>(n) * n);
  for (int ix = 0; ix < squares_x; ++ix) {
    for (int iy = 0; iy < squares_y; ++iy) {
      rng::Stream s(seed, 0x7E, static_cast<std::uint64_t>(ix) << 32 | iy);
      bool ok = true;
      for (int t = 0; t < n * n && ok; ++t) {
        const std::uint64_t c = s.poisson(mu);
        ok = c >= 1 && static_cast<double>(c) <= cap;
      }
      grid.good[static_cast<std::size_t>(ix) * squares_y + iy] = ok;
    }
  }
  return grid;
}

GoodBoxGrid bernoulli_grid(std::vector<int> dims, double p, std::uint64_t seed) {
  GoodBoxGrid grid;
  grid.criterion = Criterion::kBernoulli;
  grid.cell_side = 1.0;
  grid.grid_dims = std::move(dims);
  std::size_t total = 1;
  for (int d : grid.grid_dims) {
    if (d < 1) throw std::invalid_argument("bernoulli_grid: bad dims");
    total *= d;
  }
  std::vector<double> lo(grid.grid_dims.size(), 0.0), hi;
  for (int d : grid.grid_dims) hi.push_back(d);
  grid.region = geom::BoxRegion(lo, hi);
  grid.good.resize(total);
  rng::Stream s(seed, 0xB17);
  for (std::size_t i = 0; i < total; ++i) grid.good[i] = s.uniform() < p;
  return grid;
}

GridCrossing grid_site_percolation(const GoodBoxGrid& grid, int axis) {
  const int dim = static_cast<int>(grid.grid_dims.size());
  if (axis < 0 || axis >= dim)
    throw std::domain_error("grid_site_percolation: axis out of range");
  const std::size_t total = grid.cell_count();
  GridCrossing out;
  out.axis = axis;
  if (total == 0) return out;

  // Strides for the row-major flat layout.
  std::vector<std::size_t> stride(dim, 1);
  for (int a = dim - 2; a >= 0; --a)
    stride[a] = stride[a + 1] * grid.grid_dims[a + 1];

  UnionFind uf(total);
  std::vector<int> idx(dim, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    if (grid.good[flat]) {
      for (int a = 0; a < dim; ++a) {
        if (idx[a] + 1 < grid.grid_dims[a] && grid.good[flat + stride[a]])
          uf.unite(static_cast<std::uint32_t>(flat),
                   static_cast<std::uint32_t>(flat + stride[a]));
      }
    }
    for (int a = dim - 1; a >= 0; --a) {
      if (++idx[a] < grid.grid_dims[a]) break;
      idx[a] = 0;
    }
  }

  // Roots touching the low/high face layers along `axis`.
  std::vector<char> lo_touch(total, 0), hi_touch(total, 0);
  std::fill(idx.begin(), idx.end(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    if (grid.good[flat]) {
      const std::uint32_t r = uf.find(static_cast<std::uint32_t>(flat));
      if (idx[axis] == 0) lo_touch[r] = 1;
      if (idx[axis] == grid.grid_dims[axis] - 1) hi_touch[r] = 1;
    }
    for (int a = dim - 1; a >= 0; --a) {
      if (++idx[a] < grid.grid_dims[a]) break;
      idx[a] = 0;
    }
  }
  std::uint32_t best = ~0u;
  for (std::size_t r = 0; r < total; ++r)
    if (lo_touch[r] && hi_touch[r]) {
      best = std::min(best, static_cast<std::uint32_t>(r));
      break;
    }
  if (best != ~0u) {
    out.crossing = true;
    out.crossing_component = best;
  }
  return out;
}

SubsquareParams subsquare_parameters(double alpha, double pc) {
  if (!(alpha > 0.0)) throw std::domain_error("subsquare_parameters: alpha must be > 0");
  if (!(pc > 0.0 && pc < 1.0))
    throw std::domain_error("subsquare_parameters: pc must be in (0,1)");
  SubsquareParams sp;
  int n = static_cast<int>(std::floor(1.0 + 2.0 * std::sqrt(5.0) / alpha)) + 1;
  if (n % 2 == 0) ++n;
  sp.n = n;
  sp.fail_prob_bound = (1.0 - pc) / (2.0 * n * n);
  // P(X = 0) = e^{-mu} below the bound, with margin.
  sp.mu = std::log(1.0 / sp.fail_prob_bound) + 2.0;
  sp.lambda = sp.mu * n * n;
  // Smallest integer cap with P(X > t) below the bound.
  unsigned t = static_cast<unsigned>(sp.mu);
  while (1.0 - stats::poisson_cdf(t, sp.mu) >= sp.fail_prob_bound) ++t;
  sp.m = static_cast<double>(t) * n * n;
  return sp;
}

CorridorCheck corridor_connectivity_check(const geom::PointSet& points,
                                          double x0, double y0, int n,
                                          double m, double alpha) {
  if (points.dim != 2)
    throw std::invalid_argument("corridor_connectivity_check: needs 2D points");
  if (n < 3 || n % 2 == 0)
    throw std::domain_error("corridor_connectivity_check: n must be odd, >= 3");

  CorridorCheck out;
  const double sub = 1.0 / n;
  const double y_lo = y0 + (n - 1) / (2.0 * n);
  const double y_hi = y_lo + sub;
  const double corridor_x0 = x0 + (n - 1) / (2.0 * n);
  const double reach = alpha * (n - 1) / (2.0 * n);
  const long k_cap = static_cast<long>(m);  // at most m neighbours allowed

  // Gather corridor points per subsquare B_0 .. B_n.
  std::vector<std::vector<std::uint32_t>> bins(n + 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points.point(i);
    if (p[1] < y_lo || p[1] >= y_hi) continue;
    const double rel = p[0] - corridor_x0;
    if (rel < 0.0) continue;
    const int b = static_cast<int>(rel / sub);
    if (b > n || (rel >= (n + 1) * sub)) continue;
    bins[b].push_back(static_cast<std::uint32_t>(i));
  }
  out.all_nonempty = std::none_of(bins.begin(), bins.end(),
                                  [](const auto& b) { return b.empty(); });
  for (const auto& b : bins) out.corridor_points += b.size();
  if (!out.all_nonempty) return out;

  // Reach certification: <= m neighbours within (n-1)/(2n) means
  // d_{m+1} > (n-1)/(2n), so r = alpha d_{m+1} > alpha (n-1)/(2n) in GN_{m+1}.
  geom::GridIndex grid(points);
  out.reach_certified = true;
  const double ball = (n - 1) / (2.0 * n);
  for (const auto& b : bins)
    for (std::uint32_t i : b) {
      // count_within includes the point itself.
      const std::size_t cnt = grid.count_within(points.point(i), ball);
      if (static_cast<long>(cnt) - 1 > k_cap) {
        out.reach_certified = false;
        break;
      }
    }

  // Direct connectivity between consecutive subsquares, then the chain.
  out.pairwise_connected = true;
  for (int b = 0; b < n && out.pairwise_connected; ++b)
    for (std::uint32_t i : bins[b]) {
      for (std::uint32_t j : bins[b + 1]) {
        if (geom::pair_distance(points.point(i), points.point(j), points.box,
                                points.metric) > reach) {
          out.pairwise_connected = false;
          break;
        }
      }
      if (!out.pairwise_connected) break;
    }
  out.cross_square_connected =
      out.reach_certified && out.pairwise_connected && out.all_nonempty;
  return out;
}

}  // namespace gnp::renorm
