#pragma once

// Renormalization to site percolation: banana-box and subsquare goodness
// scans, the explicit bound calculators, and crossing on the good-cell grid.

#include <cstdint>
#include <optional>
#include <vector>

#include "gnperc/geometry.hpp"

namespace gnp::renorm {

// Best available rigorous upper bound for the square-lattice site threshold,
// and the simulation-suggested value behind an explicit "numerical" flag.
inline constexpr double kPcSiteRigorous = 0.679492;
inline constexpr double kPcSiteNumerical = 0.5927;

enum class Criterion { kBanana, kSubsquare, kBernoulli };

// A grid of macro cells classified good/bad. Goodness of a cell depends only
// on the points inside it, so cells are independent under Poisson sampling.
struct GoodBoxGrid {
  Criterion criterion = Criterion::kBernoulli;
  double cell_side = 0.0;
  std::vector<int> grid_dims;  // cells per axis, row-major flat storage
  std::vector<char> good;
  geom::BoxRegion region;

  // Banana parameters (cell side 3*delta*n).
  double delta = 0.0;
  int n = 0;
  std::size_t banana_boxes = 0;  // total banana sub-boxes seen
  // Per cell: index of one banana point inside it, -1 when bad. A banana
  // point has d_1 >= delta by construction.
  std::vector<std::int64_t> witness;

  // Subsquare parameters (unit cells, n^2 subsquares each).
  double m = 0.0;
  bool vacuous = false;  // m/n^2 < 1: no cell can be good

  std::size_t cell_count() const { return good.size(); }
  std::size_t good_count() const;
  double good_fraction() const;
};

// Marks each (3 delta n)-cell good iff it contains a delta-banana sub-box:
// a 3delta-box whose central delta-box holds exactly one point and whose
// remainder is empty. The region must tile exactly into cells.
GoodBoxGrid banana_scan(const geom::PointSet& points, double delta, int n,
                        const geom::BoxRegion& region);

// P(a 3delta-box is a delta-banana box) at rate 1: delta^d e^{-(3 delta)^d}.
// The d = 2 value delta^2 e^{-9 delta^2} is the paper-checked one; higher d
// is the straightforward extension.
double banana_prob(double delta, int d = 2);

// 1 - (1 - delta^2 e^{-9 delta^2})^{n^2}, the good-box probability bound.
double good_box_prob(double delta, int n);

// Smallest n with good_box_prob(1/3, n) >= pc:
// ceil(sqrt(log(1-pc) / log(1 - 1/(9e)))).
int n_tilde(double pc);

// The corollary bound alpha_c(2) <= n_tilde(pc) * sqrt(45).
double alpha_bound_2d(double pc);

// Marks each unit square good iff all n^2 subsquares have point count in
// [1, m/n^2]. n must be odd.
GoodBoxGrid subsquare_good_scan(const geom::PointSet& points, int n, double m,
                                const geom::BoxRegion& region);

// Same goodness field sampled from per-subsquare Poisson counts only
// (goodness never looks at coordinates).
GoodBoxGrid subsquare_good_sample_counts(int squares_x, int squares_y, int n,
                                         double m, double lambda,
                                         std::uint64_t seed);

// I.i.d. good cells with probability p (site-percolation oracle input).
GoodBoxGrid bernoulli_grid(std::vector<int> dims, double p, std::uint64_t seed);

// Union-find over the good-cell nearest-neighbour lattice; crossing verdict
// between the two opposite faces along `axis`.
struct GridCrossing {
  int axis = 0;
  bool crossing = false;
  std::optional<std::uint32_t> crossing_component;  // union-find root cell
};
GridCrossing grid_site_percolation(const GoodBoxGrid& grid, int axis = 0);

// Parameters for the subsquare construction at connection weight alpha:
// smallest odd n > 1 + 2 sqrt(5)/alpha, then lambda and m making both
// per-subsquare failure probabilities fall below (1 - pc) / (2 n^2).
struct SubsquareParams {
  int n = 0;
  double lambda = 0.0;
  double m = 0.0;
  double mu = 0.0;             // mean per subsquare, lambda / n^2
  double fail_prob_bound = 0.0;  // per-subsquare union bound target
};
SubsquareParams subsquare_parameters(double alpha, double pc);

// Per-realization corridor verification for two horizontally adjacent good
// unit squares with lower-left corners (x0,y0) and (x0+1,y0): in GN_k with
// k = m+1, every point of the central corridor B_0..B_n reaches at least
// alpha (n-1)/(2n), consecutive corridor subsquares are pairwise directly
// connected, and the whole corridor is one component.
struct CorridorCheck {
  bool all_nonempty = false;
  bool reach_certified = false;   // every corridor point has <= m neighbours
                                  // within (n-1)/(2n)
  bool pairwise_connected = false;
  bool cross_square_connected = false;
  std::size_t corridor_points = 0;
};
CorridorCheck corridor_connectivity_check(const geom::PointSet& points,
                                          double x0, double y0, int n,
                                          double m, double alpha);

}  // namespace gnp::renorm
