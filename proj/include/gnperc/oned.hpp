#pragma once

// One-dimensional analysis: gaps, bridges, the scanning procedure, p(m)
// estimation, and the closed-form tail/bound oracles.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gnperc/gnmodel.hpp"
#include "gnperc/stats.hpp"

namespace gnp::oned {

struct GapRecord {
  double left = 0.0;    // coordinate of the point bounding the gap on the left
  double length = 0.0;  // > m by construction
  std::size_t left_point_index = 0;
  std::size_t right_point_index = 0;

  double right() const { return left + length; }
};

// All maximal inter-point gaps of length > m, in order. Points must be
// sorted ascending.
std::vector<GapRecord> find_gaps(std::span<const double> sorted_xs, double m);

// A gap is bridged from the right if some point y at or beyond its right end
// has y - r(y) < the gap's left end; left-bridging is the mirror image.
// Verdicts near the window edge that depend on edge-biased ranges or on
// unseen points are flagged censored.
struct BridgeReport {
  std::vector<GapRecord> gaps;
  std::vector<char> bridged_from_right, bridged_from_left;
  std::vector<char> censored_right, censored_left;
  std::vector<std::optional<std::size_t>> bridge_point_right, bridge_point_left;
};

struct ScanParams {
  double window_lo = 0.0;
  double window_hi = 0.0;
  double edge_margin = 0.0;    // computed ranges are trusted this far inside
  double unseen_margin = 0.0;  // unbridged verdicts need this much clearance
};

// edge_margin from the geometry interior rule; unseen_margin sized so that a
// point beyond the window bridging past it has negligible probability.
ScanParams default_scan_params(const model::AlphaSpec& alpha, double lambda,
                               double window_lo, double window_hi);

BridgeReport bridge_scan(std::span<const double> sorted_xs,
                         const model::RangeField& ranges, double m,
                         const ScanParams& params);

// Monte Carlo estimate of p(m), the probability that an m-gap is not bridged
// from the right, for GN_k(1, alpha). One Bernoulli sample per window: the
// first uncensored m-gap strictly inside [0.1T, 0.9T].
struct PMEstimate {
  stats::CIEstimate ci;
  std::size_t windows = 0;
  std::size_t discarded = 0;  // windows without a usable m-gap
};

PMEstimate estimate_p_unbridged(double alpha, int k, double m,
                                std::size_t trials, double T,
                                std::uint64_t seed, double level = 0.95,
                                std::size_t threads = 0);

// P(Gamma >= n | Gamma > beta) exactly as printed: both sums run from i = 1.
// k = 1 leaves empty sums and is rejected. The standard Gamma(k,1) tail
// (sums from i = 0) is exposed separately.
double gamma_tail_ratio(double n, double beta, int k);
double gamma_tail_standard(double n, int k);
// c(beta,k) with 1/c = sum_{i=1}^{k-1} e^{-beta} (k-1)! beta^i / i!.
double gamma_tail_asymptotic_constant(double beta, int k);

// Lower bound 1 - gamma/(m (1-gamma)^2) for P(r(X_0) < m) under
// alpha_i = gamma^i, clamped at 0. Valid for 0 < gamma <= 1/2.
double markov_range_bound(double gamma, double m);

// Verifies x_j - r(x_j) nondecreasing over the sorted realization (the
// shift inequality X_0 - r(X_0) <= X_k - r(X_k)). Holds deterministically
// for geometric alpha with gamma <= 1/2, truncation included.
bool shift_monotonicity_check(std::span<const double> sorted_xs,
                              const model::RangeField& ranges);

// Distance from sorted point i to its k-th neighbour on the right.
inline double right_knn_distance(std::span<const double> sorted_xs,
                                 std::size_t i, int k) {
  return sorted_xs[i + k] - sorted_xs[i];
}

// Samples a rate-lambda Poisson process on [0, T] and returns the sorted
// PointSet (sorting does not change the law).
geom::PointSet sample_sorted_1d(double lambda, double T, std::uint64_t seed);

}  // namespace gnp::oned
