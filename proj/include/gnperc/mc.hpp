#pragma once

// Monte Carlo experiment engine: crossing trials, curves over alpha grids,
// and critical-value bisection with common random numbers.

#include <cstdint>
#include <functional>
#include <vector>

#include "gnperc/clusters.hpp"
#include "gnperc/gnmodel.hpp"
#include "gnperc/stats.hpp"

namespace gnp::mc {

struct ExperimentSpec {
  model::AlphaSpec alpha;
  int dim = 2;
  model::Variant variant = model::Variant::kReachUnion;
  double L = 10.0;       // inner box side
  double lambda = 1.0;
  double margin = -1.0;  // buffer B; < 0 means the geometry default
  std::size_t trials = 100;
  std::uint64_t base_seed = 0;

  double effective_margin() const;
};

struct TrialResult {
  std::uint64_t seed = 0;
  std::size_t trial_index = 0;
  std::size_t n_points = 0;
  bool crossing = false;
  double largest_fraction = 0.0;
  double wall_time_s = 0.0;
};

// Runs spec.trials independent trials. Trial i is fully determined by
// (base_seed, i); results are identical for any thread count.
std::vector<TrialResult> run_trials(const ExperimentSpec& spec,
                                    std::size_t threads = 0);

stats::CIEstimate crossing_probability(const ExperimentSpec& spec,
                                       double level = 0.95,
                                       std::size_t threads = 0);

// Crossing estimates over a sorted alpha grid for GN_k, sharing seeds across
// the grid so the empirical curve is monotone per realization.
std::vector<std::pair<double, stats::CIEstimate>> crossing_curve(
    const std::vector<double>& alpha_grid, int k, const ExperimentSpec& base,
    double level = 0.95, std::size_t threads = 0);

// Bisection on a crossing estimator until hi - lo < tol; returns the
// midpoint and the probe table. The estimator must straddle `target`.
struct BisectionResult {
  double alpha_hat = 0.0;
  std::vector<std::pair<double, stats::CIEstimate>> probes;
};

BisectionResult bisect_critical(
    const std::function<stats::CIEstimate(double)>& estimator, double alpha_lo,
    double alpha_hi, double target, double tol);

// The GN_k crossing-probability estimator at window L (common random
// numbers across probes).
BisectionResult bisect_critical_gn(int k, const ExperimentSpec& base,
                                   double alpha_lo, double alpha_hi,
                                   double target, double tol,
                                   std::size_t trials_per_probe,
                                   std::size_t threads = 0);

}  // namespace gnp::mc
