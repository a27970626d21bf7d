#pragma once

// The spatial branching process: offspring are a Poisson scatter on the
// (1+delta1)-ball around the parent, radially truncated at the c2-th point.
// Includes the R^2 projection L and the Monte Carlo overlap/box-reach checks.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gnperc/rng.hpp"
#include "gnperc/stats.hpp"

namespace gnp::sbp {

struct SBPConfig {
  int dim = 2;
  double delta1 = 0.0;  // offspring ball radius is 1 + delta1
  int c2 = 0;           // hard offspring cap
  int generations = 0;
  std::uint64_t seed = 0;
  std::size_t max_points = 5'000'000;  // growth guard

  // Poisson offspring parameter |S_{1+delta1}| / |S_1| = (1+delta1)^dim.
  double offspring_mean() const;
};

struct SBPRealization {
  int dim = 0;
  std::vector<double> coords;        // flat, point i at [i*dim, (i+1)*dim)
  std::vector<std::int64_t> parent;  // -1 for the root
  std::vector<double> birth_radius;  // distance to parent (0 for the root)
  std::vector<std::size_t> gen_start;  // gen g spans [gen_start[g], gen_start[g+1])
  bool extinct = false;    // died before the requested generation count
  bool truncated = false;  // stopped by the max_points guard

  std::size_t size() const { return parent.size(); }
  // Number of offspring generations realized (the root is generation 0).
  std::size_t generations_realized() const { return gen_start.size() - 2; }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

// Solves E[min(Y, c2)] = c1 for Y ~ Poisson(mu) by bisection on mu, then
// delta1 = mu^(1/d) - 1. Requires 1 < c1 < c2.
double calibrate_delta1(int d, double c1, int c2);

// E[min(Y, c2)] for Y ~ Poisson(mu).
double capped_poisson_mean(double mu, int c2);

// Runs the process from the origin (or `start`) for config.generations.
SBPRealization run_sbp(const SBPConfig& config);
SBPRealization run_sbp(const SBPConfig& config, std::span<const double> start);

// L(x) = sqrt(d) (x_1, x_2).
std::array<double, 2> project_L(std::span<const double> point);

// Monte Carlo |S_{r1}(x1) n S_{r2}(x2)| / |S_{r1}(x1)|: fraction of N uniform
// samples from the first ball landing in the second, with Wilson interval.
stats::CIEstimate overlap_ratio(int d, std::span<const double> x1,
                                std::span<const double> x2, double r1,
                                double r2, std::size_t N, std::uint64_t seed,
                                double level = 0.95);
// Convenience for centers 0 and (dist, 0, ..., 0).
stats::CIEstimate overlap_ratio_axis(int d, double dist, double r1, double r2,
                                     std::size_t N, std::uint64_t seed,
                                     double level = 0.95);

// Probability that generation N0 of the SBP started at `start` (a point of
// R^2, embedded along the first two axes) projects into both S_{i+1,j-1} and
// S_{i+1,j+1} of the side-M square lattice, estimated over `trials` runs.
struct BoxReachResult {
  stats::CIEstimate ci;
  std::size_t extinct_runs = 0;
};
BoxReachResult box_reach_probability(const SBPConfig& config, double M, int N0,
                                     std::array<double, 2> start_projected,
                                     int i, int j, std::size_t trials,
                                     double level = 0.95,
                                     std::size_t threads = 0);

// Demonstration of the oriented-lattice construction: steps (0,0), (1,-1),
// (1,1), (2,-2), ... on {(i,j): i >= 0, |j| <= i, (i+j) even}. Step (i,j)
// runs an SBP from the generation-N0 point of a successful parent step whose
// projection lies closest to (M i, M j); it succeeds when generation N0
// reaches both S_{i+1,j-1} and S_{i+1,j+1}. Illustrative only: none of the
// error bookkeeping of the full argument is modelled, and nothing here is
// asserted as a correctness claim.
struct LatticeStep {
  int i = 0, j = 0;
  bool attempted = false;
  bool success = false;
  std::size_t generation_points = 0;
  std::array<double, 2> start_projected{0.0, 0.0};
};
std::vector<LatticeStep> demo_lattice_chain(const SBPConfig& config, double M,
                                            int N0, int max_i);

// Uniform directions / ball samples used by the process (exposed for tests).
void sample_on_sphere(rng::Stream& s, int d, std::span<double> out);
void sample_in_ball(rng::Stream& s, int d, double radius, std::span<double> out);

}  // namespace gnp::sbp
