#include "gnperc/mc.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gnperc/parallel.hpp"
#include "gnperc/rng.hpp"

namespace gnp::mc {

double ExperimentSpec::effective_margin() const {
  if (margin >= 0.0) return margin;
  const int k_eff =
      std::max(1, alpha.geometric_tail
                      ? model::required_kmax(alpha, dim, lambda)
                      : alpha.head_support());
  return geom::interior_margin(dim, lambda, k_eff);
}

namespace {

TrialResult one_trial(const ExperimentSpec& spec, std::size_t index) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialResult res;
  res.trial_index = index;
  res.seed = rng::derive_key(spec.base_seed, 0x7124, index);

  const double B = spec.effective_margin();
  const auto outer = geom::BoxRegion::cube(spec.dim, -B, spec.L + B);
  const auto inner = geom::BoxRegion::cube(spec.dim, 0.0, spec.L);
  const auto points =
      geom::sample_poisson(spec.dim, spec.lambda, outer, res.seed);
  res.n_points = points.size();

  const int kmax = model::required_kmax(spec.alpha, spec.dim, spec.lambda);
  if (points.size() < static_cast<std::size_t>(kmax) + 1)
    throw std::runtime_error(
        "run_trials: realization too small for the alpha support");
  // Heavy steps stay single-threaded here; parallelism is across trials.
  const auto table = geom::knn_table(points, kmax, 1);
  const auto ranges = model::connection_ranges(table, spec.alpha);
  const auto graph = model::build_graph(points, ranges, spec.variant, 1);
  const auto labels = cluster::label_clusters(graph);
  const auto cross = cluster::crossing_exists(labels, points, inner, 0);

  res.crossing = cross.crossing;
  res.largest_fraction = labels.largest_fraction;
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

}  // namespace

std::vector<TrialResult> run_trials(const ExperimentSpec& spec,
                                    std::size_t threads) {
  if (spec.trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
  spec.alpha.validate();
  const double B = spec.effective_margin();
  const int kmax = model::required_kmax(spec.alpha, spec.dim, spec.lambda);
  const double expected_n =
      spec.lambda * std::pow(spec.L + 2.0 * B, spec.dim);
  if (expected_n < 4.0 * (kmax + 1))
    throw std::invalid_argument(
        "run_trials: window too small for the alpha support (expected count " +
        std::to_string(expected_n) + " vs kmax " + std::to_string(kmax) + ")");

  std::vector<TrialResult> out(spec.trials);
  parallel_for(spec.trials, threads,
               [&](std::size_t i) { out[i] = one_trial(spec, i); });
  return out;
}

stats::CIEstimate crossing_probability(const ExperimentSpec& spec, double level,
                                       std::size_t threads) {
  const auto results = run_trials(spec, threads);
  std::size_t hits = 0;
  for (const auto& r : results) hits += r.crossing;
  return stats::wilson_ci(hits, results.size(), level);
}

std::vector<std::pair<double, stats::CIEstimate>> crossing_curve(
    const std::vector<double>& alpha_grid, int k, const ExperimentSpec& base,
    double level, std::size_t threads) {
  for (std::size_t i = 1; i < alpha_grid.size(); ++i)
    if (alpha_grid[i] < alpha_grid[i - 1])
      throw std::invalid_argument("crossing_curve: alpha grid must be sorted");
  std::vector<std::pair<double, stats::CIEstimate>> curve;
  curve.reserve(alpha_grid.size());
  for (double a : alpha_grid) {
    ExperimentSpec spec = base;
    spec.alpha = model::AlphaSpec::single(k, a);
    // Same base_seed across the grid: common random numbers.
    curve.emplace_back(a, crossing_probability(spec, level, threads));
  }
  return curve;
}

BisectionResult bisect_critical(
    const std::function<stats::CIEstimate(double)>& estimator, double alpha_lo,
    double alpha_hi, double target, double tol) {
  if (!(alpha_lo < alpha_hi) || !(tol > 0.0))
    throw std::invalid_argument("bisect_critical: bad bracket or tolerance");
  BisectionResult res;
  auto probe = [&](double a) {
    auto ci = estimator(a);
    res.probes.emplace_back(a, ci);
    return ci.p_hat;
  };
  const double p_lo = probe(alpha_lo);
  const double p_hi = probe(alpha_hi);
  if (!(p_lo < target && target < p_hi))
    throw std::runtime_error(
        "bisect_critical: bracket does not straddle the target (p(lo)=" +
        std::to_string(p_lo) + ", p(hi)=" + std::to_string(p_hi) + ")");
  double lo = alpha_lo, hi = alpha_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid) >= target) hi = mid;
    else lo = mid;
  }
  res.alpha_hat = 0.5 * (lo + hi);
  return res;
}

BisectionResult bisect_critical_gn(int k, const ExperimentSpec& base,
                                   double alpha_lo, double alpha_hi,
                                   double target, double tol,
                                   std::size_t trials_per_probe,
                                   std::size_t threads) {
  auto estimator = [&](double a) {
    ExperimentSpec spec = base;
    spec.alpha = model::AlphaSpec::single(k, a);
    spec.trials = trials_per_probe;
    return crossing_probability(spec, 0.95, threads);
  };
  return bisect_critical(estimator, alpha_lo, alpha_hi, target, tol);
}

}  // namespace gnp::mc
