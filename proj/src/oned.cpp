#include "gnperc/oned.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gnperc/parallel.hpp"
#include "gnperc/rng.hpp"

namespace gnp::oned {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<GapRecord> find_gaps(std::span<const double> sorted_xs, double m) {
  std::vector<GapRecord> gaps;
  if (sorted_xs.size() < 2) return gaps;
  for (std::size_t i = 0; i + 1 < sorted_xs.size(); ++i) {
    const double len = sorted_xs[i + 1] - sorted_xs[i];
    if (len > m) gaps.push_back({sorted_xs[i], len, i, i + 1});
  }
  return gaps;
}

ScanParams default_scan_params(const model::AlphaSpec& alpha, double lambda,
                               double window_lo, double window_hi) {
  ScanParams p;
  p.window_lo = window_lo;
  p.window_hi = window_hi;
  const int k_eff = std::max(
      1, alpha.geometric_tail ? model::required_kmax(alpha, 1, lambda)
                              : alpha.head_support());
  p.edge_margin = geom::interior_margin(1, lambda, k_eff);
  // A point beyond the window bridging back past this margin needs
  // r > 20 E[r]; Markov makes that negligible at our trial counts.
  p.unseen_margin =
      std::max(p.edge_margin, 20.0 * model::expected_range(alpha, 1, lambda));
  return p;
}

BridgeReport bridge_scan(std::span<const double> sorted_xs,
                         const model::RangeField& ranges, double m,
                         const ScanParams& params) {
  const std::size_t n = sorted_xs.size();
  if (ranges.ranges.size() != n)
    throw std::invalid_argument("bridge_scan: ranges do not match points");

  BridgeReport rep;
  rep.gaps = find_gaps(sorted_xs, m);
  const std::size_t g = rep.gaps.size();
  rep.bridged_from_right.assign(g, 0);
  rep.bridged_from_left.assign(g, 0);
  rep.censored_right.assign(g, 0);
  rep.censored_left.assign(g, 0);
  rep.bridge_point_right.assign(g, std::nullopt);
  rep.bridge_point_left.assign(g, std::nullopt);
  if (g == 0) return rep;

  const double trust_lo = params.window_lo + params.edge_margin;
  const double trust_hi = params.window_hi - params.edge_margin;

  // Suffix minima of x - r(x) (split by trust) answer every right-bridging
  // query in one pass; prefix maxima of x + r(x) mirror it for the left.
  std::vector<double> sufmin_t(n + 1, kInf), sufmin_u(n + 1, kInf);
  std::vector<std::size_t> sufarg_t(n + 1, n), sufarg_u(n + 1, n);
  for (std::size_t j = n; j-- > 0;) {
    sufmin_t[j] = sufmin_t[j + 1];
    sufarg_t[j] = sufarg_t[j + 1];
    sufmin_u[j] = sufmin_u[j + 1];
    sufarg_u[j] = sufarg_u[j + 1];
    const double v = sorted_xs[j] - ranges.ranges[j];
    const bool trusted = sorted_xs[j] >= trust_lo && sorted_xs[j] <= trust_hi;
    if (trusted ? v < sufmin_t[j] : v < sufmin_u[j]) {
      (trusted ? sufmin_t[j] : sufmin_u[j]) = v;
      (trusted ? sufarg_t[j] : sufarg_u[j]) = j;
    }
  }
  std::vector<double> premax_t(n + 1, -kInf), premax_u(n + 1, -kInf);
  std::vector<std::size_t> prearg_t(n + 1, n), prearg_u(n + 1, n);
  for (std::size_t j = 0; j < n; ++j) {
    premax_t[j + 1] = premax_t[j];
    prearg_t[j + 1] = prearg_t[j];
    premax_u[j + 1] = premax_u[j];
    prearg_u[j + 1] = prearg_u[j];
    const double w = sorted_xs[j] + ranges.ranges[j];
    const bool trusted = sorted_xs[j] >= trust_lo && sorted_xs[j] <= trust_hi;
    if (trusted ? w > premax_t[j + 1] : w > premax_u[j + 1]) {
      (trusted ? premax_t[j + 1] : premax_u[j + 1]) = w;
      (trusted ? prearg_t[j + 1] : prearg_u[j + 1]) = j;
    }
  }

  for (std::size_t gi = 0; gi < g; ++gi) {
    const GapRecord& gap = rep.gaps[gi];
    const std::size_t ri = gap.right_point_index;
    const std::size_t li = gap.left_point_index;

    if (sufmin_t[ri] < gap.left) {
      rep.bridged_from_right[gi] = 1;
      rep.bridge_point_right[gi] = sufarg_t[ri];
    } else if (sufmin_u[ri] < gap.left) {
      // Witnessed only by an edge-biased point whose computed range
      // overestimates the truth.
      rep.bridged_from_right[gi] = 1;
      rep.censored_right[gi] = 1;
      rep.bridge_point_right[gi] = sufarg_u[ri];
    } else if (params.window_hi - gap.right() < params.unseen_margin) {
      rep.censored_right[gi] = 1;  // unseen points could still bridge
    }

    if (premax_t[li + 1] > gap.right()) {
      rep.bridged_from_left[gi] = 1;
      rep.bridge_point_left[gi] = prearg_t[li + 1];
    } else if (premax_u[li + 1] > gap.right()) {
      rep.bridged_from_left[gi] = 1;
      rep.censored_left[gi] = 1;
      rep.bridge_point_left[gi] = prearg_u[li + 1];
    } else if (gap.left - params.window_lo < params.unseen_margin) {
      rep.censored_left[gi] = 1;
    }
  }
  return rep;
}

geom::PointSet sample_sorted_1d(double lambda, double T, std::uint64_t seed) {
  geom::PointSet ps = geom::sample_poisson(1, lambda, geom::BoxRegion::cube(1, 0.0, T), seed);
  std::sort(ps.coords.begin(), ps.coords.end());
  return ps;
}

PMEstimate estimate_p_unbridged(double alpha, int k, double m,
                                std::size_t trials, double T,
                                std::uint64_t seed, double level,
                                std::size_t threads) {
  if (!(m > 0.0)) throw std::invalid_argument("estimate_p_unbridged: m must be > 0");
  if (!(T > 10.0 * m))
    throw std::invalid_argument("estimate_p_unbridged: need T >> m");
  if (trials == 0) throw std::invalid_argument("estimate_p_unbridged: trials >= 1");

  const auto spec = model::AlphaSpec::single(k, alpha);
  const double lambda = 1.0;

  // 0 = discarded, 1 = bridged, 2 = unbridged.
  std::vector<char> outcome(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    geom::PointSet ps = sample_sorted_1d(lambda, T, rng::derive_key(seed, 0x1D, t));
    if (ps.size() < static_cast<std::size_t>(k) + 2) return;
    const auto table = geom::knn_table(ps, std::max(1, k), 1);
    if (table.truncated) return;
    const auto ranges = model::connection_ranges(table, spec);
    const auto params = default_scan_params(spec, lambda, 0.0, T);
    const auto rep = bridge_scan(ps.coords, ranges, m, params);
    for (std::size_t gi = 0; gi < rep.gaps.size(); ++gi) {
      const auto& gap = rep.gaps[gi];
      if (gap.left < 0.1 * T || gap.right() > 0.9 * T) continue;
      if (rep.censored_right[gi]) continue;
      outcome[t] = rep.bridged_from_right[gi] ? 1 : 2;
      break;  // one Bernoulli sample per window
    }
  });

  PMEstimate est;
  est.windows = trials;
  std::size_t successes = 0, valid = 0;
  for (char c : outcome) {
    if (c == 0) ++est.discarded;
    else {
      ++valid;
      if (c == 2) ++successes;
    }
  }
  if (valid == 0)
    throw std::runtime_error("estimate_p_unbridged: every window was discarded");
  est.ci = stats::wilson_ci(successes, valid, level);
  return est;
}

double gamma_tail_ratio(double n, double beta, int k) {
  if (k == 1)
    throw std::domain_error("gamma_tail_ratio: k = 1 leaves the printed sums empty");
  if (k < 1 || !(n >= beta) || !(beta > 0.0))
    throw std::domain_error("gamma_tail_ratio: need n >= beta > 0, k >= 2");
  auto partial = [k](double t) {
    // sum_{i=1}^{k-1} e^{-t} t^i / i!
    double term = std::exp(-t) * t;
    double s = term;
    for (int i = 2; i <= k - 1; ++i) {
      term *= t / i;
      s += term;
    }
    return s;
  };
  return partial(n) / partial(beta);
}

double gamma_tail_standard(double n, int k) {
  if (k < 1 || !(n >= 0.0))
    throw std::domain_error("gamma_tail_standard: bad arguments");
  return stats::gamma_q(static_cast<double>(k), n);
}

double gamma_tail_asymptotic_constant(double beta, int k) {
  if (k < 2 || !(beta > 0.0))
    throw std::domain_error("gamma_tail_asymptotic_constant: need k >= 2, beta > 0");
  // 1/c = sum_{i=1}^{k-1} e^{-beta} (k-1)! beta^i / i!
  double term = std::exp(-beta) * beta;
  double s = term;
  for (int i = 2; i <= k - 1; ++i) {
    term *= beta / i;
    s += term;
  }
  return 1.0 / (std::tgamma(static_cast<double>(k)) * s);
}

double markov_range_bound(double gamma, double m) {
  if (!(gamma > 0.0 && gamma <= 0.5))
    throw std::domain_error("markov_range_bound: gamma must be in (0, 1/2]");
  if (!(m > 0.0)) throw std::domain_error("markov_range_bound: m must be > 0");
  return std::max(0.0, 1.0 - gamma / (m * (1.0 - gamma) * (1.0 - gamma)));
}

bool shift_monotonicity_check(std::span<const double> sorted_xs,
                              const model::RangeField& ranges) {
  if (ranges.ranges.size() != sorted_xs.size())
    throw std::invalid_argument("shift_monotonicity_check: size mismatch");
  for (std::size_t j = 0; j + 1 < sorted_xs.size(); ++j) {
    // (x_{j+1} - x_j) - (r_{j+1} - r_j) >= 0, evaluated on differences to
    // keep rounding independent of the window offset.
    const double dx = sorted_xs[j + 1] - sorted_xs[j];
    const double dr = ranges.ranges[j + 1] - ranges.ranges[j];
    if (dx - dr < -1e-12) return false;
  }
  return true;
}

}  // namespace gnp::oned
