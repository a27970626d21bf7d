#include "gnperc/sbp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "gnperc/parallel.hpp"

namespace gnp::sbp {

double SBPConfig::offspring_mean() const {
  return std::pow(1.0 + delta1, dim);
}

double capped_poisson_mean(double mu, int c2) {
  if (mu < 0.0 || c2 < 1) throw std::invalid_argument("capped_poisson_mean: bad arguments");
  // E[min(Y, c2)] = sum_{j<c2} j pmf(j) + c2 P(Y >= c2).
  double pmf = std::exp(-mu);
  double cdf = pmf;
  double e = 0.0;
  for (int j = 1; j < c2; ++j) {
    pmf *= mu / j;
    cdf += pmf;
    e += j * pmf;
  }
  return e + c2 * (1.0 - cdf);
}

double calibrate_delta1(int d, double c1, int c2) {
  if (d < 1) throw std::domain_error("calibrate_delta1: d must be >= 1");
  if (!(c1 > 1.0) || !(static_cast<double>(c2) > c1))
    throw std::domain_error("calibrate_delta1: need 1 < c1 < c2");
  double lo = 0.0, hi = std::max(2.0 * c1, 4.0);
  while (capped_poisson_mean(hi, c2) < c1) {
    hi *= 2.0;
    if (hi > 1e9) throw std::runtime_error("calibrate_delta1: no root");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (capped_poisson_mean(mid, c2) < c1) lo = mid;
    else hi = mid;
    if (std::fabs(capped_poisson_mean(0.5 * (lo + hi), c2) - c1) < 1e-12) break;
  }
  const double mu = 0.5 * (lo + hi);
  return std::pow(mu, 1.0 / d) - 1.0;
}

void sample_on_sphere(rng::Stream& s, int d, std::span<double> out) {
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int a = 0; a < d; ++a) {
      out[a] = s.normal();
      norm2 += out[a] * out[a];
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (int a = 0; a < d; ++a) out[a] *= inv;
}

void sample_in_ball(rng::Stream& s, int d, double radius, std::span<double> out) {
  sample_on_sphere(s, d, out);
  const double r = radius * std::pow(s.uniform(), 1.0 / d);
  for (int a = 0; a < d; ++a) out[a] *= r;
}

SBPRealization run_sbp(const SBPConfig& config) {
  std::vector<double> origin(config.dim, 0.0);
  return run_sbp(config, origin);
}

SBPRealization run_sbp(const SBPConfig& config, std::span<const double> start) {
  if (config.dim < 1 || config.c2 < 1 || config.generations < 0 ||
      !(config.delta1 > 0.0))
    throw std::invalid_argument("run_sbp: invalid config");
  if (static_cast<int>(start.size()) != config.dim)
    throw std::invalid_argument("run_sbp: start point dim mismatch");

  const int d = config.dim;
  const double radius = 1.0 + config.delta1;
  const double mu = config.offspring_mean();

  SBPRealization out;
  out.dim = d;
  out.coords.assign(start.begin(), start.end());
  out.parent.assign(1, -1);
  out.birth_radius.assign(1, 0.0);
  out.gen_start = {0, 1};

  std::vector<std::pair<double, std::size_t>> order;
  std::vector<double> scratch(d);
  for (int g = 0; g < config.generations; ++g) {
    const std::size_t lo = out.gen_start[g], hi = out.gen_start[g + 1];
    if (lo == hi) {
      out.extinct = true;
      break;
    }
    for (std::size_t p = lo; p < hi; ++p) {
      // Independent scatter on S_{1+delta1}(parent), keyed by (seed, g, p).
      rng::Stream s(config.seed, 0x5B9, g, p);
      const std::uint64_t born = s.poisson(mu);
      // Grow the ball: keep the c2 nearest of the scatter.
      order.clear();
      const std::size_t base = out.coords.size();
      for (std::uint64_t b = 0; b < born; ++b) {
        sample_in_ball(s, d, radius, scratch);
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) r2 += scratch[a] * scratch[a];
        order.emplace_back(std::sqrt(r2), b);
        for (int a = 0; a < d; ++a)
          out.coords.push_back(out.coords[p * d + a] + scratch[a]);
      }
      const std::size_t keep = std::min<std::size_t>(born, config.c2);
      std::partial_sort(order.begin(), order.begin() + keep, order.end());
      // Compact the kept offspring in birth-radius order.
      std::vector<double> kept(keep * d);
      for (std::size_t t = 0; t < keep; ++t) {
        const std::size_t src = base + order[t].second * d;
        std::copy_n(out.coords.begin() + src, d, kept.begin() + t * d);
        out.parent.push_back(static_cast<std::int64_t>(p));
        out.birth_radius.push_back(order[t].first);
      }
      out.coords.resize(base);
      out.coords.insert(out.coords.end(), kept.begin(), kept.end());
      if (out.parent.size() > config.max_points) {
        out.truncated = true;
        break;
      }
    }
    out.gen_start.push_back(out.parent.size());
    if (out.truncated) break;
  }
  if (!out.truncated && out.gen_start.size() >= 2 &&
      out.gen_start.back() == out.gen_start[out.gen_start.size() - 2] &&
      config.generations > 0)
    out.extinct = true;
  return out;
}

std::array<double, 2> project_L(std::span<const double> point) {
  const int d = static_cast<int>(point.size());
  if (d < 2) throw std::domain_error("project_L: needs d >= 2");
  const double s = std::sqrt(static_cast<double>(d));
  return {s * point[0], s * point[1]};
}

stats::CIEstimate overlap_ratio(int d, std::span<const double> x1,
                                std::span<const double> x2, double r1,
                                double r2, std::size_t N, std::uint64_t seed,
                                double level) {
  if (d < 1 || N < 1) throw std::invalid_argument("overlap_ratio: bad arguments");
  if (static_cast<int>(x1.size()) != d || static_cast<int>(x2.size()) != d)
    throw std::invalid_argument("overlap_ratio: center dim mismatch");
  rng::Stream s(seed, 0x0E41);
  std::vector<double> p(d);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < N; ++i) {
    sample_in_ball(s, d, r1, p);
    double dist2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double dd = x1[a] + p[a] - x2[a];
      dist2 += dd * dd;
    }
    if (dist2 <= r2 * r2) ++hits;
  }
  return stats::wilson_ci(hits, N, level);
}

stats::CIEstimate overlap_ratio_axis(int d, double dist, double r1, double r2,
                                     std::size_t N, std::uint64_t seed,
                                     double level) {
  std::vector<double> x1(d, 0.0), x2(d, 0.0);
  x2[0] = dist;
  return overlap_ratio(d, x1, x2, r1, r2, N, seed, level);
}

BoxReachResult box_reach_probability(const SBPConfig& config, double M, int N0,
                                     std::array<double, 2> start_projected,
                                     int i, int j, std::size_t trials,
                                     double level, std::size_t threads) {
  if (!(M > 0.0) || N0 < 0 || trials < 1)
    throw std::invalid_argument("box_reach_probability: bad arguments");
  const int d = config.dim;
  if (d < 2) throw std::domain_error("box_reach_probability: needs d >= 2");

  // Embed the projected start along the first two axes: L(x) = start.
  std::vector<double> start(d, 0.0);
  const double sd = std::sqrt(static_cast<double>(d));
  start[0] = start_projected[0] / sd;
  start[1] = start_projected[1] / sd;

  auto inside = [M](std::array<double, 2> q, int si, int sj) {
    return q[0] >= M * (si - 0.5) && q[0] <= M * (si + 0.5) &&
           q[1] >= M * (sj - 0.5) && q[1] <= M * (sj + 0.5);
  };

  std::vector<char> success(trials, 0), extinct(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    SBPConfig c = config;
    c.generations = N0;
    c.seed = rng::derive_key(config.seed, 0xB0C5, t);
    const SBPRealization run = run_sbp(c, start);
    if (run.extinct || run.generations_realized() < static_cast<std::size_t>(N0)) {
      extinct[t] = 1;
      return;
    }
    bool lo = false, hi = false;
    const std::size_t a = run.gen_start[N0], b = run.gen_start[N0 + 1];
    for (std::size_t p = a; p < b && !(lo && hi); ++p) {
      const auto q = project_L(run.point(p));
      lo = lo || inside(q, i + 1, j - 1);
      hi = hi || inside(q, i + 1, j + 1);
    }
    success[t] = lo && hi;
  });

  BoxReachResult out;
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    hits += success[t];
    out.extinct_runs += extinct[t];
  }
  out.ci = stats::wilson_ci(hits, trials, level);
  return out;
}

std::vector<LatticeStep> demo_lattice_chain(const SBPConfig& config, double M,
                                            int N0, int max_i) {
  if (!(M > 0.0) || N0 < 1 || max_i < 0)
    throw std::invalid_argument("demo_lattice_chain: bad arguments");
  const int d = config.dim;
  const double sd = std::sqrt(static_cast<double>(d));

  auto in_square = [M](std::array<double, 2> q, int si, int sj) {
    return q[0] >= M * (si - 0.5) && q[0] <= M * (si + 0.5) &&
           q[1] >= M * (sj - 0.5) && q[1] <= M * (sj + 0.5);
  };

  // Per successful site: its generation-N0 points (full d-dim coordinates).
  std::map<std::pair<int, int>, std::vector<std::vector<double>>> clouds;
  std::vector<LatticeStep> steps;
  for (int i = 0; i <= max_i; ++i) {
    for (int j = -i; j <= i; j += 2) {
      LatticeStep step;
      step.i = i;
      step.j = j;

      // Start point: the origin for (0,0), else the parent-cloud point whose
      // projection is closest to (M i, M j).
      std::vector<double> start(d, 0.0);
      bool have_start = i == 0;
      double best = std::numeric_limits<double>::infinity();
      for (int dj : {-1, 1}) {
        const auto it = clouds.find({i - 1, j + dj});
        if (it == clouds.end()) continue;
        for (const auto& cand : it->second) {
          const auto q = project_L(cand);
          const double dist = std::hypot(q[0] - M * i, q[1] - M * j);
          if (dist < best) {
            best = dist;
            start = cand;
            have_start = true;
          }
        }
      }
      if (!have_start) {
        steps.push_back(step);
        continue;
      }
      step.attempted = true;
      step.start_projected = project_L(start);

      SBPConfig c = config;
      c.generations = N0;
      c.seed = rng::derive_key(config.seed, 0xDE30, static_cast<std::uint64_t>(i),
                               static_cast<std::uint64_t>(j + max_i + 1));
      const auto run = run_sbp(c, start);
      if (run.generations_realized() >= static_cast<std::size_t>(N0)) {
        const std::size_t a = run.gen_start[N0], b = run.gen_start[N0 + 1];
        step.generation_points = b - a;
        bool lo = false, hi = false;
        std::vector<std::vector<double>> cloud;
        for (std::size_t p = a; p < b; ++p) {
          auto pt = run.point(p);
          cloud.emplace_back(pt.begin(), pt.end());
          const auto q = project_L(pt);
          lo = lo || in_square(q, i + 1, j - 1);
          hi = hi || in_square(q, i + 1, j + 1);
        }
        step.success = lo && hi;
        if (step.success) clouds[{i, j}] = std::move(cloud);
      }
      steps.push_back(step);
    }
  }
  return steps;
}

}  // namespace gnp::sbp
