#include "gnperc/gnmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gnperc/parallel.hpp"

namespace gnp::model {

AlphaSpec AlphaSpec::single(int k, double alpha) {
  if (k < 1) throw std::invalid_argument("AlphaSpec::single: k must be >= 1");
  AlphaSpec a;
  a.head.assign(k, 0.0);
  a.head[k - 1] = alpha;
  a.validate();
  return a;
}

AlphaSpec AlphaSpec::from_head(std::vector<double> head) {
  AlphaSpec a;
  a.head = std::move(head);
  a.validate();
  return a;
}

AlphaSpec AlphaSpec::geometric(double gamma) {
  AlphaSpec a;
  a.geometric_tail = true;
  a.gamma = gamma;
  a.validate();
  return a;
}

AlphaSpec AlphaSpec::head_with_geometric(std::vector<double> head, double gamma) {
  AlphaSpec a;
  a.head = std::move(head);
  a.geometric_tail = true;
  a.gamma = gamma;
  a.validate();
  return a;
}

void AlphaSpec::validate() const {
  for (double v : head)
    if (!(v >= 0.0)) throw std::invalid_argument("AlphaSpec: alpha_i must be >= 0");
  if (geometric_tail && !(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("AlphaSpec: geometric tail requires 0 < gamma < 1");
}

double AlphaSpec::coeff(int i) const {
  if (i < 1) throw std::invalid_argument("AlphaSpec::coeff: i must be >= 1");
  if (i <= static_cast<int>(head.size())) return head[i - 1];
  return geometric_tail ? std::pow(gamma, i) : 0.0;
}

int AlphaSpec::head_support() const {
  for (int i = static_cast<int>(head.size()); i >= 1; --i)
    if (head[i - 1] != 0.0) return i;
  return 0;
}

double AlphaSpec::total() const {
  double s = 0.0;
  for (double v : head) s += v;
  if (geometric_tail) {
    const int k = static_cast<int>(head.size());
    s += std::pow(gamma, k + 1) / (1.0 - gamma);  // sum_{i>k} gamma^i
  }
  return s;
}

double AlphaSpec::weighted_total() const {
  double s = 0.0;
  for (std::size_t i = 0; i < head.size(); ++i) s += (i + 1.0) * head[i];
  if (geometric_tail) {
    // sum_{i>k} i gamma^i = gamma^{k+1} ((k+1) - k gamma) / (1-gamma)^2
    const double k = static_cast<double>(head.size());
    s += std::pow(gamma, k + 1) * ((k + 1.0) - k * gamma) /
         ((1.0 - gamma) * (1.0 - gamma));
  }
  return s;
}

double AlphaSpec::beta(int k) const {
  if (k < 1) throw std::invalid_argument("AlphaSpec::beta: k must be >= 1");
  double s = 0.0;
  for (int i = std::max(k, 1); i <= static_cast<int>(head.size()); ++i)
    s += head[i - 1];
  if (geometric_tail) {
    const int m = std::max(k, static_cast<int>(head.size()) + 1);
    s += std::pow(gamma, m) / (1.0 - gamma);  // sum_{i>=m} gamma^i
  }
  return s;
}

double expected_range_1d(const AlphaSpec& alpha) {
  return 0.5 * alpha.weighted_total();
}

double expected_range(const AlphaSpec& alpha, int d, double lambda) {
  double s = 0.0;
  for (std::size_t i = 0; i < alpha.head.size(); ++i)
    if (alpha.head[i] != 0.0)
      s += alpha.head[i] *
           geom::expected_knn_distance(d, lambda, static_cast<int>(i) + 1);
  if (alpha.geometric_tail) {
    // Terms gamma^i E[d_i] decay geometrically; sum until below precision.
    for (int i = static_cast<int>(alpha.head.size()) + 1;; ++i) {
      const double term =
          std::pow(alpha.gamma, i) * geom::expected_knn_distance(d, lambda, i);
      s += term;
      if (term < 1e-16 * s && i > static_cast<int>(alpha.head.size()) + 8) break;
      if (i > 100000) break;
    }
  }
  return s;
}

double truncation_bound(const AlphaSpec& alpha, int d, double lambda, int kmax) {
  if (!alpha.geometric_tail) {
    double s = 0.0;
    for (int i = kmax + 1; i <= static_cast<int>(alpha.head.size()); ++i)
      if (alpha.head[i - 1] != 0.0)
        s += alpha.head[i - 1] * geom::expected_knn_distance(d, lambda, i);
    return s;
  }
  double s = 0.0;
  for (int i = kmax + 1;; ++i) {
    const double term = alpha.coeff(i) * geom::expected_knn_distance(d, lambda, i);
    s += term;
    if ((term < 1e-16 * (s + 1e-300) && i > kmax + 8) || i > 200000) break;
  }
  return s;
}

int required_kmax(const AlphaSpec& alpha, int d, double lambda, double rel_tol) {
  const int support = alpha.head_support();
  if (!alpha.geometric_tail) return std::max(1, support);
  const double scale = expected_range(alpha, d, lambda);
  int m = std::max(1, support);
  while (truncation_bound(alpha, d, lambda, m) >= rel_tol * scale) {
    ++m;
    if (m > 100000)
      throw std::runtime_error("required_kmax: tail does not truncate");
  }
  return m;
}

RangeField connection_ranges(const geom::NeighborTable& table,
                             const AlphaSpec& alpha) {
  alpha.validate();
  const int support = alpha.head_support();
  if (table.truncated) {
    // Fewer than kmax neighbours exist; acceptable only if alpha needs none
    // of the missing columns.
    if (alpha.geometric_tail || support > table.cols)
      throw std::invalid_argument(
          "connection_ranges: neighbour table truncated below alpha support");
  }
  if (support > table.kmax_requested)
    throw std::invalid_argument(
        "connection_ranges: table kmax below alpha head support");

  const int kmax_used = alpha.geometric_tail ? table.cols : std::min(support, table.cols);
  RangeField rf;
  rf.kmax_used = kmax_used;
  rf.ranges.assign(table.n, 0.0);
  std::vector<double> coeffs(kmax_used);
  for (int k = 1; k <= kmax_used; ++k) coeffs[k - 1] = alpha.coeff(k);
  for (std::size_t i = 0; i < table.n; ++i) {
    const double* row = table.distances.data() + i * table.cols;
    double r = 0.0;
    for (int k = 0; k < kmax_used; ++k) r += coeffs[k] * row[k];
    rf.ranges[i] = r;
  }
  rf.truncation_bound = alpha.geometric_tail
                            ? truncation_bound(alpha, table.dim, table.density,
                                               kmax_used)
                            : 0.0;
  return rf;
}

double laplace_V(const AlphaSpec& alpha, double s) {
  if (!(s >= 0.0)) throw std::domain_error("laplace_V: s must be >= 0");
  if (s == 0.0) return 1.0;
  const int K = static_cast<int>(alpha.head.size());
  // Suffix sums beta_i for the head in one backward pass.
  const double tail_total =
      alpha.geometric_tail ? std::pow(alpha.gamma, K + 1) / (1.0 - alpha.gamma)
                           : 0.0;
  std::vector<double> beta_head(K + 1);
  double acc = tail_total;
  for (int i = K; i >= 1; --i) {
    acc += alpha.head[i - 1];
    beta_head[i - 1] = acc;
  }
  double log_phi = 0.0;
  for (int i = 1; i <= K; ++i) {
    const double x = beta_head[i - 1] * s * 0.5;
    if (x < 1e-16) {
      // Remaining log factors are within double precision of their linear
      // term; sum_{j>=i} beta_j closes in closed form.
      double beta_rest = 0.0;
      for (int j = i; j <= K; ++j) beta_rest += beta_head[j - 1];
      if (alpha.geometric_tail)
        beta_rest += std::pow(alpha.gamma, K + 1) /
                     ((1.0 - alpha.gamma) * (1.0 - alpha.gamma));
      return std::exp(log_phi - 0.5 * s * beta_rest);
    }
    log_phi -= std::log1p(x);
  }
  if (alpha.geometric_tail) {
    for (int i = K + 1;; ++i) {
      const double beta_i = std::pow(alpha.gamma, i) / (1.0 - alpha.gamma);
      const double x = beta_i * s * 0.5;
      if (x < 1e-16) {
        const double beta_rest = std::pow(alpha.gamma, i) /
                                 ((1.0 - alpha.gamma) * (1.0 - alpha.gamma));
        log_phi -= 0.5 * s * beta_rest;
        break;
      }
      log_phi -= std::log1p(x);
    }
  }
  return std::exp(log_phi);
}

RangeClass divergence_classifier(const AlphaSpec& alpha, int d) {
  if (d < 1) throw std::domain_error("divergence_classifier: d must be >= 1");
  alpha.validate();
  // Finite support and geometric tails both give sum i^{1/d} alpha_i < inf.
  return RangeClass::kFiniteRange;
}

RangeClass divergence_classifier_powerlaw(double c, double p, int d) {
  if (d < 1) throw std::domain_error("divergence_classifier: d must be >= 1");
  if (std::isnan(c) || std::isnan(p)) return RangeClass::kUndecidable;
  if (c < 0.0)
    throw std::invalid_argument("divergence_classifier: c must be >= 0");
  if (c == 0.0) return RangeClass::kFiniteRange;
  // sum i^{1/d} c i^{-p} diverges iff 1/d - p >= -1.
  return p <= 1.0 + 1.0 / d ? RangeClass::kInfiniteRange
                            : RangeClass::kFiniteRange;
}

std::size_t GNGraph::undirected_edge_count() const {
  std::size_t deg = 0;
  for (const auto& adj : undirected) deg += adj.size();
  return deg / 2;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> GNGraph::edge_list() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v : undirected[u])
      if (u < v) edges.emplace_back(u, v);
  std::sort(edges.begin(), edges.end());
  return edges;
}

GNGraph build_graph(const geom::PointSet& points, const RangeField& ranges,
                    Variant variant, std::size_t threads) {
  const std::size_t n = points.size();
  if (ranges.ranges.size() != n)
    throw std::invalid_argument("build_graph: ranges do not match point set");

  GNGraph g;
  g.n = n;
  g.variant = variant;
  g.reach.assign(n, {});
  g.undirected.assign(n, {});
  if (n == 0) return g;

  geom::GridIndex grid(points);
  parallel_for(n, threads, [&](std::size_t i) {
    thread_local std::vector<std::uint32_t> buf;
    grid.within(i, ranges.ranges[i], buf);
    g.reach[i].assign(buf.begin(), buf.end());
    std::sort(g.reach[i].begin(), g.reach[i].end());
  });

  if (variant == Variant::kReachUnion) {
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j : g.reach[i]) {
        g.undirected[i].push_back(j);
        g.undirected[j].push_back(i);
      }
    parallel_for(n, threads, [&](std::size_t i) {
      auto& adj = g.undirected[i];
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    });
  } else {
    const double rmax =
        *std::max_element(ranges.ranges.begin(), ranges.ranges.end());
    parallel_for(n, threads, [&](std::size_t i) {
      thread_local std::vector<std::uint32_t> buf;
      grid.within(i, ranges.ranges[i] + rmax, buf);
      auto p = points.point(i);
      auto& adj = g.undirected[i];
      for (std::uint32_t j : buf) {
        if (geom::pair_distance(p, points.point(j), points.box, points.metric) <=
            ranges.ranges[i] + ranges.ranges[j])
          adj.push_back(j);
      }
      std::sort(adj.begin(), adj.end());
    });
  }
  return g;
}

GNGraph nn_reference_graph(const geom::PointSet& points, int k) {
  const std::size_t n = points.size();
  if (k < 1) throw std::invalid_argument("nn_reference_graph: k must be >= 1");
  if (n <= static_cast<std::size_t>(k))
    throw std::invalid_argument("nn_reference_graph: need n > k");

  GNGraph g;
  g.n = n;
  g.variant = Variant::kReachUnion;
  g.reach.assign(n, {});
  g.undirected.assign(n, {});

  std::vector<std::pair<double, std::uint32_t>> cand(n - 1);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (std::uint32_t j = 0; j < n; ++j) {
      if (j == i) continue;
      cand[m++] = {geom::pair_distance(points.point(i), points.point(j),
                                       points.box, points.metric),
                   j};
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    g.reach[i].resize(k);
    for (int t = 0; t < k; ++t) g.reach[i][t] = cand[t].second;
    std::sort(g.reach[i].begin(), g.reach[i].end());
  }
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j : g.reach[i]) {
      g.undirected[i].push_back(j);
      g.undirected[j].push_back(i);
    }
  for (auto& adj : g.undirected) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return g;
}

}  // namespace gnp::model
