#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gnperc/clusters.hpp"
#include "gnperc/renorm.hpp"
#include "gnperc/rng.hpp"
#include "gnperc/stats.hpp"
#include "oracles.hpp"

using namespace gnp;

TEST_CASE("banana scan hand cases") {
  const auto region = geom::BoxRegion::cube(2, 0.0, 6.0);  // 2x2 cells at delta=1, n=1
  // Empty set: all bad.
  auto empty = oracle::make_points(2, {}, region);
  const auto g0 = renorm::banana_scan(empty, 1.0, 1, region);
  CHECK(g0.cell_count() == 4);
  CHECK(g0.good_count() == 0);
  CHECK(g0.banana_boxes == 0);

  // One point centered in the first 3x3 sub-box: that cell is good.
  auto one = oracle::make_points(2, {1.5, 1.5}, region);
  const auto g1 = renorm::banana_scan(one, 1.0, 1, region);
  CHECK(g1.good_count() == 1);
  CHECK(g1.banana_boxes == 1);
  CHECK(g1.good[0] == 1);

  // Same point but off-center (inside the annulus): not a banana box.
  auto off = oracle::make_points(2, {0.5, 1.5}, region);
  CHECK(renorm::banana_scan(off, 1.0, 1, region).good_count() == 0);

  // Two points in the same sub-box: count != 1, not a banana box.
  auto two = oracle::make_points(2, {1.4, 1.5, 1.6, 1.5}, region);
  CHECK(renorm::banana_scan(two, 1.0, 1, region).good_count() == 0);

  // Region that does not tile: rejected.
  CHECK_THROWS(renorm::banana_scan(one, 1.0, 1, geom::BoxRegion::cube(2, 0.0, 6.5)));
}

TEST_CASE("banana frequency matches delta^2 e^{-9 delta^2} at rate 1") {
  // 1e5 disjoint 3x3 boxes via 10 sampled regions.
  const double p = renorm::banana_prob(1.0, 2);
  CHECK(p == doctest::Approx(std::exp(-9.0)).epsilon(1e-12));
  std::size_t bananas = 0, boxes = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const auto region = geom::BoxRegion::cube(2, 0.0, 300.0);
    auto ps = geom::sample_poisson(2, 1.0, region, 52000 + rep);
    const auto grid = renorm::banana_scan(ps, 1.0, 1, region);
    bananas += grid.banana_boxes;
    boxes += grid.cell_count();
  }
  const double freq = static_cast<double>(bananas) / static_cast<double>(boxes);
  CHECK(std::fabs(freq - p) < 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(boxes)));
}

TEST_CASE("adjacent cell goodness is uncorrelated") {
  // delta = 1/3, n = 4 puts the good probability near 1/2 (cell side 4), so
  // the correlation estimate is informative.
  const auto region = geom::BoxRegion::cube(2, 0.0, 300.0);
  auto ps = geom::sample_poisson(2, 1.0, region, 60601);
  const auto grid = renorm::banana_scan(ps, 1.0 / 3.0, 4, region);  // 75x75 cells
  const int n0 = grid.grid_dims[0], n1 = grid.grid_dims[1];
  std::vector<double> a, b;
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j + 1 < n1; ++j) {
      a.push_back(grid.good[static_cast<std::size_t>(i) * n1 + j]);
      b.push_back(grid.good[static_cast<std::size_t>(i) * n1 + j + 1]);
    }
  const double ma = stats::mean(a), mb = stats::mean(b);
  double cov = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) cov += (a[t] - ma) * (b[t] - mb);
  cov /= static_cast<double>(a.size() - 1);
  const double corr = cov / std::sqrt(stats::variance(a) * stats::variance(b));
  CHECK(std::fabs(corr) < 3.0 / std::sqrt(static_cast<double>(a.size())));
}

TEST_CASE("good box probability and the delta maximizer") {
  // delta=1/3, n=6: 1 - (1 - e^{-1}/9)^36 ~ 0.77742 > 0.679492.
  CHECK(renorm::good_box_prob(1.0 / 3.0, 6) == doctest::Approx(0.77742).epsilon(1e-4));
  CHECK(renorm::good_box_prob(1.0 / 3.0, 0) == 0.0);
  CHECK(renorm::good_box_prob(1.0 / 3.0, 6) > renorm::kPcSiteRigorous);

  // delta = 1/3 maximizes delta^2 e^{-9 delta^2}: value e^{-1}/9.
  const double at_star = renorm::banana_prob(1.0 / 3.0, 2);
  CHECK(at_star == doctest::Approx(std::exp(-1.0) / 9.0).epsilon(1e-12));
  CHECK(at_star == doctest::Approx(0.040868).epsilon(1e-4));
  for (double d = 0.25; d <= 0.42; d += 0.01)
    CHECK(renorm::banana_prob(d, 2) <= at_star + 1e-15);
  CHECK(at_star > renorm::banana_prob(0.3, 2));
  CHECK(at_star > renorm::banana_prob(0.37, 2));
}

TEST_CASE("n_tilde and the corollary bound") {
  CHECK(renorm::n_tilde(0.679492) == 6);
  CHECK(renorm::n_tilde(1e-12) == 1);
  CHECK(renorm::alpha_bound_2d(0.679492) == doctest::Approx(6.0 * std::sqrt(45.0)).epsilon(1e-12));
  CHECK(renorm::alpha_bound_2d(0.679492) == doctest::Approx(40.2492).epsilon(1e-5));
  CHECK(renorm::alpha_bound_2d(0.679492) < 41.0);
  // Simulation-suggested threshold: n_tilde = 5, bound ~ 33.54.
  CHECK(renorm::n_tilde(0.59) == 5);
  CHECK(renorm::alpha_bound_2d(0.59) == doctest::Approx(33.54).epsilon(1e-3));

  // Smallest-n property.
  for (double pc : {0.5, 0.679492, 0.9}) {
    const int nt = renorm::n_tilde(pc);
    CHECK(renorm::good_box_prob(1.0 / 3.0, nt) >= pc);
    if (nt > 1) CHECK(renorm::good_box_prob(1.0 / 3.0, nt - 1) < pc);
  }
  // Monotone in pc.
  double prev = 0.0;
  for (double pc = 0.05; pc < 0.99; pc += 0.05) {
    CHECK(renorm::alpha_bound_2d(pc) >= prev);
    prev = renorm::alpha_bound_2d(pc);
  }
}

TEST_CASE("subsquare goodness scan") {
  const auto region = geom::BoxRegion::cube(2, 0.0, 2.0);
  // Empty square: bad.
  auto empty = oracle::make_points(2, {}, region);
  CHECK(renorm::subsquare_good_scan(empty, 3, 90.0, region).good_count() == 0);
  // m/n^2 < 1: vacuous.
  auto some = oracle::make_points(2, {0.5, 0.5}, region);
  const auto vac = renorm::subsquare_good_scan(some, 3, 5.0, region);
  CHECK(vac.vacuous);
  CHECK(vac.good_count() == 0);
  CHECK_THROWS(renorm::subsquare_good_scan(some, 4, 90.0, region));  // n must be odd

  // lambda=200, n=5, m=5000: goodness frequency > 0.99 over 1000 squares.
  // The analytic frequency is (1 - e^{-8})^25 ~ 0.9917.
  geom::BoxRegion big({0.0, 0.0}, {50.0, 20.0});  // 1000 squares
  auto ps = geom::sample_poisson(2, 200.0, big, 70710);
  const auto grid = renorm::subsquare_good_scan(ps, 5, 5000.0, big);
  CHECK(grid.good_fraction() > 0.99);
}

TEST_CASE("coordinate scan and count-only sampling agree in law") {
  // Same criterion, same parameters: goodness frequency within 3 sigma.
  const int n = 3;
  const double m = 90.0, lambda = 50.0;
  const auto region = geom::BoxRegion::cube(2, 0.0, 30.0);
  auto ps = geom::sample_poisson(2, lambda, region, 1113);
  const double f1 = renorm::subsquare_good_scan(ps, n, m, region).good_fraction();
  const auto counts = renorm::subsquare_good_sample_counts(30, 30, n, m, lambda, 1114);
  const double f2 = counts.good_fraction();
  const double sigma = std::sqrt(2.0 * f1 * (1.0 - f1) / 900.0);
  CHECK(std::fabs(f1 - f2) < 3.0 * std::max(sigma, 0.01));
}

TEST_CASE("grid site percolation") {
  auto all_good = renorm::bernoulli_grid({10, 10}, 1.1, 1);
  CHECK(renorm::grid_site_percolation(all_good, 0).crossing);
  CHECK(renorm::grid_site_percolation(all_good, 1).crossing);
  auto all_bad = renorm::bernoulli_grid({10, 10}, -0.1, 1);
  CHECK_FALSE(renorm::grid_site_percolation(all_bad, 0).crossing);
  CHECK_THROWS(renorm::grid_site_percolation(all_good, 2));

  // Hand-built: a single good column crosses axis 0 only.
  renorm::GoodBoxGrid g;
  g.grid_dims = {3, 3};
  g.good = {0, 1, 0, 0, 1, 0, 0, 1, 0};
  g.region = geom::BoxRegion::cube(2, 0.0, 3.0);
  CHECK(renorm::grid_site_percolation(g, 0).crossing);
  CHECK_FALSE(renorm::grid_site_percolation(g, 1).crossing);

  // p = 0.78 on 100x100 sits well above the site threshold ~0.5927:
  // crossing frequency > 0.95 over 200 trials.
  std::size_t hits = 0;
  for (int t = 0; t < 200; ++t) {
    const auto grid = renorm::bernoulli_grid({100, 100}, 0.78, rng::derive_key(5, t));
    hits += renorm::grid_site_percolation(grid, 0).crossing;
  }
  CHECK(static_cast<double>(hits) / 200.0 > 0.95);
}

TEST_CASE("banana crossing implies a graph crossing at alpha = n sqrt(45)") {
  // A banana point has an empty annulus of width delta around its central
  // box, so d_1 >= delta and r = alpha d_1 >= alpha delta. With
  // alpha >= 3 n sqrt(5) = n sqrt(45), witnesses of 4-adjacent good cells
  // (distance <= 3 delta n sqrt(5)) are directly connected, so a crossing of
  // good cells forces a crossing component in GN_1(2, alpha).
  const double delta = 1.0 / 3.0;
  const int n = 6;
  const double alpha = n * std::sqrt(45.0);
  const double cell = 3.0 * delta * n;
  const auto region = geom::BoxRegion::cube(2, 0.0, 10.0 * cell);

  int checked = 0;
  for (int s = 0; s < 10 && checked < 2; ++s) {
    auto ps = geom::sample_poisson(2, 1.0, region, 91000 + s);
    const auto grid = renorm::banana_scan(ps, delta, n, region);
    const auto cross = renorm::grid_site_percolation(grid, 0);
    if (!cross.crossing) continue;
    ++checked;

    const auto table = geom::knn_table(ps, 1);
    for (std::int64_t w : grid.witness)
      if (w >= 0) CHECK(table.dist(static_cast<std::size_t>(w), 1) >= delta);

    const auto rf = model::connection_ranges(table, model::AlphaSpec::single(1, alpha));
    const auto g = model::build_graph(ps, rf, model::Variant::kReachUnion);
    const auto labels = cluster::label_clusters(g);

    // Recover the crossing component of good cells.
    const int n0 = grid.grid_dims[0], n1 = grid.grid_dims[1];
    std::vector<int> comp(static_cast<std::size_t>(n0) * n1, -1);
    std::vector<std::size_t> stack;
    int crossing_comp = -1;
    for (int start = 0; start < n0 * n1 && crossing_comp < 0; ++start) {
      if (!grid.good[start] || comp[start] >= 0) continue;
      stack.assign(1, static_cast<std::size_t>(start));
      comp[start] = start;
      bool lo = false, hi = false;
      std::vector<std::size_t> members;
      while (!stack.empty()) {
        const std::size_t c = stack.back();
        stack.pop_back();
        members.push_back(c);
        const int i = static_cast<int>(c) / n1, j = static_cast<int>(c) % n1;
        lo = lo || i == 0;
        hi = hi || i == n0 - 1;
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int t = 0; t < 4; ++t) {
          const int ii = i + di[t], jj = j + dj[t];
          if (ii < 0 || ii >= n0 || jj < 0 || jj >= n1) continue;
          const std::size_t cc = static_cast<std::size_t>(ii) * n1 + jj;
          if (grid.good[cc] && comp[cc] < 0) {
            comp[cc] = start;
            stack.push_back(cc);
          }
        }
      }
      if (lo && hi) {
        crossing_comp = start;
        // Witnesses of adjacent good cells are directly connected, and the
        // whole crossing component shares one graph component that spans
        // the region along axis 0.
        std::uint32_t label0 = ~0u;
        for (std::size_t c : members) {
          const auto w = static_cast<std::size_t>(grid.witness[c]);
          const int i = static_cast<int>(c) / n1, j = static_cast<int>(c) % n1;
          if (i + 1 < n0 && grid.good[c + n1] && comp[c + n1] == start) {
            const auto w2 = static_cast<std::size_t>(grid.witness[c + n1]);
            CHECK(geom::pair_distance(ps.point(w), ps.point(w2), ps.box, ps.metric) <=
                  cell * std::sqrt(5.0) + 1e-12);
            CHECK(std::binary_search(g.undirected[w].begin(), g.undirected[w].end(),
                                     static_cast<std::uint32_t>(w2)));
          }
          if (j + 1 < n1 && grid.good[c + 1] && comp[c + 1] == start) {
            const auto w2 = static_cast<std::size_t>(grid.witness[c + 1]);
            CHECK(std::binary_search(g.undirected[w].begin(), g.undirected[w].end(),
                                     static_cast<std::uint32_t>(w2)));
          }
          if (label0 == ~0u) label0 = labels.label[w];
          CHECK(labels.label[w] == label0);
        }
        // That component touches both faces' cell layers.
        bool touch_lo = false, touch_hi = false;
        for (std::size_t c : members) {
          const int i = static_cast<int>(c) / n1;
          if (i == 0) touch_lo = true;
          if (i == n0 - 1) touch_hi = true;
        }
        CHECK(touch_lo);
        CHECK(touch_hi);
      }
    }
    CHECK(crossing_comp >= 0);
  }
  CHECK(checked >= 2);
}

TEST_CASE("subsquare parameters satisfy the displayed conditions") {
  const auto sp = renorm::subsquare_parameters(0.5, renorm::kPcSiteRigorous);
  CHECK(sp.n == 11);  // smallest odd n > 1 + 2 sqrt(5) / 0.5 ~ 9.944
  CHECK(sp.n > 1.0 + 2.0 * std::sqrt(5.0) / 0.5);
  const double bound = (1.0 - renorm::kPcSiteRigorous) / (2.0 * sp.n * sp.n);
  CHECK(std::exp(-sp.mu) < bound);
  const unsigned cap = static_cast<unsigned>(sp.m / (sp.n * sp.n));
  CHECK(1.0 - stats::poisson_cdf(cap, sp.mu) < bound);
  // n = 5 would violate the corridor condition at alpha = 0.5.
  CHECK(5.0 < 1.0 + 2.0 * std::sqrt(5.0) / 0.5);
}

TEST_CASE("corridor connectivity in two adjacent good squares") {
  const auto sp = renorm::subsquare_parameters(0.5, renorm::kPcSiteRigorous);
  const auto region = geom::BoxRegion::cube(2, 0.0, 4.0);
  int verified = 0;
  for (int s = 0; s < 12 && verified < 3; ++s) {
    auto ps = geom::sample_poisson(2, sp.lambda, region, 81000 + s);
    const auto grid = renorm::subsquare_good_scan(ps, sp.n, sp.m, region);
    // Find a horizontally adjacent good pair away from the region edge.
    for (int i = 1; i + 2 <= 4 && verified < 3; ++i)
      for (int j = 0; j < 4; ++j) {
        if (!grid.good[static_cast<std::size_t>(i) * 4 + j] ||
            !grid.good[static_cast<std::size_t>(i + 1) * 4 + j])
          continue;
        const auto check = renorm::corridor_connectivity_check(
            ps, static_cast<double>(i), static_cast<double>(j), sp.n, sp.m, 0.5);
        CHECK(check.all_nonempty);
        CHECK(check.reach_certified);
        CHECK(check.pairwise_connected);
        CHECK(check.cross_square_connected);
        ++verified;
        break;
      }
  }
  CHECK(verified >= 3);
}
