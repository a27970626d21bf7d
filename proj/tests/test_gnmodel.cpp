#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gnperc/gnmodel.hpp"
#include "gnperc/stats.hpp"
#include "oracles.hpp"

using namespace gnp;

TEST_CASE("alpha spec closed forms") {
  const auto a = model::AlphaSpec::from_head({1.0, 0.5});
  CHECK(a.total() == 1.5);
  CHECK(a.weighted_total() == 2.0);
  CHECK(a.beta(1) == 1.5);
  CHECK(a.beta(2) == 0.5);
  CHECK(a.beta(3) == 0.0);

  // alpha_i = (1/2)^i: |alpha| = 1, sum i alpha_i = 2, beta_k = 2^{1-k}.
  const auto g = model::AlphaSpec::geometric(0.5);
  CHECK(g.total() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.weighted_total() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(g.beta(1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.beta(3) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(g.coeff(4) == doctest::Approx(0.0625));

  CHECK_THROWS(model::AlphaSpec::from_head({1.0, -0.5}));
  CHECK_THROWS(model::AlphaSpec::geometric(1.0));
}

TEST_CASE("expected range oracles") {
  CHECK(model::expected_range_1d(model::AlphaSpec::single(1, 1.0)) == 0.5);
  CHECK(model::expected_range_1d(model::AlphaSpec::from_head({1.0, 0.5})) == 1.0);
  CHECK(model::expected_range_1d(model::AlphaSpec::geometric(0.5)) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // The d-dimensional Gamma-moment formula must agree with the 1D closed
  // form at d = 1, lambda = 1.
  for (const auto& a : {model::AlphaSpec::single(2, 0.7),
                        model::AlphaSpec::from_head({0.3, 0.0, 1.2}),
                        model::AlphaSpec::geometric(0.4)})
    CHECK(model::expected_range(a, 1, 1.0) ==
          doctest::Approx(model::expected_range_1d(a)).epsilon(1e-10));
}

TEST_CASE("connection ranges: single component and zero alpha") {
  const auto box = geom::BoxRegion::cube(2, 0.0, 25.0);
  auto ps = geom::sample_poisson(2, 1.0, box, 5150);
  const auto table = geom::knn_table(ps, 4);

  const auto rf = model::connection_ranges(table, model::AlphaSpec::single(3, 2.5));
  CHECK(rf.truncation_bound == 0.0);
  for (std::size_t i = 0; i < ps.size(); ++i)
    CHECK(rf.ranges[i] == 2.5 * table.dist(i, 3));

  const auto rz = model::connection_ranges(table, model::AlphaSpec::single(2, 0.0));
  for (double r : rz.ranges) CHECK(r == 0.0);
}

TEST_CASE("connection ranges refuse unusable tables") {
  auto ps = oracle::make_points(1, {0.0, 1.0, 3.0}, geom::BoxRegion::cube(1, 0.0, 4.0));
  const auto t = geom::knn_table(ps, 5);  // truncated to 2 columns
  CHECK(t.truncated);
  CHECK_NOTHROW(model::connection_ranges(t, model::AlphaSpec::single(2, 1.0)));
  CHECK_THROWS(model::connection_ranges(t, model::AlphaSpec::single(3, 1.0)));
  CHECK_THROWS(model::connection_ranges(t, model::AlphaSpec::geometric(0.5)));
}

TEST_CASE("mean range matches E r(x): 1D and 2D") {
  // 1D, lambda=1, alpha=(1): mean r over interior points = 0.5 within 3 SE.
  {
    const auto box = geom::BoxRegion::cube(1, 0.0, 250000.0);
    auto ps = geom::sample_poisson(1, 1.0, box, 424242);
    std::sort(ps.coords.begin(), ps.coords.end());
    const auto table = geom::knn_table(ps, 1);
    const auto rf = model::connection_ranges(table, model::AlphaSpec::single(1, 1.0));
    const auto mask = geom::interior_mask(ps, geom::interior_margin(1, 1.0, 1));
    std::vector<double> rs;
    for (std::size_t i = 0; i < ps.size(); i += 4)
      if (mask[i]) rs.push_back(rf.ranges[i]);
    REQUIRE(rs.size() > 50000);
    const double se = std::sqrt(stats::variance(rs) / static_cast<double>(rs.size()));
    CHECK(std::fabs(stats::mean(rs) - 0.5) < 3.0 * se);
  }
  // 2D, lambda=1, alpha = e_2 * 1.3: mean r = 1.3 E d_2 within 3 SE.
  {
    const auto box = geom::BoxRegion::cube(2, 0.0, 150.0);
    auto ps = geom::sample_poisson(2, 1.0, box, 434343, geom::Metric::kTorus);
    const auto table = geom::knn_table(ps, 2);
    const auto alpha = model::AlphaSpec::single(2, 1.3);
    const auto rf = model::connection_ranges(table, alpha);
    std::vector<double> rs;
    for (std::size_t i = 0; i < ps.size(); i += 7) rs.push_back(rf.ranges[i]);
    const double want = model::expected_range(alpha, 2, 1.0);
    const double se = std::sqrt(stats::variance(rs) / static_cast<double>(rs.size()));
    CHECK(std::fabs(stats::mean(rs) - want) < 3.0 * se);
  }
}

TEST_CASE("geometric tails truncate with a certified bound") {
  const auto a = model::AlphaSpec::geometric(0.5);
  const int kmax = model::required_kmax(a, 1, 1.0);
  CHECK(kmax >= 5);
  const double bound = model::truncation_bound(a, 1, 1.0, kmax);
  CHECK(bound < 1e-3 * model::expected_range(a, 1, 1.0));
  CHECK(bound > 0.0);
  // The bound really does bound the omitted tail: E sum_{i>kmax} gamma^i d_i
  // evaluated termwise equals it (series identity), so just check decrease.
  CHECK(model::truncation_bound(a, 1, 1.0, kmax + 5) < bound);
}

TEST_CASE("laplace transform of V") {
  const auto e1 = model::AlphaSpec::single(1, 1.0);
  CHECK(model::laplace_V(e1, 0.0) == 1.0);
  CHECK(model::laplace_V(e1, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
  // Against a direct product for a mixed spec.
  const auto a = model::AlphaSpec::head_with_geometric({0.8, 0.1}, 0.3);
  double direct = 1.0;
  for (int i = 1; i <= 200; ++i) direct /= 1.0 + a.beta(i) * 1.7 / 2.0;
  CHECK(model::laplace_V(a, 1.7) == doctest::Approx(direct).epsilon(1e-10));

  // Divergent sum beta (sum i alpha_i = inf): phi -> 0 with truncation depth.
  // alpha_i = i^{-3/2} reaches below 1e-6 by depth 1e4; alpha_i = i^{-2}
  // decreases monotonically (its convergence to 0 is only ~1/sqrt(depth)).
  auto head_of = [](double p, std::size_t depth) {
    std::vector<double> h(depth);
    for (std::size_t i = 0; i < depth; ++i) h[i] = std::pow(i + 1.0, -p);
    return model::AlphaSpec::from_head(std::move(h));
  };
  CHECK(model::laplace_V(head_of(1.5, 10000), 1.0) < 1e-6);
  double prev = 1.0;
  for (std::size_t depth : {100u, 1000u, 10000u, 100000u}) {
    const double phi = model::laplace_V(head_of(2.0, depth), 1.0);
    CHECK(phi < prev);
    prev = phi;
  }
}

TEST_CASE("divergence classifier") {
  CHECK(model::divergence_classifier(model::AlphaSpec::from_head({3.0, 0.0, 2.0}), 2) ==
        model::RangeClass::kFiniteRange);
  CHECK(model::divergence_classifier(model::AlphaSpec::geometric(0.9), 3) ==
        model::RangeClass::kFiniteRange);
  // p = 1.5, d = 2: sum i^{1/2} i^{-3/2} = sum 1/i diverges.
  CHECK(model::divergence_classifier_powerlaw(1.0, 1.5, 2) ==
        model::RangeClass::kInfiniteRange);
  CHECK(model::divergence_classifier_powerlaw(1.0, 2.0, 2) ==
        model::RangeClass::kFiniteRange);
  CHECK(model::divergence_classifier_powerlaw(0.0, 0.5, 2) ==
        model::RangeClass::kFiniteRange);
  CHECK(model::divergence_classifier_powerlaw(1.0, std::nan(""), 2) ==
        model::RangeClass::kUndecidable);
}

TEST_CASE("two-point graph rules") {
  auto ps = oracle::make_points(1, {0.0, 1.0}, geom::BoxRegion::cube(1, 0.0, 2.0));
  model::RangeField rf;
  rf.kmax_used = 1;

  rf.ranges = {1.5, 0.1};
  auto g = model::build_graph(ps, rf, model::Variant::kReachUnion);
  CHECK(g.reach[0] == std::vector<std::uint32_t>{1});
  CHECK(g.reach[1].empty());
  CHECK(g.undirected[0] == std::vector<std::uint32_t>{1});  // directed reach suffices
  CHECK(g.undirected[1] == std::vector<std::uint32_t>{0});

  rf.ranges = {0.6, 0.5};
  auto b = model::build_graph(ps, rf, model::Variant::kBooleanOverlap);
  CHECK(b.undirected[0] == std::vector<std::uint32_t>{1});  // 0.6 + 0.5 >= 1
  auto r = model::build_graph(ps, rf, model::Variant::kReachUnion);
  CHECK(r.undirected[0].empty());  // max(0.6, 0.5) < 1
}

TEST_CASE("graph equals brute force in both variants") {
  for (int dim : {1, 2}) {
    const double side = std::pow(300.0, 1.0 / dim);
    const auto box = geom::BoxRegion::cube(dim, 0.0, side);
    auto ps = geom::sample_poisson(dim, 1.0, box, 6100 + dim);
    const auto table = geom::knn_table(ps, 2);
    const auto rf = model::connection_ranges(table, model::AlphaSpec::single(2, 1.4));
    for (auto variant : {model::Variant::kReachUnion, model::Variant::kBooleanOverlap}) {
      auto fast = model::build_graph(ps, rf, variant);
      auto slow = oracle::brute_graph(ps, rf.ranges, variant);
      CHECK(fast.reach == slow.reach);
      CHECK(fast.undirected == slow.undirected);
    }
  }
}

TEST_CASE("nn reference graph hand cases") {
  auto ps = oracle::make_points(1, {0.0, 1.0, 3.0}, geom::BoxRegion::cube(1, 0.0, 4.0));
  const auto g = model::nn_reference_graph(ps, 1);
  // 3's nearest is 1: undirected edges {0,1} and {1,3}.
  CHECK(g.undirected[0] == std::vector<std::uint32_t>{1});
  CHECK(g.undirected[1] == std::vector<std::uint32_t>{0, 2});
  CHECK(g.undirected[2] == std::vector<std::uint32_t>{1});

  // k = n-1: complete graph.
  const auto c = model::nn_reference_graph(ps, 2);
  for (std::uint32_t i = 0; i < 3; ++i) CHECK(c.undirected[i].size() == 2);
  CHECK_THROWS(model::nn_reference_graph(ps, 3));
}

TEST_CASE("GN_k(d,1) equals NN(d,k)") {
  for (int dim : {1, 2, 3}) {
    for (int k : {1, 2, 3}) {
      const double side = std::pow(500.0, 1.0 / dim);
      const auto box = geom::BoxRegion::cube(dim, 0.0, side);
      auto ps = geom::sample_poisson(dim, 1.0, box, 7000 + 10 * dim + k);
      const auto table = geom::knn_table(ps, k);
      const auto rf = model::connection_ranges(table, model::AlphaSpec::single(k, 1.0));
      const auto gn = model::build_graph(ps, rf, model::Variant::kReachUnion);
      const auto nn = model::nn_reference_graph(ps, k);
      CHECK(gn.reach == nn.reach);
      CHECK(gn.undirected == nn.undirected);
    }
  }
}

TEST_CASE("scale invariance of the edge sets") {
  const auto box = geom::BoxRegion::cube(2, 0.0, 20.0);
  auto ps = geom::sample_poisson(2, 1.0, box, 888);
  const auto table = geom::knn_table(ps, 2);
  const auto rf = model::connection_ranges(table, model::AlphaSpec::from_head({0.9, 0.6}));
  const auto base = model::build_graph(ps, rf, model::Variant::kReachUnion);

  for (double s : {0.1, 3.7}) {
    geom::PointSet scaled = ps;
    for (auto& c : scaled.coords) c *= s;
    scaled.box = geom::BoxRegion::cube(2, 0.0, 20.0 * s);
    scaled.density = 1.0 / (s * s);
    const auto t2 = geom::knn_table(scaled, 2);
    const auto r2 = model::connection_ranges(t2, model::AlphaSpec::from_head({0.9, 0.6}));
    const auto g2 = model::build_graph(scaled, r2, model::Variant::kReachUnion);
    CHECK(g2.reach == base.reach);
    CHECK(g2.undirected == base.undirected);
  }
}

TEST_CASE("domination for alpha < 1") {
  // Every undirected edge of GN_k(d, alpha<1) is an edge of GN_{k-1}(d, 1),
  // and reach out-degrees stay <= k-1.
  for (int k : {2, 3}) {
    const auto box = geom::BoxRegion::cube(2, 0.0, 25.0);
    auto ps = geom::sample_poisson(2, 1.0, box, 9200 + k);
    const auto table = geom::knn_table(ps, k);
    const auto rf = model::connection_ranges(table, model::AlphaSpec::single(k, 0.8));
    const auto sub = model::build_graph(ps, rf, model::Variant::kReachUnion);
    const auto rf1 = model::connection_ranges(table, model::AlphaSpec::single(k - 1, 1.0));
    const auto dom = model::build_graph(ps, rf1, model::Variant::kReachUnion);
    for (std::uint32_t i = 0; i < sub.n; ++i) {
      CHECK(sub.reach[i].size() <= static_cast<std::size_t>(k - 1));
      CHECK(std::includes(dom.undirected[i].begin(), dom.undirected[i].end(),
                          sub.undirected[i].begin(), sub.undirected[i].end()));
    }
  }
}

TEST_CASE("monotonicity in alpha and variant containment") {
  const auto box = geom::BoxRegion::cube(2, 0.0, 25.0);
  auto ps = geom::sample_poisson(2, 1.0, box, 1212);
  const auto table = geom::knn_table(ps, 2);
  const auto lo = model::build_graph(
      ps, model::connection_ranges(table, model::AlphaSpec::from_head({0.5, 0.2})),
      model::Variant::kReachUnion);
  const auto hi = model::build_graph(
      ps, model::connection_ranges(table, model::AlphaSpec::from_head({0.9, 0.2})),
      model::Variant::kReachUnion);
  for (std::uint32_t i = 0; i < lo.n; ++i)
    CHECK(std::includes(hi.undirected[i].begin(), hi.undirected[i].end(),
                        lo.undirected[i].begin(), lo.undirected[i].end()));

  const auto rf = model::connection_ranges(table, model::AlphaSpec::from_head({0.7, 0.1}));
  const auto ru = model::build_graph(ps, rf, model::Variant::kReachUnion);
  const auto bo = model::build_graph(ps, rf, model::Variant::kBooleanOverlap);
  for (std::uint32_t i = 0; i < ru.n; ++i)
    CHECK(std::includes(bo.undirected[i].begin(), bo.undirected[i].end(),
                        ru.undirected[i].begin(), ru.undirected[i].end()));
}
