#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "gnperc/sbp.hpp"
#include "gnperc/stats.hpp"
#include "oracles.hpp"

using namespace gnp;

TEST_CASE("delta1 calibration") {
  // c2 effectively infinite: E Y = c1, so delta1 = c1^{1/d} - 1.
  const double d1 = sbp::calibrate_delta1(100, 2.0, 100000);
  CHECK(d1 == doctest::Approx(std::pow(2.0, 0.01) - 1.0).epsilon(1e-8));
  CHECK(d1 == doctest::Approx(0.00695).epsilon(1e-3));

  // Calibrated delta1(d) is strictly decreasing in d at fixed (c1, c2).
  double prev = 1e9;
  for (int d : {10, 50, 100, 500}) {
    const double v = sbp::calibrate_delta1(d, 2.0, 10);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }

  // The calibrated mean really solves E[min(Y, c2)] = c1.
  const double dd = sbp::calibrate_delta1(7, 3.0, 5);
  CHECK(sbp::capped_poisson_mean(std::pow(1.0 + dd, 7), 5) ==
        doctest::Approx(3.0).epsilon(1e-9));

  CHECK_THROWS(sbp::calibrate_delta1(10, 5.0, 5));
  CHECK_THROWS(sbp::calibrate_delta1(10, 0.9, 5));
}

TEST_CASE("offspring law: cap, mean and chi-square fit") {
  sbp::SBPConfig cfg;
  cfg.dim = 10;
  cfg.c2 = 6;
  cfg.delta1 = sbp::calibrate_delta1(10, 2.5, 6);
  cfg.generations = 1;
  const double mu = cfg.offspring_mean();

  std::map<std::size_t, std::size_t> hist;
  double total = 0.0;
  const std::size_t births = 100000;
  std::size_t parents = 0;
  for (std::size_t s = 0; parents < births; ++s) {
    cfg.seed = 140000 + s;
    const auto run = sbp::run_sbp(cfg);
    const std::size_t kids = run.size() - 1;
    CHECK(kids <= static_cast<std::size_t>(cfg.c2));
    ++hist[kids];
    total += static_cast<double>(kids);
    ++parents;
  }
  // Empirical mean offspring = c1 within 3 sigma.
  const double var = sbp::capped_poisson_mean(mu, 6) * 1.0;  // rough scale
  (void)var;
  double second = 0.0;
  for (const auto& [k, c] : hist) second += static_cast<double>(k) * k * c;
  const double mean = total / static_cast<double>(parents);
  const double sd = std::sqrt(second / parents - mean * mean);
  CHECK(std::fabs(mean - 2.5) < 3.0 * sd / std::sqrt(static_cast<double>(parents)));

  // Chi-square against min(Poisson(mu), c2) at level 0.01.
  std::vector<double> obs(cfg.c2 + 1, 0.0), expd(cfg.c2 + 1, 0.0);
  for (const auto& [k, c] : hist) obs[k] += static_cast<double>(c);
  for (int k = 0; k < cfg.c2; ++k) expd[k] = births * stats::poisson_pmf(k, mu);
  expd[cfg.c2] = births * (1.0 - stats::poisson_cdf(cfg.c2 - 1, mu));
  CHECK(stats::chi_square_gof_p(obs, expd) > 0.01);
}

TEST_CASE("subcritical processes die out") {
  // c2 = 1 with a small ball: E[min(Y,1)] = 1 - e^{-mu} < 1, extinction a.s.
  sbp::SBPConfig cfg;
  cfg.dim = 2;
  cfg.delta1 = 0.1;  // mu = 1.21, capped mean ~ 0.702
  cfg.c2 = 1;
  cfg.generations = 50;
  std::size_t extinct = 0;
  for (int t = 0; t < 200; ++t) {
    cfg.seed = 9000 + t;
    extinct += sbp::run_sbp(cfg).extinct;
  }
  CHECK(static_cast<double>(extinct) / 200.0 > 0.9);
}

TEST_CASE("children lie within 1 + delta1 of their parent, radii concentrate") {
  sbp::SBPConfig cfg;
  cfg.dim = 200;
  cfg.c2 = 10;
  cfg.delta1 = sbp::calibrate_delta1(200, 2.0, 10);
  cfg.generations = 2;
  std::size_t inside = 0, total = 0;
  for (int t = 0; t < 800; ++t) {
    cfg.seed = 31000 + t;
    const auto run = sbp::run_sbp(cfg);
    for (std::size_t i = 1; i < run.size(); ++i) {
      CHECK(run.birth_radius[i] <= 1.0 + cfg.delta1 + 1e-12);
      ++total;
      inside += run.birth_radius[i] > 0.95;
    }
  }
  REQUIRE(total > 2000);
  // Radial law (r/(1+delta1))^d concentrates at the boundary for d = 200.
  CHECK(static_cast<double>(inside) / static_cast<double>(total) > 0.99);
}

TEST_CASE("projection L") {
  const std::vector<double> origin(5, 0.0);
  auto p0 = sbp::project_L(origin);
  CHECK(p0[0] == 0.0);
  CHECK(p0[1] == 0.0);

  const std::vector<double> x{1.0, 2.0, 0.0, 0.0};
  const auto px = sbp::project_L(x);
  CHECK(px[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(px[1] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS(sbp::project_L(std::vector<double>{1.0}));

  // Linearity.
  rng::Stream s(5, 5);
  std::vector<double> a(6), b(6), comb(6);
  for (int i = 0; i < 6; ++i) {
    a[i] = s.normal();
    b[i] = s.normal();
    comb[i] = 0.5 * a[i] + 2.0 * b[i];
  }
  const auto la = sbp::project_L(a), lb = sbp::project_L(b), lc = sbp::project_L(comb);
  for (int c = 0; c < 2; ++c)
    CHECK(lc[c] == doctest::Approx(0.5 * la[c] + 2.0 * lb[c]).epsilon(1e-12));
}

TEST_CASE("projected uniform sphere point approaches N(0, I) at d = 1000") {
  const int d = 1000;
  const std::size_t N = 100000;
  rng::Stream s(777, 0x5EA);
  std::vector<double> u(d);
  double m0 = 0.0, m1 = 0.0, c00 = 0.0, c11 = 0.0, c01 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    sbp::sample_on_sphere(s, d, u);
    const auto L = sbp::project_L(u);
    m0 += L[0];
    m1 += L[1];
    c00 += L[0] * L[0];
    c11 += L[1] * L[1];
    c01 += L[0] * L[1];
  }
  const double n = static_cast<double>(N);
  m0 /= n;
  m1 /= n;
  // 3 sigma for means (unit variance) and for second moments (variance ~ 2).
  CHECK(std::fabs(m0) < 3.0 / std::sqrt(n));
  CHECK(std::fabs(m1) < 3.0 / std::sqrt(n));
  CHECK(std::fabs(c00 / n - 1.0) < 3.0 * std::sqrt(2.0 / n));
  CHECK(std::fabs(c11 / n - 1.0) < 3.0 * std::sqrt(2.0 / n));
  CHECK(std::fabs(c01 / n) < 3.0 / std::sqrt(n));
}

TEST_CASE("overlap ratio oracles") {
  // Same centre, r2 >= r1: every sample hits.
  std::vector<double> z3(3, 0.0);
  const auto full = sbp::overlap_ratio(3, z3, z3, 1.0, 1.0, 2000, 4);
  CHECK(full.p_hat == 1.0);

  // Volume ratio (r2/r1)^d for nested balls.
  const auto nested = sbp::overlap_ratio(3, z3, z3, 1.0, 0.8, 200000, 8);
  CHECK(nested.lower < 0.512);
  CHECK(0.512 < nested.upper);

  // d=2 unit lens: (2 pi/3 - sqrt(3)/2)/pi ~ 0.39100.
  const auto lens = sbp::overlap_ratio_axis(2, 1.0, 1.0, 1.0, 1000000, 15);
  CHECK(oracle::unit_lens_fraction() == doctest::Approx(0.39100).epsilon(1e-4));
  CHECK(lens.lower < oracle::unit_lens_fraction());
  CHECK(oracle::unit_lens_fraction() < lens.upper);

  // Strictly decreasing in d with separated intervals by d = 20.
  double prev = 1.0;
  stats::CIEstimate at2, at20;
  for (int d : {2, 5, 10, 20, 50}) {
    const auto ci = sbp::overlap_ratio_axis(d, 1.0, 1.0, 1.0, 200000, 16);
    CHECK(ci.p_hat < prev);
    prev = ci.p_hat;
    if (d == 2) at2 = ci;
    if (d == 20) at20 = ci;
  }
  CHECK(at20.upper < at2.lower);
}

TEST_CASE("box reach probability") {
  sbp::SBPConfig cfg;
  cfg.dim = 50;
  cfg.c2 = 16;
  cfg.seed = 6021;

  // N0 = 0: generation zero is one point, so never both squares.
  cfg.delta1 = sbp::calibrate_delta1(50, 4.0, 16);
  const auto zero = sbp::box_reach_probability(cfg, 1.0, 0, {0.0, 0.0}, 0, 0, 50);
  CHECK(zero.ci.p_hat == 0.0);

  // Nondecreasing in c1 under common random numbers.
  double prev = -1.0;
  for (double c1 : {2.0, 4.0, 8.0}) {
    cfg.delta1 = sbp::calibrate_delta1(50, c1, 16);
    const auto r = sbp::box_reach_probability(cfg, 1.0, 4, {0.0, 0.0}, 0, 0, 100);
    CHECK(r.ci.p_hat >= prev);
    prev = r.ci.p_hat;
  }

  // Tuned demonstration: c1 = 8, d = 200, worst-case corner start.
  sbp::SBPConfig big;
  big.dim = 200;
  big.c2 = 16;
  big.delta1 = sbp::calibrate_delta1(200, 8.0, 16);
  big.seed = 99;
  const double M = 1.0;
  const int N0 = 4;
  const auto demo =
      sbp::box_reach_probability(big, M, N0, {-M / 2.0, -M / 2.0}, 0, 0, 60);
  CHECK(demo.ci.p_hat > 0.9);
}
