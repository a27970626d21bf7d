// Command-line front end for the GN continuum percolation toolkit.
//
// Exit codes: 0 success, 2 usage error, 3 config-file error, 4 runtime error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gnperc/clusters.hpp"
#include "gnperc/geometry.hpp"
#include "gnperc/gnmodel.hpp"
#include "gnperc/io.hpp"
#include "gnperc/mc.hpp"
#include "gnperc/oned.hpp"
#include "gnperc/renorm.hpp"
#include "gnperc/sbp.hpp"
#include "gnperc/stats.hpp"

namespace {

using namespace gnp;

struct GlobalOpts {
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: GNPERC_THREADS env or hardware
};

geom::BoxRegion parse_box(const std::vector<double>& flat) {
  if (flat.empty() || flat.size() % 2 != 0)
    throw CLI::ValidationError("--box expects lower coords then upper coords");
  const std::size_t d = flat.size() / 2;
  return geom::BoxRegion(std::vector<double>(flat.begin(), flat.begin() + d),
                         std::vector<double>(flat.begin() + d, flat.end()));
}

struct AlphaOpts {
  double alpha = 1.0;
  int k = 1;
  std::vector<double> head;
  double gamma = 0.0;

  model::AlphaSpec spec() const {
    if (!head.empty())
      return gamma > 0.0 ? model::AlphaSpec::head_with_geometric(head, gamma)
                         : model::AlphaSpec::from_head(head);
    if (gamma > 0.0) return model::AlphaSpec::geometric(gamma);
    return model::AlphaSpec::single(k, alpha);
  }
};

void add_alpha_options(CLI::App* cmd, AlphaOpts& a) {
  cmd->add_option("--alpha", a.alpha, "Weight of the single nonzero component");
  cmd->add_option("--k", a.k, "Index of the nonzero component (GN_k)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--alpha-head", a.head,
                  "Explicit head vector alpha_1,alpha_2,... (overrides --alpha/--k)")
      ->delimiter(',');
  cmd->add_option("--gamma", a.gamma,
                  "Geometric tail: alpha_i = gamma^i beyond the head")
      ->check(CLI::Range(0.0, 1.0));
}

int cmd_sample(const GlobalOpts& g, int dim, double lambda,
               const std::vector<double>& box_flat, const std::string& metric,
               const std::string& out, const std::string& csv) {
  const auto box = parse_box(box_flat);
  const auto m = metric == "torus" ? geom::Metric::kTorus : geom::Metric::kEuclidean;
  const auto ps = geom::sample_poisson(dim, lambda, box, g.seed, m, g.threads);
  io::write_pointset(ps, out);
  if (!csv.empty()) io::write_pointset_csv(ps, csv);
  std::cout << "sampled n=" << ps.size() << " points (dim=" << dim
            << ", lambda=" << lambda << ", seed=" << g.seed << ") -> " << out
            << "\n";
  return 0;
}

int cmd_graph(const GlobalOpts& g, const std::string& in, const AlphaOpts& a,
              const std::string& variant, const std::string& edges_out,
              const std::string& json_out, const std::string& components_out) {
  const auto ps = io::read_pointset(in);
  const auto alpha = a.spec();
  const auto v = variant == "boolean-overlap" ? model::Variant::kBooleanOverlap
                                              : model::Variant::kReachUnion;
  const int kmax = model::required_kmax(alpha, ps.dim, ps.density);
  const auto table = geom::knn_table(ps, kmax, g.threads);
  const auto ranges = model::connection_ranges(table, alpha);
  const auto graph = model::build_graph(ps, ranges, v, g.threads);
  if (!edges_out.empty()) io::write_edges_csv(graph, edges_out);
  if (!json_out.empty()) io::write_graph_json(graph, alpha, ps, json_out);
  const auto labels = cluster::label_clusters(graph);
  if (!components_out.empty()) io::write_components_csv(labels.sizes, components_out);
  std::cout << "n=" << graph.n << " undirected_edges=" << graph.undirected_edge_count()
            << " components=" << labels.component_count()
            << " largest_fraction=" << labels.largest_fraction
            << " truncation_bound=" << ranges.truncation_bound << "\n";
  return 0;
}

mc::ExperimentSpec make_spec(const GlobalOpts& g, const AlphaOpts& a, int dim,
                             const std::string& variant, double L, double lambda,
                             double margin, std::size_t trials) {
  mc::ExperimentSpec spec;
  spec.alpha = a.spec();
  spec.dim = dim;
  spec.variant = variant == "boolean-overlap" ? model::Variant::kBooleanOverlap
                                              : model::Variant::kReachUnion;
  spec.L = L;
  spec.lambda = lambda;
  spec.margin = margin;
  spec.trials = trials;
  spec.base_seed = g.seed;
  return spec;
}

int cmd_cross(const mc::ExperimentSpec& spec, std::size_t threads,
              const std::string& out) {
  const auto trials = mc::run_trials(spec, threads);
  std::size_t hits = 0;
  for (const auto& t : trials) hits += t.crossing;
  const auto ci = stats::wilson_ci(hits, trials.size(), 0.95);
  if (!out.empty()) io::write_trials_jsonl(spec, trials, out);
  std::cout << "crossing p_hat=" << ci.p_hat << " ci95=[" << ci.lower << ","
            << ci.upper << "] trials=" << trials.size() << "\n";
  return 0;
}

int cmd_curve(const GlobalOpts& g, const mc::ExperimentSpec& base, int k,
              const std::vector<double>& alphas, const std::string& out) {
  const auto curve = mc::crossing_curve(alphas, k, base, 0.95, g.threads);
  if (!out.empty()) io::write_curve_csv(curve, base, out);
  for (const auto& [a, ci] : curve)
    std::cout << "alpha=" << a << " p_hat=" << ci.p_hat << " ci95=[" << ci.lower
              << "," << ci.upper << "]\n";
  return 0;
}

int cmd_bisect(const GlobalOpts& g, const mc::ExperimentSpec& base, int k,
               const std::vector<double>& bracket, double target, double tol,
               std::size_t trials_per_probe, const std::string& out) {
  if (bracket.size() != 2)
    throw CLI::ValidationError("--bracket expects lo,hi");
  const auto res = mc::bisect_critical_gn(k, base, bracket[0], bracket[1],
                                          target, tol, trials_per_probe,
                                          g.threads);
  if (!out.empty()) io::write_curve_csv(res.probes, base, out);
  std::cout << "alpha_hat=" << res.alpha_hat << " (target=" << target
            << ", tol=" << tol << ", L=" << base.L << ")\n";
  return 0;
}

int cmd_oned_pm(const GlobalOpts& g, double alpha, int k, double m,
                std::size_t trials, double T, double level,
                const std::string& out) {
  const auto est =
      oned::estimate_p_unbridged(alpha, k, m, trials, T, g.seed, level, g.threads);
  const double discard_rate =
      static_cast<double>(est.discarded) / static_cast<double>(est.windows);
  std::cout << "p_hat=" << est.ci.p_hat << " ci[" << est.ci.level << "]=["
            << est.ci.lower << "," << est.ci.upper << "] trials=" << est.windows
            << " discard_rate=" << discard_rate << "\n";
  if (!out.empty()) {
    auto f = std::ofstream(out, std::ios::app);
    if (!f) throw std::runtime_error("cannot open " + out);
    f.precision(17);
    f << io::alpha_to_string(model::AlphaSpec::single(k, alpha)) << "," << k
      << "," << m << "," << est.windows << "," << est.ci.p_hat << ","
      << est.ci.lower << "," << est.ci.upper << "," << discard_rate << "\n";
  }
  return 0;
}

int cmd_oned_gaps(const GlobalOpts& g, double T, double m, double lambda) {
  const auto ps = oned::sample_sorted_1d(lambda, T, g.seed);
  const auto gaps = oned::find_gaps(ps.coords, m);
  std::cout << "n=" << ps.size() << " gaps_longer_than_m=" << gaps.size()
            << " expected~=" << T * lambda * std::exp(-lambda * m) << "\n";
  return 0;
}

int cmd_oned_shift(const GlobalOpts& g, double gamma, double T,
                   std::size_t trials) {
  const auto alpha = model::AlphaSpec::geometric(gamma);
  std::size_t ok = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    auto ps = oned::sample_sorted_1d(1.0, T, rng::derive_key(g.seed, 0x51F7, t));
    const int kmax = model::required_kmax(alpha, 1, 1.0);
    const auto table = geom::knn_table(ps, kmax, g.threads);
    const auto ranges = model::connection_ranges(table, alpha);
    ok += oned::shift_monotonicity_check(ps.coords, ranges);
  }
  std::cout << "shift inequality held in " << ok << "/" << trials
            << " realizations\n";
  return ok == trials ? 0 : 4;
}

int cmd_renorm_bounds(double pc, bool numerical) {
  if (numerical) pc = renorm::kPcSiteNumerical;
  const int nt = renorm::n_tilde(pc);
  std::printf("n_tilde=%d bound=%.6g\n", nt, renorm::alpha_bound_2d(pc));
  std::printf("pc=%.6g delta_star=1/3 banana_prob=%.6g\n", pc,
              renorm::banana_prob(1.0 / 3.0, 2));
  for (int n = std::max(1, nt - 2); n <= nt + 1; ++n)
    std::printf("good_box_prob(delta=1/3, n=%d) = %.6g\n", n,
                renorm::good_box_prob(1.0 / 3.0, n));
  return 0;
}

int cmd_renorm_banana(const GlobalOpts& g, double delta, int n, int cells_x,
                      int cells_y, double lambda, const std::string& raster,
                      const std::string& csv) {
  const double side = 3.0 * delta * n;
  const auto region = geom::BoxRegion({0.0, 0.0}, {cells_x * side, cells_y * side});
  const auto ps = geom::sample_poisson(2, lambda, region, g.seed,
                                       geom::Metric::kEuclidean, g.threads);
  const auto grid = renorm::banana_scan(ps, delta, n, region);
  if (!raster.empty()) io::write_grid_raster(grid, raster);
  if (!csv.empty()) io::write_grid_csv(grid, csv);
  const auto cross = renorm::grid_site_percolation(grid, 0);
  std::cout << "cells=" << grid.cell_count() << " good_fraction="
            << grid.good_fraction() << " (bound " << renorm::good_box_prob(delta, n)
            << " at lambda=1)"
            << " banana_boxes=" << grid.banana_boxes
            << " crossing=" << (cross.crossing ? "yes" : "no") << "\n";
  return 0;
}

int cmd_renorm_subsquare(const GlobalOpts& g, double alpha, double pc,
                         int squares_x, int squares_y, int n_override,
                         double lambda_override, double m_override) {
  auto params = renorm::subsquare_parameters(alpha, pc);
  if (n_override > 0) params.n = n_override;
  if (lambda_override > 0.0) params.lambda = lambda_override;
  if (m_override > 0.0) params.m = m_override;
  std::cout << "n=" << params.n << " lambda=" << params.lambda
            << " m=" << params.m << " fail_bound=" << params.fail_prob_bound
            << "\n";
  const auto grid = renorm::subsquare_good_sample_counts(
      squares_x, squares_y, params.n, params.m, params.lambda, g.seed);
  const auto cross = renorm::grid_site_percolation(grid, 0);
  std::cout << "good_fraction=" << grid.good_fraction() << " (target > " << pc
            << ") crossing=" << (cross.crossing ? "yes" : "no")
            << (grid.vacuous ? " [vacuous m/n^2 < 1]" : "") << "\n";
  return 0;
}

int cmd_renorm_gridperc(const GlobalOpts& g, double p, int rows, int cols,
                        std::size_t trials) {
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto grid = renorm::bernoulli_grid({rows, cols}, p,
                                             rng::derive_key(g.seed, 0x6B1D, t));
    hits += renorm::grid_site_percolation(grid, 0).crossing;
  }
  const auto ci = stats::wilson_ci(hits, trials, 0.95);
  std::cout << "crossing p_hat=" << ci.p_hat << " ci95=[" << ci.lower << ","
            << ci.upper << "] trials=" << trials << "\n";
  return 0;
}

int cmd_sbp_calibrate(int d, double c1, int c2) {
  const double d1 = sbp::calibrate_delta1(d, c1, c2);
  std::cout << "delta1=" << d1 << " mu=" << std::pow(1.0 + d1, d)
            << " (E[min(Poisson(mu)," << c2 << ")]=" << c1 << ")\n";
  return 0;
}

int cmd_sbp_run(const GlobalOpts& g, int d, double c1, int c2, int generations,
                const std::string& out) {
  sbp::SBPConfig cfg;
  cfg.dim = d;
  cfg.c2 = c2;
  cfg.delta1 = sbp::calibrate_delta1(d, c1, c2);
  cfg.generations = generations;
  cfg.seed = g.seed;
  const auto run = sbp::run_sbp(cfg);
  if (!out.empty()) io::write_sbp_csv(run, out);
  std::cout << "points=" << run.size() << " generations="
            << run.generations_realized() << (run.extinct ? " [extinct]" : "")
            << (run.truncated ? " [truncated]" : "") << "\n";
  return 0;
}

int cmd_sbp_overlap(const GlobalOpts& g, int d, double dist, double r1,
                    double r2, std::size_t samples) {
  const auto ci = sbp::overlap_ratio_axis(d, dist, r1, r2, samples, g.seed);
  std::cout << "overlap_ratio=" << ci.p_hat << " ci95=[" << ci.lower << ","
            << ci.upper << "] d=" << d << "\n";
  return 0;
}

int cmd_sbp_demo(const GlobalOpts& g, int d, double c1, int c2, double M,
                 int N0, int diagonals, const std::string& out) {
  sbp::SBPConfig cfg;
  cfg.dim = d;
  cfg.c2 = c2;
  cfg.delta1 = sbp::calibrate_delta1(d, c1, c2);
  cfg.seed = g.seed;
  const auto steps = sbp::demo_lattice_chain(cfg, M, N0, diagonals);
  std::size_t attempted = 0, successes = 0;
  for (const auto& s : steps) {
    attempted += s.attempted;
    successes += s.success;
  }
  std::cout << "demonstration only (no correctness claim): " << successes << "/"
            << attempted << " attempted steps reached both child squares over "
            << diagonals << " diagonals\n";
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out);
    f << "i,j,attempted,success,generation_points,start_proj_x,start_proj_y\n";
    f.precision(17);
    for (const auto& s : steps)
      f << s.i << "," << s.j << "," << int{s.attempted} << "," << int{s.success}
        << "," << s.generation_points << "," << s.start_projected[0] << ","
        << s.start_projected[1] << "\n";
  }
  return 0;
}

int cmd_sbp_boxreach(const GlobalOpts& g, int d, double c1, int c2, double M,
                     int N0, std::size_t trials,
                     const std::vector<double>& start) {
  sbp::SBPConfig cfg;
  cfg.dim = d;
  cfg.c2 = c2;
  cfg.delta1 = sbp::calibrate_delta1(d, c1, c2);
  cfg.seed = g.seed;
  std::array<double, 2> s0{0.0, 0.0};
  if (start.size() == 2) s0 = {start[0], start[1]};
  const auto res =
      sbp::box_reach_probability(cfg, M, N0, s0, 0, 0, trials, 0.95, g.threads);
  std::cout << "box_reach p_hat=" << res.ci.p_hat << " ci95=[" << res.ci.lower
            << "," << res.ci.upper << "] extinct_runs=" << res.extinct_runs
            << " (M=" << M << ", N0=" << N0 << ", c1=" << c1 << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gnperc: generalised nearest-neighbour continuum percolation toolkit"};
  app.set_version_flag("--version", std::string(io::kVersion));
  app.set_config("--config", "", "Read options from an INI config file");
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Base RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads,
                 "Worker threads (0: GNPERC_THREADS env or hardware)")
      ->capture_default_str();

  // sample
  auto* sample = app.add_subcommand("sample", "Sample a Poisson point set");
  int s_dim = 0;
  double s_lambda = 1.0;
  std::vector<double> s_box;
  std::string s_metric = "euclidean-free", s_out, s_csv;
  sample->add_option("--dim", s_dim, "Dimension")->required()->check(CLI::PositiveNumber);
  sample->add_option("--lambda", s_lambda, "Intensity")->required();
  sample->add_option("--box", s_box, "lower coords,upper coords")->required()->delimiter(',');
  sample->add_option("--metric", s_metric)->check(CLI::IsMember({"euclidean-free", "torus"}));
  sample->add_option("--out", s_out, "Output point-set file")->required();
  sample->add_option("--csv", s_csv, "Also write a CSV dump");

  // graph
  auto* graph = app.add_subcommand("graph", "Build the GN graph of a point set");
  std::string g_in, g_variant = "reach-union", g_edges, g_json;
  AlphaOpts g_alpha;
  graph->add_option("--in", g_in, "Point-set file")->required();
  add_alpha_options(graph, g_alpha);
  graph->add_option("--variant", g_variant)
      ->check(CLI::IsMember({"reach-union", "boolean-overlap"}));
  graph->add_option("--edges-out", g_edges, "Edge-list CSV path");
  graph->add_option("--json-out", g_json, "Adjacency JSON path");
  std::string g_components;
  graph->add_option("--components-out", g_components, "Component-size CSV path");

  // shared experiment options builder
  auto add_experiment_options = [](CLI::App* cmd, AlphaOpts& a, int& dim,
                                   std::string& variant, double& L,
                                   double& lambda, double& margin,
                                   std::size_t& trials) {
    add_alpha_options(cmd, a);
    cmd->add_option("--d", dim, "Dimension")->check(CLI::PositiveNumber);
    cmd->add_option("--variant", variant)
        ->check(CLI::IsMember({"reach-union", "boolean-overlap"}));
    cmd->add_option("--L", L, "Inner box side")->check(CLI::PositiveNumber);
    cmd->add_option("--lambda", lambda, "Intensity")->check(CLI::PositiveNumber);
    cmd->add_option("--margin", margin, "Buffer margin B (<0: default)");
    cmd->add_option("--trials", trials, "Trial count")->check(CLI::PositiveNumber);
  };

  // cross
  auto* cross = app.add_subcommand("cross", "Crossing-probability experiment");
  AlphaOpts c_alpha;
  int c_dim = 2;
  std::string c_variant = "reach-union", c_out;
  double c_L = 10.0, c_lambda = 1.0, c_margin = -1.0;
  std::size_t c_trials = 100;
  add_experiment_options(cross, c_alpha, c_dim, c_variant, c_L, c_lambda,
                         c_margin, c_trials);
  cross->add_option("--out", c_out, "TrialResult JSONL path");

  // curve
  auto* curve = app.add_subcommand("curve", "Crossing curve over an alpha grid");
  AlphaOpts cv_alpha;
  int cv_dim = 2;
  std::string cv_variant = "reach-union", cv_out;
  double cv_L = 10.0, cv_lambda = 1.0, cv_margin = -1.0;
  std::size_t cv_trials = 100;
  std::vector<double> cv_alphas;
  add_experiment_options(curve, cv_alpha, cv_dim, cv_variant, cv_L, cv_lambda,
                         cv_margin, cv_trials);
  curve->add_option("--alphas", cv_alphas, "Sorted alpha grid")
      ->required()
      ->delimiter(',');
  curve->add_option("--out", cv_out, "Curve CSV path");

  // bisect
  auto* bisect = app.add_subcommand("bisect", "Bisect the finite-size critical alpha");
  AlphaOpts b_alpha;
  int b_dim = 2;
  std::string b_variant = "reach-union", b_out;
  double b_L = 20.0, b_lambda = 1.0, b_margin = -1.0;
  std::size_t b_trials = 200;
  std::vector<double> b_bracket;
  double b_target = 0.5, b_tol = 0.5;
  add_experiment_options(bisect, b_alpha, b_dim, b_variant, b_L, b_lambda,
                         b_margin, b_trials);
  bisect->add_option("--bracket", b_bracket, "alpha_lo,alpha_hi")
      ->required()
      ->delimiter(',');
  bisect->add_option("--target", b_target, "Crossing probability pivot");
  bisect->add_option("--tol", b_tol, "Bracket width tolerance");
  bisect->add_option("--out", b_out, "Probe CSV path");

  // oned
  auto* oned_cmd = app.add_subcommand("oned", "One-dimensional analysis");
  oned_cmd->require_subcommand(1);
  auto* pm = oned_cmd->add_subcommand("pm", "Estimate p(m), the unbridged-gap probability");
  double pm_alpha = 1.0, pm_m = 1.0, pm_T = 1e4, pm_level = 0.95;
  int pm_k = 1;
  std::size_t pm_trials = 1000;
  std::string pm_out;
  pm->add_option("--alpha", pm_alpha)->required();
  pm->add_option("--k", pm_k)->check(CLI::PositiveNumber);
  pm->add_option("--m", pm_m, "Gap length threshold")->required();
  pm->add_option("--trials", pm_trials, "Windows");
  pm->add_option("--T", pm_T, "Window length");
  pm->add_option("--level", pm_level, "CI level");
  pm->add_option("--out", pm_out, "Append CSV row to this path");

  auto* gaps = oned_cmd->add_subcommand("gaps", "Count m-gaps in a window");
  double gp_T = 1e4, gp_m = 3.0, gp_lambda = 1.0;
  gaps->add_option("--T", gp_T);
  gaps->add_option("--m", gp_m)->required();
  gaps->add_option("--lambda", gp_lambda);

  auto* shift = oned_cmd->add_subcommand("shift", "Check the shift inequality for geometric alpha");
  double sh_gamma = 0.5, sh_T = 1e4;
  std::size_t sh_trials = 20;
  shift->add_option("--gamma", sh_gamma)->check(CLI::Range(0.0, 0.5));
  shift->add_option("--T", sh_T);
  shift->add_option("--trials", sh_trials);

  // renorm
  auto* renorm_cmd = app.add_subcommand("renorm", "Renormalization bounds and scans");
  renorm_cmd->require_subcommand(1);
  auto* bounds = renorm_cmd->add_subcommand("bounds", "Print n_tilde and the alpha_c(2) bound");
  double rb_pc = renorm::kPcSiteRigorous;
  bool rb_numerical = false;
  bounds->add_option("--pc", rb_pc, "Site-percolation threshold to beat");
  bounds->add_flag("--numerical", rb_numerical,
                   "Use the simulation-suggested threshold 0.5927");

  auto* banana = renorm_cmd->add_subcommand("banana", "Banana-box goodness scan");
  double bn_delta = 1.0 / 3.0, bn_lambda = 1.0;
  int bn_n = 6, bn_cx = 20, bn_cy = 20;
  std::string bn_raster, bn_csv;
  banana->add_option("--delta", bn_delta)->check(CLI::PositiveNumber);
  banana->add_option("--n", bn_n)->check(CLI::PositiveNumber);
  banana->add_option("--cells-x", bn_cx)->check(CLI::PositiveNumber);
  banana->add_option("--cells-y", bn_cy)->check(CLI::PositiveNumber);
  banana->add_option("--lambda", bn_lambda)->check(CLI::PositiveNumber);
  banana->add_option("--raster", bn_raster, "PGM-style raster path");
  banana->add_option("--csv", bn_csv, "Grid CSV path");

  auto* subsq = renorm_cmd->add_subcommand("subsquare", "Subsquare goodness scan");
  double ss_alpha = 0.5, ss_pc = renorm::kPcSiteRigorous, ss_lambda = -1.0, ss_m = -1.0;
  int ss_sx = 100, ss_sy = 100, ss_n = -1;
  subsq->add_option("--alpha", ss_alpha)->check(CLI::PositiveNumber);
  subsq->add_option("--pc", ss_pc);
  subsq->add_option("--squares-x", ss_sx)->check(CLI::PositiveNumber);
  subsq->add_option("--squares-y", ss_sy)->check(CLI::PositiveNumber);
  subsq->add_option("--n", ss_n, "Override subdivision n");
  subsq->add_option("--lambda", ss_lambda, "Override intensity");
  subsq->add_option("--m", ss_m, "Override count cap m");

  auto* gridperc = renorm_cmd->add_subcommand("gridperc", "Bernoulli good-cell crossing");
  double gpp = 0.6;
  int gp_rows = 100, gp_cols = 100;
  std::size_t gp_trials = 100;
  gridperc->add_option("--p", gpp)->required();
  gridperc->add_option("--rows", gp_rows);
  gridperc->add_option("--cols", gp_cols);
  gridperc->add_option("--trials", gp_trials);

  // sbp
  auto* sbp_cmd = app.add_subcommand("sbp", "Spatial branching process");
  sbp_cmd->require_subcommand(1);
  auto* calib = sbp_cmd->add_subcommand("calibrate", "Solve E[min(Y,c2)] = c1 for delta1");
  int cal_d = 100, cal_c2 = 10;
  double cal_c1 = 2.0;
  calib->add_option("--d", cal_d)->check(CLI::PositiveNumber);
  calib->add_option("--c1", cal_c1);
  calib->add_option("--c2", cal_c2);

  auto* run = sbp_cmd->add_subcommand("run", "Run the process and dump CSV");
  int run_d = 50, run_c2 = 10, run_gens = 6;
  double run_c1 = 2.0;
  std::string run_out;
  run->add_option("--d", run_d)->check(CLI::PositiveNumber);
  run->add_option("--c1", run_c1);
  run->add_option("--c2", run_c2);
  run->add_option("--generations", run_gens);
  run->add_option("--out", run_out, "Realization CSV path");

  auto* overlap = sbp_cmd->add_subcommand("overlap", "Monte Carlo ball-overlap ratio");
  int ov_d = 2;
  double ov_dist = 1.0, ov_r1 = 1.0, ov_r2 = 1.0;
  std::size_t ov_n = 100000;
  overlap->add_option("--d", ov_d)->check(CLI::PositiveNumber);
  overlap->add_option("--dist", ov_dist);
  overlap->add_option("--r1", ov_r1);
  overlap->add_option("--r2", ov_r2);
  overlap->add_option("--samples", ov_n);

  auto* demo = sbp_cmd->add_subcommand(
      "demo", "Chain SBP steps over the oriented lattice (illustrative only)");
  int dm_d = 100, dm_c2 = 16, dm_N0 = 4, dm_diag = 5;
  double dm_c1 = 8.0, dm_M = 1.0;
  std::string dm_out;
  demo->add_option("--d", dm_d)->check(CLI::PositiveNumber);
  demo->add_option("--c1", dm_c1);
  demo->add_option("--c2", dm_c2);
  demo->add_option("--M", dm_M);
  demo->add_option("--N0", dm_N0);
  demo->add_option("--diagonals", dm_diag);
  demo->add_option("--out", dm_out, "Per-step CSV path");

  auto* boxreach = sbp_cmd->add_subcommand("boxreach", "Two-square reach probability");
  int br_d = 200, br_c2 = 16, br_N0 = 4;
  double br_c1 = 8.0, br_M = 1.0;
  std::size_t br_trials = 100;
  std::vector<double> br_start;
  boxreach->add_option("--d", br_d)->check(CLI::PositiveNumber);
  boxreach->add_option("--c1", br_c1);
  boxreach->add_option("--c2", br_c2);
  boxreach->add_option("--M", br_M);
  boxreach->add_option("--N0", br_N0);
  boxreach->add_option("--trials", br_trials);
  boxreach->add_option("--start", br_start, "Projected start x,y")->delimiter(',');

  // Global --seed/--threads remain usable after a subcommand name.
  std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* cmd) {
    for (CLI::App* sc : cmd->get_subcommands([](CLI::App*) { return true; })) {
      sc->fallthrough();
      enable_fallthrough(sc);
    }
  };
  enable_fallthrough(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ConfigError& e) {
    app.exit(e);
    return 3;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sample->parsed())
      return cmd_sample(g, s_dim, s_lambda, s_box, s_metric, s_out, s_csv);
    if (graph->parsed())
      return cmd_graph(g, g_in, g_alpha, g_variant, g_edges, g_json, g_components);
    if (cross->parsed())
      return cmd_cross(make_spec(g, c_alpha, c_dim, c_variant, c_L, c_lambda,
                                 c_margin, c_trials),
                       g.threads, c_out);
    if (curve->parsed())
      return cmd_curve(g,
                       make_spec(g, cv_alpha, cv_dim, cv_variant, cv_L,
                                 cv_lambda, cv_margin, cv_trials),
                       cv_alpha.k, cv_alphas, cv_out);
    if (bisect->parsed())
      return cmd_bisect(g,
                        make_spec(g, b_alpha, b_dim, b_variant, b_L, b_lambda,
                                  b_margin, b_trials),
                        b_alpha.k, b_bracket, b_target, b_tol, b_trials, b_out);
    if (oned_cmd->parsed()) {
      if (pm->parsed())
        return cmd_oned_pm(g, pm_alpha, pm_k, pm_m, pm_trials, pm_T, pm_level,
                           pm_out);
      if (gaps->parsed()) return cmd_oned_gaps(g, gp_T, gp_m, gp_lambda);
      if (shift->parsed()) return cmd_oned_shift(g, sh_gamma, sh_T, sh_trials);
    }
    if (renorm_cmd->parsed()) {
      if (bounds->parsed()) return cmd_renorm_bounds(rb_pc, rb_numerical);
      if (banana->parsed())
        return cmd_renorm_banana(g, bn_delta, bn_n, bn_cx, bn_cy, bn_lambda,
                                 bn_raster, bn_csv);
      if (subsq->parsed())
        return cmd_renorm_subsquare(g, ss_alpha, ss_pc, ss_sx, ss_sy, ss_n,
                                    ss_lambda, ss_m);
      if (gridperc->parsed())
        return cmd_renorm_gridperc(g, gpp, gp_rows, gp_cols, gp_trials);
    }
    if (sbp_cmd->parsed()) {
      if (calib->parsed()) return cmd_sbp_calibrate(cal_d, cal_c1, cal_c2);
      if (run->parsed()) return cmd_sbp_run(g, run_d, run_c1, run_c2, run_gens, run_out);
      if (overlap->parsed())
        return cmd_sbp_overlap(g, ov_d, ov_dist, ov_r1, ov_r2, ov_n);
      if (boxreach->parsed())
        return cmd_sbp_boxreach(g, br_d, br_c1, br_c2, br_M, br_N0, br_trials,
                                br_start);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
