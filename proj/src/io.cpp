#include "gnperc/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gnp::io {

namespace {

constexpr std::array<char, 4> kMagic = {'G', 'N', 'P', 'S'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "point-set format assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("read_pointset: truncated file");
  return v;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  return out;
}

}  // namespace

void write_pointset(const geom::PointSet& ps, const std::string& path) {
  auto out = open_out(path, true);
  out.write(kMagic.data(), kMagic.size());
  put(out, kFormatVersion);
  put(out, static_cast<std::uint32_t>(ps.dim));
  put(out, static_cast<std::uint64_t>(ps.size()));
  put(out, ps.density);
  for (int a = 0; a < ps.dim; ++a) put(out, ps.box.lower[a]);
  for (int a = 0; a < ps.dim; ++a) put(out, ps.box.upper[a]);
  put(out, ps.seed);
  put(out, static_cast<std::uint8_t>(ps.metric == geom::Metric::kTorus ? 1 : 0));
  out.write(reinterpret_cast<const char*>(ps.coords.data()),
            static_cast<std::streamsize>(ps.coords.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write_pointset: write failed");
}

geom::PointSet read_pointset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic)
    throw std::runtime_error("read_pointset: not a point-set file");
  if (get<std::uint32_t>(in) != kFormatVersion)
    throw std::runtime_error("read_pointset: unsupported format version");
  geom::PointSet ps;
  ps.dim = static_cast<int>(get<std::uint32_t>(in));
  const auto count = get<std::uint64_t>(in);
  ps.density = get<double>(in);
  std::vector<double> lo(ps.dim), hi(ps.dim);
  for (auto& v : lo) v = get<double>(in);
  for (auto& v : hi) v = get<double>(in);
  ps.box = geom::BoxRegion(lo, hi);
  ps.seed = get<std::uint64_t>(in);
  ps.metric = get<std::uint8_t>(in) == 1 ? geom::Metric::kTorus
                                         : geom::Metric::kEuclidean;
  ps.coords.resize(count * ps.dim);
  in.read(reinterpret_cast<char*>(ps.coords.data()),
          static_cast<std::streamsize>(ps.coords.size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_pointset: truncated coordinates");
  return ps;
}

void write_pointset_csv(const geom::PointSet& ps, const std::string& path) {
  auto out = open_out(path);
  out << "# " << kVersion << " dim=" << ps.dim << " lambda=" << ps.density
      << " seed=" << ps.seed << "\n";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto p = ps.point(i);
    for (int a = 0; a < ps.dim; ++a) out << (a ? "," : "") << p[a];
    out << "\n";
  }
}

void write_edges_csv(const model::GNGraph& g, const std::string& path) {
  auto out = open_out(path);
  out << "u,v\n";
  for (const auto& [u, v] : g.edge_list()) out << u << "," << v << "\n";
}

std::string alpha_to_string(const model::AlphaSpec& alpha) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < alpha.head.size(); ++i)
    os << (i ? "," : "") << alpha.head[i];
  if (alpha.geometric_tail)
    os << (alpha.head.empty() ? "" : ";") << "geom:" << alpha.gamma;
  return os.str();
}

namespace {

nlohmann::json alpha_json(const model::AlphaSpec& alpha) {
  nlohmann::json j;
  j["head"] = alpha.head;
  if (alpha.geometric_tail) j["geometric_gamma"] = alpha.gamma;
  return j;
}

nlohmann::json spec_json(const mc::ExperimentSpec& spec) {
  nlohmann::json j;
  j["alpha"] = alpha_json(spec.alpha);
  j["dim"] = spec.dim;
  j["variant"] = spec.variant == model::Variant::kReachUnion ? "reach-union"
                                                             : "boolean-overlap";
  j["L"] = spec.L;
  j["lambda"] = spec.lambda;
  j["margin"] = spec.effective_margin();
  j["trials"] = spec.trials;
  j["base_seed"] = spec.base_seed;
  j["version"] = kVersion;
  return j;
}

}  // namespace

void write_graph_json(const model::GNGraph& g, const model::AlphaSpec& alpha,
                      const geom::PointSet& ps, const std::string& path) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["n"] = g.n;
  j["variant"] = g.variant == model::Variant::kReachUnion ? "reach-union"
                                                          : "boolean-overlap";
  j["alpha"] = alpha_json(alpha);
  j["lambda"] = ps.density;
  j["seed"] = ps.seed;
  j["metric"] = ps.metric == geom::Metric::kTorus ? "torus" : "euclidean-free";
  j["reach"] = g.reach;
  j["undirected"] = g.undirected;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_trials_jsonl(const mc::ExperimentSpec& spec,
                        const std::vector<mc::TrialResult>& trials,
                        const std::string& path) {
  auto out = open_out(path);
  nlohmann::json header;
  header["spec"] = spec_json(spec);
  out << header.dump() << "\n";
  for (const auto& t : trials) {
    nlohmann::json j;
    j["trial"] = t.trial_index;
    j["seed"] = t.seed;
    j["n_points"] = t.n_points;
    j["crossing"] = t.crossing;
    j["largest_fraction"] = t.largest_fraction;
    j["wall_time_s"] = t.wall_time_s;
    out << j.dump() << "\n";
  }
}

void write_components_csv(
    const std::vector<std::pair<std::uint32_t, std::size_t>>& sizes,
    const std::string& path) {
  auto out = open_out(path);
  out << "component,size\n";
  for (const auto& [id, count] : sizes) out << id << "," << count << "\n";
}

void write_grid_raster(const renorm::GoodBoxGrid& grid, const std::string& path) {
  if (grid.grid_dims.size() != 2)
    throw std::invalid_argument("write_grid_raster: only 2D grids");
  auto out = open_out(path);
  out << "P1\n" << grid.grid_dims[1] << " " << grid.grid_dims[0] << "\n";
  for (int i = 0; i < grid.grid_dims[0]; ++i) {
    for (int j = 0; j < grid.grid_dims[1]; ++j)
      out << (j ? " " : "")
          << (grid.good[static_cast<std::size_t>(i) * grid.grid_dims[1] + j] ? 1 : 0);
    out << "\n";
  }
}

void write_grid_csv(const renorm::GoodBoxGrid& grid, const std::string& path) {
  if (grid.grid_dims.size() != 2)
    throw std::invalid_argument("write_grid_csv: only 2D grids");
  auto out = open_out(path);
  out << "i,j,good\n";
  for (int i = 0; i < grid.grid_dims[0]; ++i)
    for (int j = 0; j < grid.grid_dims[1]; ++j)
      out << i << "," << j << ","
          << (grid.good[static_cast<std::size_t>(i) * grid.grid_dims[1] + j] ? 1 : 0)
          << "\n";
}

void write_curve_csv(const std::vector<std::pair<double, stats::CIEstimate>>& curve,
                     const mc::ExperimentSpec& spec, const std::string& path) {
  auto out = open_out(path);
  out << "# spec " << spec_json(spec).dump() << "\n";
  out << "alpha,p_hat,ci_low,ci_high,successes,trials\n";
  for (const auto& [a, ci] : curve)
    out << a << "," << ci.p_hat << "," << ci.lower << "," << ci.upper << ","
        << ci.successes << "," << ci.trials << "\n";
}

void write_sbp_csv(const sbp::SBPRealization& run, const std::string& path) {
  auto out = open_out(path);
  out << "generation,id,parent,birth_radius";
  for (int a = 0; a < run.dim; ++a) out << ",x" << a;
  out << ",proj_x,proj_y\n";
  std::size_t gen = 0;
  for (std::size_t i = 0; i < run.size(); ++i) {
    while (gen + 1 < run.gen_start.size() && i >= run.gen_start[gen + 1]) ++gen;
    out << gen << "," << i << "," << run.parent[i] << "," << run.birth_radius[i];
    auto p = run.point(i);
    for (int a = 0; a < run.dim; ++a) out << "," << p[a];
    if (run.dim >= 2) {
      const auto proj = sbp::project_L(p);
      out << "," << proj[0] << "," << proj[1];
    } else {
      out << ",,";
    }
    out << "\n";
  }
}

}  // namespace gnp::io
