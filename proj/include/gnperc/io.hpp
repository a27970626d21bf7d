#pragma once

// File formats: the flat binary point-set format, CSV/JSON graph exports,
// JSONL trial streams, and text rasters for good-box grids.

#include <string>
#include <vector>

#include "gnperc/gnmodel.hpp"
#include "gnperc/mc.hpp"
#include "gnperc/renorm.hpp"
#include "gnperc/sbp.hpp"

namespace gnp::io {

inline constexpr const char* kVersion = "gnperc 0.1.0";

// Binary point set: magic "GNPS", u32 version, u32 dim, u64 count, f64
// density, f64 lower[dim], f64 upper[dim], u64 seed, u8 metric, then
// count*dim little-endian f64 coordinates.
void write_pointset(const geom::PointSet& ps, const std::string& path);
geom::PointSet read_pointset(const std::string& path);

void write_pointset_csv(const geom::PointSet& ps, const std::string& path);

// Edge list "u,v" (undirected, u < v) with a header line.
void write_edges_csv(const model::GNGraph& g, const std::string& path);

// Adjacency document with variant, alpha, lambda and seed for reproducibility.
void write_graph_json(const model::GNGraph& g, const model::AlphaSpec& alpha,
                      const geom::PointSet& ps, const std::string& path);

// One TrialResult per line, preceded by a header object embedding the spec.
void write_trials_jsonl(const mc::ExperimentSpec& spec,
                        const std::vector<mc::TrialResult>& trials,
                        const std::string& path);

// component id, size rows.
void write_components_csv(const std::vector<std::pair<std::uint32_t, std::size_t>>& sizes,
                          const std::string& path);

// PGM-style text raster: "P1", dims, then 0/1 per cell (2D grids).
void write_grid_raster(const renorm::GoodBoxGrid& grid, const std::string& path);
void write_grid_csv(const renorm::GoodBoxGrid& grid, const std::string& path);

// alpha, p_hat, ci_low, ci_high rows with an embedded spec comment line.
void write_curve_csv(const std::vector<std::pair<double, stats::CIEstimate>>& curve,
                     const mc::ExperimentSpec& spec, const std::string& path);

// generation, id, parent, birth_radius, coords..., projected x/y.
void write_sbp_csv(const sbp::SBPRealization& run, const std::string& path);

std::string alpha_to_string(const model::AlphaSpec& alpha);

}  // namespace gnp::io
