#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qunwrap/phase.hpp"
#include "qunwrap/qubo.hpp"
#include "qunwrap/solvers.hpp"

namespace qunwrap {

struct Tile {
  std::size_t col0 = 0;
  std::size_t row0 = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  /// Global pixel indices in local row-major order.
  std::vector<std::uint32_t> pixels;
};

struct BoundaryEdge {
  std::uint32_t s = 0;
  std::uint32_t t = 0;

  friend bool operator==(const BoundaryEdge&, const BoundaryEdge&) = default;
};

/// Regular non-overlapping partition of a width x height grid.
struct Tiling {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t tile_width = 0;
  std::size_t tile_height = 0;
  std::size_t tiles_across = 0;
  std::size_t tiles_down = 0;
  std::vector<Tile> tiles;
  std::vector<std::uint32_t> tile_of_pixel;
  /// Four-neighbour pixel pairs whose endpoints fall in different tiles, in
  /// the same order build_problem enumerates edges.
  std::vector<BoundaryEdge> boundary_edges;

  std::size_t num_tiles() const noexcept { return tiles.size(); }
};

/// Right and bottom remainder tiles may be smaller than the nominal size.
Tiling make_tiling(std::size_t width, std::size_t height, std::size_t tile_width,
                   std::size_t tile_height);

/// Intra-tile edges and unary terms of `parent`, re-indexed to the tile's
/// local row-major coordinates.
UnwrapProblem restrict_problem(const UnwrapProblem& parent, const Tiling& tiling,
                               std::size_t tile_index);

/// Pairwise term between tile offsets: W * (K_ti - K_tj - a)^2 where ti holds
/// the t endpoint of the underlying boundary edge.
struct OffsetEdge {
  std::uint32_t tile_s = 0;
  std::uint32_t tile_t = 0;
  std::int32_t a = 0;
  double weight = 1.0;
};

struct SuperpixelProblem {
  std::size_t num_tiles = 0;
  std::vector<OffsetEdge> edges;
  /// Per tile omega_g * (K_g - bias_g)^2.
  std::vector<Unary> unary;
  /// Offsets take values in [-offset_shift, offset_domain - 1 - offset_shift].
  std::int32_t offset_domain = 0;
  std::int32_t offset_shift = 0;
};

struct SuperpixelOptions {
  double tile_omega = 0.01;
  std::int32_t tile_bias = 0;
  /// 0 selects twice the parent domain (twice the tile domain in the pipeline).
  std::int32_t offset_domain = 0;
};

/// Offset problem from solved tiles: a' = a - (k'_t - k'_s) per boundary edge.
/// Edges keep the parent order; the QUBO builder merges parallel ones.
SuperpixelProblem build_superpixel_problem(const UnwrapProblem& parent, const Tiling& tiling,
                                           std::span<const LabelGrid> tile_labels,
                                           const SuperpixelOptions& options = {});

/// Pairwise plus unary objective of an offset assignment.
double superpixel_energy(const SuperpixelProblem& problem, std::span<const std::int32_t> offsets);

/// Mean total weight between adjacent tile pairs; 1 without boundary edges.
double mean_merged_weight(const SuperpixelProblem& problem);

/// QUBO over shifted offsets u = K + offset_shift in [0, offset_domain).
EncodedProblem build_offset_qubo(const SuperpixelProblem& problem);

/// Offsets K from a solved offset QUBO (decoded, then re-centred).
std::vector<std::int32_t> decode_offsets(const SuperpixelProblem& problem,
                                         const EncodedProblem& encoded,
                                         std::span<const std::uint8_t> bits);

struct StitchResult {
  LabelGrid labels;
  /// Unclamped labels k'_i + K_g - shift.
  std::vector<std::int32_t> raw;
  std::size_t clamped = 0;
};

/// Global labels k'_i + K_g, shifted so the smallest label is 0, then
/// clamped to [0, domain_size - 1].
StitchResult stitch(const Tiling& tiling, std::span<const LabelGrid> tile_labels,
                    std::span<const std::int32_t> offsets, std::int32_t domain_size);

struct PipelineOptions {
  SolverKind solver = SolverKind::ParallelTempering;
  SolverConfig config;
  /// Solver settings for the offset problem; unset reuses `config`. Its
  /// ladder is divided by the mean merged boundary weight, since offset
  /// couplings grow with the tile side.
  std::optional<SolverConfig> offset_config;
  WeightPolicy weights;
  std::int32_t domain_size = 4;
  /// Label domain of the tile sub-problems; 0 uses domain_size.
  std::int32_t tile_domain_size = 0;
  /// Tile unary terms pull toward the middle of the tile domain instead of
  /// the parent bias. Tile solutions only matter up to a constant, and a
  /// centred pull keeps them off the lower domain bound.
  bool centre_tile_bias = false;
  std::size_t tile_width = 10;
  std::size_t tile_height = 10;
  SuperpixelOptions superpixel;
  /// Upper bound on concurrent tile solves; 0 uses the hardware count.
  std::size_t threads = 1;
};

struct PipelineReport {
  Tiling tiling;
  std::vector<SolveReport> tile_reports;
  std::vector<LabelGrid> tile_labels;
  SolveReport superpixel_report;
  std::vector<std::int32_t> offsets;
  LabelGrid labels;
  PhaseGrid unwrapped;
  EnergyBreakdown energy;
  std::size_t decode_clamped = 0;
  std::size_t stitch_clamped = 0;
};

/// Tile, solve every tile, solve the offset problem, stitch, unwrap.
PipelineReport unwrap_superpixel(const PhaseGrid& wrapped, const PipelineOptions& options);

struct SingleShotReport {
  SolveReport solve;
  LabelGrid labels;
  PhaseGrid unwrapped;
  EnergyBreakdown energy;
  std::size_t decode_clamped = 0;
};

/// Whole image as one QUBO, using the same RNG stream as tile 0 of the
/// pipeline so a single-tile pipeline run reproduces it.
SingleShotReport unwrap_single(const PhaseGrid& wrapped, const PipelineOptions& options);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace qunwrap
