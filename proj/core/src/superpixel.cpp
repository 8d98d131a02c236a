#include "qunwrap/superpixel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include "qunwrap/errors.hpp"
#include "qunwrap/rng.hpp"

namespace qunwrap {

namespace {

// Stream index of the offset solve; tile i uses stream i.
constexpr std::uint64_t kOffsetStream = ~std::uint64_t{0};

}  // namespace

Tiling make_tiling(std::size_t width, std::size_t height, std::size_t tile_width,
                   std::size_t tile_height) {
  if (tile_width < 2 || tile_height < 2) {
    throw InvalidArgument("make_tiling: tile dimensions must be at least 2");
  }
  if (width < tile_width || height < tile_height) {
    throw InvalidArgument("make_tiling: tile " + std::to_string(tile_width) + "x" +
                          std::to_string(tile_height) + " larger than grid " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
  Tiling t;
  t.width = width;
  t.height = height;
  t.tile_width = tile_width;
  t.tile_height = tile_height;
  t.tiles_across = (width + tile_width - 1) / tile_width;
  t.tiles_down = (height + tile_height - 1) / tile_height;
  t.tile_of_pixel.resize(width * height);
  for (std::size_t ty = 0; ty < t.tiles_down; ++ty) {
    for (std::size_t tx = 0; tx < t.tiles_across; ++tx) {
      Tile tile;
      tile.col0 = tx * tile_width;
      tile.row0 = ty * tile_height;
      tile.width = std::min(tile_width, width - tile.col0);
      tile.height = std::min(tile_height, height - tile.row0);
      tile.pixels.reserve(tile.width * tile.height);
      const auto index = static_cast<std::uint32_t>(t.tiles.size());
      for (std::size_t r = 0; r < tile.height; ++r) {
        for (std::size_t c = 0; c < tile.width; ++c) {
          const std::size_t p = (tile.row0 + r) * width + tile.col0 + c;
          tile.pixels.push_back(static_cast<std::uint32_t>(p));
          t.tile_of_pixel[p] = index;
        }
      }
      t.tiles.push_back(std::move(tile));
    }
  }
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const std::size_t s = r * width + c;
      if (c + 1 < width && t.tile_of_pixel[s] != t.tile_of_pixel[s + 1]) {
        t.boundary_edges.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s + 1)});
      }
      if (r + 1 < height && t.tile_of_pixel[s] != t.tile_of_pixel[s + width]) {
        t.boundary_edges.push_back(
            {static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s + width)});
      }
    }
  }
  return t;
}

UnwrapProblem restrict_problem(const UnwrapProblem& parent, const Tiling& tiling,
                               std::size_t tile_index) {
  if (tiling.width != parent.width || tiling.height != parent.height) {
    throw InvalidArgument("restrict_problem: tiling does not match the problem");
  }
  if (tile_index >= tiling.num_tiles()) throw InvalidArgument("restrict_problem: bad tile index");
  const Tile& tile = tiling.tiles[tile_index];
  UnwrapProblem sub;
  sub.width = tile.width;
  sub.height = tile.height;
  sub.domain_size = parent.domain_size;
  sub.unary.reserve(tile.pixels.size());
  for (std::uint32_t p : tile.pixels) sub.unary.push_back(parent.unary[p]);
  const auto local = [&](std::uint32_t p) {
    const std::size_t r = p / parent.width - tile.row0;
    const std::size_t c = p % parent.width - tile.col0;
    return static_cast<std::uint32_t>(r * tile.width + c);
  };
  const auto index = static_cast<std::uint32_t>(tile_index);
  for (const Edge& e : parent.edges) {
    if (tiling.tile_of_pixel[e.s] == index && tiling.tile_of_pixel[e.t] == index) {
      sub.edges.push_back(Edge{local(e.s), local(e.t), e.a, e.weight});
    }
  }
  return sub;
}

namespace {

std::int32_t local_label(const Tiling& tiling, std::span<const LabelGrid> tile_labels,
                         std::uint32_t pixel) {
  const std::uint32_t g = tiling.tile_of_pixel[pixel];
  const Tile& tile = tiling.tiles[g];
  const std::size_t r = pixel / tiling.width - tile.row0;
  const std::size_t c = pixel % tiling.width - tile.col0;
  return tile_labels[g][r * tile.width + c];
}

void check_tile_labels(const Tiling& tiling, std::span<const LabelGrid> tile_labels) {
  if (tile_labels.size() != tiling.num_tiles()) {
    throw InvalidState("superpixel: " + std::to_string(tile_labels.size()) +
                       " tile solutions for " + std::to_string(tiling.num_tiles()) + " tiles");
  }
  for (std::size_t g = 0; g < tile_labels.size(); ++g) {
    if (tile_labels[g].width() != tiling.tiles[g].width ||
        tile_labels[g].height() != tiling.tiles[g].height) {
      throw InvalidState("superpixel: tile " + std::to_string(g) + " solution has the wrong shape");
    }
  }
}

}  // namespace

double mean_merged_weight(const SuperpixelProblem& problem) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> merged;
  for (const OffsetEdge& e : problem.edges) {
    merged[std::minmax(e.tile_s, e.tile_t)] += std::abs(e.weight);
  }
  if (merged.empty()) return 1.0;
  double total = 0.0;
  for (const auto& [pair, w] : merged) total += w;
  return total > 0.0 ? total / static_cast<double>(merged.size()) : 1.0;
}

SuperpixelProblem build_superpixel_problem(const UnwrapProblem& parent, const Tiling& tiling,
                                           std::span<const LabelGrid> tile_labels,
                                           const SuperpixelOptions& options) {
  if (tiling.width != parent.width || tiling.height != parent.height) {
    throw InvalidArgument("build_superpixel_problem: tiling does not match the problem");
  }
  check_tile_labels(tiling, tile_labels);
  SuperpixelProblem sp;
  sp.num_tiles = tiling.num_tiles();
  sp.offset_domain = options.offset_domain > 0 ? options.offset_domain : 2 * parent.domain_size;
  if (sp.offset_domain < 2) throw InvalidArgument("build_superpixel_problem: offset domain < 2");
  sp.offset_shift = sp.offset_domain / 2;
  sp.unary.assign(sp.num_tiles, Unary{options.tile_omega, options.tile_bias});
  for (const Edge& e : parent.edges) {
    const std::uint32_t gs = tiling.tile_of_pixel[e.s];
    const std::uint32_t gt = tiling.tile_of_pixel[e.t];
    if (gs == gt) continue;
    const std::int32_t ks = local_label(tiling, tile_labels, e.s);
    const std::int32_t kt = local_label(tiling, tile_labels, e.t);
    sp.edges.push_back(OffsetEdge{gs, gt, e.a - (kt - ks), e.weight});
  }
  return sp;
}

double superpixel_energy(const SuperpixelProblem& problem, std::span<const std::int32_t> offsets) {
  if (offsets.size() != problem.num_tiles) throw InvalidArgument("superpixel_energy: size mismatch");
  double pairwise = 0.0;
  for (const OffsetEdge& e : problem.edges) {
    const double r = static_cast<double>(offsets[e.tile_t]) - offsets[e.tile_s] - e.a;
    pairwise += e.weight * r * r;
  }
  double unary = 0.0;
  for (std::size_t g = 0; g < problem.num_tiles; ++g) {
    const double r = static_cast<double>(offsets[g]) - problem.unary[g].bias;
    unary += problem.unary[g].omega * r * r;
  }
  return pairwise + unary;
}

EncodedProblem build_offset_qubo(const SuperpixelProblem& problem) {
  BinaryEncoding enc(problem.offset_domain);
  VarLayout layout(problem.num_tiles, enc.width());
  QuboBuilder builder(layout.num_vars());
  for (const OffsetEdge& e : problem.edges) {
    add_pairwise_square(builder, layout, enc, e.tile_s, e.tile_t, e.a, e.weight);
  }
  for (std::size_t g = 0; g < problem.num_tiles; ++g) {
    add_unary_square(builder, layout, enc, g,
                     std::int64_t{problem.unary[g].bias} + problem.offset_shift,
                     problem.unary[g].omega);
  }
  return EncodedProblem{builder.build(), layout, enc};
}

std::vector<std::int32_t> decode_offsets(const SuperpixelProblem& problem,
                                         const EncodedProblem& encoded,
                                         std::span<const std::uint8_t> bits) {
  DecodeResult shifted = decode_labels(bits, encoded.layout, encoded.encoding);
  for (std::int32_t& k : shifted.labels) k -= problem.offset_shift;
  return shifted.labels;
}

StitchResult stitch(const Tiling& tiling, std::span<const LabelGrid> tile_labels,
                    std::span<const std::int32_t> offsets, std::int32_t domain_size) {
  check_tile_labels(tiling, tile_labels);
  if (offsets.size() != tiling.num_tiles()) throw InvalidArgument("stitch: offset count mismatch");
  StitchResult result;
  result.raw.resize(tiling.width * tiling.height);
  for (std::size_t g = 0; g < tiling.num_tiles(); ++g) {
    const Tile& tile = tiling.tiles[g];
    for (std::size_t i = 0; i < tile.pixels.size(); ++i) {
      result.raw[tile.pixels[i]] = tile_labels[g][i] + offsets[g];
    }
  }
  const std::int32_t shift =
      result.raw.empty() ? 0 : *std::min_element(result.raw.begin(), result.raw.end());
  std::vector<std::int32_t> clamped(result.raw.size());
  for (std::size_t p = 0; p < result.raw.size(); ++p) {
    result.raw[p] -= shift;
    clamped[p] = result.raw[p];
    if (clamped[p] > domain_size - 1) {
      clamped[p] = domain_size - 1;
      ++result.clamped;
    }
  }
  result.labels = LabelGrid(tiling.width, tiling.height, std::move(clamped), domain_size);
  return result;
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

PipelineReport unwrap_superpixel(const PhaseGrid& wrapped, const PipelineOptions& options) {
  const UnwrapProblem parent = build_problem(wrapped, options.weights, options.domain_size);
  const std::unique_ptr<Solver> solver = make_solver(options.solver);

  PipelineReport report;
  report.tiling = make_tiling(wrapped.width(), wrapped.height(), options.tile_width,
                              options.tile_height);
  const std::int32_t tile_domain =
      options.tile_domain_size > 0 ? options.tile_domain_size : options.domain_size;
  if (tile_domain < 2) throw InvalidArgument("unwrap_superpixel: tile domain < 2");
  const std::size_t n_tiles = report.tiling.num_tiles();
  report.tile_reports.resize(n_tiles);
  report.tile_labels.resize(n_tiles);
  std::vector<std::size_t> clamped(n_tiles, 0);
  parallel_for(n_tiles, options.threads, [&](std::size_t g) {
    UnwrapProblem sub = restrict_problem(parent, report.tiling, g);
    sub.domain_size = tile_domain;
    if (options.centre_tile_bias) {
      for (Unary& u : sub.unary) u.bias = (tile_domain - 1) / 2;
    }
    const EncodedProblem encoded = build_qubo(sub);
    SolverConfig config = options.config;
    config.seed = derive_seed(options.config.seed, g);
    report.tile_reports[g] = solver->solve(encoded.qubo, config);
    DecodedGrid decoded = decode_solution(report.tile_reports[g].best_bits, encoded.layout,
                                          encoded.encoding, sub.width, sub.height);
    report.tile_labels[g] = std::move(decoded.labels);
    clamped[g] = decoded.clamped;
  });
  for (std::size_t c : clamped) report.decode_clamped += c;

  SuperpixelOptions sp_options = options.superpixel;
  if (sp_options.offset_domain == 0) sp_options.offset_domain = 2 * tile_domain;
  const SuperpixelProblem sp =
      build_superpixel_problem(parent, report.tiling, report.tile_labels, sp_options);
  const EncodedProblem offset_qubo = build_offset_qubo(sp);
  SolverConfig config = options.offset_config.value_or(options.config);
  config.seed = derive_seed(options.config.seed, kOffsetStream);
  if (config.temperature_ladder.empty()) config.temperature_ladder = default_ladder();
  const double weight = mean_merged_weight(sp);
  for (double& beta : config.temperature_ladder) beta /= weight;
  report.superpixel_report = solver->solve(offset_qubo.qubo, config);
  report.offsets = decode_offsets(sp, offset_qubo, report.superpixel_report.best_bits);

  StitchResult stitched =
      stitch(report.tiling, report.tile_labels, report.offsets, options.domain_size);
  report.stitch_clamped = stitched.clamped;
  report.labels = std::move(stitched.labels);
  report.energy = energy_l2(parent, report.labels);
  report.unwrapped = apply_labels(wrapped, report.labels);
  return report;
}

SingleShotReport unwrap_single(const PhaseGrid& wrapped, const PipelineOptions& options) {
  const UnwrapProblem problem = build_problem(wrapped, options.weights, options.domain_size);
  const EncodedProblem encoded = build_qubo(problem);
  SolverConfig config = options.config;
  config.seed = derive_seed(options.config.seed, 0);
  SingleShotReport report;
  report.solve = make_solver(options.solver)->solve(encoded.qubo, config);
  DecodedGrid decoded = decode_solution(report.solve.best_bits, encoded.layout, encoded.encoding,
                                        problem.width, problem.height);
  report.labels = std::move(decoded.labels);
  report.decode_clamped = decoded.clamped;
  report.energy = energy_l2(problem, report.labels);
  report.unwrapped = apply_labels(wrapped, report.labels);
  return report;
}

}  // namespace qunwrap
