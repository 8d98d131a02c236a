#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qunwrap/errors.hpp"
#include "qunwrap/grid_io.hpp"
#include "qunwrap/metrics.hpp"
#include "qunwrap/rng.hpp"
#include "qunwrap/synth.hpp"

namespace qunwrap::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Signals a problem with the data itself (exit code 3).
struct DataMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::filesystem::path with_suffix(const std::string& prefix, const std::string& suffix) {
  return std::filesystem::path(prefix + suffix);
}

void ensure_parent(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
}

std::string energy_text(const EnergyBreakdown& e) {
  std::ostringstream out;
  out.precision(17);
  out << "pairwise=" << e.pairwise << "\nunary=" << e.unary << "\ntotal=" << e.total << '\n';
  return out.str();
}

json energy_json(const EnergyBreakdown& e) {
  return json{{"pairwise", e.pairwise}, {"unary", e.unary}, {"total", e.total}};
}

std::pair<std::size_t, std::size_t> parse_tile(const std::string& text) {
  const auto x = text.find_first_of("xX");
  try {
    std::size_t used = 0;
    if (x == std::string::npos) {
      const std::size_t n = std::stoul(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {n, n};
    }
    const std::string w = text.substr(0, x), h = text.substr(x + 1);
    const std::size_t tw = std::stoul(w, &used);
    if (used != w.size()) throw std::invalid_argument(text);
    const std::size_t th = std::stoul(h, &used);
    if (used != h.size()) throw std::invalid_argument(text);
    return {tw, th};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--tile", "expected WxH, got '" + text + "'");
  }
}

PhaseGrid load_wrapped(const std::filesystem::path& path) {
  PhaseGrid grid = path.extension() == ".csv" ? import_csv(path) : read_phase(path);
  if (!grid.wrapped()) {
    throw DataMismatch("input '" + path.string() + "' is not a wrapped phase grid");
  }
  return grid;
}

constexpr std::size_t kOffsetSweepFactor = 10;

PipelineOptions pipeline_options(SolverKind kind, std::int32_t domain, std::int32_t tile_domain,
                                 std::uint64_t seed,
                                 std::optional<std::size_t> sweeps,
                                 std::optional<std::size_t> restarts,
                                 std::optional<std::size_t> replicas, std::size_t threads) {
  const SolverDefaults d = solver_defaults(kind);
  PipelineOptions o;
  o.solver = kind;
  o.domain_size = domain;
  o.tile_domain_size = tile_domain;
  o.centre_tile_bias = true;
  o.threads = threads;
  o.config.seed = seed;
  o.config.num_sweeps = sweeps.value_or(d.sweeps);
  o.config.num_restarts = restarts.value_or(d.restarts);
  o.config.replicas_per_temperature = replicas.value_or(d.replicas);
  o.config.icm_enabled = kind == SolverKind::Pticm;
  // The offset problem is small but frustrated; it gets a longer run.
  SolverConfig offset = o.config;
  if (kind != SolverKind::Exhaustive) offset.num_sweeps *= kOffsetSweepFactor;
  o.offset_config = offset;
  return o;
}

json config_json(const PipelineOptions& o, bool tiled) {
  json j;
  j["solver"] = std::string(to_string(o.solver));
  j["domain"] = o.domain_size;
  j["seed"] = o.config.seed;
  j["sweeps"] = o.config.num_sweeps;
  if (o.offset_config) j["offset_sweeps"] = o.offset_config->num_sweeps;
  j["restarts"] = o.config.num_restarts;
  j["replicas_per_temperature"] = o.config.replicas_per_temperature;
  j["icm_enabled"] = o.config.icm_enabled;
  j["ladder"] = o.config.temperature_ladder.empty() ? default_ladder() : o.config.temperature_ladder;
  j["edge_weight"] = o.weights.edge_weight;
  j["unary_weight"] = o.weights.unary_weight;
  j["unary_bias"] = o.weights.unary_bias;
  if (tiled) {
    j["tile_width"] = o.tile_width;
    j["tile_height"] = o.tile_height;
    const std::int32_t tile_domain =
        o.tile_domain_size > 0 ? o.tile_domain_size : o.domain_size;
    j["tile_domain"] = tile_domain;
    j["centre_tile_bias"] = o.centre_tile_bias;
    j["tile_omega"] = o.superpixel.tile_omega;
    j["offset_domain"] =
        o.superpixel.offset_domain > 0 ? o.superpixel.offset_domain : 2 * tile_domain;
  } else {
    j["tiling"] = "none";
  }
  return j;
}

json manifest_base(const std::string& command, const std::vector<std::string>& args) {
  json j;
  j["command"] = command;
  j["args"] = args;
  j["tool_version"] = kToolVersion;
  return j;
}

// ---------------------------------------------------------------- generate

struct GenerateFlags {
  std::size_t width = 400;
  std::size_t height = 400;
  std::uint64_t seed = 1;
  std::int32_t max_ambiguity = 4;
  std::optional<double> snr_db;
  std::size_t octaves = 4;
  double base_frequency = 2.0;
  std::string out_prefix;
};

int cmd_generate(const GenerateFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  const auto start = Clock::now();
  SynthSpec spec;
  spec.width = f.width;
  spec.height = f.height;
  spec.seed = f.seed;
  spec.max_ambiguity = f.max_ambiguity;
  spec.snr_db = f.snr_db;
  spec.perlin_octaves = f.octaves;
  spec.perlin_base_frequency = f.base_frequency;
  const Interferogram ifg = synthesize(spec);

  const auto truth_fpg = with_suffix(f.out_prefix, ".truth.fpg");
  const auto wrapped_fpg = with_suffix(f.out_prefix, ".wrapped.fpg");
  const auto truth_lbg = with_suffix(f.out_prefix, ".truth.lbg");
  const auto truth_pgm = with_suffix(f.out_prefix, ".truth.pgm");
  const auto wrapped_pgm = with_suffix(f.out_prefix, ".wrapped.pgm");
  const auto manifest_path = with_suffix(f.out_prefix, ".manifest.json");
  ensure_parent(truth_fpg);
  write_phase(truth_fpg, ifg.truth);
  write_phase(wrapped_fpg, ifg.wrapped);
  write_labels(truth_lbg, ifg.labels);
  export_pgm(truth_pgm, ifg.truth);
  export_pgm(wrapped_pgm, ifg.wrapped);

  json m = manifest_base("generate", args);
  m["seed"] = f.seed;
  m["spec"] = {{"width", f.width},
               {"height", f.height},
               {"max_ambiguity", f.max_ambiguity},
               {"snr_db", f.snr_db ? json(*f.snr_db) : json(nullptr)},
               {"perlin_octaves", f.octaves},
               {"perlin_base_frequency", f.base_frequency}};
  m["inputs"] = json::array();
  m["outputs"] = {truth_fpg.string(), wrapped_fpg.string(), truth_lbg.string(),
                  truth_pgm.string(), wrapped_pgm.string()};
  m["timings_ms"] = {{"total", elapsed_ms(start)}};
  write_text(manifest_path, m.dump(2) + "\n");
  out << "wrote " << wrapped_fpg.string() << " (" << f.width << "x" << f.height << ")\n";
  return kExitOk;
}

// ------------------------------------------------------------------ unwrap

struct UnwrapFlags {
  std::string in;
  std::string solver = "pticm";
  std::string tile = "10x10";
  bool no_tiling = false;
  std::int32_t domain = 4;
  std::int32_t tile_domain = 4;
  std::uint64_t seed = 1;
  std::optional<std::size_t> sweeps;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> replicas;
  std::string out_prefix;
  std::string qubo_out;
};

int cmd_unwrap(const UnwrapFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  const auto start = Clock::now();
  const SolverKind kind = parse_solver_kind(f.solver);
  const auto [tw, th] = parse_tile(f.tile);
  const PhaseGrid wrapped = load_wrapped(f.in);
  PipelineOptions o = pipeline_options(kind, f.domain, f.tile_domain, f.seed, f.sweeps, f.restarts, f.replicas,
                                       thread_budget());
  json m = manifest_base("unwrap", args);
  m["seed"] = f.seed;
  m["inputs"] = {f.in};

  LabelGrid labels;
  PhaseGrid unwrapped;
  EnergyBreakdown energy;
  json stats;
  if (f.no_tiling) {
    if (!f.qubo_out.empty()) {
      const EncodedProblem encoded = build_qubo(build_problem(wrapped, o.weights, o.domain_size));
      ensure_parent(f.qubo_out);
      std::ofstream q(f.qubo_out, std::ios::binary | std::ios::trunc);
      write_qubo_text(q, encoded.qubo);
    }
    SingleShotReport r = unwrap_single(wrapped, o);
    stats["num_vars"] = r.solve.best_bits.size();
    stats["decode_clamped"] = r.decode_clamped;
    stats["solver_best_energy"] = r.solve.best_energy;
    labels = std::move(r.labels);
    unwrapped = std::move(r.unwrapped);
    energy = r.energy;
  } else {
    o.tile_width = tw;
    o.tile_height = th;
    PipelineReport r = unwrap_superpixel(wrapped, o);
    stats["tiles"] = r.tiling.num_tiles();
    stats["boundary_edges"] = r.tiling.boundary_edges.size();
    stats["decode_clamped"] = r.decode_clamped;
    stats["stitch_clamped"] = r.stitch_clamped;
    stats["offsets"] = r.offsets;
    stats["superpixel_best_energy"] = r.superpixel_report.best_energy;
    labels = std::move(r.labels);
    unwrapped = std::move(r.unwrapped);
    energy = r.energy;
  }
  const double solve_ms = elapsed_ms(start);

  const auto labels_path = with_suffix(f.out_prefix, ".labels.lbg");
  const auto unwrapped_path = with_suffix(f.out_prefix, ".unwrapped.fpg");
  const auto pgm_path = with_suffix(f.out_prefix, ".unwrapped.pgm");
  const auto energy_path = with_suffix(f.out_prefix, ".energy.txt");
  const auto manifest_path = with_suffix(f.out_prefix, ".manifest.json");
  ensure_parent(labels_path);
  write_labels(labels_path, labels);
  write_phase(unwrapped_path, unwrapped);
  export_pgm(pgm_path, unwrapped);
  write_text(energy_path, energy_text(energy));

  m["config"] = config_json(o, !f.no_tiling);
  m["outputs"] = {labels_path.string(), unwrapped_path.string(), pgm_path.string(),
                  energy_path.string()};
  if (!f.qubo_out.empty()) m["outputs"].push_back(f.qubo_out);
  m["energy"] = energy_json(energy);
  m["stats"] = stats;
  m["timings_ms"] = {{"solve", solve_ms}, {"total", elapsed_ms(start)}};
  write_text(manifest_path, m.dump(2) + "\n");
  out << energy_text(energy);
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateFlags {
  std::string result;
  std::string truth;
  std::string out_prefix;
};

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out) {
  const LabelGrid result = read_labels(f.result);
  const LabelGrid truth = read_labels(f.truth);
  if (result.width() != truth.width() || result.height() != truth.height()) {
    throw DataMismatch("result is " + std::to_string(result.width()) + "x" +
                       std::to_string(result.height()) + " but truth is " +
                       std::to_string(truth.width()) + "x" + std::to_string(truth.height()));
  }
  const MatchReport report = match_labels(result, truth);
  const std::string kv = to_key_value(report);
  out << kv;
  if (!f.out_prefix.empty()) {
    write_text(with_suffix(f.out_prefix, ".metrics.txt"), kv);
    write_text(with_suffix(f.out_prefix, ".metrics.json"), to_json(report));
  }
  return kExitOk;
}

// -------------------------------------------------------------- experiment

struct ExperimentFlags {
  std::string suite = "noise-free";
  std::size_t images = 10;
  std::size_t size = 100;
  std::size_t tile = 10;
  std::vector<std::string> solvers{"pticm"};
  std::uint64_t seed = 1;
  std::int32_t max_ambiguity = 4;
  std::int32_t domain = 0;
  std::int32_t tile_domain = 4;
  std::optional<std::size_t> sweeps;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> replicas;
  std::string out_dir = "experiment";
};

int cmd_experiment(const ExperimentFlags& f, std::ostream& out) {
  ExperimentOptions o;
  o.suite = f.suite;
  o.images = f.images;
  o.size = f.size;
  o.tile = f.tile;
  o.solvers.clear();
  for (const std::string& s : f.solvers) o.solvers.push_back(parse_solver_kind(s));
  o.seed = f.seed;
  o.max_ambiguity = f.max_ambiguity;
  o.domain = f.domain;
  o.tile_domain = f.tile_domain;
  o.sweeps = f.sweeps;
  o.restarts = f.restarts;
  o.replicas = f.replicas;
  o.threads = thread_budget();
  o.out_dir = f.out_dir;
  const ExperimentResult result = run_experiment(o);
  out << result.table;
  return kExitOk;
}

std::string format_row(const std::string& name, const std::vector<double>& values, int width) {
  char buf[64];
  std::string row = name;
  row.resize(static_cast<std::size_t>(width), ' ');
  for (double v : values) {
    std::snprintf(buf, sizeof buf, " %10.4f", v);
    row += buf;
  }
  return row + "\n";
}

}  // namespace

std::size_t thread_budget() {
  if (const char* env = std::getenv("PHASE_UNWRAP_THREADS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SolverDefaults solver_defaults(SolverKind kind) {
  switch (kind) {
    case SolverKind::Exhaustive: return {1, 1, 1};
    case SolverKind::SimulatedAnnealing: return {300, 4, 1};
    case SolverKind::ParallelTempering: return {300, 1, 2};
    case SolverKind::Pticm: return {300, 1, 2};
  }
  return {200, 1, 1};
}

std::optional<double> suite_snr_db(const std::string& suite) {
  if (suite == "noise-free") return std::nullopt;
  if (suite == "low-noise") return 15.0;
  if (suite == "high-noise") return 13.0;
  throw InvalidArgument("unknown suite '" + suite + "'");
}

ExperimentResult run_experiment(const ExperimentOptions& o) {
  const std::optional<double> snr = suite_snr_db(o.suite);
  if (o.images < 1) throw InvalidArgument("experiment: --images must be at least 1");
  if (o.solvers.empty()) throw InvalidArgument("experiment: no solvers given");
  const std::int32_t domain = o.domain > 0 ? o.domain : o.max_ambiguity + 1;
  const bool write = !o.out_dir.empty();
  if (write) std::filesystem::create_directories(o.out_dir);

  ExperimentResult result;
  for (SolverKind kind : o.solvers) result.rows.push_back(SolverRow{kind, {}, {}, {}, {}});

  for (std::size_t i = 0; i < o.images; ++i) {
    SynthSpec spec;
    spec.width = o.size;
    spec.height = o.size;
    spec.seed = derive_seed(o.seed, i);
    spec.max_ambiguity = o.max_ambiguity;
    spec.snr_db = snr;
    const Interferogram ifg = synthesize(spec);
    // Solve exactly what a file round trip would hand to `unwrap`.
    const PhaseGrid wrapped = decode_fpg(encode_fpg(ifg.wrapped));

    char stem[32];
    std::snprintf(stem, sizeof stem, "img%03zu", i);
    const std::filesystem::path base = o.out_dir / stem;
    if (write) {
      write_phase(base.string() + ".wrapped.fpg", wrapped);
      write_labels(base.string() + ".truth.lbg", ifg.labels);
    }

    for (SolverRow& row : result.rows) {
      const auto start = Clock::now();
      PipelineOptions po = pipeline_options(row.solver, domain, o.tile_domain, spec.seed, o.sweeps, o.restarts,
                                            o.replicas, o.threads);
      po.tile_width = o.tile;
      po.tile_height = o.tile;
      const PipelineReport r = unwrap_superpixel(wrapped, po);
      const MatchReport match = match_labels(r.labels, ifg.labels);
      row.image_match.push_back(match.raw_match_pct);
      row.shift_aligned_match.push_back(match.shift_aligned_match_pct);
      row.final_energy.push_back(r.energy.total);
      for (std::size_t g = 0; g < r.tiling.num_tiles(); ++g) {
        const Tile& tile = r.tiling.tiles[g];
        std::vector<std::int32_t> truth_tile;
        truth_tile.reserve(tile.pixels.size());
        for (std::uint32_t p : tile.pixels) truth_tile.push_back(ifg.labels[p]);
        const LabelGrid t(tile.width, tile.height, std::move(truth_tile),
                          ifg.labels.domain_size());
        row.tile_match.push_back(match_labels(r.tile_labels[g], t).shift_aligned_match_pct);
      }
      if (write) {
        const std::string stem_solver = base.string() + "." + std::string(to_string(row.solver));
        write_labels(stem_solver + ".labels.lbg", r.labels);
        write_text(stem_solver + ".metrics.txt", to_key_value(match));
        write_text(stem_solver + ".metrics.json", to_json(match));
        json m = manifest_base("experiment", {});
        m["suite"] = o.suite;
        m["image"] = i;
        m["seed"] = spec.seed;
        m["config"] = config_json(po, true);
        m["inputs"] = {base.string() + ".wrapped.fpg"};
        m["outputs"] = {stem_solver + ".labels.lbg", stem_solver + ".metrics.txt",
                        stem_solver + ".metrics.json"};
        m["energy"] = energy_json(r.energy);
        m["metrics"] = json::parse(to_json(match));
        m["timings_ms"] = {{"total", elapsed_ms(start)}};
        write_text(stem_solver + ".manifest.json", m.dump(2) + "\n");
      }
    }
  }

  std::ostringstream table;
  table << "suite=" << o.suite << " images=" << o.images << " size=" << o.size
        << " tile=" << o.tile << " domain=" << domain << " seed=" << o.seed << "\n";
  table << "solver         sub_avg    sub_std    img_avg    img_std  shift_avg\n";
  json summary;
  summary["suite"] = o.suite;
  summary["images"] = o.images;
  summary["size"] = o.size;
  summary["tile"] = o.tile;
  summary["domain"] = domain;
  summary["seed"] = o.seed;
  summary["solvers"] = json::array();
  for (const SolverRow& row : result.rows) {
    const Summary sub = summarize(row.tile_match);
    const Summary img = summarize(row.image_match);
    const Summary shifted = summarize(row.shift_aligned_match);
    table << format_row(std::string(to_string(row.solver)), {sub.mean, sub.stddev, img.mean,
                                                              img.stddev, shifted.mean}, 10);
    summary["solvers"].push_back({{"solver", std::string(to_string(row.solver))},
                                  {"sub_image_avg", sub.mean},
                                  {"sub_image_std", sub.stddev},
                                  {"image_avg", img.mean},
                                  {"image_std", img.stddev},
                                  {"shift_aligned_avg", shifted.mean},
                                  {"image_match", row.image_match}});
  }
  result.table = table.str();
  if (write) {
    write_text(o.out_dir / "summary.txt", result.table);
    write_text(o.out_dir / "summary.json", summary.dump(2) + "\n");
  }
  return result;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"QUBO-based 2-D phase unwrapping"};
  app.name("qunwrap");
  app.require_subcommand(1);

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "Synthesize a Perlin-noise interferogram");
  generate->add_option("--width", gen.width)->check(CLI::PositiveNumber);
  generate->add_option("--height", gen.height)->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed);
  generate->add_option("--max-ambiguity", gen.max_ambiguity)->check(CLI::PositiveNumber);
  generate->add_option("--snr-db", gen.snr_db);
  generate->add_option("--octaves", gen.octaves);
  generate->add_option("--base-frequency", gen.base_frequency)->check(CLI::PositiveNumber);
  generate->add_option("--out-prefix", gen.out_prefix)->required();

  UnwrapFlags unw;
  auto* unwrap = app.add_subcommand("unwrap", "Unwrap a wrapped phase grid (FPG1 or CSV)");
  unwrap->add_option("--in", unw.in)->required();
  unwrap->add_option("--solver", unw.solver)
      ->check(CLI::IsMember({"sa", "pt", "pticm", "exhaustive"}));
  auto* tile_opt = unwrap->add_option("--tile", unw.tile, "Tile size WxH");
  unwrap->add_flag("--no-tiling", unw.no_tiling)->excludes(tile_opt);
  unwrap->add_option("--domain", unw.domain)->check(CLI::Range(2, 1 << 20));
  unwrap->add_option("--tile-domain", unw.tile_domain)->check(CLI::Range(2, 1 << 20));
  unwrap->add_option("--seed", unw.seed);
  unwrap->add_option("--sweeps", unw.sweeps)->check(CLI::PositiveNumber);
  unwrap->add_option("--restarts", unw.restarts)->check(CLI::PositiveNumber);
  unwrap->add_option("--replicas", unw.replicas)->check(CLI::PositiveNumber);
  unwrap->add_option("--qubo-out", unw.qubo_out, "Export the QUBO as text (--no-tiling only)");
  unwrap->add_option("--out-prefix", unw.out_prefix)->required();

  EvaluateFlags ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score labels against ground truth");
  evaluate->add_option("--result", ev.result)->required();
  evaluate->add_option("--truth", ev.truth)->required();
  evaluate->add_option("--out-prefix", ev.out_prefix);

  ExperimentFlags ex;
  auto* experiment = app.add_subcommand("experiment", "Generate, unwrap and score a suite");
  experiment->add_option("--suite", ex.suite)
      ->check(CLI::IsMember({"noise-free", "low-noise", "high-noise"}));
  experiment->add_option("--images", ex.images)->check(CLI::PositiveNumber);
  experiment->add_option("--size", ex.size)->check(CLI::PositiveNumber);
  experiment->add_option("--tile", ex.tile)->check(CLI::PositiveNumber);
  experiment->add_option("--solvers", ex.solvers)
      ->delimiter(',')
      ->check(CLI::IsMember({"sa", "pt", "pticm", "exhaustive"}));
  experiment->add_option("--seed", ex.seed);
  experiment->add_option("--max-ambiguity", ex.max_ambiguity)->check(CLI::PositiveNumber);
  experiment->add_option("--domain", ex.domain);
  experiment->add_option("--tile-domain", ex.tile_domain)->check(CLI::Range(2, 1 << 20));
  experiment->add_option("--sweeps", ex.sweeps)->check(CLI::PositiveNumber);
  experiment->add_option("--restarts", ex.restarts)->check(CLI::PositiveNumber);
  experiment->add_option("--replicas", ex.replicas)->check(CLI::PositiveNumber);
  experiment->add_option("--out-dir", ex.out_dir);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, args, out);
    if (unwrap->parsed()) {
      if (!unw.qubo_out.empty() && !unw.no_tiling) {
        err << "usage error: --qubo-out requires --no-tiling\n";
        return kExitUsage;
      }
      return cmd_unwrap(unw, args, out);
    }
    if (evaluate->parsed()) return cmd_evaluate(ev, out);
    if (experiment->parsed()) return cmd_experiment(ex, out);
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ProblemTooLarge& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const DataMismatch& e) {
    err << "data error: " << e.what() << "\n";
    return kExitDataMismatch;
  } catch (const FormatError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitDataMismatch;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  return kExitUsage;
}

}  // namespace qunwrap::cli
