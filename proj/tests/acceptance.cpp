// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
// Optional arguments select criteria by number, e.g. `qunwrap_acceptance 1 4`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "qunwrap/errors.hpp"
#include "qunwrap/grid_io.hpp"
#include "qunwrap/metrics.hpp"
#include "qunwrap/rng.hpp"
#include "qunwrap/superpixel.hpp"
#include "qunwrap/synth.hpp"
#include "support.hpp"

using namespace qunwrap;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ------------------------------------------------------------- criterion 1

Outcome qubo_equivalence() {
  Rng rng(101);
  std::size_t checked = 0, mismatches = 0;
  for (int instance = 0; instance < 20; ++instance) {
    const UnwrapProblem p = test::random_problem(rng, 2, 3, 4);
    const EncodedProblem e = build_qubo(p);
    std::vector<std::int32_t> k(6, 0);
    do {
      const BitVector x = encode_labels(k, e.encoding, e.layout);
      if (qubo_energy(e.qubo, x) != energy_l2(p, std::span<const std::int32_t>(k)).total) {
        ++mismatches;
      }
      ++checked;
    } while (test::next_assignment(k, 4));
  }
  return {mismatches == 0 && checked == 20 * 4096,
          fmt("%zu assignments over 20 instances, %zu mismatches", checked, mismatches)};
}

// ------------------------------------------------------------- criterion 2

Outcome edge_integrality() {
  Rng rng(102);
  std::size_t bad_integer = 0, bad_antisym = 0, bad_range = 0;
  double worst = 0.0;
  constexpr std::size_t kPairs = 1'000'000;
  for (std::size_t i = 0; i < kPairs; ++i) {
    const double a = wrap((rng.uniform() * 2.0 - 1.0) * kPi);
    const double b = wrap((rng.uniform() * 2.0 - 1.0) * kPi);
    const double q = edge_constant_quotient(a, b);
    const double err = std::abs(q - std::round(q));
    worst = std::max(worst, err);
    if (err >= 1e-6) ++bad_integer;
    const std::int32_t ab = edge_constant(a, b);
    const std::int32_t ba = edge_constant(b, a);
    if (ab != -ba) ++bad_antisym;
    if (ab < -1 || ab > 1) ++bad_range;
  }
  return {bad_integer == 0 && bad_antisym == 0 && bad_range == 0,
          fmt("10^6 pairs, max |q - round(q)| = %.3g, antisymmetry failures %zu, out of {-1,0,1} %zu",
              worst, bad_antisym, bad_range)};
}

// ------------------------------------------------------------- criterion 3

Outcome solver_optimality() {
  constexpr std::uint64_t kMaster = 103;
  std::size_t hits_sa = 0, hits_pt = 0, hits_pticm = 0;
  std::ostringstream misses;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::uint64_t seed = derive_seed(kMaster, i);
    Rng rng(seed);
    const QuboProblem q = test::random_qubo(rng, 6);
    const double truth = solve_exhaustive(q).best_energy;
    SolverConfig c;
    c.seed = seed;
    c.num_sweeps = 200;
    c.num_restarts = 5;
    const auto hit = [&](const SolveReport& r) { return std::abs(r.best_energy - truth) <= 1e-12; };
    if (hit(solve_sa(q, c))) ++hits_sa;
    else misses << " sa@" << seed;
    if (hit(solve_pt(q, c))) ++hits_pt;
    else misses << " pt@" << seed;
    c.replicas_per_temperature = 2;
    c.icm_enabled = true;
    if (hit(solve_pticm(q, c))) ++hits_pticm;
    else misses << " pticm@" << seed;
  }
  std::string detail = fmt("SA %zu/100 (>=95), PT %zu/100 (>=98), PTICM %zu/100 (>=98)", hits_sa,
                           hits_pt, hits_pticm);
  if (!misses.str().empty()) detail += "; misses (solver@seed):" + misses.str();
  return {hits_sa >= 95 && hits_pt >= 98 && hits_pticm >= 98, detail};
}

// ------------------------------------------------------------- criterion 4

Outcome decomposition_identity() {
  Rng rng(104);
  std::size_t failures = 0;
  for (int instance = 0; instance < 20; ++instance) {
    const UnwrapProblem p = test::random_problem(rng, 12, 12, 4);
    const auto k = test::random_labels(rng, p.num_pixels(), 4);
    const Tiling tiling = make_tiling(12, 12, 4, 4);
    double parts = 0.0;
    for (std::size_t g = 0; g < tiling.num_tiles(); ++g) {
      const UnwrapProblem sub = restrict_problem(p, tiling, g);
      std::vector<std::int32_t> local;
      for (std::uint32_t px : tiling.tiles[g].pixels) local.push_back(k[px]);
      parts += energy_l2(sub, std::span<const std::int32_t>(local)).total;
    }
    std::size_t seen = 0;
    for (const Edge& e : p.edges) {
      if (tiling.tile_of_pixel[e.s] == tiling.tile_of_pixel[e.t]) continue;
      const double d = static_cast<double>(k[e.t] - k[e.s] - e.a);
      parts += e.weight * d * d;
      ++seen;
    }
    if (seen != tiling.boundary_edges.size()) ++failures;
    if (parts != energy_l2(p, std::span<const std::int32_t>(k)).total) ++failures;
  }
  return {failures == 0, fmt("20 instances of 12x12 with 4x4 tiles, %zu failures", failures)};
}

// ------------------------------------------------------------- criterion 5

Outcome pipeline_exactness() {
  std::size_t exact = 0;
  std::ostringstream diag;
  for (std::uint64_t i = 0; i < 10; ++i) {
    SynthSpec spec;
    spec.width = 4;
    spec.height = 4;
    spec.seed = derive_seed(105, i);
    spec.max_ambiguity = 1;
    spec.snr_db = 13.0;
    const Interferogram ifg = synthesize(spec);

    PipelineOptions o;
    o.solver = SolverKind::Exhaustive;
    o.domain_size = 2;
    o.tile_width = 2;
    o.tile_height = 2;
    o.config.seed = spec.seed;
    const PipelineReport r = unwrap_superpixel(ifg.wrapped, o);

    const UnwrapProblem p = build_problem(ifg.wrapped, o.weights, 2);
    std::vector<std::int32_t> k(16, 0), best_k;
    double best = INFINITY;
    do {
      const double e = energy_l2(p, std::span<const std::int32_t>(k)).total;
      if (e < best) {
        best = e;
        best_k = k;
      }
    } while (test::next_assignment(k, 2));

    if (r.energy.total <= best + 1e-9 * std::max(1.0, std::abs(best))) {
      ++exact;
      continue;
    }
    // Tiles must agree with the global optimum up to one constant each.
    std::vector<std::size_t> incongruent;
    for (std::size_t g = 0; g < r.tiling.num_tiles(); ++g) {
      const auto& px = r.tiling.tiles[g].pixels;
      std::set<std::int32_t> diffs;
      for (std::size_t j = 0; j < px.size(); ++j) diffs.insert(r.tile_labels[g][j] - best_k[px[j]]);
      if (diffs.size() > 1) incongruent.push_back(g);
    }
    diag << "\n    image " << i << " (seed " << spec.seed << "): energy " << r.energy.total
         << " vs global " << best << "; ";
    if (!incongruent.empty()) {
      diag << "tiles not congruent to the global optimum:";
      for (std::size_t g : incongruent) diag << ' ' << g;
    } else {
      diag << "tiles congruent, offsets/stitch lost it (stitch clamped " << r.stitch_clamped << ")";
    }
  }
  return {exact >= 8, fmt("%zu/10 reach the global minimum over 2^16 (>=8)", exact) + diag.str()};
}

// ------------------------------------------------------------- criterion 6

Outcome table_reproduction() {
  struct Suite {
    const char* name;
    double threshold;
  };
  bool pass = true;
  std::string detail = "pticm, 10 images of 100x100 per suite, 10x10 tiles:";
  for (const Suite s : {Suite{"noise-free", 99.0}, Suite{"low-noise", 95.0}, Suite{"high-noise", 92.0}}) {
    cli::ExperimentOptions o;
    o.suite = s.name;
    o.threads = cli::thread_budget();
    const cli::ExperimentResult r = cli::run_experiment(o);
    const Summary img = summarize(r.rows.front().image_match);
    const Summary sub = summarize(r.rows.front().tile_match);
    pass = pass && img.mean >= s.threshold;
    detail += fmt(" %s img %.2f%% (>=%.0f) sub %.2f%%;", s.name, img.mean, s.threshold, sub.mean);
  }
  return {pass, detail};
}

// ------------------------------------------------------------- criterion 7

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const auto root = std::filesystem::temp_directory_path() / "qunwrap_acceptance_determinism";
  std::filesystem::remove_all(root);
  const std::vector<std::string> threads{"1", "1", "8"};
  for (std::size_t run = 0; run < threads.size(); ++run) {
    ::setenv("PHASE_UNWRAP_THREADS", threads[run].c_str(), 1);
    std::ostringstream out, err;
    const int code = cli::run({"experiment", "--suite", "high-noise", "--images", "2", "--size", "40",
                               "--tile", "10", "--solvers", "pticm", "sa", "--sweeps", "60", "--seed",
                               "7", "--out-dir", (root / std::to_string(run)).string()},
                              out, err);
    if (code != 0) return {false, "experiment exited with " + std::to_string(code) + ": " + err.str()};
  }
  ::unsetenv("PHASE_UNWRAP_THREADS");
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : std::filesystem::directory_iterator(root / "0")) {
    const std::string name = entry.path().filename().string();
    const bool relevant = name.ends_with(".lbg") || name.find(".metrics.") != std::string::npos ||
                          name == "summary.txt";
    if (!relevant) continue;
    const std::string ref = slurp(entry.path());
    for (const char* other : {"1", "2"}) {
      ++compared;
      if (slurp(root / other / name) != ref) ++differing;
    }
  }
  return {compared > 0 && differing == 0,
          fmt("threads 1, 1, 8: %zu file comparisons, %zu differ", compared, differing)};
}

// ------------------------------------------------------------- criterion 8

Outcome io_round_trips() {
  Rng rng(108);
  const auto dir = std::filesystem::temp_directory_path() / "qunwrap_acceptance_io";
  std::filesystem::create_directories(dir);
  std::size_t lossy = 0, missed = 0, crashes = 0, malformed = 0;
  const auto expect_format_error = [&](const std::function<void()>& fn) {
    ++malformed;
    try {
      fn();
      ++missed;
    } catch (const FormatError&) {
    } catch (...) {
      ++crashes;
    }
  };
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t w = 1 + rng.below(40), h = 1 + rng.below(40);
    const bool wrapped = rng.coin();
    std::vector<double> v(w * h);
    for (double& x : v) {
      x = wrapped ? static_cast<float>((rng.uniform() * 2.0 - 1.0) * 3.14159)
                  : static_cast<float>((rng.uniform() - 0.5) * 1e4);
    }
    const PhaseGrid g(w, h, std::move(v), wrapped ? PhaseKind::Wrapped : PhaseKind::Unwrapped);
    const std::int32_t domain = 1 + static_cast<std::int32_t>(rng.below(64));
    const LabelGrid l(w, h, test::random_labels(rng, w * h, domain), domain);

    write_phase(dir / "g.fpg", g);
    write_labels(dir / "l.lbg", l);
    const auto pbytes = read_file(dir / "g.fpg");
    const auto lbytes = read_file(dir / "l.lbg");
    if (!(read_phase(dir / "g.fpg") == g) || encode_fpg(decode_fpg(pbytes)) != pbytes) ++lossy;
    if (!(read_labels(dir / "l.lbg") == l) || encode_lbg(decode_lbg(lbytes)) != lbytes) ++lossy;

    auto cut_p = pbytes;
    cut_p.resize(rng.below(pbytes.size()));
    expect_format_error([&] { decode_fpg(cut_p); });
    auto cut_l = lbytes;
    cut_l.resize(rng.below(lbytes.size()));
    expect_format_error([&] { decode_lbg(cut_l); });
    auto magic = pbytes;
    magic[rng.below(4)] ^= 0x20;
    expect_format_error([&] { decode_fpg(magic); });
    auto dims = lbytes;
    dims[4 + rng.below(8)] ^= static_cast<std::uint8_t>(1 + rng.below(255));
    expect_format_error([&] { decode_lbg(dims); });
    expect_format_error([&] { decode_lbg(pbytes); });
  }
  return {lossy == 0 && missed == 0 && crashes == 0,
          fmt("100 grids, %zu lossy; %zu malformed inputs, %zu accepted, %zu non-format errors",
              lossy, malformed, missed, crashes)};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    Outcome (*run)();
  };
  const std::vector<Criterion> all{
      {1, "qubo-equivalence", 10, qubo_equivalence},
      {2, "edge-constant-integrality", 5, edge_integrality},
      {3, "solver-oracle-optimality", 60, solver_optimality},
      {4, "decomposition-identity", 0, decomposition_identity},
      {5, "pipeline-exactness", 0, pipeline_exactness},
      {6, "desk-scale-table", 600, table_reproduction},
      {7, "determinism", 0, determinism},
      {8, "io-round-trips", 0, io_round_trips},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && s > c.budget_s) {
      o.pass = false;
      o.detail += fmt(" [over the %.0f s budget]", c.budget_s);
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.id << " " << c.name << " (" << fmt("%.1f", s)
              << " s): " << o.detail << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
