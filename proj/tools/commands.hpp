#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qunwrap/superpixel.hpp"

namespace qunwrap::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitDataMismatch = 3,
  kExitSolverFailure = 4,
};

/// Runs one command line (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker cap from PHASE_UNWRAP_THREADS, else the hardware count.
std::size_t thread_budget();

/// Solver hyper-parameters used when the command line does not override them.
struct SolverDefaults {
  std::size_t sweeps = 0;
  std::size_t restarts = 0;
  std::size_t replicas = 0;
};

SolverDefaults solver_defaults(SolverKind kind);

struct ExperimentOptions {
  std::string suite = "noise-free";
  std::size_t images = 10;
  std::size_t size = 100;
  std::size_t tile = 10;
  std::vector<SolverKind> solvers{SolverKind::Pticm};
  std::uint64_t seed = 1;
  std::int32_t max_ambiguity = 4;
  /// 0 selects max_ambiguity + 1.
  std::int32_t domain = 0;
  std::int32_t tile_domain = 4;
  std::optional<std::size_t> sweeps;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> replicas;
  std::size_t threads = 1;
  /// Empty disables file output.
  std::filesystem::path out_dir;
};

struct SolverRow {
  SolverKind solver;
  std::vector<double> image_match;
  std::vector<double> tile_match;
  std::vector<double> shift_aligned_match;
  std::vector<double> final_energy;
};

struct ExperimentResult {
  std::vector<SolverRow> rows;
  /// The summary table, exactly as printed and written to summary.txt.
  std::string table;
};

/// Generates every image, unwraps it with each solver and scores the result
/// against ground truth.
ExperimentResult run_experiment(const ExperimentOptions& options);

std::optional<double> suite_snr_db(const std::string& suite);

}  // namespace qunwrap::cli
