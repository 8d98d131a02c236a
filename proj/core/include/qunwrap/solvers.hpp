#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qunwrap/qubo.hpp"

namespace qunwrap {

struct SolverConfig {
  std::uint64_t seed = 1;
  std::size_t num_sweeps = 200;
  std::size_t num_restarts = 1;
  /// Inverse temperatures in inverse energy units, strictly increasing.
  /// Empty selects default_ladder().
  std::vector<double> temperature_ladder;
  std::size_t replicas_per_temperature = 1;
  bool icm_enabled = false;

  /// Throws InvalidArgument on a malformed ladder or zero counts.
  void validate() const;
};

/// 16 geometrically spaced values from 0.05 to 10.
std::vector<double> default_ladder();

/// Geometric ladder of `count` values from `lo` to `hi`.
std::vector<double> geometric_ladder(double lo, double hi, std::size_t count);

struct SolveReport {
  BitVector best_bits;
  double best_energy = 0.0;
  /// Best-so-far energy after every sweep, restarts concatenated.
  std::vector<double> energy_trace;
  std::uint64_t seed_used = 0;
  std::chrono::nanoseconds wall_time{0};
  /// Number of isoenergetic cluster moves performed (PTICM only).
  std::size_t cluster_moves = 0;
};

inline constexpr std::size_t kExhaustiveMaxVars = 24;

/// Global minimum by enumeration of all 2^n assignments (n <= 24). Ties go
/// to the assignment with the smallest value when x[0] is the least
/// significant bit.
SolveReport solve_exhaustive(const QuboProblem& qubo);

/// Simulated annealing: sequential single-flip Metropolis sweeps with a
/// geometric schedule between the ladder endpoints.
SolveReport solve_sa(const QuboProblem& qubo, const SolverConfig& config);

/// Replica-exchange Monte Carlo over the ladder.
SolveReport solve_pt(const QuboProblem& qubo, const SolverConfig& config);

/// Parallel tempering plus Houdayer-style isoenergetic cluster moves between
/// same-temperature replicas on the cold half of the ladder. With
/// icm_enabled == false this is solve_pt.
SolveReport solve_pticm(const QuboProblem& qubo, const SolverConfig& config);

/// Probability of exchanging configurations between inverse temperatures
/// beta_a and beta_b holding energies e_a and e_b.
double swap_acceptance(double beta_a, double beta_b, double e_a, double e_b);

/// Exchanges between `a` and `b` the connected cluster of disagreeing
/// variables (adjacency of `qubo`) that contains `seed_var`. Returns the
/// cluster size; 0 if the replicas agree on seed_var.
std::size_t exchange_cluster(const QuboProblem& qubo, BitVector& a, BitVector& b,
                             std::size_t seed_var);

/// Pluggable solver contract.
class Solver {
 public:
  virtual ~Solver() = default;
  virtual std::string_view name() const = 0;
  virtual SolveReport solve(const QuboProblem& qubo, const SolverConfig& config) const = 0;
};

enum class SolverKind { Exhaustive, SimulatedAnnealing, ParallelTempering, Pticm };

std::unique_ptr<Solver> make_solver(SolverKind kind);
/// Accepts "exhaustive", "sa", "pt", "pticm".
std::unique_ptr<Solver> make_solver(std::string_view name);
SolverKind parse_solver_kind(std::string_view name);
std::string_view to_string(SolverKind kind);

}  // namespace qunwrap
