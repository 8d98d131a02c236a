#include "qunwrap/solvers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "qunwrap/errors.hpp"
#include "qunwrap/rng.hpp"

namespace qunwrap {

void SolverConfig::validate() const {
  if (num_sweeps < 1) throw InvalidArgument("SolverConfig: num_sweeps must be at least 1");
  if (num_restarts < 1) throw InvalidArgument("SolverConfig: num_restarts must be at least 1");
  if (replicas_per_temperature < 1) {
    throw InvalidArgument("SolverConfig: replicas_per_temperature must be at least 1");
  }
  for (std::size_t i = 0; i < temperature_ladder.size(); ++i) {
    if (!(temperature_ladder[i] > 0.0) || !std::isfinite(temperature_ladder[i])) {
      throw InvalidArgument("SolverConfig: inverse temperatures must be positive and finite");
    }
    if (i > 0 && !(temperature_ladder[i] > temperature_ladder[i - 1])) {
      throw InvalidArgument("SolverConfig: temperature ladder must be strictly increasing");
    }
  }
}

std::vector<double> geometric_ladder(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {hi};
  std::vector<double> betas(count);
  const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) betas[i] = lo * std::exp(ratio * static_cast<double>(i));
  betas.back() = hi;
  return betas;
}

std::vector<double> default_ladder() { return geometric_ladder(0.05, 10.0, 16); }

double swap_acceptance(double beta_a, double beta_b, double e_a, double e_b) {
  const double exponent = (beta_a - beta_b) * (e_a - e_b);
  return exponent >= 0.0 ? 1.0 : std::exp(exponent);
}

namespace {

using Clock = std::chrono::steady_clock;

// Configuration with cached local fields: field[i] = linear_i + sum_j b_ij x_j,
// so flipping i changes the energy by (1 - 2 x_i) * field[i].
struct Replica {
  BitVector x;
  std::vector<double> field;
  double energy = 0.0;

  void reset(const QuboProblem& q) {
    const auto lin = q.linear();
    field.assign(lin.begin(), lin.end());
    for (const QuadTerm& t : q.quadratic()) {
      if (x[t.j]) field[t.i] += t.value;
      if (x[t.i]) field[t.j] += t.value;
    }
    energy = qubo_energy(q, x);
  }

  void randomize(const QuboProblem& q, Rng& rng) {
    x.resize(q.num_vars());
    for (auto& bit : x) bit = static_cast<std::uint8_t>(rng.coin());
    reset(q);
  }

  void flip(const QuboProblem& q, std::size_t i, double delta) {
    const double sign = x[i] ? -1.0 : 1.0;
    x[i] ^= 1;
    energy += delta;
    const auto nbr = q.neighbours(i);
    const auto cpl = q.couplings(i);
    for (std::size_t k = 0; k < nbr.size(); ++k) field[nbr[k]] += sign * cpl[k];
  }
};

void metropolis_sweep(const QuboProblem& q, Replica& r, double beta, Rng& rng) {
  const std::size_t n = r.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double delta = r.x[i] ? -r.field[i] : r.field[i];
    if (delta <= 0.0 || rng.uniform() < std::exp(-beta * delta)) r.flip(q, i, delta);
  }
}

struct Best {
  BitVector bits;
  double energy = std::numeric_limits<double>::infinity();

  void offer(const Replica& r) {
    if (r.energy < energy) {
      energy = r.energy;
      bits = r.x;
    }
  }
};

SolveReport finish(const QuboProblem& q, Best best, std::vector<double> trace, std::uint64_t seed,
                   Clock::time_point start) {
  SolveReport report;
  report.best_energy = qubo_energy(q, best.bits);
  report.best_bits = std::move(best.bits);
  // The tracked energies accumulate rounding; keep the trace consistent with
  // the exactly re-evaluated result.
  for (double& e : trace) e = std::max(e, report.best_energy);
  report.energy_trace = std::move(trace);
  report.seed_used = seed;
  report.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return report;
}

SolveReport run_tempering(const QuboProblem& q, const SolverConfig& config, bool icm) {
  const auto start = Clock::now();
  config.validate();
  const std::vector<double> ladder =
      config.temperature_ladder.empty() ? default_ladder() : config.temperature_ladder;
  if (ladder.size() < 2) {
    throw InvalidArgument("parallel tempering needs at least two temperatures");
  }
  if (icm && config.replicas_per_temperature < 2) {
    throw InvalidArgument("cluster moves need at least two replicas per temperature");
  }
  const std::size_t levels = ladder.size();
  const std::size_t per_level = config.replicas_per_temperature;
  const std::vector<double>& betas = ladder;

  Best best;
  std::vector<double> trace;
  trace.reserve(config.num_restarts * config.num_sweeps);
  std::size_t cluster_moves = 0;
  std::vector<std::uint32_t> disagree;

  for (std::size_t restart = 0; restart < config.num_restarts; ++restart) {
    Rng rng(derive_seed(config.seed, restart));
    std::vector<Replica> replicas(levels * per_level);
    for (Replica& r : replicas) {
      r.randomize(q, rng);
      best.offer(r);
    }
    // slot[l * per_level + r] is the replica currently at temperature l.
    std::vector<std::size_t> slot(replicas.size());
    for (std::size_t i = 0; i < slot.size(); ++i) slot[i] = i;

    for (std::size_t sweep = 0; sweep < config.num_sweeps; ++sweep) {
      for (std::size_t l = 0; l < levels; ++l) {
        for (std::size_t r = 0; r < per_level; ++r) {
          metropolis_sweep(q, replicas[slot[l * per_level + r]], betas[l], rng);
        }
      }
      for (std::size_t r = 0; r < per_level; ++r) {
        for (std::size_t l = 0; l + 1 < levels; ++l) {
          std::size_t& a = slot[l * per_level + r];
          std::size_t& b = slot[(l + 1) * per_level + r];
          const double p =
              swap_acceptance(betas[l], betas[l + 1], replicas[a].energy, replicas[b].energy);
          if (p >= 1.0 || rng.uniform() < p) std::swap(a, b);
        }
      }
      if (icm) {
        for (std::size_t l = levels / 2; l < levels; ++l) {
          for (std::size_t r = 0; r + 1 < per_level; r += 2) {
            Replica& ra = replicas[slot[l * per_level + r]];
            Replica& rb = replicas[slot[l * per_level + r + 1]];
            disagree.clear();
            for (std::size_t i = 0; i < ra.x.size(); ++i) {
              if (ra.x[i] != rb.x[i]) disagree.push_back(static_cast<std::uint32_t>(i));
            }
            if (disagree.empty()) continue;
            const std::size_t seed_var = disagree[rng.below(disagree.size())];
            exchange_cluster(q, ra.x, rb.x, seed_var);
            ra.reset(q);
            rb.reset(q);
            ++cluster_moves;
          }
        }
      }
      for (const Replica& r : replicas) best.offer(r);
      trace.push_back(best.energy);
    }
  }
  SolveReport report = finish(q, std::move(best), std::move(trace), config.seed, start);
  report.cluster_moves = cluster_moves;
  return report;
}

}  // namespace

std::size_t exchange_cluster(const QuboProblem& qubo, BitVector& a, BitVector& b,
                             std::size_t seed_var) {
  if (a.size() != qubo.num_vars() || b.size() != qubo.num_vars()) {
    throw InvalidArgument("exchange_cluster: replica size mismatch");
  }
  if (seed_var >= a.size()) throw InvalidArgument("exchange_cluster: seed variable out of range");
  if (a[seed_var] == b[seed_var]) return 0;
  std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(seed_var)};
  std::vector<std::uint32_t> cluster;
  std::vector<std::uint8_t> visited(a.size(), 0);
  visited[seed_var] = 1;
  while (!stack.empty()) {
    const std::uint32_t v = stack.back();
    stack.pop_back();
    cluster.push_back(v);
    for (std::uint32_t w : qubo.neighbours(v)) {
      if (!visited[w] && a[w] != b[w]) {
        visited[w] = 1;
        stack.push_back(w);
      }
    }
  }
  for (std::uint32_t v : cluster) std::swap(a[v], b[v]);
  return cluster.size();
}

SolveReport solve_exhaustive(const QuboProblem& qubo) {
  const auto start = Clock::now();
  const std::size_t n = qubo.num_vars();
  if (n > kExhaustiveMaxVars) {
    throw ProblemTooLarge("exhaustive solver: " + std::to_string(n) + " variables exceed the cap of " +
                          std::to_string(kExhaustiveMaxVars));
  }
  double scale = std::abs(qubo.offset());
  for (double v : qubo.linear()) scale += std::abs(v);
  for (const QuadTerm& t : qubo.quadratic()) scale += std::abs(t.value);
  const double tolerance = 1e-10 * scale;

  // Gray-code walk; candidates near the running minimum are re-evaluated
  // exactly so ties and rounding never decide the winner.
  Replica r;
  r.x.assign(n, 0);
  r.reset(qubo);
  std::uint64_t code = 0;
  std::uint64_t best_code = 0;
  double best_exact = r.energy;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(g));
    r.flip(qubo, bit, r.x[bit] ? -r.field[bit] : r.field[bit]);
    code ^= std::uint64_t{1} << bit;
    if ((g & 0xffff) == 0) r.energy = qubo_energy(qubo, r.x);
    if (r.energy <= best_exact + tolerance) {
      const double exact = qubo_energy(qubo, r.x);
      if (exact < best_exact || (exact == best_exact && code < best_code)) {
        best_exact = exact;
        best_code = code;
      }
    }
  }
  Best best;
  best.bits.resize(n);
  for (std::size_t i = 0; i < n; ++i) best.bits[i] = static_cast<std::uint8_t>((best_code >> i) & 1);
  best.energy = best_exact;
  return finish(qubo, std::move(best), {best_exact}, 0, start);
}

SolveReport solve_sa(const QuboProblem& qubo, const SolverConfig& config) {
  const auto start = Clock::now();
  config.validate();
  const std::vector<double> ladder =
      config.temperature_ladder.empty() ? default_ladder() : config.temperature_ladder;
  const std::vector<double> schedule =
      geometric_ladder(ladder.front(), ladder.back(), config.num_sweeps);

  Best best;
  std::vector<double> trace;
  trace.reserve(config.num_restarts * config.num_sweeps);
  for (std::size_t restart = 0; restart < config.num_restarts; ++restart) {
    Rng rng(derive_seed(config.seed, restart));
    Replica r;
    r.randomize(qubo, rng);
    best.offer(r);
    for (double beta : schedule) {
      metropolis_sweep(qubo, r, beta, rng);
      best.offer(r);
      trace.push_back(best.energy);
    }
  }
  return finish(qubo, std::move(best), std::move(trace), config.seed, start);
}

SolveReport solve_pt(const QuboProblem& qubo, const SolverConfig& config) {
  return run_tempering(qubo, config, false);
}

SolveReport solve_pticm(const QuboProblem& qubo, const SolverConfig& config) {
  return run_tempering(qubo, config, config.icm_enabled);
}

namespace {

class ExhaustiveSolver final : public Solver {
 public:
  std::string_view name() const override { return "exhaustive"; }
  SolveReport solve(const QuboProblem& q, const SolverConfig&) const override {
    return solve_exhaustive(q);
  }
};

class AnnealingSolver final : public Solver {
 public:
  std::string_view name() const override { return "sa"; }
  SolveReport solve(const QuboProblem& q, const SolverConfig& c) const override {
    return solve_sa(q, c);
  }
};

class TemperingSolver final : public Solver {
 public:
  std::string_view name() const override { return "pt"; }
  SolveReport solve(const QuboProblem& q, const SolverConfig& c) const override {
    return solve_pt(q, c);
  }
};

class PticmSolver final : public Solver {
 public:
  std::string_view name() const override { return "pticm"; }
  SolveReport solve(const QuboProblem& q, const SolverConfig& c) const override {
    return solve_pticm(q, c);
  }
};

}  // namespace

SolverKind parse_solver_kind(std::string_view name) {
  if (name == "exhaustive") return SolverKind::Exhaustive;
  if (name == "sa") return SolverKind::SimulatedAnnealing;
  if (name == "pt") return SolverKind::ParallelTempering;
  if (name == "pticm") return SolverKind::Pticm;
  throw InvalidArgument("unknown solver '" + std::string(name) + "'");
}

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Exhaustive: return "exhaustive";
    case SolverKind::SimulatedAnnealing: return "sa";
    case SolverKind::ParallelTempering: return "pt";
    case SolverKind::Pticm: return "pticm";
  }
  return "unknown";
}

std::unique_ptr<Solver> make_solver(SolverKind kind) {
  switch (kind) {
    case SolverKind::Exhaustive: return std::make_unique<ExhaustiveSolver>();
    case SolverKind::SimulatedAnnealing: return std::make_unique<AnnealingSolver>();
    case SolverKind::ParallelTempering: return std::make_unique<TemperingSolver>();
    case SolverKind::Pticm: return std::make_unique<PticmSolver>();
  }
  throw InvalidArgument("unknown solver kind");
}

std::unique_ptr<Solver> make_solver(std::string_view name) {
  return make_solver(parse_solver_kind(name));
}

}  // namespace qunwrap
