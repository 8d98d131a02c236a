#include "qunwrap/phase.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <string>
#include <utility>

#include "qunwrap/errors.hpp"

namespace qunwrap {

PhaseGrid::PhaseGrid(std::size_t width, std::size_t height, std::vector<double> values,
                     PhaseKind kind)
    : width_(width), height_(height), values_(std::move(values)), kind_(kind) {
  if (values_.size() != width_ * height_) {
    throw InvalidArgument("PhaseGrid: " + std::to_string(values_.size()) + " values for a " +
                          std::to_string(width_) + "x" + std::to_string(height_) + " grid");
  }
  if (kind_ == PhaseKind::Wrapped) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double v = values_[i];
      if (!(v > -kPi && v <= kPi)) {
        throw InvalidArgument("PhaseGrid: wrapped value " + std::to_string(v) + " at index " +
                              std::to_string(i) + " outside (-pi, pi]");
      }
    }
  }
}

LabelGrid::LabelGrid(std::size_t width, std::size_t height, std::vector<std::int32_t> labels,
                     std::int32_t domain_size)
    : width_(width), height_(height), labels_(std::move(labels)), domain_size_(domain_size) {
  if (domain_size_ < 1) {
    throw InvalidArgument("LabelGrid: domain size must be positive");
  }
  if (labels_.size() != width_ * height_) {
    throw InvalidArgument("LabelGrid: " + std::to_string(labels_.size()) + " labels for a " +
                          std::to_string(width_) + "x" + std::to_string(height_) + " grid");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= domain_size_) {
      throw InvalidArgument("LabelGrid: label " + std::to_string(labels_[i]) + " at index " +
                            std::to_string(i) + " outside [0, " +
                            std::to_string(domain_size_ - 1) + "]");
    }
  }
}

LabelGrid::LabelGrid(std::size_t width, std::size_t height, std::int32_t domain_size)
    : LabelGrid(width, height, std::vector<std::int32_t>(width * height, 0), domain_size) {}

void UnwrapProblem::validate() const {
  const std::size_t n = num_pixels();
  if (domain_size < 1) throw InvalidArgument("UnwrapProblem: domain size must be positive");
  if (unary.size() != n) throw InvalidArgument("UnwrapProblem: unary table size mismatch");
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const Edge& e : edges) {
    if (e.s >= n || e.t >= n) throw InvalidArgument("UnwrapProblem: edge endpoint out of range");
    const std::size_t rs = e.s / width, cs = e.s % width;
    const std::size_t rt = e.t / width, ct = e.t % width;
    const std::size_t dr = rs > rt ? rs - rt : rt - rs;
    const std::size_t dc = cs > ct ? cs - ct : ct - cs;
    if (dr + dc != 1) throw InvalidArgument("UnwrapProblem: edge joins non-adjacent pixels");
    if (!(e.weight >= 0.0)) throw InvalidArgument("UnwrapProblem: negative edge weight");
    if (!seen.emplace(std::min(e.s, e.t), std::max(e.s, e.t)).second) {
      throw InvalidArgument("UnwrapProblem: duplicate edge");
    }
  }
  for (const Unary& u : unary) {
    if (!(u.omega >= 0.0)) throw InvalidArgument("UnwrapProblem: negative unary weight");
  }
}

double wrap(double theta) {
  if (!std::isfinite(theta)) throw InvalidArgument("wrap: non-finite angle");
  double r = theta - kTwoPi * std::ceil((theta - kPi) / kTwoPi);
  // The division can land one turn off near the boundaries.
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

double edge_constant_quotient(double phi_i, double phi_j) {
  const double d = phi_i - phi_j;
  return (wrap(d) - d) / kTwoPi;
}

std::int32_t edge_constant(double phi_i, double phi_j) {
  const double q = edge_constant_quotient(phi_i, phi_j);
  const double k = std::round(q);
  // Two wrapped values differ by less than 2pi, so only -1, 0, 1 can occur.
  if (std::abs(q - k) >= 1e-6 || std::abs(k) > 1.0) {
    throw InternalConsistencyError("edge_constant: quotient " + std::to_string(q) +
                                   " is not in {-1, 0, 1}; inputs were not wrapped phases");
  }
  return static_cast<std::int32_t>(k);
}

UnwrapProblem build_problem(const PhaseGrid& wrapped, const WeightPolicy& weights,
                            std::int32_t domain_size) {
  if (!wrapped.wrapped()) throw InvalidArgument("build_problem: grid is not wrapped");
  if (domain_size < 2) throw InvalidArgument("build_problem: domain size must be at least 2");
  if (wrapped.size() < 2) throw InvalidArgument("build_problem: grid smaller than 1x2");
  if (weights.edge_weight < 0.0 || weights.unary_weight < 0.0) {
    throw InvalidArgument("build_problem: negative weight");
  }

  UnwrapProblem p;
  p.width = wrapped.width();
  p.height = wrapped.height();
  p.domain_size = domain_size;
  p.unary.assign(p.num_pixels(), Unary{weights.unary_weight, weights.unary_bias});
  p.edges.reserve(2 * p.num_pixels());
  const auto add = [&](std::size_t s, std::size_t t) {
    p.edges.push_back(Edge{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(t),
                           edge_constant(wrapped[t], wrapped[s]), weights.edge_weight});
  };
  for (std::size_t r = 0; r < p.height; ++r) {
    for (std::size_t c = 0; c < p.width; ++c) {
      const std::size_t s = r * p.width + c;
      if (c + 1 < p.width) add(s, s + 1);
      if (r + 1 < p.height) add(s, s + p.width);
    }
  }
  return p;
}

namespace {

void check_shape(const UnwrapProblem& problem, std::size_t label_count) {
  if (label_count != problem.num_pixels()) {
    throw InvalidArgument("energy: " + std::to_string(label_count) + " labels for " +
                          std::to_string(problem.num_pixels()) + " pixels");
  }
}

template <typename Cost>
EnergyBreakdown evaluate(const UnwrapProblem& problem, std::span<const std::int32_t> k,
                         Cost cost) {
  check_shape(problem, k.size());
  EnergyBreakdown e;
  for (const Edge& edge : problem.edges) {
    const double r = static_cast<double>(k[edge.t]) - k[edge.s] - edge.a;
    e.pairwise += edge.weight * cost(r);
  }
  for (std::size_t s = 0; s < problem.unary.size(); ++s) {
    const double r = static_cast<double>(k[s]) - problem.unary[s].bias;
    e.unary += problem.unary[s].omega * cost(r);
  }
  e.total = e.pairwise + e.unary;
  return e;
}

void check_grid(const UnwrapProblem& problem, const LabelGrid& labels) {
  if (labels.width() != problem.width || labels.height() != problem.height) {
    throw InvalidArgument("energy: label grid shape does not match problem");
  }
}

}  // namespace

EnergyBreakdown energy_l2(const UnwrapProblem& problem, std::span<const std::int32_t> labels) {
  return evaluate(problem, labels, [](double r) { return r * r; });
}

EnergyBreakdown energy_l2(const UnwrapProblem& problem, const LabelGrid& labels) {
  check_grid(problem, labels);
  return energy_l2(problem, labels.labels());
}

EnergyBreakdown energy_l1(const UnwrapProblem& problem, const LabelGrid& labels) {
  check_grid(problem, labels);
  return evaluate(problem, labels.labels(), [](double r) { return std::abs(r); });
}

PhaseGrid apply_labels(const PhaseGrid& wrapped, const LabelGrid& labels) {
  if (!wrapped.wrapped()) throw InvalidArgument("apply_labels: grid is not wrapped");
  if (wrapped.width() != labels.width() || wrapped.height() != labels.height()) {
    throw InvalidArgument("apply_labels: shape mismatch");
  }
  std::vector<double> out(wrapped.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = wrapped[i] + kTwoPi * labels[i];
  return PhaseGrid(wrapped.width(), wrapped.height(), std::move(out), PhaseKind::Unwrapped);
}

}  // namespace qunwrap
