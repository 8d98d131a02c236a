#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace qunwrap {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class PhaseKind : std::uint8_t { Wrapped = 0, Unwrapped = 1 };

/// Dense row-major grid of phases in radians. Wrapped grids hold values in
/// (-pi, pi]; the constructor rejects anything else.
class PhaseGrid {
 public:
  PhaseGrid() = default;
  PhaseGrid(std::size_t width, std::size_t height, std::vector<double> values, PhaseKind kind);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  PhaseKind kind() const noexcept { return kind_; }
  bool wrapped() const noexcept { return kind_ == PhaseKind::Wrapped; }

  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double at(std::size_t row, std::size_t col) const noexcept { return values_[row * width_ + col]; }

  friend bool operator==(const PhaseGrid&, const PhaseGrid&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> values_;
  PhaseKind kind_ = PhaseKind::Unwrapped;
};

/// Integer ambiguity labels, each in [0, domain_size - 1].
class LabelGrid {
 public:
  LabelGrid() = default;
  LabelGrid(std::size_t width, std::size_t height, std::vector<std::int32_t> labels,
            std::int32_t domain_size);
  /// All-zero labels.
  LabelGrid(std::size_t width, std::size_t height, std::int32_t domain_size);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::int32_t domain_size() const noexcept { return domain_size_; }

  std::span<const std::int32_t> labels() const noexcept { return labels_; }
  std::int32_t operator[](std::size_t i) const noexcept { return labels_[i]; }

  friend bool operator==(const LabelGrid&, const LabelGrid&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::int32_t> labels_;
  std::int32_t domain_size_ = 0;
};

/// Pairwise term W * (k_t - k_s - a)^2 (or |.| for L1).
struct Edge {
  std::uint32_t s = 0;
  std::uint32_t t = 0;
  std::int32_t a = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Unary term omega * (k_s - bias)^2.
struct Unary {
  double omega = 0.0;
  std::int32_t bias = 0;

  friend bool operator==(const Unary&, const Unary&) = default;
};

struct WeightPolicy {
  double edge_weight = 1.0;
  double unary_weight = 0.01;
  std::int32_t unary_bias = 0;
};

/// Integer-labelling problem on a four-neighbour pixel graph.
struct UnwrapProblem {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Edge> edges;
  std::vector<Unary> unary;
  std::int32_t domain_size = 4;

  std::size_t num_pixels() const noexcept { return width * height; }

  /// Throws InvalidArgument when the structural invariants do not hold.
  void validate() const;

  friend bool operator==(const UnwrapProblem&, const UnwrapProblem&) = default;
};

struct EnergyBreakdown {
  double pairwise = 0.0;
  double unary = 0.0;
  double total = 0.0;
};

/// Maps theta onto (-pi, pi]; odd multiples of pi map to +pi.
double wrap(double theta);

/// Required label difference k_i - k_j between two wrapped neighbours.
std::int32_t edge_constant(double phi_i, double phi_j);

/// The unrounded quotient (wrap(d) - d) / 2pi behind edge_constant.
double edge_constant_quotient(double phi_i, double phi_j);

/// Four-neighbour problem. Edges are enumerated per pixel in row-major order,
/// right neighbour first, then the one below; each edge (s, t) carries
/// a = edge_constant(phi_t, phi_s) so that noise-free truth satisfies
/// k_t - k_s == a.
UnwrapProblem build_problem(const PhaseGrid& wrapped, const WeightPolicy& weights = {},
                            std::int32_t domain_size = 4);

EnergyBreakdown energy_l2(const UnwrapProblem& problem, const LabelGrid& labels);
EnergyBreakdown energy_l1(const UnwrapProblem& problem, const LabelGrid& labels);

/// Same as energy_l2 on a raw label vector; labels may lie outside the domain.
EnergyBreakdown energy_l2(const UnwrapProblem& problem, std::span<const std::int32_t> labels);

PhaseGrid apply_labels(const PhaseGrid& wrapped, const LabelGrid& labels);

}  // namespace qunwrap
