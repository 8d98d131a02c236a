#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "qunwrap/phase.hpp"

namespace qunwrap {

using BitVector = std::vector<std::uint8_t>;

struct QuadTerm {
  std::uint32_t i = 0;
  std::uint32_t j = 0;  // i < j
  double value = 0.0;

  friend bool operator==(const QuadTerm&, const QuadTerm&) = default;
};

/// Immutable sparse QUBO: offset + sum_i linear_i x_i + sum_{i<j} b_ij x_i x_j.
///
/// Besides the term list it keeps a symmetric CSR adjacency (each pair stored
/// in both rows) so solvers can compute single-flip deltas in O(degree).
class QuboProblem {
 public:
  QuboProblem() = default;

  std::size_t num_vars() const noexcept { return linear_.size(); }
  double offset() const noexcept { return offset_; }
  std::span<const double> linear() const noexcept { return linear_; }
  std::span<const QuadTerm> quadratic() const noexcept { return quadratic_; }

  std::span<const std::uint32_t> neighbours(std::size_t var) const noexcept {
    return {adj_index_.data() + adj_start_[var], adj_index_.data() + adj_start_[var + 1]};
  }
  std::span<const double> couplings(std::size_t var) const noexcept {
    return {adj_value_.data() + adj_start_[var], adj_value_.data() + adj_start_[var + 1]};
  }

  /// Largest absolute linear or quadratic coefficient (0 for an empty form).
  double max_abs_coefficient() const noexcept;

  friend bool operator==(const QuboProblem& a, const QuboProblem& b) {
    return a.offset_ == b.offset_ && a.linear_ == b.linear_ && a.quadratic_ == b.quadratic_;
  }

 private:
  friend class QuboBuilder;

  double offset_ = 0.0;
  std::vector<double> linear_;
  std::vector<QuadTerm> quadratic_;
  std::vector<std::size_t> adj_start_{0};
  std::vector<std::uint32_t> adj_index_;
  std::vector<double> adj_value_;
};

/// Accumulates coefficients; repeated (i, j) pairs are summed, diagonal
/// entries fold into the linear part (x*x == x), zeros are dropped on build.
class QuboBuilder {
 public:
  explicit QuboBuilder(std::size_t num_vars) : linear_(num_vars, 0.0) {}

  void add_offset(double v) { offset_ += v; }
  void add_linear(std::size_t i, double v);
  void add_quadratic(std::size_t i, std::size_t j, double v);

  QuboProblem build() const;

 private:
  double offset_ = 0.0;
  std::vector<double> linear_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> quadratic_;
};

/// Binary encoding of labels 0..D-1 with weights 1, 2, 4, ...
class BinaryEncoding {
 public:
  explicit BinaryEncoding(std::int32_t domain_size);

  std::int32_t domain_size() const noexcept { return domain_size_; }
  std::size_t width() const noexcept { return width_; }
  std::int64_t bit_weight(std::size_t bit) const noexcept { return std::int64_t{1} << bit; }

 private:
  std::int32_t domain_size_;
  std::size_t width_;
};

/// Variable index = pixel * bits_per_pixel + bit.
class VarLayout {
 public:
  VarLayout(std::size_t num_pixels, std::size_t bits_per_pixel)
      : num_pixels_(num_pixels), bits_(bits_per_pixel) {}

  std::size_t num_pixels() const noexcept { return num_pixels_; }
  std::size_t bits_per_pixel() const noexcept { return bits_; }
  std::size_t num_vars() const noexcept { return num_pixels_ * bits_; }

  std::size_t var(std::size_t pixel, std::size_t bit) const noexcept { return pixel * bits_ + bit; }
  std::size_t pixel_of(std::size_t var) const noexcept { return var / bits_; }
  std::size_t bit_of(std::size_t var) const noexcept { return var % bits_; }

 private:
  std::size_t num_pixels_;
  std::size_t bits_;
};

BitVector encode_label(std::int32_t k, const BinaryEncoding& enc);

/// Bits of every pixel laid out per `layout`.
BitVector encode_labels(std::span<const std::int32_t> labels, const BinaryEncoding& enc,
                        const VarLayout& layout);

struct EncodedProblem {
  QuboProblem qubo;
  VarLayout layout;
  BinaryEncoding encoding;
};

/// Expands the L2 energy of `problem` into a QUBO whose energy equals
/// energy_l2 on every encoded labelling.
EncodedProblem build_qubo(const UnwrapProblem& problem);

/// Appends W * (k_t - k_s - a)^2 over the encoded labels of pixels s and t.
void add_pairwise_square(QuboBuilder& builder, const VarLayout& layout, const BinaryEncoding& enc,
                         std::size_t s, std::size_t t, std::int64_t a, double weight);

/// Appends omega * (k_s - bias)^2.
void add_unary_square(QuboBuilder& builder, const VarLayout& layout, const BinaryEncoding& enc,
                      std::size_t s, std::int64_t bias, double omega);

double qubo_energy(const QuboProblem& qubo, std::span<const std::uint8_t> x);

struct DecodeResult {
  std::vector<std::int32_t> labels;
  std::size_t clamped = 0;
};

/// Per-pixel labels; codewords above D-1 are clamped and counted.
DecodeResult decode_labels(std::span<const std::uint8_t> x, const VarLayout& layout,
                           const BinaryEncoding& enc);

struct DecodedGrid {
  LabelGrid labels;
  std::size_t clamped = 0;
};

DecodedGrid decode_solution(std::span<const std::uint8_t> x, const VarLayout& layout,
                            const BinaryEncoding& enc, std::size_t width, std::size_t height);

/// Line format: `offset <v>`, then `lin <i> <v>` and `quad <i> <j> <v>`.
void write_qubo_text(std::ostream& out, const QuboProblem& qubo);
QuboProblem read_qubo_text(std::istream& in);

}  // namespace qunwrap
