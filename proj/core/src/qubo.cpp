#include "qunwrap/qubo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "qunwrap/errors.hpp"

namespace qunwrap {

double QuboProblem::max_abs_coefficient() const noexcept {
  double m = 0.0;
  for (double v : linear_) m = std::max(m, std::abs(v));
  for (const QuadTerm& q : quadratic_) m = std::max(m, std::abs(q.value));
  return m;
}

void QuboBuilder::add_linear(std::size_t i, double v) {
  if (i >= linear_.size()) throw InvalidArgument("QuboBuilder: variable index out of range");
  linear_[i] += v;
}

void QuboBuilder::add_quadratic(std::size_t i, std::size_t j, double v) {
  if (i >= linear_.size() || j >= linear_.size()) {
    throw InvalidArgument("QuboBuilder: variable index out of range");
  }
  if (i == j) {
    linear_[i] += v;
    return;
  }
  if (i > j) std::swap(i, j);
  quadratic_[{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)}] += v;
}

QuboProblem QuboBuilder::build() const {
  QuboProblem q;
  q.offset_ = offset_;
  q.linear_ = linear_;
  const std::size_t n = linear_.size();
  std::vector<std::size_t> degree(n, 0);
  for (const auto& [key, v] : quadratic_) {
    if (v == 0.0) continue;
    q.quadratic_.push_back(QuadTerm{key.first, key.second, v});
    ++degree[key.first];
    ++degree[key.second];
  }
  q.adj_start_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) q.adj_start_[i + 1] = q.adj_start_[i] + degree[i];
  q.adj_index_.resize(q.adj_start_[n]);
  q.adj_value_.resize(q.adj_start_[n]);
  std::vector<std::size_t> fill(q.adj_start_.begin(), q.adj_start_.end() - 1);
  for (const QuadTerm& t : q.quadratic_) {
    q.adj_index_[fill[t.i]] = t.j;
    q.adj_value_[fill[t.i]++] = t.value;
    q.adj_index_[fill[t.j]] = t.i;
    q.adj_value_[fill[t.j]++] = t.value;
  }
  return q;
}

BinaryEncoding::BinaryEncoding(std::int32_t domain_size) : domain_size_(domain_size) {
  if (domain_size < 2) throw InvalidArgument("BinaryEncoding: domain size must be at least 2");
  width_ = static_cast<std::size_t>(std::bit_width(static_cast<std::uint32_t>(domain_size - 1)));
}

BitVector encode_label(std::int32_t k, const BinaryEncoding& enc) {
  if (k < 0 || k >= enc.domain_size()) {
    throw InvalidArgument("encode_label: label " + std::to_string(k) + " outside [0, " +
                          std::to_string(enc.domain_size() - 1) + "]");
  }
  BitVector bits(enc.width());
  for (std::size_t b = 0; b < bits.size(); ++b) bits[b] = static_cast<std::uint8_t>((k >> b) & 1);
  return bits;
}

BitVector encode_labels(std::span<const std::int32_t> labels, const BinaryEncoding& enc,
                        const VarLayout& layout) {
  if (labels.size() != layout.num_pixels()) throw InvalidArgument("encode_labels: size mismatch");
  BitVector x(layout.num_vars());
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const BitVector bits = encode_label(labels[p], enc);
    for (std::size_t b = 0; b < bits.size(); ++b) x[layout.var(p, b)] = bits[b];
  }
  return x;
}

void add_pairwise_square(QuboBuilder& builder, const VarLayout& layout, const BinaryEncoding& enc,
                         std::size_t s, std::size_t t, std::int64_t a, double weight) {
  if (weight == 0.0) return;
  const std::size_t d = enc.width();
  for (std::size_t i = 0; i < d; ++i) {
    const std::int64_t bi = enc.bit_weight(i);
    builder.add_linear(layout.var(t, i), weight * static_cast<double>(bi * bi - 2 * a * bi));
    builder.add_linear(layout.var(s, i), weight * static_cast<double>(bi * bi + 2 * a * bi));
    for (std::size_t j = 0; j < d; ++j) {
      const double cross = static_cast<double>(2 * bi * enc.bit_weight(j));
      if (j > i) {
        builder.add_quadratic(layout.var(t, i), layout.var(t, j), weight * cross);
        builder.add_quadratic(layout.var(s, i), layout.var(s, j), weight * cross);
      }
      builder.add_quadratic(layout.var(t, i), layout.var(s, j), -weight * cross);
    }
  }
  builder.add_offset(weight * static_cast<double>(a * a));
}

void add_unary_square(QuboBuilder& builder, const VarLayout& layout, const BinaryEncoding& enc,
                      std::size_t s, std::int64_t bias, double omega) {
  if (omega == 0.0) return;
  const std::size_t d = enc.width();
  for (std::size_t i = 0; i < d; ++i) {
    const std::int64_t bi = enc.bit_weight(i);
    builder.add_linear(layout.var(s, i), omega * static_cast<double>(bi * bi - 2 * bias * bi));
    for (std::size_t j = i + 1; j < d; ++j) {
      builder.add_quadratic(layout.var(s, i), layout.var(s, j),
                            omega * static_cast<double>(2 * bi * enc.bit_weight(j)));
    }
  }
  builder.add_offset(omega * static_cast<double>(bias * bias));
}

EncodedProblem build_qubo(const UnwrapProblem& problem) {
  problem.validate();
  BinaryEncoding enc(problem.domain_size);
  VarLayout layout(problem.num_pixels(), enc.width());
  QuboBuilder builder(layout.num_vars());
  for (const Edge& e : problem.edges) {
    add_pairwise_square(builder, layout, enc, e.s, e.t, e.a, e.weight);
  }
  for (std::size_t s = 0; s < problem.unary.size(); ++s) {
    add_unary_square(builder, layout, enc, s, problem.unary[s].bias, problem.unary[s].omega);
  }
  return EncodedProblem{builder.build(), layout, enc};
}

double qubo_energy(const QuboProblem& qubo, std::span<const std::uint8_t> x) {
  if (x.size() != qubo.num_vars()) {
    throw InvalidArgument("qubo_energy: assignment has " + std::to_string(x.size()) +
                          " bits, problem has " + std::to_string(qubo.num_vars()));
  }
  double e = qubo.offset();
  const auto lin = qubo.linear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) e += lin[i];
  }
  for (const QuadTerm& q : qubo.quadratic()) {
    if (x[q.i] && x[q.j]) e += q.value;
  }
  return e;
}

DecodeResult decode_labels(std::span<const std::uint8_t> x, const VarLayout& layout,
                           const BinaryEncoding& enc) {
  if (x.size() != layout.num_vars()) throw InvalidArgument("decode: assignment size mismatch");
  DecodeResult r;
  r.labels.resize(layout.num_pixels());
  for (std::size_t p = 0; p < layout.num_pixels(); ++p) {
    std::int64_t k = 0;
    for (std::size_t b = 0; b < layout.bits_per_pixel(); ++b) {
      if (x[layout.var(p, b)]) k += enc.bit_weight(b);
    }
    if (k > enc.domain_size() - 1) {
      k = enc.domain_size() - 1;
      ++r.clamped;
    }
    r.labels[p] = static_cast<std::int32_t>(k);
  }
  return r;
}

DecodedGrid decode_solution(std::span<const std::uint8_t> x, const VarLayout& layout,
                            const BinaryEncoding& enc, std::size_t width, std::size_t height) {
  DecodeResult r = decode_labels(x, layout, enc);
  return DecodedGrid{LabelGrid(width, height, std::move(r.labels), enc.domain_size()), r.clamped};
}

void write_qubo_text(std::ostream& out, const QuboProblem& qubo) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "offset " << qubo.offset() << '\n';
  const auto lin = qubo.linear();
  for (std::size_t i = 0; i < lin.size(); ++i) out << "lin " << i << ' ' << lin[i] << '\n';
  for (const QuadTerm& q : qubo.quadratic()) {
    out << "quad " << q.i << ' ' << q.j << ' ' << q.value << '\n';
  }
  out.precision(old_precision);
}

namespace {
constexpr std::size_t kMaxTextVars = std::size_t{1} << 26;
}  // namespace

QuboProblem read_qubo_text(std::istream& in) {
  std::string line;
  std::uint64_t line_no = 0;
  double offset = 0.0;
  std::vector<std::pair<std::size_t, double>> lin;
  std::vector<QuadTerm> quad;
  std::size_t num_vars = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    bool ok = false;
    if (tag == "offset") {
      ok = static_cast<bool>(fields >> offset);
    } else if (tag == "lin") {
      std::size_t i;
      double v;
      ok = static_cast<bool>(fields >> i >> v);
      if (ok) {
        lin.emplace_back(i, v);
        num_vars = std::max(num_vars, i + 1);
      }
    } else if (tag == "quad") {
      std::uint32_t i, j;
      double v;
      ok = static_cast<bool>(fields >> i >> j >> v) && i != j;
      if (ok) {
        quad.push_back(QuadTerm{i, j, v});
        num_vars = std::max<std::size_t>(num_vars, std::max(i, j) + std::size_t{1});
      }
    }
    std::string rest;
    if (!ok || (fields >> rest)) throw FormatError("qubo text: malformed line '" + line + "'", line_no);
    if (num_vars > kMaxTextVars) throw FormatError("qubo text: variable index too large", line_no);
  }
  QuboBuilder builder(num_vars);
  builder.add_offset(offset);
  for (const auto& [i, v] : lin) builder.add_linear(i, v);
  for (const QuadTerm& q : quad) builder.add_quadratic(q.i, q.j, q.value);
  return builder.build();
}

}  // namespace qunwrap
