#pragma once

#include <cstdint>
#include <vector>

#include "qunwrap/phase.hpp"
#include "qunwrap/qubo.hpp"
#include "qunwrap/rng.hpp"

namespace qunwrap::test {

// Multiples of 1/64 keep every energy an exact binary fraction, so sums
// agree bit for bit whatever order they are accumulated in.
inline double dyadic(Rng& rng, int lo_64ths, int hi_64ths) {
  const auto span = static_cast<std::uint64_t>(hi_64ths - lo_64ths + 1);
  return static_cast<double>(lo_64ths + static_cast<int>(rng.below(span))) / 64.0;
}

inline PhaseGrid random_wrapped(Rng& rng, std::size_t w, std::size_t h) {
  std::vector<double> v(w * h);
  for (double& x : v) x = wrap((rng.uniform() * 2.0 - 1.0) * kPi);
  return PhaseGrid(w, h, std::move(v), PhaseKind::Wrapped);
}

// Random four-neighbour problem with dyadic weights and integer edge
// constants in [-2, 2].
inline UnwrapProblem random_problem(Rng& rng, std::size_t w, std::size_t h, std::int32_t domain) {
  UnwrapProblem p;
  p.width = w;
  p.height = h;
  p.domain_size = domain;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const auto s = static_cast<std::uint32_t>(r * w + c);
      const auto a = [&] { return static_cast<std::int32_t>(rng.below(5)) - 2; };
      if (c + 1 < w) p.edges.push_back(Edge{s, s + 1, a(), dyadic(rng, 16, 128)});
      if (r + 1 < h) {
        p.edges.push_back(Edge{s, static_cast<std::uint32_t>(s + w), a(), dyadic(rng, 16, 128)});
      }
    }
  }
  p.unary.resize(w * h);
  for (Unary& u : p.unary) {
    u.omega = dyadic(rng, 0, 4);
    u.bias = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(domain)));
  }
  return p;
}

inline std::vector<std::int32_t> random_labels(Rng& rng, std::size_t n, std::int32_t domain) {
  std::vector<std::int32_t> k(n);
  for (auto& v : k) v = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(domain)));
  return k;
}

// Random QUBO on n variables with coefficients uniform in [-2, 2].
inline QuboProblem random_qubo(Rng& rng, std::size_t n, double density = 1.0) {
  QuboBuilder b(n);
  for (std::size_t i = 0; i < n; ++i) b.add_linear(i, rng.uniform() * 4.0 - 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < density) b.add_quadratic(i, j, rng.uniform() * 4.0 - 2.0);
    }
  }
  return b.build();
}

// Plain nested-loop evaluation over a dense upper-triangular matrix.
inline double dense_energy(const QuboProblem& q, const std::vector<std::uint8_t>& x) {
  const std::size_t n = q.num_vars();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = q.linear()[i];
  for (const QuadTerm& t : q.quadratic()) m[t.i * n + t.j] += t.value;
  double e = q.offset();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) e += m[i * n + j] * x[i] * x[j];
  }
  return e;
}

// Labels of every assignment over `n` pixels with `domain` values, odometer order.
inline bool next_assignment(std::vector<std::int32_t>& k, std::int32_t domain) {
  for (auto& v : k) {
    if (++v < domain) return true;
    v = 0;
  }
  return false;
}

}  // namespace qunwrap::test
