#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "qunwrap/errors.hpp"
#include "qunwrap/synth.hpp"

using namespace qunwrap;

TEST_SUITE("synth") {

TEST_CASE("plane ramp hook spans the full range") {
  SynthSpec spec;
  spec.width = 16;
  spec.height = 8;
  spec.perlin_octaves = 0;
  spec.max_ambiguity = 3;
  const PhaseGrid g = generate_truth(spec);
  CHECK(g.kind() == PhaseKind::Unwrapped);
  CHECK(g[0] == 0.0);
  CHECK(g[g.size() - 1] == doctest::Approx(6 * kPi));
  // Constant steps along a row.
  const double step = g[1] - g[0];
  for (std::size_t c = 1; c < 16; ++c) CHECK(g.at(3, c) - g.at(3, c - 1) == doctest::Approx(step));
}

TEST_CASE("perlin truth spans [0, 2piM] with sub-pi steps") {
  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
    SynthSpec spec;
    spec.seed = seed;
    const PhaseGrid g = generate_truth(spec);
    const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
    CHECK(*lo == 0.0);
    CHECK(*hi == doctest::Approx(8 * kPi).epsilon(1e-15));
    for (std::size_t r = 0; r < g.height(); ++r) {
      for (std::size_t c = 0; c < g.width(); ++c) {
        if (c + 1 < g.width()) REQUIRE(std::abs(g.at(r, c + 1) - g.at(r, c)) < kPi);
        if (r + 1 < g.height()) REQUIRE(std::abs(g.at(r + 1, c) - g.at(r, c)) < kPi);
      }
    }
  }
}

TEST_CASE("generation is deterministic per seed") {
  SynthSpec spec;
  spec.width = 40;
  spec.height = 30;
  spec.snr_db = 13.0;
  const Interferogram a = synthesize(spec);
  const Interferogram b = synthesize(spec);
  CHECK(a.truth == b.truth);
  CHECK(a.wrapped == b.wrapped);
  spec.seed = 2;
  CHECK(!(synthesize(spec).truth == a.truth));
}

TEST_CASE("steep requests fall back to lower frequencies or fail") {
  SynthSpec spec;
  spec.width = 32;
  spec.height = 32;
  spec.perlin_base_frequency = 16.0;
  CHECK_NOTHROW(generate_truth(spec));
  spec.width = 4;
  spec.height = 4;
  spec.max_ambiguity = 50;
  CHECK_THROWS_AS(generate_truth(spec), GenerationFailed);
}

TEST_CASE("spec validation") {
  SynthSpec spec;
  spec.max_ambiguity = 0;
  CHECK_THROWS_AS(generate_truth(spec), InvalidArgument);
  spec = {};
  spec.snr_db = std::nan("");
  CHECK_THROWS_AS(synthesize(spec), InvalidArgument);
}

TEST_CASE("wrap_grid examples") {
  const PhaseGrid truth(2, 1, {0.5, 0.5 + 4 * kPi}, PhaseKind::Unwrapped);
  const WrappedTruth w = wrap_grid(truth);
  CHECK(w.wrapped[0] == 0.5);
  CHECK(w.wrapped[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(w.labels[0] == 0);
  CHECK(w.labels[1] == 2);
  CHECK(w.labels.domain_size() == 3);
  CHECK_THROWS_AS(wrap_grid(w.wrapped), InvalidArgument);
  const PhaseGrid negative(1, 2, {0.0, -4.0}, PhaseKind::Unwrapped);
  CHECK_THROWS_AS(wrap_grid(negative), InvalidArgument);
}

TEST_CASE("labels reconstruct the truth and cover 0..M") {
  SynthSpec spec;
  spec.seed = 7;
  const Interferogram ifg = synthesize(spec);
  const PhaseGrid rebuilt = apply_labels(ifg.wrapped, ifg.labels);
  std::set<std::int32_t> seen;
  for (std::size_t i = 0; i < rebuilt.size(); ++i) {
    REQUIRE(std::abs(rebuilt[i] - ifg.truth[i]) < 1e-9);
    seen.insert(ifg.labels[i]);
  }
  CHECK(seen == std::set<std::int32_t>{0, 1, 2, 3, 4});
  CHECK(ifg.labels.domain_size() == 5);
}

TEST_CASE("vanishing noise leaves the phase alone") {
  SynthSpec spec;
  spec.width = 30;
  spec.height = 30;
  const Interferogram clean = synthesize(spec);
  const PhaseGrid noisy = add_noise(clean.wrapped, 200.0, 5);
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    double d = std::abs(noisy[i] - clean.wrapped[i]);
    d = std::min(d, kTwoPi - d);
    REQUIRE(d < 1e-6);
  }
}

TEST_CASE("measured SNR is within half a decibel") {
  for (double target : {15.0, 13.0, 8.1}) {
    const auto n = complex_noise(400 * 400, target, 123);
    double power = 0.0;
    for (const auto& z : n) power += std::norm(z);
    power /= static_cast<double>(n.size());
    const double measured = 10.0 * std::log10(1.0 / power);
    CHECK(std::abs(measured - target) < 0.5);
  }
}

TEST_CASE("noisy output stays wrapped") {
  SynthSpec spec;
  spec.width = 50;
  spec.height = 50;
  spec.snr_db = 0.0;
  const Interferogram ifg = synthesize(spec);
  for (double v : ifg.wrapped.values()) {
    REQUIRE(v > -kPi);
    REQUIRE(v <= kPi);
  }
  CHECK_THROWS_AS(add_noise(ifg.truth, 10.0, 1), InvalidArgument);
}

}  // TEST_SUITE
