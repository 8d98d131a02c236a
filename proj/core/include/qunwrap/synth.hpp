#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qunwrap/phase.hpp"

namespace qunwrap {

struct SynthSpec {
  std::size_t width = 100;
  std::size_t height = 100;
  std::uint64_t seed = 1;
  /// 0 gives a plane ramp instead of Perlin noise.
  std::size_t perlin_octaves = 4;
  /// Cycles of the first octave across one image side.
  double perlin_base_frequency = 2.0;
  std::int32_t max_ambiguity = 4;
  std::optional<double> snr_db;

  void validate() const;
};

/// Seeded 2-D gradient noise with a 256-entry permutation table and quintic
/// fade. Values are roughly in [-1, 1].
class PerlinNoise {
 public:
  explicit PerlinNoise(std::uint64_t seed);
  double operator()(double x, double y) const;

 private:
  std::vector<std::uint8_t> perm_;  // 512 entries, table repeated twice
};

/// Smooth unwrapped surface spanning exactly [0, 2*pi*M] whose four-neighbour
/// differences are all below pi. Halves the base frequency (at most 10 times)
/// until that holds, otherwise throws GenerationFailed.
PhaseGrid generate_truth(const SynthSpec& spec);

struct WrappedTruth {
  PhaseGrid wrapped;
  LabelGrid labels;
};

/// Splits an unwrapped grid into wrapped phase and integer labels. With
/// domain_size == 0 the label domain is max(label) + 1 (at least 2).
WrappedTruth wrap_grid(const PhaseGrid& truth, std::int32_t domain_size = 0);

/// Complex circular Gaussian samples, per-component variance
/// 10^(-snr_db/10) / 2, so a unit phasor over this noise has the given SNR.
std::vector<std::complex<double>> complex_noise(std::size_t count, double snr_db,
                                                std::uint64_t seed);

/// arg(e^{i phi} + n) per pixel.
PhaseGrid add_noise(const PhaseGrid& wrapped, double snr_db, std::uint64_t seed);

struct Interferogram {
  PhaseGrid truth;
  PhaseGrid wrapped;  // noisy when spec.snr_db is set
  LabelGrid labels;   // domain max_ambiguity + 1
};

Interferogram synthesize(const SynthSpec& spec);

}  // namespace qunwrap
