#include "qunwrap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qunwrap/errors.hpp"
#include "qunwrap/rng.hpp"

namespace qunwrap {

void SynthSpec::validate() const {
  if (width < 1 || height < 1) throw InvalidArgument("SynthSpec: empty grid");
  if (width * height < 2) throw InvalidArgument("SynthSpec: grid needs at least two pixels");
  if (max_ambiguity < 1) throw InvalidArgument("SynthSpec: max ambiguity must be at least 1");
  if (!(perlin_base_frequency > 0.0) || !std::isfinite(perlin_base_frequency)) {
    throw InvalidArgument("SynthSpec: base frequency must be positive");
  }
  if (snr_db && !std::isfinite(*snr_db)) throw InvalidArgument("SynthSpec: SNR must be finite");
}

PerlinNoise::PerlinNoise(std::uint64_t seed) : perm_(512) {
  std::vector<std::uint8_t> table(256);
  std::iota(table.begin(), table.end(), std::uint8_t{0});
  Rng rng(seed);
  for (std::size_t i = table.size() - 1; i > 0; --i) {
    std::swap(table[i], table[rng.below(i + 1)]);
  }
  for (std::size_t i = 0; i < perm_.size(); ++i) perm_[i] = table[i & 255];
}

namespace {

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double lerp(double t, double a, double b) { return a + t * (b - a); }

double gradient(std::uint8_t hash, double x, double y) {
  switch (hash & 7) {
    case 0: return x + y;
    case 1: return -x + y;
    case 2: return x - y;
    case 3: return -x - y;
    case 4: return x;
    case 5: return -x;
    case 6: return y;
    default: return -y;
  }
}

}  // namespace

double PerlinNoise::operator()(double x, double y) const {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const auto xi = static_cast<std::size_t>(static_cast<std::int64_t>(fx) & 255);
  const auto yi = static_cast<std::size_t>(static_cast<std::int64_t>(fy) & 255);
  const double xf = x - fx;
  const double yf = y - fy;
  const double u = fade(xf);
  const double v = fade(yf);
  const std::size_t a = perm_[xi] + yi;
  const std::size_t b = perm_[xi + 1] + yi;
  const double x0 = lerp(u, gradient(perm_[a], xf, yf), gradient(perm_[b], xf - 1.0, yf));
  const double x1 =
      lerp(u, gradient(perm_[a + 1], xf, yf - 1.0), gradient(perm_[b + 1], xf - 1.0, yf - 1.0));
  return lerp(v, x0, x1);
}

namespace {

std::vector<double> raw_surface(const SynthSpec& spec, double base_frequency) {
  const std::size_t w = spec.width;
  const std::size_t h = spec.height;
  std::vector<double> raw(w * h, 0.0);
  if (spec.perlin_octaves == 0) {
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        raw[r * w + c] = static_cast<double>(c) / w + static_cast<double>(r) / h;
      }
    }
    return raw;
  }
  const PerlinNoise noise(spec.seed);
  Rng rng(derive_seed(spec.seed, 0x9e11));
  for (std::size_t o = 0; o < spec.perlin_octaves; ++o) {
    // Shift each octave off the integer lattice, where gradient noise is 0.
    const double ox = 256.0 * rng.uniform();
    const double oy = 256.0 * rng.uniform();
    const double freq = base_frequency * std::ldexp(1.0, static_cast<int>(o));
    const double amp = std::ldexp(1.0, -static_cast<int>(o));
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        raw[r * w + c] += amp * noise(ox + freq * static_cast<double>(c) / w,
                                      oy + freq * static_cast<double>(r) / h);
      }
    }
  }
  return raw;
}

bool is_smooth(const std::vector<double>& v, std::size_t w, std::size_t h) {
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t s = r * w + c;
      if (c + 1 < w && std::abs(v[s + 1] - v[s]) >= kPi) return false;
      if (r + 1 < h && std::abs(v[s + w] - v[s]) >= kPi) return false;
    }
  }
  return true;
}

}  // namespace

PhaseGrid generate_truth(const SynthSpec& spec) {
  spec.validate();
  const double span = kTwoPi * spec.max_ambiguity;
  double frequency = spec.perlin_base_frequency;
  for (int attempt = 0; attempt <= 10; ++attempt, frequency *= 0.5) {
    std::vector<double> v = raw_surface(spec, frequency);
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    if (!(range > 0.0)) continue;
    for (double& x : v) x = (x - lo) / range * span;
    if (is_smooth(v, spec.width, spec.height)) {
      return PhaseGrid(spec.width, spec.height, std::move(v), PhaseKind::Unwrapped);
    }
  }
  throw GenerationFailed("generate_truth: no surface with neighbour differences below pi after "
                         "10 frequency reductions");
}

WrappedTruth wrap_grid(const PhaseGrid& truth, std::int32_t domain_size) {
  if (truth.wrapped()) throw InvalidArgument("wrap_grid: input is already wrapped");
  std::vector<double> wrapped(truth.size());
  std::vector<std::int32_t> labels(truth.size());
  std::int32_t max_label = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    wrapped[i] = wrap(truth[i]);
    labels[i] = static_cast<std::int32_t>(std::lround((truth[i] - wrapped[i]) / kTwoPi));
    if (labels[i] < 0) {
      throw InvalidArgument("wrap_grid: truth value " + std::to_string(truth[i]) +
                            " has a negative label");
    }
    max_label = std::max(max_label, labels[i]);
  }
  if (domain_size == 0) domain_size = std::max(2, max_label + 1);
  return WrappedTruth{
      PhaseGrid(truth.width(), truth.height(), std::move(wrapped), PhaseKind::Wrapped),
      LabelGrid(truth.width(), truth.height(), std::move(labels), domain_size)};
}

std::vector<std::complex<double>> complex_noise(std::size_t count, double snr_db,
                                                std::uint64_t seed) {
  if (!std::isfinite(snr_db)) throw InvalidArgument("complex_noise: SNR must be finite");
  const double sigma = std::sqrt(std::pow(10.0, -snr_db / 10.0) / 2.0);
  Rng rng(seed);
  std::vector<std::complex<double>> out(count);
  for (auto& z : out) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = {sigma * re, sigma * im};
  }
  return out;
}

PhaseGrid add_noise(const PhaseGrid& wrapped, double snr_db, std::uint64_t seed) {
  if (!wrapped.wrapped()) throw InvalidArgument("add_noise: grid is not wrapped");
  const auto noise = complex_noise(wrapped.size(), snr_db, seed);
  std::vector<double> out(wrapped.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::complex<double> z = std::polar(1.0, wrapped[i]) + noise[i];
    // atan2 may return -pi exactly; wrap folds it onto +pi.
    out[i] = wrap(std::arg(z));
  }
  return PhaseGrid(wrapped.width(), wrapped.height(), std::move(out), PhaseKind::Wrapped);
}

Interferogram synthesize(const SynthSpec& spec) {
  PhaseGrid truth = generate_truth(spec);
  WrappedTruth wt = wrap_grid(truth, spec.max_ambiguity + 1);
  PhaseGrid wrapped = spec.snr_db ? add_noise(wt.wrapped, *spec.snr_db, derive_seed(spec.seed, 1))
                                  : std::move(wt.wrapped);
  return Interferogram{std::move(truth), std::move(wrapped), std::move(wt.labels)};
}

}  // namespace qunwrap
