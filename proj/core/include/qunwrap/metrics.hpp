#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qunwrap/phase.hpp"

namespace qunwrap {

struct MatchReport {
  double raw_match_pct = 0.0;
  double shift_aligned_match_pct = 0.0;
  /// Constant c maximising matches of result + c against truth; smallest |c|
  /// wins, negative first on ties.
  std::int32_t best_shift = 0;
  std::size_t pixel_count = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  /// 1 where result != truth (unshifted).
  std::vector<std::uint8_t> mismatch_mask;
};

MatchReport match_labels(const LabelGrid& result, const LabelGrid& truth);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

Summary summarize(std::span<const double> values);

/// `key=value` lines.
std::string to_key_value(const MatchReport& report);
std::string to_json(const MatchReport& report);

}  // namespace qunwrap
