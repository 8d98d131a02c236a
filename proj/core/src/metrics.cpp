#include "qunwrap/metrics.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qunwrap/errors.hpp"

namespace qunwrap {

MatchReport match_labels(const LabelGrid& result, const LabelGrid& truth) {
  if (result.width() != truth.width() || result.height() != truth.height()) {
    throw InvalidArgument("match_labels: result is " + std::to_string(result.width()) + "x" +
                          std::to_string(result.height()) + ", truth is " +
                          std::to_string(truth.width()) + "x" + std::to_string(truth.height()));
  }
  MatchReport m;
  m.width = truth.width();
  m.height = truth.height();
  m.pixel_count = truth.size();
  m.mismatch_mask.resize(m.pixel_count);
  if (m.pixel_count == 0) return m;

  // Matches of result + c are the pixels with truth - result == c.
  std::map<std::int64_t, std::size_t> by_shift;
  std::size_t raw = 0;
  for (std::size_t i = 0; i < m.pixel_count; ++i) {
    const std::int64_t d = std::int64_t{truth[i]} - result[i];
    ++by_shift[d];
    if (d == 0) ++raw;
    m.mismatch_mask[i] = d != 0;
  }
  std::size_t best = 0;
  std::int64_t best_shift = 0;
  for (const auto& [c, count] : by_shift) {
    const bool closer = std::llabs(c) < std::llabs(best_shift);
    const bool tie_break = std::llabs(c) == std::llabs(best_shift) && c < best_shift;
    if (count > best || (count == best && (closer || tie_break))) {
      best = count;
      best_shift = c;
    }
  }
  const double n = static_cast<double>(m.pixel_count);
  m.raw_match_pct = 100.0 * static_cast<double>(raw) / n;
  m.shift_aligned_match_pct = 100.0 * static_cast<double>(best) / n;
  m.best_shift = static_cast<std::int32_t>(best_shift);
  return m;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("summarize: empty list");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  Summary s;
  s.mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / n);
  return s;
}

std::string to_key_value(const MatchReport& r) {
  std::ostringstream out;
  out.precision(10);
  out << "raw_match_pct=" << r.raw_match_pct << '\n'
      << "shift_aligned_match_pct=" << r.shift_aligned_match_pct << '\n'
      << "best_shift=" << r.best_shift << '\n'
      << "pixel_count=" << r.pixel_count << '\n'
      << "width=" << r.width << '\n'
      << "height=" << r.height << '\n';
  return out.str();
}

std::string to_json(const MatchReport& r) {
  nlohmann::ordered_json j;
  j["raw_match_pct"] = r.raw_match_pct;
  j["shift_aligned_match_pct"] = r.shift_aligned_match_pct;
  j["best_shift"] = r.best_shift;
  j["pixel_count"] = r.pixel_count;
  j["width"] = r.width;
  j["height"] = r.height;
  return j.dump(2) + "\n";
}

}  // namespace qunwrap
