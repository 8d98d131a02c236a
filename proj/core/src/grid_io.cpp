#include "qunwrap/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string_view>

#include "qunwrap/errors.hpp"

namespace qunwrap {

namespace {

constexpr std::size_t kPhaseHeader = 13;
constexpr std::size_t kLabelHeader = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[at + i]} << (8 * i);
  return v;
}

std::uint32_t checked_dim(std::size_t v) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("grid dimension does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

void check_magic(const std::vector<std::uint8_t>& in, std::string_view magic) {
  if (in.size() < magic.size()) {
    throw FormatError("file too short for the magic number", in.size());
  }
  for (std::size_t i = 0; i < magic.size(); ++i) {
    if (in[i] != static_cast<std::uint8_t>(magic[i])) {
      throw FormatError("bad magic number, expected '" + std::string(magic) + "'", i);
    }
  }
}

// Validates header-declared payload size against the cap and the bytes
// actually present, before anything is allocated.
std::size_t checked_payload(const std::vector<std::uint8_t>& in, std::size_t header,
                            std::uint32_t width, std::uint32_t height) {
  const std::uint64_t count = std::uint64_t{width} * height;
  const std::uint64_t bytes = count * 4;
  if (width == 0 || height == 0) throw FormatError("empty grid dimensions", 4);
  if (bytes > kMaxPayloadBytes) {
    throw FormatError("declared payload of " + std::to_string(bytes) + " bytes exceeds the cap",
                      header);
  }
  const std::uint64_t actual = in.size() - header;
  if (actual != bytes) {
    throw FormatError("payload length mismatch: expected " + std::to_string(bytes) +
                          " bytes, found " + std::to_string(actual),
                      header + std::min(actual, bytes));
  }
  return static_cast<std::size_t>(count);
}

float store_value(double v, PhaseKind kind) {
  float f = static_cast<float>(v);
  if (kind == PhaseKind::Wrapped) {
    if (static_cast<double>(f) > kPi) f = std::nextafter(f, 0.0f);
    if (static_cast<double>(f) <= -kPi) f = std::nextafter(f, 0.0f);
  }
  return f;
}

}  // namespace

std::vector<std::uint8_t> encode_fpg(const PhaseGrid& grid) {
  std::vector<std::uint8_t> out;
  out.reserve(kPhaseHeader + 4 * grid.size());
  out.insert(out.end(), {'F', 'P', 'G', '1'});
  put_u32(out, checked_dim(grid.width()));
  put_u32(out, checked_dim(grid.height()));
  out.push_back(static_cast<std::uint8_t>(grid.kind()));
  for (double v : grid.values()) put_u32(out, std::bit_cast<std::uint32_t>(store_value(v, grid.kind())));
  return out;
}

PhaseGrid decode_fpg(const std::vector<std::uint8_t>& in) {
  check_magic(in, "FPG1");
  if (in.size() < kPhaseHeader) throw FormatError("truncated FPG1 header", in.size());
  const std::uint32_t width = get_u32(in, 4);
  const std::uint32_t height = get_u32(in, 8);
  const std::uint8_t kind_byte = in[12];
  if (kind_byte > 1) throw FormatError("unknown phase kind " + std::to_string(kind_byte), 12);
  const auto kind = static_cast<PhaseKind>(kind_byte);
  const std::size_t count = checked_payload(in, kPhaseHeader, width, height);
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = kPhaseHeader + 4 * i;
    const double v = std::bit_cast<float>(get_u32(in, at));
    if (!std::isfinite(v)) throw FormatError("non-finite phase value", at);
    if (kind == PhaseKind::Wrapped && !(v > -kPi && v <= kPi)) {
      throw FormatError("wrapped phase " + std::to_string(v) + " outside (-pi, pi]", at);
    }
    values[i] = v;
  }
  return PhaseGrid(width, height, std::move(values), kind);
}

std::vector<std::uint8_t> encode_lbg(const LabelGrid& grid) {
  std::vector<std::uint8_t> out;
  out.reserve(kLabelHeader + 4 * grid.size());
  out.insert(out.end(), {'L', 'B', 'G', '1'});
  put_u32(out, checked_dim(grid.width()));
  put_u32(out, checked_dim(grid.height()));
  put_u32(out, static_cast<std::uint32_t>(grid.domain_size()));
  for (std::int32_t k : grid.labels()) put_u32(out, static_cast<std::uint32_t>(k));
  return out;
}

LabelGrid decode_lbg(const std::vector<std::uint8_t>& in) {
  check_magic(in, "LBG1");
  if (in.size() < kLabelHeader) throw FormatError("truncated LBG1 header", in.size());
  const std::uint32_t width = get_u32(in, 4);
  const std::uint32_t height = get_u32(in, 8);
  const std::uint32_t domain = get_u32(in, 12);
  if (domain < 1 || domain > static_cast<std::uint32_t>(std::numeric_limits<std::int32_t>::max())) {
    throw FormatError("invalid label domain size " + std::to_string(domain), 12);
  }
  const std::size_t count = checked_payload(in, kLabelHeader, width, height);
  std::vector<std::int32_t> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = kLabelHeader + 4 * i;
    const auto k = static_cast<std::int32_t>(get_u32(in, at));
    if (k < 0 || static_cast<std::uint32_t>(k) >= domain) {
      throw FormatError("label " + std::to_string(k) + " outside the declared domain", at);
    }
    labels[i] = k;
  }
  return LabelGrid(width, height, std::move(labels), static_cast<std::int32_t>(domain));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path, std::uint64_t max_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  if (size < 0) throw std::runtime_error("cannot determine size of '" + path.string() + "'");
  if (static_cast<std::uint64_t>(size) > max_bytes) {
    throw FormatError("file '" + path.string() + "' is larger than the reader cap", max_bytes);
  }
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (!in.read(reinterpret_cast<char*>(bytes.data()), size)) {
    throw std::runtime_error("failed reading '" + path.string() + "'");
  }
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void write_phase(const std::filesystem::path& path, const PhaseGrid& grid) {
  write_file(path, encode_fpg(grid));
}

PhaseGrid read_phase(const std::filesystem::path& path) { return decode_fpg(read_file(path)); }

void write_labels(const std::filesystem::path& path, const LabelGrid& grid) {
  write_file(path, encode_lbg(grid));
}

LabelGrid read_labels(const std::filesystem::path& path) { return decode_lbg(read_file(path)); }

std::vector<std::uint8_t> encode_pgm(const PhaseGrid& grid) {
  const std::string header =
      "P5\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  double lo = -kPi;
  double hi = kPi;
  if (!grid.wrapped() && grid.size() > 0) {
    const auto [a, b] = std::minmax_element(grid.values().begin(), grid.values().end());
    lo = *a;
    hi = *b;
  }
  const double range = hi - lo;
  for (double v : grid.values()) {
    long byte = 128;
    if (range > 0.0) byte = std::lround((v - lo) / range * 255.0);
    out.push_back(static_cast<std::uint8_t>(std::clamp(byte, 0L, 255L)));
  }
  return out;
}

void export_pgm(const std::filesystem::path& path, const PhaseGrid& grid) {
  write_file(path, encode_pgm(grid));
}

PhaseGrid parse_csv(const std::string& text) {
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    std::size_t columns = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw FormatError("csv: bad number '" + std::string(field) + "' at row " +
                              std::to_string(line_no) + ", column " + std::to_string(columns + 1),
                          line_no);
      }
      values.push_back(v);
      ++columns;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      width = columns;
    } else if (columns != width) {
      throw FormatError("csv: ragged row " + std::to_string(line_no) + " has " +
                            std::to_string(columns) + " columns, expected " + std::to_string(width),
                        line_no);
    }
    ++rows;
  }
  if (rows == 0) throw FormatError("csv: no data", 0);
  const bool wrapped =
      std::all_of(values.begin(), values.end(), [](double v) { return v > -kPi && v <= kPi; });
  return PhaseGrid(width, rows, std::move(values), wrapped ? PhaseKind::Wrapped : PhaseKind::Unwrapped);
}

PhaseGrid import_csv(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  return parse_csv(std::string(bytes.begin(), bytes.end()));
}

}  // namespace qunwrap
