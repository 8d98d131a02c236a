#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qunwrap/phase.hpp"

namespace qunwrap {

/// Largest payload a reader will allocate.
inline constexpr std::uint64_t kMaxPayloadBytes = std::uint64_t{1} << 31;

// FPG1: "FPG1", u32 width, u32 height, u8 kind (0 wrapped, 1 unwrapped),
// then width*height IEEE-754 binary32 radians; all little-endian.
//
// Values are stored in single precision. A wrapped value whose float rounding
// would leave (-pi, pi] is stored as the nearest float inside the interval.
std::vector<std::uint8_t> encode_fpg(const PhaseGrid& grid);
PhaseGrid decode_fpg(const std::vector<std::uint8_t>& bytes);
void write_phase(const std::filesystem::path& path, const PhaseGrid& grid);
PhaseGrid read_phase(const std::filesystem::path& path);

// LBG1: "LBG1", u32 width, u32 height, u32 domain size, then width*height
// signed 32-bit labels; all little-endian.
std::vector<std::uint8_t> encode_lbg(const LabelGrid& grid);
LabelGrid decode_lbg(const std::vector<std::uint8_t>& bytes);
void write_labels(const std::filesystem::path& path, const LabelGrid& grid);
LabelGrid read_labels(const std::filesystem::path& path);

/// 8-bit binary PGM. Wrapped grids map -pi..pi onto 0..255; other grids map
/// their own min..max, constant grids to 128.
std::vector<std::uint8_t> encode_pgm(const PhaseGrid& grid);
void export_pgm(const std::filesystem::path& path, const PhaseGrid& grid);

/// Rectangular comma-separated numbers (LF or CRLF). Kind is Wrapped when
/// every value lies in (-pi, pi].
PhaseGrid parse_csv(const std::string& text);
PhaseGrid import_csv(const std::filesystem::path& path);

/// Whole-file helpers that throw std::runtime_error on I/O failure.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path,
                                    std::uint64_t max_bytes = kMaxPayloadBytes + 64);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace qunwrap
