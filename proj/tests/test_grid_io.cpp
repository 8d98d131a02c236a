#include <bit>
#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "qunwrap/errors.hpp"
#include "qunwrap/grid_io.hpp"
#include "support.hpp"

using namespace qunwrap;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "qunwrap_io_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

// Values representable in binary32, so the file format can hold them exactly.
PhaseGrid float_grid(Rng& rng, std::size_t w, std::size_t h, PhaseKind kind) {
  std::vector<double> v(w * h);
  for (double& x : v) {
    const double raw = kind == PhaseKind::Wrapped ? (rng.uniform() * 2.0 - 1.0) * 3.14159
                                                  : (rng.uniform() - 0.5) * 200.0;
    x = static_cast<float>(raw);
  }
  return PhaseGrid(w, h, std::move(v), kind);
}

void put_u32(std::vector<std::uint8_t>& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

}  // namespace

TEST_SUITE("grid_io") {

TEST_CASE("phase round trip through a file") {
  Rng rng(70);
  const PhaseGrid g = float_grid(rng, 7, 3, PhaseKind::Wrapped);
  const auto path = scratch("rt.fpg");
  write_phase(path, g);
  CHECK(read_phase(path) == g);
  CHECK(std::filesystem::file_size(path) == 13 + 4 * 21);
}

TEST_CASE("label round trip through a file") {
  Rng rng(71);
  const LabelGrid g(5, 4, test::random_labels(rng, 20, 9), 9);
  const auto path = scratch("rt.lbg");
  write_labels(path, g);
  CHECK(read_labels(path) == g);
  CHECK(std::filesystem::file_size(path) == 16 + 4 * 20);
}

TEST_CASE("header layout is little-endian") {
  const PhaseGrid g(2, 1, {1.0, -0.5}, PhaseKind::Unwrapped);
  const auto b = encode_fpg(g);
  REQUIRE(b.size() == 21);
  CHECK(std::string(b.begin(), b.begin() + 4) == "FPG1");
  CHECK(b[4] == 2);
  CHECK(b[5] == 0);
  CHECK(b[8] == 1);
  CHECK(b[12] == 1);
  // 1.0f == 0x3f800000
  CHECK(b[13] == 0x00);
  CHECK(b[16] == 0x3f);
  const auto l = encode_lbg(LabelGrid(1, 1, {3}, 7));
  CHECK(l[12] == 7);
  CHECK(l[16] == 3);
}

TEST_CASE("wrapped pi survives single precision") {
  const PhaseGrid g(3, 1, {kPi, -kPi + 1e-12, 0.0}, PhaseKind::Wrapped);
  const PhaseGrid back = decode_fpg(encode_fpg(g));
  CHECK(back.wrapped());
  CHECK(back[0] <= kPi);
  CHECK(back[0] > 3.14159);
  CHECK(back[1] > -kPi);
  // Stored values are fixed points of the format.
  CHECK(encode_fpg(back) == encode_fpg(g));
}

TEST_CASE("truncated and malformed phase files") {
  Rng rng(72);
  const auto good = encode_fpg(float_grid(rng, 4, 4, PhaseKind::Wrapped));
  auto truncated = good;
  truncated.resize(good.size() - 3);
  try {
    decode_fpg(truncated);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    const std::string what = e.what();
    CHECK(what.find("expected 64") != std::string::npos);
    CHECK(what.find("found 61") != std::string::npos);
  }
  auto magic = good;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_fpg(magic), FormatError);
  CHECK_THROWS_AS(decode_fpg(std::vector<std::uint8_t>(good.begin(), good.begin() + 10)), FormatError);
  CHECK_THROWS_AS(decode_fpg({}), FormatError);
  auto kind = good;
  kind[12] = 7;
  CHECK_THROWS_AS(decode_fpg(kind), FormatError);
  auto range = good;
  put_u32(range, 13, std::bit_cast<std::uint32_t>(4.0f));
  CHECK_THROWS_AS(decode_fpg(range), FormatError);
  auto nan = good;
  put_u32(nan, 13, 0x7fc00000u);
  CHECK_THROWS_AS(decode_fpg(nan), FormatError);
  auto huge = good;
  put_u32(huge, 4, 0xffffffffu);
  put_u32(huge, 8, 0xffffffffu);
  CHECK_THROWS_AS(decode_fpg(huge), FormatError);
  auto zero = good;
  put_u32(zero, 4, 0);
  CHECK_THROWS_AS(decode_fpg(zero), FormatError);
  auto trailing = good;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_fpg(trailing), FormatError);
}

TEST_CASE("truncated and malformed label files") {
  const auto good = encode_lbg(LabelGrid(3, 3, std::vector<std::int32_t>(9, 1), 4));
  auto truncated = good;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_lbg(truncated), FormatError);
  auto magic = good;
  magic[3] = '2';
  CHECK_THROWS_AS(decode_lbg(magic), FormatError);
  auto domain = good;
  put_u32(domain, 12, 0);
  CHECK_THROWS_AS(decode_lbg(domain), FormatError);
  auto label = good;
  put_u32(label, 16, 4);
  CHECK_THROWS_AS(decode_lbg(label), FormatError);
  put_u32(label, 16, 0xffffffffu);
  CHECK_THROWS_AS(decode_lbg(label), FormatError);
  CHECK_THROWS_AS(decode_lbg(encode_fpg(PhaseGrid(1, 1, {0.0}, PhaseKind::Wrapped))), FormatError);
}

TEST_CASE("random byte strings never crash the readers") {
  Rng rng(73);
  const auto good_p = encode_fpg(float_grid(rng, 3, 2, PhaseKind::Unwrapped));
  const auto good_l = encode_lbg(LabelGrid(3, 2, 5));
  for (int trial = 0; trial < 2000; ++trial) {
    auto p = good_p;
    auto l = good_l;
    const std::size_t flips = 1 + rng.below(4);
    for (std::size_t f = 0; f < flips; ++f) {
      p[rng.below(p.size())] = static_cast<std::uint8_t>(rng.below(256));
      l[rng.below(l.size())] = static_cast<std::uint8_t>(rng.below(256));
    }
    p.resize(rng.below(p.size() + 1));
    try {
      decode_fpg(p);
    } catch (const FormatError&) {
    }
    try {
      decode_lbg(l);
    } catch (const FormatError&) {
    }
  }
}

TEST_CASE("missing files raise runtime errors") {
  CHECK_THROWS_AS(read_phase(scratch("does-not-exist.fpg")), std::runtime_error);
}

TEST_CASE("pgm export") {
  const PhaseGrid flat(3, 2, std::vector<double>(6, 7.5), PhaseKind::Unwrapped);
  const auto img = encode_pgm(flat);
  const std::string header = "P5\n3 2\n255\n";
  CHECK(std::string(img.begin(), img.begin() + header.size()) == header);
  REQUIRE(img.size() == header.size() + 6);
  for (std::size_t i = header.size(); i < img.size(); ++i) CHECK(img[i] == 128);

  std::vector<double> ramp(16);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = -kPi + (i + 1) * kTwoPi / 16.0;
  ramp.back() = kPi;
  const auto r = encode_pgm(PhaseGrid(16, 1, ramp, PhaseKind::Wrapped));
  const std::size_t h = std::string("P5\n16 1\n255\n").size();
  for (std::size_t i = h + 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
  CHECK(r.back() == 255);

  const auto path = scratch("x.pgm");
  export_pgm(path, flat);
  CHECK(std::filesystem::file_size(path) == img.size());
}

TEST_CASE("csv import") {
  const PhaseGrid g = parse_csv("0,1\n2,4");
  CHECK(g.width() == 2);
  CHECK(g.height() == 2);
  CHECK(g.kind() == PhaseKind::Unwrapped);
  CHECK(g.at(1, 0) == 2.0);

  const PhaseGrid w = parse_csv("0.5, -1\r\n\r\n3.0,0\r\n");
  CHECK(w.kind() == PhaseKind::Wrapped);
  CHECK(w.height() == 2);

  try {
    parse_csv("1,2\n3\n");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 2);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv("1,abc\n"), FormatError);
  CHECK_THROWS_AS(parse_csv("1,,2\n"), FormatError);
  CHECK_THROWS_AS(parse_csv(""), FormatError);
  CHECK_THROWS_AS(parse_csv("nan,1\n"), FormatError);

  const auto path = scratch("in.csv");
  {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    REQUIRE(f != nullptr);
    std::fputs("0.1,0.2,0.3\n", f);
    std::fclose(f);
  }
  CHECK(import_csv(path).width() == 3);
}

}  // TEST_SUITE
