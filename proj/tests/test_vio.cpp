#include "helpers.hpp"
#include "ubss/error.hpp"
#include "ubss/vio.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

using namespace ubss;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ubss-vio-" + std::to_string(std::random_device{}()) + "-" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

EncodedSequence sample_sequence(Quantization q, std::size_t frames = 9) {
  std::mt19937_64 rng(21);
  CodecConfig cfg;
  cfg.quant = q;
  auto src = testing::random_frames(frames, 6, 4, rng);
  for (Frame& f : src)
    f = quantize_8bit(f);
  return at_container_precision(encode_sequence(src, cfg));
}

} // namespace

TEST_CASE("parse_pgm") {
  SUBCASE("minimal header") {
    auto b = bytes_of("P5\n4 2\n255\n");
    for (int i = 0; i < 8; ++i)
      b.push_back(static_cast<std::uint8_t>(i * 30));
    const Frame f = parse_pgm(b);
    CHECK(f.width() == 4);
    CHECK(f.height() == 2);
    CHECK(f.at(3, 1) == 210.0);
  }
  SUBCASE("comments are skipped") {
    auto b = bytes_of("P5 # made by hand\n2 1 255\n");
    b.push_back(7);
    b.push_back(9);
    CHECK(parse_pgm(b) == Frame(2, 1, {7, 9}));
  }
  SUBCASE("16-bit maxval is rejected") {
    auto b = bytes_of("P5\n1 1\n65535\n");
    b.push_back(0);
    b.push_back(0);
    CHECK_THROWS_AS(parse_pgm(b), FormatError);
  }
  SUBCASE("bad magic and truncation") {
    CHECK_THROWS_AS(parse_pgm(bytes_of("P2\n1 1\n255\n0")), FormatError);
    CHECK_THROWS_AS(parse_pgm(bytes_of("P5\n4 4\n255\n123")), FormatError);
    CHECK_THROWS_AS(parse_pgm(bytes_of("P5\nx 4\n255\n")), FormatError);
  }
}

TEST_CASE("write_sequence clamps and rounds") {
  TempDir dir;
  const Frame f(4, 1, {255.7, -3.2, 100.5, 99.49});
  const auto paths = write_sequence(std::vector<Frame>{f}, (dir.path / "f_%03d.pgm").string());
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].filename() == "f_000.pgm");
  const Frame back = read_pgm(paths[0]);
  CHECK(back == Frame(4, 1, {255, 0, 101, 99}));
}

TEST_CASE("PGM sequences round-trip 8-bit values") {
  TempDir dir;
  std::mt19937_64 rng(4);
  std::vector<Frame> frames;
  for (int i = 0; i < 5; ++i)
    frames.push_back(quantize_8bit(testing::random_frame(7, 3, rng)));
  write_sequence(frames, (dir.path / "s%d.pgm").string());
  const SequenceSource src = read_sequence({(dir.path / "s%d.pgm").string()});
  CHECK(src.frames == frames);
  CHECK(src.origin == SequenceFormat::PgmSequence);

  // one-based numbering is found as well
  fs::rename(dir.path / "s0.pgm", dir.path / "s5.pgm");
  const SequenceSource shifted = read_sequence({(dir.path / "s%d.pgm").string()});
  CHECK(shifted.frames.size() == 5);

  SequenceInput limited{(dir.path / "s%d.pgm").string()};
  limited.count = 2;
  CHECK(read_sequence(limited).frames.size() == 2);
  limited.count = 9;
  CHECK_THROWS_AS(read_sequence(limited), IoError);

  CHECK_THROWS_AS(read_sequence({(dir.path / "missing%d.pgm").string()}), IoError);
  write_pgm(dir.path / "s6.pgm", Frame(2, 2));
  CHECK_THROWS_AS(read_sequence({(dir.path / "s%d.pgm").string()}), FormatError);
}

TEST_CASE("raw planar input") {
  TempDir dir;
  std::vector<std::uint8_t> bytes(40 * 6 * 4);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    bytes[i] = static_cast<std::uint8_t>(i % 251);
  write_file(dir.path / "clip.yuv", bytes);
  SequenceInput in{(dir.path / "clip.yuv").string(), SequenceFormat::RawPlanar, 6, 4, 40};
  const SequenceSource src = read_sequence(in);
  REQUIRE(src.frames.size() == 40);
  CHECK(src.frames[1][0] == 24.0);
  in.count = 0;
  CHECK(read_sequence(in).frames.size() == 40);
  in.count = 41;
  CHECK_THROWS_AS(read_sequence(in), FormatError);
  in.count = 0;
  in.width = 7;
  CHECK_THROWS_AS(read_sequence(in), FormatError);
  CHECK(guess_format("a/b.YUV") == SequenceFormat::RawPlanar);
  CHECK(guess_format("a/b%03d.pgm") == SequenceFormat::PgmSequence);

  write_raw(src.frames, dir.path / "copy.raw");
  CHECK(read_file(dir.path / "copy.raw") == bytes);
}

TEST_CASE("expand_pattern") {
  CHECK(expand_pattern("f%d.pgm", 7) == "f7.pgm");
  CHECK(expand_pattern("f%04d.pgm", 7) == "f0007.pgm");
  CHECK_THROWS_AS(expand_pattern("plain.pgm", 1), FormatError);
  CHECK_THROWS_AS(expand_pattern("f%s.pgm", 1), FormatError);
  CHECK_THROWS_AS(expand_pattern("%d_%d.pgm", 1), FormatError);
}

TEST_CASE("container byte layout") {
  const EncodedSequence enc = sample_sequence(Quantization::FloatContainer);
  const std::vector<std::uint8_t> b = serialize_container(enc);
  CHECK(std::memcmp(b.data(), "UBSS", 4) == 0);
  CHECK(b[4] == 1);
  CHECK(b[5] == 0);
  CHECK((b[6] | b[7] << 8) == 3);
  CHECK((b[8] | b[9] << 8) == 4);
  CHECK((b[10] | b[11] << 8 | b[12] << 16 | b[13] << 24) == 6);
  CHECK((b[14] | b[15] << 8 | b[16] << 16 | b[17] << 24) == 4);
  CHECK((b[18] | b[19] << 8 | b[20] << 16 | b[21] << 24) == 6);
  CHECK(b[22] == 1);
  for (std::size_t i = 23; i < 39; ++i)
    CHECK(b[i] == 0);
  double a00 = 0.0;
  std::memcpy(&a00, b.data() + 39, 8); // host is little-endian in CI
  CHECK(a00 == 0.50);
  CHECK(b.size() == 39 + 12 * 8 + 6 * 24 * 4 + 1 * 24);
}

TEST_CASE("container round trip is lossless") {
  for (Quantization q : {Quantization::FloatContainer, Quantization::Affine8}) {
    const EncodedSequence enc = sample_sequence(q);
    const EncodedSequence back = parse_container(serialize_container(enc));
    CHECK(back == enc);
    CHECK(serialize_container(back) == serialize_container(enc));
  }
  TempDir dir;
  const EncodedSequence enc = sample_sequence(Quantization::Affine8, 8);
  write_container(enc, dir.path / "x.ubss");
  CHECK(read_container(dir.path / "x.ubss") == enc);
  CHECK(fs::file_size(dir.path / "x.ubss") == 39 + 12 * 8 + 6 * 24);
}

TEST_CASE("container rejects damaged input") {
  const EncodedSequence enc = sample_sequence(Quantization::FloatContainer);
  const std::vector<std::uint8_t> good = serialize_container(enc);

  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(parse_container(bad_magic), FormatError);

  auto bad_version = good;
  bad_version[4] = 2;
  CHECK_THROWS_AS(parse_container(bad_version), FormatError);

  auto bad_count = good;
  bad_count[18] = 9; // mixed_count 9 frames, payload holds 6
  CHECK_THROWS_AS(parse_container(bad_count), FormatError);

  auto truncated = good;
  truncated.pop_back();
  CHECK_THROWS_AS(parse_container(truncated), FormatError);
  CHECK_THROWS_AS(parse_container(std::span(good).first(20)), FormatError);

  auto no_mixed = good;
  no_mixed[18] = 0;
  CHECK_THROWS_AS(parse_container(no_mixed), FormatError);

  auto nan_matrix = good;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::memcpy(nan_matrix.data() + 39, &nan, 8);
  CHECK_THROWS_AS(parse_container(nan_matrix), FormatError);

  EncodedSequence tail_only = enc;
  tail_only.mixed_frames.clear();
  CHECK_THROWS_AS(serialize_container(tail_only), FormatError);

  EncodedSequence non_finite = enc;
  non_finite.mixed_frames[0][0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(serialize_container(non_finite), FormatError);
}

TEST_CASE("property: random container bytes never parse past their size") {
  std::mt19937_64 rng(77);
  const std::vector<std::uint8_t> good = serialize_container(sample_sequence(Quantization::Affine8));
  for (int trial = 0; trial < 500; ++trial) {
    auto b = good;
    const std::size_t flips = 1 + rng() % 4;
    for (std::size_t k = 0; k < flips; ++k)
      b[rng() % 39] = static_cast<std::uint8_t>(rng());
    b.resize(b.size() - rng() % 3);
    try {
      const EncodedSequence e = parse_container(b);
      CHECK(serialize_container(e).size() == b.size());
    } catch (const FormatError&) {
    }
  }
}
