#include "ubss/vio.hpp"

#include "ubss/error.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>

namespace ubss {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw IoError("short write to " + path.string());
}

SequenceFormat guess_format(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".yuv" || ext == ".y" || ext == ".gray" || ext == ".raw")
    return SequenceFormat::RawPlanar;
  return SequenceFormat::PgmSequence;
}

// ---------------------------------------------------------------- PGM

namespace {

class PgmHeaderReader {
public:
  explicit PgmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
          ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t number() {
    skip_space_and_comments();
    std::size_t v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      if (v > std::numeric_limits<std::uint32_t>::max())
        throw FormatError("PGM header value too large");
      v = v * 10 + (bytes_[pos_] - '0');
      ++pos_;
      ++digits;
    }
    if (digits == 0)
      throw FormatError("malformed PGM header");
    return v;
  }

  std::size_t pos_ = 0;
  std::span<const std::uint8_t> bytes_;
};

} // namespace

Frame parse_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw FormatError("not a binary PGM (missing P5 magic)");
  PgmHeaderReader r(bytes);
  r.pos_ = 2;
  const std::size_t width = r.number();
  const std::size_t height = r.number();
  const std::size_t maxval = r.number();
  if (width == 0 || height == 0)
    throw FormatError("PGM has zero dimension");
  if (maxval == 0 || maxval > 255)
    throw FormatError("only 8-bit PGM is supported (maxval " + std::to_string(maxval) + ")");
  if (r.pos_ >= bytes.size() || !std::isspace(bytes[r.pos_]))
    throw FormatError("malformed PGM header");
  ++r.pos_; // single whitespace before the raster
  const std::size_t need = width * height;
  if (bytes.size() - r.pos_ < need)
    throw FormatError("truncated PGM payload");
  std::vector<double> px(need);
  for (std::size_t t = 0; t < need; ++t)
    px[t] = bytes[r.pos_ + t];
  return Frame(width, height, std::move(px));
}

Frame read_pgm(const fs::path& path) {
  try {
    return parse_pgm(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_pgm(const fs::path& path, const Frame& frame) {
  const std::string header =
      "P5\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.reserve(bytes.size() + frame.size());
  for (double v : frame.pixels())
    bytes.push_back(to_u8(v));
  write_file(path, bytes);
}

// ---------------------------------------------------------------- sequences

std::string expand_pattern(const std::string& pattern, std::size_t index) {
  const auto pct = pattern.find('%');
  if (pct == std::string::npos)
    throw FormatError("pattern '" + pattern + "' has no %d conversion");
  std::size_t i = pct + 1;
  std::size_t width = 0;
  bool zero = false;
  if (i < pattern.size() && pattern[i] == '0') {
    zero = true;
    ++i;
  }
  while (i < pattern.size() && std::isdigit(static_cast<unsigned char>(pattern[i])))
    width = width * 10 + static_cast<std::size_t>(pattern[i++] - '0');
  if (i >= pattern.size() || pattern[i] != 'd')
    throw FormatError("pattern '" + pattern + "' must use %d or %0Nd");
  if (pattern.find('%', i + 1) != std::string::npos)
    throw FormatError("pattern '" + pattern + "' has more than one conversion");
  std::string digits = std::to_string(index);
  if (digits.size() < width)
    digits.insert(0, width - digits.size(), zero ? '0' : ' ');
  return pattern.substr(0, pct) + digits + pattern.substr(i + 1);
}

SequenceSource read_sequence(const SequenceInput& input) {
  SequenceSource src;
  src.origin = input.format;
  if (input.format == SequenceFormat::RawPlanar) {
    if (input.width == 0 || input.height == 0)
      throw FormatError("raw planar input needs width and height");
    const std::vector<std::uint8_t> bytes = read_file(input.path);
    const std::size_t plane = input.width * input.height;
    std::size_t count = input.count;
    if (count == 0) {
      if (bytes.size() % plane != 0)
        throw FormatError("raw file size " + std::to_string(bytes.size()) +
                          " is not a multiple of the frame size " + std::to_string(plane));
      count = bytes.size() / plane;
    }
    if (bytes.size() < count * plane)
      throw FormatError("truncated raw file: need " + std::to_string(count * plane) +
                        " bytes, have " + std::to_string(bytes.size()));
    for (std::size_t k = 0; k < count; ++k) {
      std::vector<double> px(bytes.begin() + static_cast<std::ptrdiff_t>(k * plane),
                             bytes.begin() + static_cast<std::ptrdiff_t>((k + 1) * plane));
      src.frames.emplace_back(input.width, input.height, std::move(px));
    }
  } else if (input.path.find('%') == std::string::npos) {
    src.frames.push_back(read_pgm(input.path));
  } else {
    std::size_t index = fs::exists(expand_pattern(input.path, 0)) ? 0 : 1;
    while (input.count == 0 || src.frames.size() < input.count) {
      const std::string p = expand_pattern(input.path, index++);
      if (!fs::exists(p))
        break;
      src.frames.push_back(read_pgm(p));
    }
    if (src.frames.empty())
      throw IoError("no frames match " + input.path);
    if (input.count != 0 && src.frames.size() < input.count)
      throw IoError("only " + std::to_string(src.frames.size()) + " of " +
                    std::to_string(input.count) + " frames found for " + input.path);
  }
  if (src.frames.empty())
    throw FormatError("input holds no frames");
  try {
    require_uniform_shape(src.frames);
  } catch (const ShapeError& e) {
    throw FormatError(e.what());
  }
  return src;
}

std::vector<fs::path> write_sequence(std::span<const Frame> frames, const std::string& pattern) {
  std::vector<fs::path> paths;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    paths.emplace_back(expand_pattern(pattern, i));
    write_pgm(paths.back(), frames[i]);
  }
  return paths;
}

void write_raw(std::span<const Frame> frames, const fs::path& path) {
  std::vector<std::uint8_t> bytes;
  for (const Frame& f : frames)
    for (double v : f.pixels())
      bytes.push_back(to_u8(v));
  write_file(path, bytes);
}

// ---------------------------------------------------------------- container

namespace {

class ByteWriter {
public:
  void u8(std::uint8_t v) { out.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void f32(float v) { le(std::bit_cast<std::uint32_t>(v), 4); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }

  std::vector<std::uint8_t> out;

private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i)
      out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

class ByteReader {
public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(le(4))); }
  double f64() { return std::bit_cast<double>(le(8)); }

private:
  std::uint64_t le(int n) {
    if (bytes_.size() - pos_ < static_cast<std::size_t>(n))
      throw FormatError("container truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
      v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void require_container_invariants(const EncodedSequence& enc) {
  const std::size_t m = enc.matrix.rows();
  const std::size_t n = enc.matrix.cols();
  if (enc.mixed_frames.empty())
    throw FormatError("container needs at least one mixed block");
  if (enc.mixed_frames.size() % m != 0)
    throw FormatError("mixed frame count is not a multiple of m");
  if (enc.tail_frames.size() >= n)
    throw FormatError("tail holds a whole block or more");
  if (m > std::numeric_limits<std::uint16_t>::max() || n > std::numeric_limits<std::uint16_t>::max())
    throw FormatError("matrix too large for the container");
  if (enc.width == 0 || enc.height == 0 || enc.width > std::numeric_limits<std::uint32_t>::max() ||
      enc.height > std::numeric_limits<std::uint32_t>::max())
    throw FormatError("frame dimensions out of range");
  if (enc.mixed_frames.size() > std::numeric_limits<std::uint32_t>::max())
    throw FormatError("too many mixed frames");
  if (enc.tail_frames.size() > std::numeric_limits<std::uint8_t>::max())
    throw FormatError("too many tail frames");
}

} // namespace

std::vector<std::uint8_t> serialize_container(const EncodedSequence& enc) {
  require_container_invariants(enc);
  const bool affine = enc.quant == Quantization::Affine8;
  ByteWriter w;
  for (char c : {'U', 'B', 'S', 'S'})
    w.u8(static_cast<std::uint8_t>(c));
  w.u8(kContainerVersion);
  w.u8(affine ? 1 : 0);
  w.u16(static_cast<std::uint16_t>(enc.matrix.rows()));
  w.u16(static_cast<std::uint16_t>(enc.matrix.cols()));
  w.u32(static_cast<std::uint32_t>(enc.width));
  w.u32(static_cast<std::uint32_t>(enc.height));
  w.u32(static_cast<std::uint32_t>(enc.mixed_frames.size()));
  w.u8(static_cast<std::uint8_t>(enc.tail_frames.size()));
  w.f64(affine ? enc.scale : 0.0);
  w.f64(affine ? enc.offset : 0.0);
  for (std::size_t i = 0; i < enc.matrix.rows(); ++i)
    for (std::size_t j = 0; j < enc.matrix.cols(); ++j)
      w.f64(enc.matrix(i, j));
  for (const Frame& f : enc.mixed_frames) {
    if (f.width() != enc.width || f.height() != enc.height)
      throw FormatError("mixed frame dimensions disagree with the header");
    for (double v : f.pixels()) {
      if (!std::isfinite(v))
        throw FormatError("non-finite mixed value");
      if (affine) {
        if (v < 0.0 || v > 255.0 || v != std::floor(v))
          throw FormatError("affine mode expects integral codes in [0, 255]");
        w.u8(static_cast<std::uint8_t>(v));
      } else {
        const float fv = static_cast<float>(v);
        if (!std::isfinite(fv))
          throw FormatError("mixed value overflows 32-bit float");
        w.f32(fv);
      }
    }
  }
  for (const Frame& f : enc.tail_frames) {
    if (f.width() != enc.width || f.height() != enc.height)
      throw FormatError("tail frame dimensions disagree with the header");
    for (double v : f.pixels())
      w.u8(to_u8(v));
  }
  return std::move(w.out);
}

EncodedSequence parse_container(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < kContainerHeaderSize)
    throw FormatError("container shorter than its header");
  if (!(r.u8() == 'U' && r.u8() == 'B' && r.u8() == 'S' && r.u8() == 'S'))
    throw FormatError("bad container magic");
  if (const auto version = r.u8(); version != kContainerVersion)
    throw FormatError("unsupported container version " + std::to_string(version));
  const std::uint8_t mode = r.u8();
  if (mode > 1)
    throw FormatError("unknown quantization mode " + std::to_string(mode));
  const std::size_t m = r.u16();
  const std::size_t n = r.u16();
  const std::size_t width = r.u32();
  const std::size_t height = r.u32();
  const std::size_t mixed_count = r.u32();
  const std::size_t tail_count = r.u8();
  const double scale = r.f64();
  const double offset = r.f64();

  if (m < 2 || m >= n)
    throw FormatError("container matrix shape is not underdetermined");
  if (width == 0 || height == 0)
    throw FormatError("container frame size is zero");
  if (mixed_count == 0 || mixed_count % m != 0)
    throw FormatError("mixed_count must be a positive multiple of m");
  if (tail_count >= n)
    throw FormatError("tail_count must be below n");
  if (!std::isfinite(scale) || !std::isfinite(offset))
    throw FormatError("non-finite quantization parameters");

  const std::uint64_t plane = static_cast<std::uint64_t>(width) * height;
  const std::uint64_t expected = kContainerHeaderSize + 8ull * m * n +
                                 static_cast<std::uint64_t>(mixed_count) * plane * (mode ? 1 : 4) +
                                 static_cast<std::uint64_t>(tail_count) * plane;
  if (expected != bytes.size())
    throw FormatError("container size mismatch: header implies " + std::to_string(expected) +
                      " bytes, file has " + std::to_string(bytes.size()));

  Eigen::MatrixXd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.f64();

  EncodedSequence enc;
  try {
    enc.matrix = MixingMatrix(std::move(a));
  } catch (const Error& e) {
    throw FormatError(std::string("container matrix: ") + e.what());
  }
  enc.quant = mode ? Quantization::Affine8 : Quantization::FloatContainer;
  enc.scale = scale;
  enc.offset = offset;
  enc.width = width;
  enc.height = height;
  for (std::size_t k = 0; k < mixed_count; ++k) {
    std::vector<double> px(plane);
    for (double& v : px) {
      v = mode ? static_cast<double>(r.u8()) : static_cast<double>(r.f32());
      if (!std::isfinite(v))
        throw FormatError("non-finite mixed value in container");
    }
    enc.mixed_frames.emplace_back(width, height, std::move(px));
  }
  for (std::size_t k = 0; k < tail_count; ++k) {
    std::vector<double> px(plane);
    for (double& v : px)
      v = r.u8();
    enc.tail_frames.emplace_back(width, height, std::move(px));
  }
  return enc;
}

void write_container(const EncodedSequence& enc, const fs::path& path) {
  write_file(path, serialize_container(enc));
}

EncodedSequence read_container(const fs::path& path) { return parse_container(read_file(path)); }

} // namespace ubss
