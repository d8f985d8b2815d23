#pragma once

#include "ubss/frame.hpp"
#include "ubss/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ubss {

enum class SequenceFormat { PgmSequence, RawPlanar };

struct SequenceSource {
  std::vector<Frame> frames;
  SequenceFormat origin = SequenceFormat::PgmSequence;
};

// How to find input frames.
//  - PgmSequence: `path` is a single .pgm file or a printf-style pattern
//    with one %d / %0Nd conversion; indices start at 0 or 1 (whichever
//    exists) and continue until the first missing file.
//  - RawPlanar: `path` is one headerless file of 8-bit planes; width and
//    height are required, count 0 means "as many as the file holds".
struct SequenceInput {
  std::string path;
  SequenceFormat format = SequenceFormat::PgmSequence;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t count = 0;
};

// Raw planar when the extension is .yuv, .y, .gray or .raw; PGM otherwise.
SequenceFormat guess_format(const std::string& path);

Frame read_pgm(const std::filesystem::path& path);
Frame parse_pgm(std::span<const std::uint8_t> bytes);
void write_pgm(const std::filesystem::path& path, const Frame& frame);

SequenceSource read_sequence(const SequenceInput& input);

// Expands a pattern with exactly one %d / %0Nd conversion.
std::string expand_pattern(const std::string& pattern, std::size_t index);

// One PGM per frame, indices from 0. Values are clamped to [0, 255] and
// rounded half away from zero. Returns the written paths.
std::vector<std::filesystem::path> write_sequence(std::span<const Frame> frames,
                                                  const std::string& pattern);

// Concatenated 8-bit planes, same quantization as write_sequence.
void write_raw(std::span<const Frame> frames, const std::filesystem::path& path);

// Little-endian UBSS container.
inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderSize = 39;

std::vector<std::uint8_t> serialize_container(const EncodedSequence& enc);
EncodedSequence parse_container(std::span<const std::uint8_t> bytes);
void write_container(const EncodedSequence& enc, const std::filesystem::path& path);
EncodedSequence read_container(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace ubss
