#pragma once

#include "ubss/frame.hpp"
#include "ubss/metrics.hpp"
#include "ubss/mixing.hpp"
#include "ubss/sca.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ubss {

enum class PadPolicy { Reject, EdgeReplicate };
enum class TailPolicy { Passthrough };
enum class Quantization { FloatContainer, Affine8 };

std::string_view to_string(PadPolicy p);
std::string_view to_string(TailPolicy p);
std::string_view to_string(Quantization q);
Quantization parse_quantization(std::string_view text);
PadPolicy parse_pad_policy(std::string_view text);

struct CodecConfig {
  MixingMatrix matrix = default_mixing_matrix();
  double tau = 0.05;
  double det_floor = kDefaultDetFloor;
  PadPolicy pad = PadPolicy::EdgeReplicate;
  TailPolicy tail = TailPolicy::Passthrough;
  Quantization quant = Quantization::FloatContainer;

  std::size_t n() const noexcept { return matrix.cols(); }
  std::size_t m() const noexcept { return matrix.rows(); }

  // Throws InvalidMatrixError / Error if the matrix fails the submatrix
  // test or tau is negative.
  void validate() const;
};

// Parses "key = value" lines ('#' starts a comment). Recognized keys:
// m, n, matrix (row-major, whitespace or comma separated), tau, det_floor,
// pad, tail, quant. Missing keys keep their defaults; m and n are
// required together with matrix.
CodecConfig parse_config(std::string_view text);
CodecConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& os, const CodecConfig& cfg);

struct EncodedSequence {
  MixingMatrix matrix = default_mixing_matrix();
  Quantization quant = Quantization::FloatContainer;
  // Affine8 only: value = code * scale + offset.
  double scale = 0.0;
  double offset = 0.0;
  std::size_t width = 0;
  std::size_t height = 0;
  // b * m frames. Float mode holds the exact double mix (the container
  // stores it as f32), affine mode holds integral codes in [0, 255].
  std::vector<Frame> mixed_frames;
  // source_count mod n frames, 8-bit values, not mixed.
  std::vector<Frame> tail_frames;

  std::size_t blocks() const noexcept { return mixed_frames.size() / matrix.rows(); }
  std::size_t source_count() const noexcept {
    return blocks() * matrix.cols() + tail_frames.size();
  }

  friend bool operator==(const EncodedSequence&, const EncodedSequence&) = default;
};

// Groups consecutive frames into blocks of n and mixes each to m frames.
EncodedSequence encode_sequence(std::span<const Frame> frames, const CodecConfig& cfg);

// Rounds float-mode mixed values to f32, which is what a container
// write/read does to them. Affine sequences are returned unchanged.
EncodedSequence at_container_precision(EncodedSequence enc);

struct DecodeResult {
  std::vector<Frame> frames;
  RecoveryStats stats; // merged over the LH, HL and HH subbands of every block
};

// Haar-transforms each mixed frame, separates the detail subbands by
// hyperplane classification and the LL band by the pseudo-inverse, then
// inverts the transform.
DecodeResult decode_sequence(const EncodedSequence& enc, const CodecConfig& cfg);

struct RoundtripReport {
  std::size_t source_count = 0;
  std::size_t mixed_count = 0;
  std::size_t tail_count = 0;
  std::size_t decoded_count = 0;
  QualityReport quality; // reconstructions clamped and rounded to 8 bits
  RecoveryStats stats;
};

// encode -> container precision -> decode, then PSNR against the input.
RoundtripReport roundtrip_eval(std::span<const Frame> frames, const CodecConfig& cfg);

// Edge-replicates the last column/row to make both dimensions even.
Frame pad_to_even(const Frame& f);
// Top-left width x height window.
Frame crop(const Frame& f, std::size_t width, std::size_t height);

} // namespace ubss
