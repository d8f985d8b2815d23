#pragma once

#include "ubss/frame.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace ubss {

enum class SynthPreset {
  // Piecewise-constant background on 2x2-aligned cells plus zero-sum 2x2
  // detail. Inside each group of `block_size` frames, every cell carries
  // detail in at most `max_active` frames, so each Haar detail column has
  // at most that many nonzeros.
  SparseDetail,
  // Odd-width bars moving one pixel per frame. Detail columns are not
  // sparse; useful to exercise forced assignments.
  MovingBars,
};

SynthPreset parse_synth_preset(std::string_view name);
std::string_view to_string(SynthPreset preset);

struct SynthParams {
  SynthPreset preset = SynthPreset::SparseDetail;
  std::size_t width = 64;
  std::size_t height = 64;
  std::size_t frames = 40;
  std::uint64_t seed = 1;
  std::size_t block_size = 4; // n
  std::size_t max_active = 2; // m - 1
};

// Deterministic for a given parameter set: integer arithmetic on a
// mt19937_64 stream, 8-bit output values.
std::vector<Frame> generate_sequence(const SynthParams& params);

} // namespace ubss
