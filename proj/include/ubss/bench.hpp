#pragma once

#include "ubss/frame.hpp"
#include "ubss/pipeline.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

namespace ubss {

struct BenchResult {
  std::string label;
  double original_bytes = 0.0;
  double compressed_bytes = 0.0;
  double ratio = 0.0;               // original / compressed
  double improvement_percent = 0.0; // (ratio - 1) * 100
};

// Throws Error unless both sizes are positive and finite.
BenchResult compression_ratio(double original_bytes, double compressed_bytes,
                              std::string label = {});

// Replaces {in}, {out}, {width}, {height} and {frames} in a command template.
std::string substitute_command(std::string templ, const std::string& in, const std::string& out,
                               std::size_t width, std::size_t height, std::size_t frames);

struct BenchRow {
  std::optional<BenchResult> result;
  int exit_status = 0;
  std::string command;
};

struct BenchReport {
  BenchRow plain;  // codec on the raw source stream
  BenchRow mixed;  // codec on the raw mixed stream (mixed frames + tail)
  std::size_t source_frames = 0;
  std::size_t mixed_frames = 0;
  std::uint64_t raw_source_bytes = 0;
  std::uint64_t raw_mixed_bytes = 0;
  // mixed.ratio / plain.ratio, present when both rows succeeded
  std::optional<double> ratio_of_ratios;

  bool ok() const noexcept { return plain.result && mixed.result; }
  double improvement_percent() const { return (ratio_of_ratios.value_or(1.0) - 1.0) * 100.0; }
};

// Writes both 8-bit raw streams into workdir, runs the codec template on
// each (sequentially) and measures output sizes. Mixed frames are exported
// through the affine 8-bit mapping when cfg.quant is Affine8, otherwise
// clamped and rounded. A failing command is recorded, not thrown.
BenchReport run_bench(std::span<const Frame> frames, const CodecConfig& cfg,
                      const std::string& codec_template, const std::filesystem::path& workdir);

void write_bench_table(std::ostream& os, const BenchReport& report);
void write_bench_porcelain(std::ostream& os, const BenchReport& report);

} // namespace ubss
