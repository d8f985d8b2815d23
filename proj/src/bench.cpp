#include "ubss/bench.hpp"

#include "ubss/error.hpp"
#include "ubss/vio.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sys/wait.h>

namespace ubss {

namespace fs = std::filesystem;

BenchResult compression_ratio(double original_bytes, double compressed_bytes, std::string label) {
  if (!(original_bytes > 0.0) || !(compressed_bytes > 0.0) || !std::isfinite(original_bytes) ||
      !std::isfinite(compressed_bytes))
    throw Error("compression ratio needs positive sizes");
  BenchResult r;
  r.label = std::move(label);
  r.original_bytes = original_bytes;
  r.compressed_bytes = compressed_bytes;
  r.ratio = original_bytes / compressed_bytes;
  r.improvement_percent = (r.ratio - 1.0) * 100.0;
  return r;
}

std::string substitute_command(std::string templ, const std::string& in, const std::string& out,
                               std::size_t width, std::size_t height, std::size_t frames) {
  const std::pair<std::string, std::string> subs[] = {
      {"{in}", in},
      {"{out}", out},
      {"{width}", std::to_string(width)},
      {"{height}", std::to_string(height)},
      {"{frames}", std::to_string(frames)},
  };
  for (const auto& [key, value] : subs) {
    for (auto pos = templ.find(key); pos != std::string::npos; pos = templ.find(key, pos + value.size()))
      templ.replace(pos, key.size(), value);
  }
  return templ;
}

namespace {

// The ratio is taken against reference_bytes, the raw source size, for both rows.
BenchRow run_codec(const std::string& label, const std::string& templ, const fs::path& in,
                   const fs::path& out, std::size_t width, std::size_t height, std::size_t frames,
                   std::uint64_t reference_bytes) {
  BenchRow row;
  std::error_code ec;
  fs::remove(out, ec);
  row.command = substitute_command(templ, in.string(), out.string(), width, height, frames);
  const int status = std::system(row.command.c_str());
  row.exit_status = status == -1 ? -1 : (WIFEXITED(status) ? WEXITSTATUS(status) : 128);
  if (row.exit_status != 0)
    return row;
  const auto out_size = fs::file_size(out, ec);
  if (ec || out_size == 0) {
    row.exit_status = -2; // ran, but produced nothing measurable
    return row;
  }
  row.result =
      compression_ratio(static_cast<double>(reference_bytes), static_cast<double>(out_size), label);
  return row;
}

} // namespace

BenchReport run_bench(std::span<const Frame> frames, const CodecConfig& cfg,
                      const std::string& codec_template, const fs::path& workdir) {
  const EncodedSequence enc = encode_sequence(frames, cfg);
  fs::create_directories(workdir);
  const fs::path src_raw = workdir / "source.yuv";
  const fs::path mixed_raw = workdir / "mixed.yuv";
  write_raw(frames, src_raw);
  // Affine codes are already in [0, 255]; float-mode values get clamped.
  std::vector<Frame> exported = enc.mixed_frames;
  exported.insert(exported.end(), enc.tail_frames.begin(), enc.tail_frames.end());
  write_raw(exported, mixed_raw);

  BenchReport report;
  report.source_frames = frames.size();
  report.mixed_frames = exported.size();
  report.raw_source_bytes = fs::file_size(src_raw);
  report.raw_mixed_bytes = fs::file_size(mixed_raw);

  const std::size_t w = enc.width, h = enc.height;
  report.plain = run_codec("codec", codec_template, src_raw, workdir / "source.out", w, h,
                           frames.size(), report.raw_source_bytes);
  report.mixed = run_codec("ubssvc+codec", codec_template, mixed_raw, workdir / "mixed.out", w, h,
                           exported.size(), report.raw_source_bytes);
  if (report.ok())
    report.ratio_of_ratios = report.mixed.result->ratio / report.plain.result->ratio;
  return report;
}

namespace {

void row_line(std::ostream& os, const BenchRow& row, const std::string& label) {
  os << std::left << std::setw(14) << label << std::right;
  if (!row.result) {
    os << "  FAILED (exit " << row.exit_status << "): " << row.command << '\n';
    return;
  }
  os << std::setw(14) << static_cast<std::uint64_t>(row.result->original_bytes) << std::setw(14)
     << static_cast<std::uint64_t>(row.result->compressed_bytes) << std::setw(10) << std::fixed
     << std::setprecision(4) << row.result->ratio << '\n';
}

} // namespace

void write_bench_table(std::ostream& os, const BenchReport& r) {
  os << "frames: source " << r.source_frames << ", mixed stream " << r.mixed_frames << '\n';
  os << "raw bytes: source " << r.raw_source_bytes << ", mixed " << r.raw_mixed_bytes << '\n';
  os << std::left << std::setw(14) << "row" << std::right << std::setw(14) << "original"
     << std::setw(14) << "compressed" << std::setw(10) << "ratio" << '\n';
  row_line(os, r.plain, "codec");
  row_line(os, r.mixed, "ubssvc+codec");
  if (r.ratio_of_ratios)
    os << "ratio of ratios " << std::fixed << std::setprecision(4) << *r.ratio_of_ratios
       << "  (improvement " << std::setprecision(2) << r.improvement_percent() << "%)\n";
}

void write_bench_porcelain(std::ostream& os, const BenchReport& r) {
  os << std::setprecision(17);
  os << "source_frames=" << r.source_frames << "\nmixed_frames=" << r.mixed_frames
     << "\nraw_source_bytes=" << r.raw_source_bytes << "\nraw_mixed_bytes=" << r.raw_mixed_bytes
     << '\n';
  for (const auto* row : {&r.plain, &r.mixed}) {
    const std::string key = row == &r.plain ? "codec" : "ubssvc_codec";
    os << key << ".exit=" << row->exit_status << '\n';
    if (row->result) {
      os << key << ".original_bytes=" << row->result->original_bytes << '\n'
         << key << ".compressed_bytes=" << row->result->compressed_bytes << '\n'
         << key << ".ratio=" << row->result->ratio << '\n';
    }
  }
  if (r.ratio_of_ratios)
    os << "ratio_of_ratios=" << *r.ratio_of_ratios
       << "\nimprovement_percent=" << r.improvement_percent() << '\n';
}

} // namespace ubss
