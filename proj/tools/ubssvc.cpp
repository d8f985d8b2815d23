// ubssvc: command-line front end for mixing, separating and evaluating
// frame sequences.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error,
// 3 external command failure.

#include "ubss/bench.hpp"
#include "ubss/error.hpp"
#include "ubss/metrics.hpp"
#include "ubss/mixing.hpp"
#include "ubss/pipeline.hpp"
#include "ubss/synth.hpp"
#include "ubss/vio.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitExternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputOptions {
  std::string in;
  std::string preset;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t frames = 0;
  std::uint64_t seed = 1;

  void add_to(CLI::App* cmd, bool allow_preset) {
    cmd->add_option("--in", in, "PGM file/pattern (%d) or raw planar file (.yuv/.y/.raw/.gray)");
    cmd->add_option("--width", width, "frame width (raw input, generator)");
    cmd->add_option("--height", height, "frame height (raw input, generator)");
    cmd->add_option("--frames", frames, "frame count (0 = all available)");
    if (allow_preset) {
      cmd->add_option("--preset", preset, "generate input instead: sparse-detail | moving-bars");
      cmd->add_option("--seed", seed, "generator seed");
    }
  }
};

struct ConfigOptions {
  std::string config;
  std::optional<double> tau;
  std::string quant;

  void add_to(CLI::App* cmd, bool with_quant) {
    cmd->add_option("--config", config, "key = value config file");
    cmd->add_option("--tau", tau, "relative residual tolerance for hyperplane membership");
    if (with_quant)
      cmd->add_option("--quant", quant, "mixed frame storage: float | affine8")
          ->check(CLI::IsMember({"float", "affine8"}));
  }

  ubss::CodecConfig load() const {
    ubss::CodecConfig cfg = config.empty() ? ubss::CodecConfig{} : ubss::load_config(config);
    if (tau)
      cfg.tau = *tau;
    if (!quant.empty())
      cfg.quant = ubss::parse_quantization(quant);
    return cfg;
  }
};

std::vector<ubss::Frame> load_frames(const InputOptions& opt, const ubss::CodecConfig& cfg) {
  if (!opt.preset.empty() && !opt.in.empty())
    throw UsageError("give either --in or --preset, not both");
  if (!opt.preset.empty()) {
    ubss::SynthParams p;
    p.preset = ubss::parse_synth_preset(opt.preset);
    p.width = opt.width ? opt.width : 64;
    p.height = opt.height ? opt.height : 64;
    p.frames = opt.frames ? opt.frames : 40;
    p.seed = opt.seed;
    p.block_size = cfg.n();
    p.max_active = cfg.m() - 1;
    return ubss::generate_sequence(p);
  }
  if (opt.in.empty())
    throw UsageError("an input is required (--in)");
  ubss::SequenceInput input;
  input.path = opt.in;
  input.format = ubss::guess_format(opt.in);
  input.width = opt.width;
  input.height = opt.height;
  input.count = opt.frames;
  if (input.format == ubss::SequenceFormat::RawPlanar && (opt.width == 0 || opt.height == 0))
    throw UsageError("raw planar input needs --width and --height");
  return ubss::read_sequence(input).frames;
}

void write_frames(const std::vector<ubss::Frame>& frames, const std::string& out) {
  if (ubss::guess_format(out) == ubss::SequenceFormat::RawPlanar)
    ubss::write_raw(frames, out);
  else
    ubss::write_sequence(frames, out);
}

void print_stats(std::ostream& os, const ubss::RecoveryStats& s, bool porcelain) {
  if (porcelain) {
    os << std::setprecision(17) << "columns.zero=" << s.zero_columns
       << "\ncolumns.clean=" << s.clean_columns << "\ncolumns.forced=" << s.forced_columns
       << "\nresidual.p50=" << s.residual_quantile(0.5)
       << "\nresidual.p90=" << s.residual_quantile(0.9)
       << "\nresidual.p99=" << s.residual_quantile(0.99)
       << "\nresidual.max=" << s.residual_quantile(1.0) << '\n';
    return;
  }
  os << "detail columns: " << s.total() << " (zero " << s.zero_columns << ", clean "
     << s.clean_columns << ", forced " << s.forced_columns << ")\n";
  os << std::scientific << std::setprecision(3) << "relative residual p50 "
     << s.residual_quantile(0.5) << "  p90 " << s.residual_quantile(0.9) << "  max "
     << s.residual_quantile(1.0) << std::defaultfloat << '\n';
}

int cmd_validate(const ConfigOptions& copt, std::optional<double> det_floor, bool porcelain) {
  ubss::CodecConfig cfg = copt.load();
  const double floor = det_floor.value_or(cfg.det_floor);
  const ubss::ValidationReport r = ubss::validate_mixing_matrix(cfg.matrix, floor);
  std::cout << std::setprecision(17);
  if (porcelain) {
    std::cout << "m=" << cfg.m() << "\nn=" << cfg.n() << "\ndet_floor=" << floor << '\n';
    for (std::size_t k = 0; k < r.submatrix_results.size(); ++k) {
      std::cout << "submatrix." << k << ".columns=";
      for (std::size_t i = 0; i < r.submatrix_results[k].columns.size(); ++i)
        std::cout << (i ? "," : "") << r.submatrix_results[k].columns[i] + 1;
      std::cout << "\nsubmatrix." << k << ".abs_det=" << r.submatrix_results[k].abs_determinant
                << '\n';
    }
    std::cout << "min_abs_det=" << r.min_abs_determinant << "\npassed=" << (r.passed ? 1 : 0)
              << '\n';
  } else {
    std::cout << "mixing matrix " << cfg.m() << "x" << cfg.n() << ", determinant floor " << floor
              << '\n';
    for (const auto& sub : r.submatrix_results) {
      std::cout << "  columns {";
      for (std::size_t i = 0; i < sub.columns.size(); ++i)
        std::cout << (i ? "," : "") << sub.columns[i] + 1;
      std::cout << "}  |det| = " << std::setprecision(10) << sub.abs_determinant << '\n';
    }
    std::cout << (r.passed ? "PASS" : "FAIL") << ": every square submatrix "
              << (r.passed ? "is" : "is not") << " nonsingular\n";
  }
  return r.passed ? 0 : kExitData;
}

int cmd_gen(const InputOptions& iopt, const ConfigOptions& copt, const std::string& out) {
  if (iopt.preset.empty())
    throw UsageError("gen needs --preset");
  const ubss::CodecConfig cfg = copt.load();
  const auto frames = load_frames(iopt, cfg);
  write_frames(frames, out);
  std::cout << "wrote " << frames.size() << " frames (" << frames.front().width() << "x"
            << frames.front().height() << ") to " << out << '\n';
  return 0;
}

int cmd_mix(const InputOptions& iopt, const ConfigOptions& copt, const std::string& out,
            bool porcelain) {
  const ubss::CodecConfig cfg = copt.load();
  const auto frames = load_frames(iopt, cfg);
  const ubss::EncodedSequence enc = ubss::encode_sequence(frames, cfg);
  ubss::write_container(enc, out);
  if (porcelain)
    std::cout << "source_frames=" << frames.size() << "\nmixed_frames=" << enc.mixed_frames.size()
              << "\ntail_frames=" << enc.tail_frames.size() << '\n';
  else
    std::cout << frames.size() << " source frames -> " << enc.mixed_frames.size()
              << " mixed frames + " << enc.tail_frames.size() << " tail frames (" << out << ")\n";
  return 0;
}

int cmd_separate(const std::string& in, const ConfigOptions& copt, const std::string& out,
                 bool porcelain) {
  const ubss::EncodedSequence enc = ubss::read_container(in);
  ubss::CodecConfig cfg = copt.load();
  if (copt.config.empty())
    cfg.matrix = enc.matrix; // the container carries the matrix
  cfg.quant = enc.quant;
  const ubss::DecodeResult dec = ubss::decode_sequence(enc, cfg);
  write_frames(dec.frames, out);
  if (porcelain)
    std::cout << "decoded_frames=" << dec.frames.size() << '\n';
  else
    std::cout << enc.mixed_frames.size() << " mixed frames -> " << dec.frames.size()
              << " frames (" << out << ")\n";
  print_stats(std::cout, dec.stats, porcelain);
  return 0;
}

int cmd_roundtrip(const InputOptions& iopt, const ConfigOptions& copt, const std::string& out,
                  bool porcelain) {
  const ubss::CodecConfig cfg = copt.load();
  const auto frames = load_frames(iopt, cfg);
  const ubss::RoundtripReport r = ubss::roundtrip_eval(frames, cfg);
  if (!out.empty())
    write_frames(
        ubss::decode_sequence(ubss::at_container_precision(ubss::encode_sequence(frames, cfg)), cfg)
            .frames,
        out);
  if (porcelain) {
    std::cout << "source_frames=" << r.source_count << "\nmixed_frames=" << r.mixed_count
              << "\ntail_frames=" << r.tail_count << "\ndecoded_frames=" << r.decoded_count << '\n';
    print_stats(std::cout, r.stats, true);
    ubss::write_report_porcelain(std::cout, r.quality);
  } else {
    std::cout << r.source_count << " source frames -> " << r.mixed_count << " mixed + "
              << r.tail_count << " tail -> " << r.decoded_count << " decoded\n";
    print_stats(std::cout, r.stats, false);
    ubss::write_report_table(std::cout, r.quality);
  }
  return 0;
}

int cmd_psnr(const InputOptions& ref, const InputOptions& test, bool porcelain) {
  const ubss::CodecConfig cfg;
  const auto a = load_frames(ref, cfg);
  const auto b = load_frames(test, cfg);
  const ubss::QualityReport r = ubss::sequence_report(a, b);
  if (porcelain)
    ubss::write_report_porcelain(std::cout, r);
  else
    ubss::write_report_table(std::cout, r);
  return 0;
}

int cmd_bench(const InputOptions& iopt, const ConfigOptions& copt, const std::string& codec_cmd,
              std::string workdir, bool porcelain) {
  ubss::CodecConfig cfg = copt.load();
  if (copt.quant.empty())
    cfg.quant = ubss::Quantization::Affine8; // external codecs take 8-bit input
  const auto frames = load_frames(iopt, cfg);
  if (workdir.empty())
    workdir = (fs::temp_directory_path() / ("ubssvc-bench-" + std::to_string(::getpid()))).string();
  const ubss::BenchReport r = ubss::run_bench(frames, cfg, codec_cmd, workdir);
  if (porcelain)
    ubss::write_bench_porcelain(std::cout, r);
  else
    ubss::write_bench_table(std::cout, r);
  return r.ok() ? 0 : kExitExternal;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frame mixing video compression with sparse component separation"};
  app.require_subcommand(1);
  bool porcelain = false;
  app.add_flag("--porcelain", porcelain, "key=value output for scripts");

  ConfigOptions copt;
  InputOptions iopt;
  std::string out;

  auto* validate = app.add_subcommand("validate-matrix", "check that every square submatrix is nonsingular");
  std::optional<double> det_floor;
  copt.add_to(validate, false);
  validate->add_option("--det-floor", det_floor, "minimum |det| for a square submatrix");

  auto* gen = app.add_subcommand("gen", "write a deterministic synthetic sequence");
  iopt.add_to(gen, true);
  copt.add_to(gen, false);
  gen->add_option("--out", out, "PGM pattern (%d) or raw file")->required();

  auto* mix = app.add_subcommand("mix", "mix a sequence into a UBSS container");
  iopt.add_to(mix, true);
  copt.add_to(mix, true);
  mix->add_option("--out", out, "container path")->required();

  auto* separate = app.add_subcommand("separate", "recover frames from a UBSS container");
  std::string container;
  separate->add_option("--in", container, "container path")->required();
  copt.add_to(separate, false);
  separate->add_option("--out", out, "PGM pattern (%d) or raw file")->required();

  auto* roundtrip = app.add_subcommand("roundtrip", "mix and separate in memory, report PSNR");
  iopt.add_to(roundtrip, true);
  copt.add_to(roundtrip, true);
  roundtrip->add_option("--out", out, "optionally write decoded frames");

  auto* psnr = app.add_subcommand("psnr", "compare two sequences");
  InputOptions ref, test;
  psnr->add_option("--ref", ref.in, "reference sequence")->required();
  psnr->add_option("--test", test.in, "sequence under test")->required();
  psnr->add_option("--width", ref.width, "frame width (raw input)");
  psnr->add_option("--height", ref.height, "frame height (raw input)");

  auto* bench = app.add_subcommand("bench", "compare an external codec with and without mixing");
  std::string codec_cmd, workdir;
  iopt.add_to(bench, true);
  copt.add_to(bench, true);
  bench->add_option("--codec-cmd", codec_cmd, "command template using {in} {out} "
                                              "({width} {height} {frames} optional)")
      ->required();
  bench->add_option("--workdir", workdir, "directory for the exported streams");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*validate)
      return cmd_validate(copt, det_floor, porcelain);
    if (*gen)
      return cmd_gen(iopt, copt, out);
    if (*mix)
      return cmd_mix(iopt, copt, out, porcelain);
    if (*separate)
      return cmd_separate(container, copt, out, porcelain);
    if (*roundtrip)
      return cmd_roundtrip(iopt, copt, out, porcelain);
    if (*psnr) {
      test.width = ref.width;
      test.height = ref.height;
      return cmd_psnr(ref, test, porcelain);
    }
    if (*bench)
      return cmd_bench(iopt, copt, codec_cmd, workdir, porcelain);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
