#include "ubss/pipeline.hpp"

#include "ubss/error.hpp"
#include "ubss/wavelet.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace ubss {

std::string_view to_string(PadPolicy p) {
  return p == PadPolicy::Reject ? "reject" : "edge-replicate";
}

std::string_view to_string(TailPolicy) { return "passthrough"; }

std::string_view to_string(Quantization q) {
  return q == Quantization::FloatContainer ? "float" : "affine8";
}

Quantization parse_quantization(std::string_view text) {
  if (text == "float" || text == "float-container")
    return Quantization::FloatContainer;
  if (text == "affine8" || text == "affine-8bit")
    return Quantization::Affine8;
  throw FormatError("unknown quantization mode '" + std::string(text) + "'");
}

PadPolicy parse_pad_policy(std::string_view text) {
  if (text == "reject")
    return PadPolicy::Reject;
  if (text == "edge-replicate")
    return PadPolicy::EdgeReplicate;
  throw FormatError("unknown pad policy '" + std::string(text) + "'");
}

void CodecConfig::validate() const {
  if (!(tau >= 0.0))
    throw Error("tau must be non-negative");
  const ValidationReport report = validate_mixing_matrix(matrix, det_floor);
  if (!report.passed)
    throw InvalidMatrixError("mixing matrix has a singular square submatrix (min |det| = " +
                             std::to_string(report.min_abs_determinant) + ")");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
      throw FormatError("");
    return v;
  } catch (const std::exception&) {
    throw FormatError("config key '" + key + "': not a number: '" + s + "'");
  }
}

std::size_t parse_count(const std::string& s, const std::string& key) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw FormatError("config key '" + key + "': not a count: '" + s + "'");
  return v;
}

} // namespace

CodecConfig parse_config(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const std::string body = trim(line);
    if (body.empty())
      continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) + ": expected key = value");
    kv[trim(std::string_view(body).substr(0, eq))] = trim(std::string_view(body).substr(eq + 1));
  }

  CodecConfig cfg;
  const bool has_m = kv.count("m") != 0, has_n = kv.count("n") != 0;
  const bool has_matrix = kv.count("matrix") != 0;
  if (has_m || has_n || has_matrix) {
    if (!(has_m && has_n && has_matrix))
      throw FormatError("config must give m, n and matrix together");
    const std::size_t m = parse_count(kv.at("m"), "m");
    const std::size_t n = parse_count(kv.at("n"), "n");
    std::string entries = kv.at("matrix");
    std::replace(entries.begin(), entries.end(), ',', ' ');
    std::istringstream es(entries);
    std::vector<double> values;
    std::string tok;
    while (es >> tok)
      values.push_back(parse_real(tok, "matrix"));
    if (values.size() != m * n)
      throw FormatError("config matrix has " + std::to_string(values.size()) +
                        " entries, expected m*n = " + std::to_string(m * n));
    Eigen::MatrixXd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * n + j];
    cfg.matrix = MixingMatrix(std::move(a));
  }
  if (auto it = kv.find("tau"); it != kv.end())
    cfg.tau = parse_real(it->second, "tau");
  if (auto it = kv.find("det_floor"); it != kv.end())
    cfg.det_floor = parse_real(it->second, "det_floor");
  if (auto it = kv.find("pad"); it != kv.end())
    cfg.pad = parse_pad_policy(it->second);
  if (auto it = kv.find("tail"); it != kv.end() && it->second != "passthrough")
    throw FormatError("unsupported tail policy '" + it->second + "'");
  if (auto it = kv.find("quant"); it != kv.end())
    cfg.quant = parse_quantization(it->second);
  for (const auto& [key, value] : kv) {
    static const char* known[] = {"m", "n", "matrix", "tau", "det_floor", "pad", "tail", "quant"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known))
      throw FormatError("unknown config key '" + key + "'");
  }
  return cfg;
}

CodecConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void write_config(std::ostream& os, const CodecConfig& cfg) {
  os << "m = " << cfg.m() << "\nn = " << cfg.n() << "\nmatrix =";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < cfg.m(); ++i)
    for (std::size_t j = 0; j < cfg.n(); ++j)
      os << ' ' << cfg.matrix(i, j);
  os << "\ntau = " << cfg.tau << "\ndet_floor = " << cfg.det_floor << "\npad = " << to_string(cfg.pad)
     << "\ntail = " << to_string(cfg.tail) << "\nquant = " << to_string(cfg.quant) << '\n';
}

Frame pad_to_even(const Frame& f) {
  const std::size_t w = f.width() + f.width() % 2;
  const std::size_t h = f.height() + f.height() % 2;
  if (w == f.width() && h == f.height())
    return f;
  Frame out(w, h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      out.at(x, y) = f.at(std::min(x, f.width() - 1), std::min(y, f.height() - 1));
  return out;
}

Frame crop(const Frame& f, std::size_t width, std::size_t height) {
  if (width > f.width() || height > f.height())
    throw ShapeError("crop window exceeds the frame");
  if (width == f.width() && height == f.height())
    return f;
  Frame out(width, height);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x)
      out.at(x, y) = f.at(x, y);
  return out;
}

EncodedSequence encode_sequence(std::span<const Frame> frames, const CodecConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n();
  if (frames.size() < n)
    throw ShapeError("need at least " + std::to_string(n) + " frames, got " +
                     std::to_string(frames.size()));
  require_uniform_shape(frames);
  const bool odd = frames.front().width() % 2 != 0 || frames.front().height() % 2 != 0;
  if (odd && cfg.pad == PadPolicy::Reject)
    throw ShapeError("odd frame dimensions are rejected by the pad policy");

  EncodedSequence enc;
  enc.matrix = cfg.matrix;
  enc.quant = cfg.quant;
  enc.width = frames.front().width();
  enc.height = frames.front().height();

  const std::size_t blocks = frames.size() / n;
  for (std::size_t b = 0; b < blocks; ++b) {
    FrameBlock block({frames.begin() + static_cast<std::ptrdiff_t>(b * n),
                      frames.begin() + static_cast<std::ptrdiff_t>((b + 1) * n)});
    for (Frame& f : std::move(mix_block(cfg.matrix, block)).release())
      enc.mixed_frames.push_back(std::move(f));
  }
  for (std::size_t i = blocks * n; i < frames.size(); ++i)
    enc.tail_frames.push_back(quantize_8bit(frames[i]));

  for (const Frame& f : enc.mixed_frames)
    for (double v : f.pixels())
      if (!std::isfinite(v))
        throw Error("mixing produced a non-finite value");

  if (cfg.quant == Quantization::Affine8) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Frame& f : enc.mixed_frames)
      for (double v : f.pixels()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    enc.offset = lo;
    enc.scale = (hi - lo) / 255.0;
    for (Frame& f : enc.mixed_frames)
      for (double& v : f.pixels())
        v = enc.scale > 0.0 ? std::clamp(std::round((v - lo) / enc.scale), 0.0, 255.0) : 0.0;
  }
  return enc;
}

namespace {

std::vector<Frame> band_of(const std::vector<SubbandImage>& bands, Frame SubbandImage::*member) {
  std::vector<Frame> out;
  out.reserve(bands.size());
  for (const SubbandImage& sb : bands)
    out.push_back(sb.*member);
  return out;
}

} // namespace

DecodeResult decode_sequence(const EncodedSequence& enc, const CodecConfig& cfg) {
  cfg.validate();
  if (!(enc.matrix == cfg.matrix))
    throw FormatError("encoded sequence was mixed with a different matrix than the config");
  const std::size_t m = cfg.m();
  const std::size_t n = cfg.n();
  if (enc.mixed_frames.empty() || enc.mixed_frames.size() % m != 0)
    throw FormatError("mixed frame count " + std::to_string(enc.mixed_frames.size()) +
                      " is not a positive multiple of m = " + std::to_string(m));
  for (const Frame& f : enc.mixed_frames)
    if (f.width() != enc.width || f.height() != enc.height)
      throw FormatError("mixed frame dimensions disagree with the stream header");
  for (const Frame& f : enc.tail_frames)
    if (f.width() != enc.width || f.height() != enc.height)
      throw FormatError("tail frame dimensions disagree with the stream header");
  const bool odd = enc.width % 2 != 0 || enc.height % 2 != 0;
  if (odd && cfg.pad == PadPolicy::Reject)
    throw ShapeError("odd frame dimensions are rejected by the pad policy");

  const HyperplaneSet planes(cfg.matrix);
  const Eigen::MatrixXd pinv = generalized_inverse(cfg.matrix);

  DecodeResult out;
  out.frames.reserve(enc.source_count());
  for (std::size_t b = 0; b < enc.blocks(); ++b) {
    std::vector<SubbandImage> mixed_bands;
    for (std::size_t i = 0; i < m; ++i) {
      Frame f = enc.mixed_frames[b * m + i];
      if (enc.quant == Quantization::Affine8)
        for (double& v : f.pixels())
          v = v * enc.scale + enc.offset;
      mixed_bands.push_back(haar_forward(pad_to_even(f)));
    }
    const std::size_t bw = mixed_bands.front().ll.width();
    const std::size_t bh = mixed_bands.front().ll.height();

    std::vector<SubbandImage> sources(n);
    for (SubbandImage& sb : sources) {
      sb.original_width = mixed_bands.front().original_width;
      sb.original_height = mixed_bands.front().original_height;
    }
    for (Frame SubbandImage::*member : {&SubbandImage::lh, &SubbandImage::hl, &SubbandImage::hh}) {
      RecoveryResult rec =
          recover_block(planes, frames_to_matrix(band_of(mixed_bands, member)), cfg.tau);
      out.stats.merge(rec.stats);
      std::vector<Frame> planes_out = matrix_to_frames(rec.sources, bw, bh);
      for (std::size_t j = 0; j < n; ++j)
        sources[j].*member = std::move(planes_out[j]);
    }
    std::vector<Frame> ll =
        matrix_to_frames(recover_dense(pinv, frames_to_matrix(band_of(mixed_bands, &SubbandImage::ll))),
                         bw, bh);
    for (std::size_t j = 0; j < n; ++j) {
      sources[j].ll = std::move(ll[j]);
      out.frames.push_back(crop(haar_inverse(sources[j]), enc.width, enc.height));
    }
  }
  for (const Frame& f : enc.tail_frames)
    out.frames.push_back(f);
  return out;
}

EncodedSequence at_container_precision(EncodedSequence enc) {
  if (enc.quant == Quantization::FloatContainer)
    for (Frame& f : enc.mixed_frames)
      for (double& v : f.pixels())
        v = static_cast<double>(static_cast<float>(v));
  return enc;
}

RoundtripReport roundtrip_eval(std::span<const Frame> frames, const CodecConfig& cfg) {
  const EncodedSequence enc = at_container_precision(encode_sequence(frames, cfg));
  DecodeResult dec = decode_sequence(enc, cfg);
  RoundtripReport r;
  r.source_count = frames.size();
  r.mixed_count = enc.mixed_frames.size();
  r.tail_count = enc.tail_frames.size();
  r.decoded_count = dec.frames.size();
  std::vector<Frame> reference, rebuilt;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    reference.push_back(quantize_8bit(frames[i]));
    rebuilt.push_back(quantize_8bit(dec.frames[i]));
  }
  r.quality = sequence_report(reference, rebuilt);
  r.stats = std::move(dec.stats);
  return r;
}

} // namespace ubss
