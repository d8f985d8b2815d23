#include "ubss/synth.hpp"

#include "ubss/error.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace ubss {

SynthPreset parse_synth_preset(std::string_view name) {
  if (name == "sparse-detail")
    return SynthPreset::SparseDetail;
  if (name == "moving-bars")
    return SynthPreset::MovingBars;
  throw FormatError("unknown preset '" + std::string(name) + "'");
}

std::string_view to_string(SynthPreset preset) {
  return preset == SynthPreset::SparseDetail ? "sparse-detail" : "moving-bars";
}

namespace {

// Inclusive range. Plain modulo keeps the mapping identical on every
// standard library (the std distributions are implementation-defined).
int draw(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

struct Rect {
  int x, y, w, h, dx, dy, level;
};

std::vector<Frame> sparse_detail(const SynthParams& p) {
  if (p.width % 2 != 0 || p.height % 2 != 0)
    throw ShapeError("sparse-detail frames need even dimensions");
  if (p.block_size < 2 || p.max_active == 0 || p.max_active >= p.block_size)
    throw ShapeError("sparse-detail needs 0 < max_active < block_size");
  std::mt19937_64 rng(p.seed);
  const int w = static_cast<int>(p.width);
  const int h = static_cast<int>(p.height);

  // Background: a base level plus a few rectangles on even coordinates
  // drifting by even steps, so every 2x2 cell stays flat.
  const int base = draw(rng, 70, 110);
  std::vector<Rect> rects(4);
  for (Rect& r : rects) {
    r.w = 2 * draw(rng, 2, std::max(2, w / 6));
    r.h = 2 * draw(rng, 2, std::max(2, h / 6));
    r.x = 2 * draw(rng, 0, w / 2 - 1);
    r.y = 2 * draw(rng, 0, h / 2 - 1);
    r.dx = 2 * draw(rng, -1, 1);
    r.dy = 2 * draw(rng, -1, 1);
    r.level = draw(rng, -25, 35);
  }

  const std::size_t cells_x = p.width / 2;
  const std::size_t cells_y = p.height / 2;
  std::vector<Frame> frames;
  frames.reserve(p.frames);
  std::vector<std::size_t> order(p.block_size);

  for (std::size_t k = 0; k < p.frames; ++k) {
    Frame f(p.width, p.height, static_cast<double>(base));
    for (const Rect& r : rects) {
      const int ox = r.x + r.dx * static_cast<int>(k);
      const int oy = r.y + r.dy * static_cast<int>(k);
      for (int y = 0; y < r.h; ++y)
        for (int x = 0; x < r.w; ++x) {
          const int px = ((ox + x) % w + w) % w;
          const int py = ((oy + y) % h + h) % h;
          f.at(static_cast<std::size_t>(px), static_cast<std::size_t>(py)) += r.level;
        }
    }
    frames.push_back(std::move(f));
  }

  // Detail: per block and per cell choose up to max_active frames.
  for (std::size_t b0 = 0; b0 < p.frames; b0 += p.block_size) {
    const std::size_t len = std::min(p.block_size, p.frames - b0);
    for (std::size_t cy = 0; cy < cells_y; ++cy) {
      for (std::size_t cx = 0; cx < cells_x; ++cx) {
        const int active = draw(rng, 0, static_cast<int>(p.max_active));
        for (std::size_t i = 0; i < order.size(); ++i)
          order[i] = i;
        for (int a = 0; a < active; ++a) {
          // partial Fisher-Yates
          const auto pick = static_cast<std::size_t>(draw(rng, a, static_cast<int>(p.block_size) - 1));
          std::swap(order[static_cast<std::size_t>(a)], order[pick]);
          const std::size_t j = order[static_cast<std::size_t>(a)];
          const int d0 = draw(rng, -12, 12);
          const int d1 = draw(rng, -12, 12);
          const int d2 = draw(rng, -12, 12);
          if (j >= len)
            continue;
          Frame& f = frames[b0 + j];
          f.at(2 * cx, 2 * cy) += d0;
          f.at(2 * cx + 1, 2 * cy) += d1;
          f.at(2 * cx, 2 * cy + 1) += d2;
          f.at(2 * cx + 1, 2 * cy + 1) -= d0 + d1 + d2;
        }
      }
    }
  }
  for (Frame& f : frames)
    for (double& v : f.pixels())
      v = std::clamp(v, 0.0, 255.0);
  return frames;
}

std::vector<Frame> moving_bars(const SynthParams& p) {
  std::mt19937_64 rng(p.seed);
  const int w = static_cast<int>(p.width);
  const int base = draw(rng, 40, 90);
  struct Bar {
    int x, width, speed, level;
  };
  std::vector<Bar> bars(5);
  for (Bar& b : bars) {
    b.x = draw(rng, 0, w - 1);
    b.width = 2 * draw(rng, 1, 4) + 1;
    b.speed = draw(rng, 1, 3) * (draw(rng, 0, 1) ? 1 : -1);
    b.level = draw(rng, 20, 120);
  }
  std::vector<Frame> frames;
  for (std::size_t k = 0; k < p.frames; ++k) {
    Frame f(p.width, p.height, static_cast<double>(base));
    for (const Bar& b : bars) {
      const int start = b.x + b.speed * static_cast<int>(k);
      for (int x = 0; x < b.width; ++x) {
        const int px = ((start + x) % w + w) % w;
        for (std::size_t y = 0; y < p.height; ++y)
          f.at(static_cast<std::size_t>(px), y) += b.level;
      }
    }
    // vertical gradient so rows are not identical
    for (std::size_t y = 0; y < p.height; ++y)
      for (std::size_t x = 0; x < p.width; ++x)
        f.at(x, y) = std::clamp(f.at(x, y) + static_cast<double>((y * 32) / p.height), 0.0, 255.0);
    frames.push_back(std::move(f));
  }
  return frames;
}

} // namespace

std::vector<Frame> generate_sequence(const SynthParams& params) {
  if (params.width == 0 || params.height == 0 || params.frames == 0)
    throw ShapeError("synthetic sequence needs positive width, height and frame count");
  return params.preset == SynthPreset::SparseDetail ? sparse_detail(params) : moving_bars(params);
}

} // namespace ubss
