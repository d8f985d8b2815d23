#include "ubss/frame.hpp"

#include "ubss/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ubss {

Frame::Frame(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), pixels_(width * height, fill) {
  if (width == 0 || height == 0)
    throw ShapeError("frame dimensions must be positive");
}

Frame::Frame(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width == 0 || height == 0)
    throw ShapeError("frame dimensions must be positive");
  if (pixels_.size() != width * height)
    throw ShapeError("frame has " + std::to_string(pixels_.size()) + " pixels, expected " +
                     std::to_string(width * height));
}

void require_uniform_shape(std::span<const Frame> frames) {
  for (const Frame& f : frames) {
    if (!f.same_shape(frames.front()))
      throw ShapeError("frames differ in dimensions: " + std::to_string(f.width()) + "x" +
                       std::to_string(f.height()) + " vs " +
                       std::to_string(frames.front().width()) + "x" +
                       std::to_string(frames.front().height()));
  }
}

FrameBlock::FrameBlock(std::vector<Frame> frames) : frames_(std::move(frames)) {
  if (frames_.size() < 2)
    throw ShapeError("a source block needs at least 2 frames");
  require_uniform_shape(frames_);
}

MixedBlock::MixedBlock(std::vector<Frame> frames) : frames_(std::move(frames)) {
  if (frames_.size() < 2)
    throw ShapeError("a mixed block needs at least 2 frames");
  require_uniform_shape(frames_);
}

std::uint8_t to_u8(double value) noexcept {
  if (!(value > 0.0)) // also catches NaN
    return 0;
  if (value >= 255.0)
    return 255;
  return static_cast<std::uint8_t>(std::round(value));
}

Frame quantize_8bit(const Frame& frame) {
  Frame out = frame;
  for (double& v : out.pixels())
    v = to_u8(v);
  return out;
}

} // namespace ubss
