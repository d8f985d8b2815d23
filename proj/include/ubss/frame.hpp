#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ubss {

// A single-plane (luma) image stored as row-major doubles.
// Source frames hold 8-bit values widened to double; mixed frames may
// leave [0, 255].
class Frame {
public:
  Frame() = default;
  Frame(std::size_t width, std::size_t height, double fill = 0.0);
  Frame(std::size_t width, std::size_t height, std::vector<double> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  double& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }
  double at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }

  double& operator[](std::size_t t) { return pixels_[t]; }
  double operator[](std::size_t t) const { return pixels_[t]; }

  std::span<double> pixels() noexcept { return pixels_; }
  std::span<const double> pixels() const noexcept { return pixels_; }

  bool same_shape(const Frame& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Frame&, const Frame&) = default;

private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> pixels_;
};

// n source frames of identical shape (the n x T matrix s).
class FrameBlock {
public:
  explicit FrameBlock(std::vector<Frame> frames);

  std::size_t count() const noexcept { return frames_.size(); }
  std::size_t width() const noexcept { return frames_.front().width(); }
  std::size_t height() const noexcept { return frames_.front().height(); }
  std::size_t pixel_count() const noexcept { return frames_.front().size(); }

  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  const std::vector<Frame>& frames() const noexcept { return frames_; }
  std::vector<Frame> release() && { return std::move(frames_); }

private:
  std::vector<Frame> frames_;
};

// m mixed frames of identical shape (the m x T matrix x).
class MixedBlock {
public:
  explicit MixedBlock(std::vector<Frame> frames);

  std::size_t count() const noexcept { return frames_.size(); }
  std::size_t width() const noexcept { return frames_.front().width(); }
  std::size_t height() const noexcept { return frames_.front().height(); }
  std::size_t pixel_count() const noexcept { return frames_.front().size(); }

  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  const std::vector<Frame>& frames() const noexcept { return frames_; }
  std::vector<Frame> release() && { return std::move(frames_); }

private:
  std::vector<Frame> frames_;
};

// Clamp to [0, 255] and round half away from zero.
std::uint8_t to_u8(double value) noexcept;

// Frame with every pixel passed through to_u8, kept as doubles.
Frame quantize_8bit(const Frame& frame);

// Throws ShapeError unless every frame matches the first one's shape.
void require_uniform_shape(std::span<const Frame> frames);

} // namespace ubss
