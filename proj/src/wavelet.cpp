#include "ubss/wavelet.hpp"

#include "ubss/error.hpp"

#include <cmath>

namespace ubss {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

} // namespace

SubbandImage haar_forward(const Frame& f) {
  if (f.width() % 2 != 0 || f.height() % 2 != 0)
    throw ShapeError("Haar transform needs even dimensions");
  const std::size_t hw = f.width() / 2;
  const std::size_t hh = f.height() / 2;
  SubbandImage sb{Frame(hw, hh), Frame(hw, hh), Frame(hw, hh), Frame(hw, hh), f.width(),
                  f.height()};
  for (std::size_t y = 0; y < hh; ++y) {
    for (std::size_t x = 0; x < hw; ++x) {
      const double a = f.at(2 * x, 2 * y);
      const double b = f.at(2 * x + 1, 2 * y);
      const double c = f.at(2 * x, 2 * y + 1);
      const double d = f.at(2 * x + 1, 2 * y + 1);
      // row pass
      const double top_lo = (a + b) * kInvSqrt2;
      const double top_hi = (a - b) * kInvSqrt2;
      const double bot_lo = (c + d) * kInvSqrt2;
      const double bot_hi = (c - d) * kInvSqrt2;
      // column pass
      sb.ll.at(x, y) = (top_lo + bot_lo) * kInvSqrt2;
      sb.hl.at(x, y) = (top_lo - bot_lo) * kInvSqrt2;
      sb.lh.at(x, y) = (top_hi + bot_hi) * kInvSqrt2;
      sb.hh.at(x, y) = (top_hi - bot_hi) * kInvSqrt2;
    }
  }
  return sb;
}

Frame haar_inverse(const SubbandImage& sb) {
  if (!sb.ll.same_shape(sb.lh) || !sb.ll.same_shape(sb.hl) || !sb.ll.same_shape(sb.hh))
    throw ShapeError("subband planes differ in size");
  const std::size_t hw = sb.ll.width();
  const std::size_t hh = sb.ll.height();
  if (sb.original_width != 2 * hw || sb.original_height != 2 * hh)
    throw ShapeError("subband size does not match recorded frame size");
  Frame f(2 * hw, 2 * hh);
  for (std::size_t y = 0; y < hh; ++y) {
    for (std::size_t x = 0; x < hw; ++x) {
      const double top_lo = (sb.ll.at(x, y) + sb.hl.at(x, y)) * kInvSqrt2;
      const double bot_lo = (sb.ll.at(x, y) - sb.hl.at(x, y)) * kInvSqrt2;
      const double top_hi = (sb.lh.at(x, y) + sb.hh.at(x, y)) * kInvSqrt2;
      const double bot_hi = (sb.lh.at(x, y) - sb.hh.at(x, y)) * kInvSqrt2;
      f.at(2 * x, 2 * y) = (top_lo + top_hi) * kInvSqrt2;
      f.at(2 * x + 1, 2 * y) = (top_lo - top_hi) * kInvSqrt2;
      f.at(2 * x, 2 * y + 1) = (bot_lo + bot_hi) * kInvSqrt2;
      f.at(2 * x + 1, 2 * y + 1) = (bot_lo - bot_hi) * kInvSqrt2;
    }
  }
  return f;
}

} // namespace ubss
