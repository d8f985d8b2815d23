#pragma once

#include "ubss/frame.hpp"

namespace ubss {

// One-level orthonormal 2-D Haar decomposition. Each plane is
// (width / 2) x (height / 2).
//   ll: row approx, column approx
//   lh: row detail, column approx
//   hl: row approx, column detail
//   hh: row detail, column detail
struct SubbandImage {
  Frame ll, lh, hl, hh;
  std::size_t original_width = 0;
  std::size_t original_height = 0;
};

// Throws ShapeError on odd width or height.
SubbandImage haar_forward(const Frame& frame);

// Exact inverse of haar_forward. Throws ShapeError if the four planes
// disagree in size or with the recorded original dimensions.
Frame haar_inverse(const SubbandImage& bands);

} // namespace ubss
