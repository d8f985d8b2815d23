#pragma once

#include "ubss/frame.hpp"

#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace ubss {

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

// Mean squared pixel difference over width * height pixels.
double frame_mse(const Frame& a, const Frame& b);

// 10 log10(255^2 / MSE); kPsnrInfinity when the frames are identical.
double frame_psnr(const Frame& a, const Frame& b);

// PSNR from an already computed MSE.
double psnr_from_mse(double mse);

struct QualityReport {
  std::vector<double> per_frame_mse;
  std::vector<double> per_frame_psnr;
  // Mean over finite PSNR entries; kPsnrInfinity when none are finite.
  double mean_psnr = kPsnrInfinity;
  std::size_t infinite_count = 0;
};

// Frame-by-frame comparison. Throws ShapeError on count mismatch or empty
// input.
QualityReport sequence_report(std::span<const Frame> original, std::span<const Frame> reconstructed);

// Human-readable table, one row per frame plus a summary line.
void write_report_table(std::ostream& os, const QualityReport& report);
// key=value lines for scripts.
void write_report_porcelain(std::ostream& os, const QualityReport& report);

} // namespace ubss
