#include "ubss/metrics.hpp"

#include "ubss/error.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

namespace ubss {

double frame_mse(const Frame& a, const Frame& b) {
  if (!a.same_shape(b))
    throw ShapeError("cannot compare frames of different dimensions");
  double acc = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double d = a[t] - b[t];
    acc += d * d;
  }
  return acc / static_cast<double>(a.width() * a.height());
}

double psnr_from_mse(double mse) {
  if (mse <= 0.0)
    return kPsnrInfinity;
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double frame_psnr(const Frame& a, const Frame& b) { return psnr_from_mse(frame_mse(a, b)); }

QualityReport sequence_report(std::span<const Frame> original, std::span<const Frame> reconstructed) {
  if (original.empty())
    throw ShapeError("cannot report on an empty sequence");
  if (original.size() != reconstructed.size())
    throw ShapeError("sequence lengths differ: " + std::to_string(original.size()) + " vs " +
                     std::to_string(reconstructed.size()));
  QualityReport r;
  double sum = 0.0;
  std::size_t finite = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const double mse = frame_mse(original[i], reconstructed[i]);
    const double psnr = psnr_from_mse(mse);
    r.per_frame_mse.push_back(mse);
    r.per_frame_psnr.push_back(psnr);
    if (std::isinf(psnr)) {
      ++r.infinite_count;
    } else {
      sum += psnr;
      ++finite;
    }
  }
  r.mean_psnr = finite == 0 ? kPsnrInfinity : sum / static_cast<double>(finite);
  return r;
}

namespace {

std::string fmt_db(double v) {
  if (std::isinf(v))
    return "inf";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

} // namespace

void write_report_table(std::ostream& os, const QualityReport& report) {
  os << std::setw(6) << "frame" << std::setw(14) << "mse" << std::setw(12) << "psnr_db" << '\n';
  for (std::size_t i = 0; i < report.per_frame_mse.size(); ++i) {
    os << std::setw(6) << i << std::setw(14) << std::fixed << std::setprecision(4)
       << report.per_frame_mse[i] << std::setw(12) << fmt_db(report.per_frame_psnr[i]) << '\n';
  }
  os << "mean_psnr_db " << fmt_db(report.mean_psnr) << "  (infinite frames: "
     << report.infinite_count << ")\n";
}

void write_report_porcelain(std::ostream& os, const QualityReport& report) {
  os << "frames=" << report.per_frame_mse.size() << '\n';
  for (std::size_t i = 0; i < report.per_frame_mse.size(); ++i) {
    os << "mse." << i << '=' << std::defaultfloat << std::setprecision(17) << report.per_frame_mse[i] << '\n';
    os << "psnr." << i << '=' << fmt_db(report.per_frame_psnr[i]) << '\n';
  }
  os << "mean_psnr=" << fmt_db(report.mean_psnr) << '\n';
  os << "infinite_count=" << report.infinite_count << '\n';
}

} // namespace ubss
