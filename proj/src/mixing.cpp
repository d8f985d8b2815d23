#include "ubss/mixing.hpp"

#include "ubss/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ubss {

MixingMatrix::MixingMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 2)
    throw ShapeError("mixing matrix needs at least 2 rows");
  if (entries_.rows() >= entries_.cols())
    throw ShapeError("mixing matrix must be underdetermined (m < n), got " +
                     std::to_string(entries_.rows()) + "x" + std::to_string(entries_.cols()));
  if (!entries_.allFinite())
    throw InvalidMatrixError("mixing matrix has non-finite entries");
}

MixingMatrix MixingMatrix::checked(Eigen::MatrixXd entries, double det_floor) {
  MixingMatrix a(std::move(entries));
  const ValidationReport report = validate_mixing_matrix(a, det_floor);
  if (!report.passed)
    throw InvalidMatrixError("mixing matrix has a singular square submatrix (min |det| = " +
                             std::to_string(report.min_abs_determinant) + ")");
  return a;
}

MixingMatrix default_mixing_matrix() {
  Eigen::MatrixXd a(3, 4);
  a << 0.50, 0.75, 0.25, 0.15,
       0.40, 0.25, 0.10, 1.00,
       0.45, 0.10, 0.85, 0.25;
  return MixingMatrix(std::move(a));
}

std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n)
    return out;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    out.push_back(idx);
    // advance the rightmost index that still has room
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1))
      --i;
    if (i == 0)
      break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j)
      idx[j] = idx[j - 1] + 1;
  }
  return out;
}

namespace {

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& a, const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k)
    out.col(static_cast<Eigen::Index>(k)) = a.col(static_cast<Eigen::Index>(cols[k]));
  return out;
}

} // namespace

ValidationReport validate_mixing_matrix(const MixingMatrix& a, double det_floor) {
  if (!(det_floor > 0.0))
    throw Error("determinant floor must be positive");
  ValidationReport report;
  report.passed = true;
  report.min_abs_determinant = std::numeric_limits<double>::infinity();
  for (auto& cols : combinations(a.cols(), a.rows())) {
    const double d = std::abs(select_columns(a.matrix(), cols).determinant());
    report.passed = report.passed && d > det_floor;
    report.min_abs_determinant = std::min(report.min_abs_determinant, d);
    report.submatrix_results.push_back({std::move(cols), d});
  }
  return report;
}

MixedBlock mix_block(const MixingMatrix& a, const FrameBlock& sources) {
  if (sources.count() != a.cols())
    throw ShapeError("block has " + std::to_string(sources.count()) +
                     " frames but the mixing matrix expects " + std::to_string(a.cols()));
  const std::size_t pixels = sources.pixel_count();
  std::vector<Frame> mixed;
  mixed.reserve(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Frame out(sources.width(), sources.height());
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double w = a(i, j);
      const Frame& src = sources[j];
      for (std::size_t t = 0; t < pixels; ++t)
        out[t] += w * src[t];
    }
    mixed.push_back(std::move(out));
  }
  return MixedBlock(std::move(mixed));
}

Eigen::MatrixXd generalized_inverse(const MixingMatrix& a, double max_condition) {
  const Eigen::MatrixXd& m = a.matrix();
  const Eigen::MatrixXd gram = m * m.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (!lu.isInvertible())
    throw InvalidMatrixError("A A^T is singular");
  const Eigen::MatrixXd gram_inv = lu.inverse();
  const double cond = gram.cwiseAbs().colwise().sum().maxCoeff() *
                      gram_inv.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(cond) || cond > max_condition)
    throw InvalidMatrixError("A A^T is ill-conditioned (condition " + std::to_string(cond) + ")");
  return m.transpose() * gram_inv;
}

SparsityReport check_sparsity(const Eigen::MatrixXd& s, std::size_t m, double zero_eps) {
  if (m == 0 || m > static_cast<std::size_t>(s.rows()))
    throw ShapeError("sparsity bound needs 1 <= m <= rows");
  SparsityReport report;
  report.max_nonzeros = m - 1;
  report.histogram.assign(static_cast<std::size_t>(s.rows()) + 1, 0);
  std::size_t ok = 0;
  for (Eigen::Index t = 0; t < s.cols(); ++t) {
    const auto nz = static_cast<std::size_t>((s.col(t).array().abs() > zero_eps).count());
    ++report.histogram[nz];
    report.worst_column_nonzeros = std::max(report.worst_column_nonzeros, nz);
    if (nz <= report.max_nonzeros)
      ++ok;
  }
  report.satisfied = report.worst_column_nonzeros <= report.max_nonzeros;
  report.satisfied_fraction =
      s.cols() == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(s.cols());
  return report;
}

SparsityReport check_sparsity(const FrameBlock& s, std::size_t m, double zero_eps) {
  return check_sparsity(frames_to_matrix(s.frames()), m, zero_eps);
}

Eigen::MatrixXd frames_to_matrix(std::span<const Frame> frames) {
  if (frames.empty())
    return {};
  require_uniform_shape(frames);
  const auto t = static_cast<Eigen::Index>(frames.front().size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(frames.size()), t);
  for (std::size_t i = 0; i < frames.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(frames[i].pixels().data(), t);
  return out;
}

std::vector<Frame> matrix_to_frames(const Eigen::MatrixXd& rows, std::size_t width,
                                    std::size_t height) {
  if (static_cast<std::size_t>(rows.cols()) != width * height)
    throw ShapeError("matrix width does not match frame size");
  std::vector<Frame> out;
  out.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    std::vector<double> px(rows.row(i).begin(), rows.row(i).end());
    out.emplace_back(width, height, std::move(px));
  }
  return out;
}

} // namespace ubss
