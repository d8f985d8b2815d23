#pragma once

#include "ubss/frame.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace ubss {

// The m x n mixing matrix A shared by encoder and decoder.
// Construction enforces finiteness, m >= 2 and m < n. The nonsingular
// submatrix condition is checked separately by validate_mixing_matrix so
// that a failing matrix can still be reported on.
class MixingMatrix {
public:
  explicit MixingMatrix(Eigen::MatrixXd entries);

  // Same as the constructor, then throws InvalidMatrixError unless every
  // m x m submatrix has |det| > det_floor.
  static MixingMatrix checked(Eigen::MatrixXd entries, double det_floor = 1e-9);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& matrix() const noexcept { return entries_; }

  friend bool operator==(const MixingMatrix& a, const MixingMatrix& b) {
    return a.entries_.rows() == b.entries_.rows() && a.entries_.cols() == b.entries_.cols() &&
           a.entries_ == b.entries_;
  }

private:
  Eigen::MatrixXd entries_;
};

// The 3 x 4 matrix used for the reference experiments.
MixingMatrix default_mixing_matrix();

inline constexpr double kDefaultDetFloor = 1e-9;

struct SubmatrixDeterminant {
  std::vector<std::size_t> columns; // 0-based, ascending
  double abs_determinant = 0.0;
};

struct ValidationReport {
  bool passed = false;
  std::vector<SubmatrixDeterminant> submatrix_results;
  double min_abs_determinant = 0.0;
};

// Every k-subset of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k);

ValidationReport validate_mixing_matrix(const MixingMatrix& a, double det_floor = kDefaultDetFloor);

// x_i(t) = sum_j A(i, j) * s_j(t) for every pixel t.
MixedBlock mix_block(const MixingMatrix& a, const FrameBlock& sources);

// A+ = A^T (A A^T)^-1, the minimum-norm right inverse (n x m).
// Throws InvalidMatrixError when the 1-norm condition number of A A^T
// exceeds max_condition.
Eigen::MatrixXd generalized_inverse(const MixingMatrix& a, double max_condition = 1e12);

struct SparsityReport {
  std::size_t max_nonzeros = 1;        // every column may have at most this many
  std::size_t worst_column_nonzeros = 0;
  std::vector<std::size_t> histogram;  // histogram[k] = columns with k nonzeros
  double satisfied_fraction = 1.0;
  bool satisfied = true;
};

// Counts |value| > zero_eps per column of an n x T matrix against the
// bound m - 1.
SparsityReport check_sparsity(const Eigen::MatrixXd& s, std::size_t m, double zero_eps = 1e-12);
SparsityReport check_sparsity(const FrameBlock& s, std::size_t m, double zero_eps = 1e-12);

// Stack frames as rows of an (frames x T) matrix, and back.
Eigen::MatrixXd frames_to_matrix(std::span<const Frame> frames);
std::vector<Frame> matrix_to_frames(const Eigen::MatrixXd& rows, std::size_t width,
                                    std::size_t height);

} // namespace ubss
