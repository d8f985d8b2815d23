#pragma once

#include "ubss/mixing.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ubss {

// Subspace of R^m spanned by m - 1 columns of A.
struct Hyperplane {
  std::vector<std::size_t> index_set; // 0-based, ascending
  Eigen::MatrixXd basis;              // m x (m-1), the selected columns of A
  Eigen::MatrixXd orthonormal_basis;  // m x (m-1), same span
  Eigen::MatrixXd solver;             // (m-1) x m, (B^T B)^-1 B^T
};

// All C(n, m-1) hyperplanes in lexicographic index-set order.
class HyperplaneSet {
public:
  explicit HyperplaneSet(const MixingMatrix& a);

  std::size_t size() const noexcept { return planes_.size(); }
  std::size_t rows() const noexcept { return m_; }
  std::size_t sources() const noexcept { return n_; }
  const Hyperplane& operator[](std::size_t q) const { return planes_[q]; }
  const std::vector<Hyperplane>& planes() const noexcept { return planes_; }

private:
  std::size_t m_;
  std::size_t n_;
  std::vector<Hyperplane> planes_;
};

// Throws InvalidMatrixError if any (m-1)-column basis is rank deficient.
HyperplaneSet build_hyperplanes(const MixingMatrix& a);

// ||x - P x||_2 with P the orthogonal projector onto the plane.
double column_residual(const Hyperplane& h, std::span<const double> x_col);

struct ColumnAssignment {
  std::optional<std::size_t> plane_index; // empty for the zero assignment
  std::vector<std::size_t> support;       // the plane's index set
  std::vector<double> coefficients;       // aligned with support
  double residual = 0.0;                  // relative residual of the chosen plane
  bool forced = false;

  bool is_zero() const noexcept { return !plane_index.has_value(); }
};

// Relative residuals within this band of the minimum count as ties and go
// to the lowest plane index.
inline constexpr double kTieTolerance = 1e-12;

// Picks the plane with the smallest relative residual and solves for the
// coefficients by least squares. Columns with norm <= zero_eps get the
// zero assignment. forced is set when the best relative residual exceeds tau.
ColumnAssignment classify_column(const HyperplaneSet& hs, std::span<const double> x_col,
                                 double tau, double zero_eps = 0.0);

// Places the coefficients at their support indices; zeros elsewhere.
Eigen::VectorXd reconstruct_column(const ColumnAssignment& asgn, std::size_t n);

struct RecoveryStats {
  std::size_t zero_columns = 0;
  std::size_t clean_columns = 0;
  std::size_t forced_columns = 0;
  // Relative residuals of the non-zero columns, in column order.
  std::vector<double> residuals;

  std::size_t total() const noexcept { return zero_columns + clean_columns + forced_columns; }
  // Nearest-rank quantile over residuals; 0 when there are none.
  double residual_quantile(double p) const;
  void merge(const RecoveryStats& other);
};

struct RecoveryResult {
  Eigen::MatrixXd sources; // n x T
  RecoveryStats stats;
};

// Classifies and reconstructs each column of the m x T matrix x
// independently. The zero threshold is 1e-12 times the largest column norm.
RecoveryResult recover_block(const HyperplaneSet& hs, const Eigen::MatrixXd& x, double tau);
RecoveryResult recover_block(const MixingMatrix& a, const Eigen::MatrixXd& x, double tau);

// y = A+ x column by column (minimum-norm solution).
Eigen::MatrixXd recover_dense(const Eigen::MatrixXd& a_pinv, const Eigen::MatrixXd& x);

} // namespace ubss
