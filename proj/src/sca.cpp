#include "ubss/sca.hpp"

#include "ubss/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ubss {

namespace {

// Two-pass modified Gram-Schmidt. Returns false on rank deficiency.
bool orthonormalize(const Eigen::MatrixXd& basis, Eigen::MatrixXd& q) {
  q = basis;
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const double original = basis.col(k).norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < k; ++j)
        q.col(k) -= q.col(j).dot(q.col(k)) * q.col(j);
    }
    const double norm = q.col(k).norm();
    if (!(original > 0.0) || norm <= 1e-12 * original)
      return false;
    q.col(k) /= norm;
  }
  return true;
}

double norm2(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x)
    acc += v * v;
  return std::sqrt(acc);
}

} // namespace

HyperplaneSet::HyperplaneSet(const MixingMatrix& a) : m_(a.rows()), n_(a.cols()) {
  const Eigen::MatrixXd& mat = a.matrix();
  for (auto& cols : combinations(n_, m_ - 1)) {
    Hyperplane h;
    h.basis.resize(mat.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
      h.basis.col(static_cast<Eigen::Index>(k)) = mat.col(static_cast<Eigen::Index>(cols[k]));
    if (!orthonormalize(h.basis, h.orthonormal_basis))
      throw InvalidMatrixError("columns of the mixing matrix are linearly dependent");
    const Eigen::MatrixXd gram = h.basis.transpose() * h.basis;
    h.solver = gram.ldlt().solve(h.basis.transpose());
    h.index_set = std::move(cols);
    planes_.push_back(std::move(h));
  }
}

HyperplaneSet build_hyperplanes(const MixingMatrix& a) { return HyperplaneSet(a); }

double column_residual(const Hyperplane& h, std::span<const double> x_col) {
  const Eigen::Index m = h.orthonormal_basis.rows();
  if (static_cast<Eigen::Index>(x_col.size()) != m)
    throw ShapeError("column length does not match the mixing matrix rows");
  Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(x_col.data(), m);
  for (Eigen::Index k = 0; k < h.orthonormal_basis.cols(); ++k)
    r -= h.orthonormal_basis.col(k).dot(r) * h.orthonormal_basis.col(k);
  return r.norm();
}

ColumnAssignment classify_column(const HyperplaneSet& hs, std::span<const double> x_col,
                                 double tau, double zero_eps) {
  if (x_col.size() != hs.rows())
    throw ShapeError("column length does not match the mixing matrix rows");
  ColumnAssignment out;
  const double xnorm = norm2(x_col);
  if (xnorm == 0.0 || xnorm <= zero_eps)
    return out;

  std::vector<double> rel(hs.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < hs.size(); ++q) {
    rel[q] = column_residual(hs[q], x_col) / xnorm;
    best = std::min(best, rel[q]);
  }
  std::size_t chosen = 0;
  while (rel[chosen] > best + kTieTolerance)
    ++chosen;

  const Hyperplane& h = hs[chosen];
  const Eigen::VectorXd lambda =
      h.solver * Eigen::Map<const Eigen::VectorXd>(x_col.data(), static_cast<Eigen::Index>(x_col.size()));
  out.plane_index = chosen;
  out.support = h.index_set;
  out.coefficients.assign(lambda.begin(), lambda.end());
  out.residual = rel[chosen];
  out.forced = rel[chosen] > tau;
  return out;
}

Eigen::VectorXd reconstruct_column(const ColumnAssignment& asgn, std::size_t n) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (asgn.support.size() != asgn.coefficients.size())
    throw Error("corrupt assignment: support and coefficients differ in length");
  for (std::size_t k = 0; k < asgn.support.size(); ++k) {
    if (asgn.support[k] >= n)
      throw Error("corrupt assignment: source index " + std::to_string(asgn.support[k]) +
                  " out of range");
    s(static_cast<Eigen::Index>(asgn.support[k])) = asgn.coefficients[k];
  }
  return s;
}

double RecoveryStats::residual_quantile(double p) const {
  if (residuals.empty())
    return 0.0;
  std::vector<double> sorted = residuals;
  std::sort(sorted.begin(), sorted.end());
  const double clamped = std::clamp(p, 0.0, 1.0);
  auto rank = static_cast<std::size_t>(std::ceil(clamped * static_cast<double>(sorted.size())));
  return sorted[rank == 0 ? 0 : rank - 1];
}

void RecoveryStats::merge(const RecoveryStats& other) {
  zero_columns += other.zero_columns;
  clean_columns += other.clean_columns;
  forced_columns += other.forced_columns;
  residuals.insert(residuals.end(), other.residuals.begin(), other.residuals.end());
}

RecoveryResult recover_block(const HyperplaneSet& hs, const Eigen::MatrixXd& x, double tau) {
  if (static_cast<std::size_t>(x.rows()) != hs.rows())
    throw ShapeError("coefficient matrix has " + std::to_string(x.rows()) + " rows, expected " +
                     std::to_string(hs.rows()));
  if (tau < 0.0)
    throw Error("tau must be non-negative");
  RecoveryResult out;
  out.sources = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(hs.sources()), x.cols());
  const double max_norm = x.cols() == 0 ? 0.0 : x.colwise().norm().maxCoeff();
  const double zero_eps = 1e-12 * max_norm;
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    const std::span<const double> col(x.col(t).data(), static_cast<std::size_t>(x.rows()));
    const ColumnAssignment asgn = classify_column(hs, col, tau, zero_eps);
    if (asgn.is_zero()) {
      ++out.stats.zero_columns;
      continue;
    }
    ++(asgn.forced ? out.stats.forced_columns : out.stats.clean_columns);
    out.stats.residuals.push_back(asgn.residual);
    for (std::size_t k = 0; k < asgn.support.size(); ++k)
      out.sources(static_cast<Eigen::Index>(asgn.support[k]), t) = asgn.coefficients[k];
  }
  return out;
}

RecoveryResult recover_block(const MixingMatrix& a, const Eigen::MatrixXd& x, double tau) {
  return recover_block(HyperplaneSet(a), x, tau);
}

Eigen::MatrixXd recover_dense(const Eigen::MatrixXd& a_pinv, const Eigen::MatrixXd& x) {
  if (a_pinv.cols() != x.rows())
    throw ShapeError("pseudo-inverse has " + std::to_string(a_pinv.cols()) +
                     " columns but the coefficient matrix has " + std::to_string(x.rows()) +
                     " rows");
  return a_pinv * x;
}

} // namespace ubss
