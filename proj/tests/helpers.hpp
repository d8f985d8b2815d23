#pragma once

#include "oracles.hpp"
#include "ubss/mixing.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace testing {

inline Eigen::MatrixXd to_eigen(const oracle::Mat& a) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(a.size()),
                      static_cast<Eigen::Index>(a.front().size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i][j];
  return out;
}

inline Eigen::MatrixXd to_eigen(const oracle::SparseSources& s) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(s.n), static_cast<Eigen::Index>(s.t));
  for (std::size_t c = 0; c < s.t; ++c)
    for (std::size_t r = 0; r < s.n; ++r)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = s.at(r, c);
  return out;
}

inline ubss::Frame random_frame(std::size_t w, std::size_t h, std::mt19937_64& rng,
                                double lo = 0.0, double hi = 255.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  ubss::Frame f(w, h);
  for (double& v : f.pixels())
    v = d(rng);
  return f;
}

inline std::vector<ubss::Frame> random_frames(std::size_t count, std::size_t w, std::size_t h,
                                              std::mt19937_64& rng) {
  std::vector<ubss::Frame> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(random_frame(w, h, rng));
  return out;
}

inline double max_abs_diff(const ubss::Frame& a, const ubss::Frame& b) {
  double m = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t)
    m = std::max(m, std::abs(a[t] - b[t]));
  return m;
}

} // namespace testing
