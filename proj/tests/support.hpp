#pragma once

#include "lsagc/timeseries.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace testing_support {

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

inline lsagc::TimeSeriesEnsemble white_noise(std::size_t n, std::size_t t, std::uint64_t seed) {
  return lsagc::standardize(lsagc::TimeSeriesEnsemble(
      gaussian(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t), seed)));
}

// x_{i+1}(t) = c * x_i(t-1) + noise; the first row is pure noise.
inline Eigen::MatrixXd chain(std::size_t n, std::size_t t, double c, double noise, std::uint64_t seed) {
  const Eigen::MatrixXd e = gaussian(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t + 50), seed);
  Eigen::MatrixXd x = noise * e;
  for (Eigen::Index k = 1; k < x.cols(); ++k)
    for (Eigen::Index i = 1; i < x.rows(); ++i) x(i, k) += c * x(i - 1, k - 1);
  return x.rightCols(static_cast<Eigen::Index>(t));
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testing_support
