#pragma once

#include "lsagc/timeseries.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace lsagc {

// Relative singular-value cutoff used for every pseudoinverse in the library.
inline constexpr double kPinvRelTolerance = 1e-10;

struct PcaModel {
  Eigen::MatrixXd w;       // p x N, orthonormal rows ordered by variance
  Eigen::MatrixXd w_pinv;  // N x p
  std::size_t p = 0;
  Eigen::VectorXd explained_variance;  // length p, non-increasing
  double total_variance = 0.0;         // trace of the sample covariance
  // Set when a retained component carries (numerically) zero variance.
  bool rank_deficient = false;

  std::size_t n_series() const { return static_cast<std::size_t>(w.cols()); }
};

// Projection with source column s removed; w_pinv is recomputed, the
// components themselves are not refitted.
struct ReducedPcaView {
  Eigen::MatrixXd w;       // p x (N-1)
  Eigen::MatrixXd w_pinv;  // (N-1) x p
  std::size_t dropped = 0;
};

// Moore-Penrose pseudoinverse via SVD; singular values below
// rel_tol * sigma_max are treated as zero.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double rel_tol = kPinvRelTolerance);

// Top-p eigenvectors of X X^T / (T-1). Rows of X are assumed already
// centred (standardized input); no re-centering is done. Each component is
// signed so that its largest-magnitude loading is positive (first index
// wins ties).
PcaModel fit_pca(const TimeSeriesEnsemble& ensemble, std::size_t p);
PcaModel fit_pca(const Eigen::MatrixXd& x, std::size_t p);

// Z = W X.
Eigen::MatrixXd project(const PcaModel& model, const TimeSeriesEnsemble& ensemble);
Eigen::MatrixXd project(const PcaModel& model, const Eigen::MatrixXd& x);

// X_hat = W^+ Z.
Eigen::MatrixXd reconstruct(const PcaModel& model, const Eigen::MatrixXd& z);

ReducedPcaView drop_source(const PcaModel& model, std::size_t s);

// X without row s, as consumed by a ReducedPcaView.
Eigen::MatrixXd drop_row(const Eigen::MatrixXd& x, std::size_t s);

}  // namespace lsagc
