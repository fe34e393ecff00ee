#pragma once

#include "lsagc/pca.hpp"
#include "lsagc/timeseries.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace lsagc {

enum class SignConvention {
  literal,      // log(var_with / var_without): influence is negative
  positive_influence  // log(var_without / var_with): influence is positive
};

// How the model "without x_s" is built.
enum class ReducedModel {
  drop_column,     // remove row s of X and column s of W, refit on the reduced projection
  full_projection  // keep the full projection, just skip the augmentation row
};

struct ArPredictorConfig {
  std::size_t p = 1;  // retained principal components
  std::size_t m = 1;  // autoregressive order (lags)
  // Tikhonov weight, relative to the trace of the centred lag Gram matrix.
  double ridge_epsilon = 1e-6;
  SignConvention sign_convention = SignConvention::positive_influence;
  ReducedModel reduced_model = ReducedModel::drop_column;

  // Throws ConfigError unless m >= 1, p >= 1, m*(p+1)+1 < T, p <= N and
  // ridge_epsilon >= 0.
  void validate(std::size_t n_series, std::size_t n_samples) const;
};

// Z_hat(t) = A y(t) + b.
struct AffineModel {
  Eigen::MatrixXd a;  // outputs x lag-vector length
  Eigen::VectorXd b;

  Eigen::MatrixXd predict(const Eigen::MatrixXd& lag_vectors) const;
};

enum class ConnectivityMethod { lsagc, cross_correlation };

// values(s, t) is the influence of series s on series t. Diagonal is zero.
struct ConnectivityMatrix {
  Eigen::MatrixXd values;
  ConnectivityMethod method = ConnectivityMethod::lsagc;
  std::optional<ArPredictorConfig> config;  // lsagc only
  std::vector<std::string> series_names;
  bool saturated = false;         // some lsagc entry hit the +/-log(1e12) clamp
  std::vector<bool> constant_rows;  // cross-correlation rows forced to zero

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

inline constexpr double kSaturationBound = 27.631021115928547;  // log(1e12)

// Stacked [Y(t-1); Y(t-2); ...; Y(t-m)] using 1-based t in [m+1, T].
Eigen::VectorXd build_lag_vector(const Eigen::MatrixXd& y, std::size_t t, std::size_t m);

// Columns are build_lag_vector(y, t, m) for t = m+1..T.
Eigen::MatrixXd build_lag_matrix(const Eigen::MatrixXd& y, std::size_t m);

// Least squares fit of targets ~ A * lag_vectors + b with penalty
// lambda*|A|^2, lambda = ridge_epsilon * trace(centred Gram). The bias is not
// penalized. Columns are time steps.
AffineModel fit_affine(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& lag_vectors,
                       double ridge_epsilon);

struct PairwiseErrors {
  std::size_t source = 0;
  Eigen::VectorXd var_with;     // length N; entry `source` is NaN (unused)
  Eigen::VectorXd var_without;  // length N; entry `source` is NaN (unused)
};

// Prediction-error variances per target with and without the source series,
// measured in the original N-dimensional space after pseudoinverse
// reconstruction. Variance uses divisor (T-m)-1.
PairwiseErrors lsagc_pairwise_errors(const TimeSeriesEnsemble& x, std::size_t source,
                                     const ArPredictorConfig& cfg, const PcaModel& pca);

// Directed lsAGC matrix sharing one PCA fit across all sources. Sources are
// distributed over `threads` workers; output is independent of the count.
ConnectivityMatrix lsagc_connectivity(const TimeSeriesEnsemble& x, const ArPredictorConfig& cfg,
                                      unsigned threads = 1);

// Zero-lag Pearson correlation, diagonal zero, exactly symmetric.
ConnectivityMatrix cross_correlation_matrix(const TimeSeriesEnsemble& x);

// Reorders rows and columns so that entry (i, j) of the result is entry
// (order[i], order[j]) of the input.
ConnectivityMatrix permute_connectivity(const ConnectivityMatrix& c,
                                        const std::vector<std::size_t>& order);

const char* to_string(SignConvention s);
const char* to_string(ReducedModel r);
const char* to_string(ConnectivityMethod m);

}  // namespace lsagc
