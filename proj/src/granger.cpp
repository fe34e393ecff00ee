#include "lsagc/granger.hpp"

#include "lsagc/errors.hpp"
#include "lsagc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lsagc {

void ArPredictorConfig::validate(std::size_t n_series, std::size_t n_samples) const {
  if (m < 1) throw ConfigError("m", "autoregressive order must be >= 1");
  if (p < 1) throw ConfigError("p", "retained components must be >= 1");
  if (p > n_series)
    throw ConfigError("p", "retained components p=" + std::to_string(p) + " exceed series count " +
                               std::to_string(n_series));
  if (!(ridge_epsilon >= 0.0) || !std::isfinite(ridge_epsilon))
    throw ConfigError("ridge_epsilon", "must be finite and non-negative");
  if (m * (p + 1) + 1 >= n_samples)
    throw ConfigError("m", "m*(p+1)+1 = " + std::to_string(m * (p + 1) + 1) +
                               " must be below T = " + std::to_string(n_samples));
}

Eigen::MatrixXd AffineModel::predict(const Eigen::MatrixXd& lag_vectors) const {
  if (lag_vectors.rows() != a.cols()) throw DimensionError("predict: lag vector length mismatch");
  Eigen::MatrixXd out = a * lag_vectors;
  out.colwise() += b;
  return out;
}

Eigen::VectorXd build_lag_vector(const Eigen::MatrixXd& y, std::size_t t, std::size_t m) {
  const auto rows = y.rows();
  const auto big_t = static_cast<std::size_t>(y.cols());
  if (m < 1 || t < m + 1 || t > big_t)
    throw DimensionError("build_lag_vector: t=" + std::to_string(t) + " outside [" +
                         std::to_string(m + 1) + ", " + std::to_string(big_t) + "]");
  Eigen::VectorXd v(rows * static_cast<Eigen::Index>(m));
  for (std::size_t k = 1; k <= m; ++k) {
    // 1-based sample t-k lives in column t-k-1.
    v.segment(static_cast<Eigen::Index>(k - 1) * rows, rows) =
        y.col(static_cast<Eigen::Index>(t - k - 1));
  }
  return v;
}

Eigen::MatrixXd build_lag_matrix(const Eigen::MatrixXd& y, std::size_t m) {
  const auto rows = y.rows();
  const auto big_t = y.cols();
  const auto mi = static_cast<Eigen::Index>(m);
  if (m < 1 || mi >= big_t) throw DimensionError("build_lag_matrix: need 1 <= m < T");
  const Eigen::Index n = big_t - mi;
  Eigen::MatrixXd out(rows * mi, n);
  // Block k holds Y shifted by k+1 samples.
  for (Eigen::Index k = 0; k < mi; ++k) out.middleRows(k * rows, rows) = y.middleCols(mi - 1 - k, n);
  return out;
}

AffineModel fit_affine(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& lag_vectors,
                       double ridge_epsilon) {
  const Eigen::Index n = targets.cols();
  const Eigen::Index d = lag_vectors.rows();
  if (lag_vectors.cols() != n) throw DimensionError("fit_affine: targets and lags differ in length");
  if (n <= d + 1)
    throw DimensionError("fit_affine: underdetermined system (" + std::to_string(n) +
                         " samples for " + std::to_string(d + 1) + " parameters per output)");
  if (!(ridge_epsilon >= 0.0)) throw ConfigError("ridge_epsilon", "must be non-negative");
  if (!targets.allFinite() || !lag_vectors.allFinite())
    throw DimensionError("fit_affine: non-finite input");

  const Eigen::VectorXd lag_mean = lag_vectors.rowwise().mean();
  const Eigen::VectorXd target_mean = targets.rowwise().mean();
  const Eigen::MatrixXd lc = lag_vectors.colwise() - lag_mean;
  const Eigen::MatrixXd tc = targets.colwise() - target_mean;

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(lc);
  gram = gram.selfadjointView<Eigen::Lower>();
  const double lambda = ridge_epsilon * gram.trace();
  gram.diagonal().array() += lambda;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-13))
    throw SingularSystemError(
        "fit_affine: normal equations are singular; use a positive ridge_epsilon");

  AffineModel model;
  model.a = ldlt.solve(lc * tc.transpose()).transpose();
  model.b = target_mean - model.a * lag_mean;
  return model;
}

namespace {

// Sample variance (divisor n-1) of every row.
Eigen::VectorXd row_variances(const Eigen::MatrixXd& e) {
  Eigen::VectorXd out(e.rows());
  for (Eigen::Index i = 0; i < e.rows(); ++i) out(i) = sample_variance(e.row(i));
  return out;
}

// Fits `targets` (p x T) on the lags of `regressors` and returns reconstruct
// (pinv * Z_hat) for t = m+1..T.
Eigen::MatrixXd predict_original_space(const Eigen::MatrixXd& targets,
                                       const Eigen::MatrixXd& regressors,
                                       const Eigen::MatrixXd& pinv, std::size_t m,
                                       double ridge_epsilon) {
  const auto mi = static_cast<Eigen::Index>(m);
  const Eigen::MatrixXd lags = build_lag_matrix(regressors, m);
  const Eigen::MatrixXd future = targets.rightCols(targets.cols() - mi);
  const AffineModel model = fit_affine(future, lags, ridge_epsilon);
  return pinv * model.predict(lags);
}

PairwiseErrors pairwise_errors_impl(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z,
                                    std::size_t s, const ArPredictorConfig& cfg,
                                    const PcaModel& pca) {
  const Eigen::Index n = x.rows();
  const auto mi = static_cast<Eigen::Index>(cfg.m);
  const Eigen::Index steps = x.cols() - mi;
  const auto si = static_cast<Eigen::Index>(s);
  const Eigen::MatrixXd observed = x.rightCols(steps);

  PairwiseErrors out;
  out.source = s;

  // Augmented model: Y = [Z; x_s] predicts Z.
  Eigen::MatrixXd y(z.rows() + 1, z.cols());
  y.topRows(z.rows()) = z;
  y.bottomRows(1) = x.row(si);
  const Eigen::MatrixXd x_hat = predict_original_space(z, y, pca.w_pinv, cfg.m, cfg.ridge_epsilon);
  out.var_with = row_variances(observed - x_hat);

  out.var_without = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  if (cfg.reduced_model == ReducedModel::drop_column) {
    const ReducedPcaView view = drop_source(pca, s);
    const Eigen::MatrixXd xr = drop_row(x, s);
    const Eigen::MatrixXd zr = view.w * xr;
    const Eigen::MatrixXd xr_hat =
        predict_original_space(zr, zr, view.w_pinv, cfg.m, cfg.ridge_epsilon);
    const Eigen::VectorXd v = row_variances(xr.rightCols(steps) - xr_hat);
    for (Eigen::Index r = 0; r < v.size(); ++r) out.var_without(r < si ? r : r + 1) = v(r);
  } else {
    const Eigen::MatrixXd x_hat_wo =
        predict_original_space(z, z, pca.w_pinv, cfg.m, cfg.ridge_epsilon);
    out.var_without = row_variances(observed - x_hat_wo);
  }
  out.var_with(si) = std::numeric_limits<double>::quiet_NaN();
  out.var_without(si) = std::numeric_limits<double>::quiet_NaN();
  return out;
}

// Positive-influence index with saturation.
double influence(double var_with, double var_without, bool& saturated) {
  if (var_with <= 0.0 && var_without <= 0.0) {
    saturated = true;
    return 0.0;
  }
  if (var_with <= 0.0) {
    saturated = true;
    return kSaturationBound;
  }
  if (var_without <= 0.0) {
    saturated = true;
    return -kSaturationBound;
  }
  const double v = std::log(var_without / var_with);
  if (v > kSaturationBound) {
    saturated = true;
    return kSaturationBound;
  }
  if (v < -kSaturationBound) {
    saturated = true;
    return -kSaturationBound;
  }
  return v;
}

}  // namespace

PairwiseErrors lsagc_pairwise_errors(const TimeSeriesEnsemble& x, std::size_t source,
                                     const ArPredictorConfig& cfg, const PcaModel& pca) {
  cfg.validate(x.n_series(), x.n_samples());
  if (pca.n_series() != x.n_series()) throw DimensionError("PCA model does not match ensemble");
  if (pca.p != cfg.p) throw DimensionError("PCA model retains a different p than the config");
  if (source >= x.n_series()) throw DimensionError("source index out of range");
  const Eigen::MatrixXd z = project(pca, x.data);
  return pairwise_errors_impl(x.data, z, source, cfg, pca);
}

ConnectivityMatrix lsagc_connectivity(const TimeSeriesEnsemble& x, const ArPredictorConfig& cfg,
                                      unsigned threads) {
  validate(x);
  cfg.validate(x.n_series(), x.n_samples());
  const PcaModel pca = fit_pca(x.data, cfg.p);
  const Eigen::MatrixXd z = project(pca, x.data);
  const auto n = x.n_series();

  ConnectivityMatrix out;
  out.method = ConnectivityMethod::lsagc;
  out.config = cfg;
  out.series_names = x.series_names;
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<char> row_saturated(n, 0);

  parallel_for(n, threads, [&](std::size_t s) {
    const PairwiseErrors err = pairwise_errors_impl(x.data, z, s, cfg, pca);
    bool sat = false;
    const auto si = static_cast<Eigen::Index>(s);
    for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(n); ++t) {
      if (t == si) continue;
      double v = influence(err.var_with(t), err.var_without(t), sat);
      if (cfg.sign_convention == SignConvention::literal) v = -v;
      out.values(si, t) = v;
    }
    row_saturated[s] = sat ? 1 : 0;
  });
  for (char c : row_saturated) out.saturated = out.saturated || c != 0;
  return out;
}

ConnectivityMatrix cross_correlation_matrix(const TimeSeriesEnsemble& x) {
  validate(x);
  const Eigen::Index n = x.data.rows();
  const Eigen::MatrixXd centred = x.data.colwise() - x.data.rowwise().mean();
  Eigen::VectorXd norms(n);
  ConnectivityMatrix out;
  out.method = ConnectivityMethod::cross_correlation;
  out.series_names = x.series_names;
  out.constant_rows.assign(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    norms(i) = centred.row(i).norm();
    const double scale = std::max(1.0, x.data.row(i).cwiseAbs().maxCoeff());
    if (norms(i) <= 1e-14 * scale * std::sqrt(static_cast<double>(x.data.cols())))
      out.constant_rows[static_cast<std::size_t>(i)] = true;
  }
  out.values = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double r = 0.0;
      if (!out.constant_rows[static_cast<std::size_t>(i)] &&
          !out.constant_rows[static_cast<std::size_t>(j)]) {
        r = centred.row(i).dot(centred.row(j)) / (norms(i) * norms(j));
        r = std::clamp(r, -1.0, 1.0);
      }
      out.values(i, j) = r;
      out.values(j, i) = r;
    }
  }
  return out;
}

ConnectivityMatrix permute_connectivity(const ConnectivityMatrix& c,
                                        const std::vector<std::size_t>& order) {
  const auto n = c.size();
  if (order.size() != n) throw DimensionError("permutation length mismatch");
  std::vector<bool> seen(n, false);
  for (std::size_t k : order) {
    if (k >= n || seen[k]) throw DimensionError("order is not a permutation");
    seen[k] = true;
  }
  ConnectivityMatrix out = c;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          c.values(static_cast<Eigen::Index>(order[i]), static_cast<Eigen::Index>(order[j]));
    if (i < c.series_names.size()) out.series_names[i] = c.series_names[order[i]];
    if (i < c.constant_rows.size()) out.constant_rows[i] = c.constant_rows[order[i]];
  }
  return out;
}

const char* to_string(SignConvention s) {
  return s == SignConvention::literal ? "literal" : "positive";
}

const char* to_string(ReducedModel r) {
  return r == ReducedModel::drop_column ? "drop_column" : "full_projection";
}

const char* to_string(ConnectivityMethod m) {
  return m == ConnectivityMethod::lsagc ? "lsagc" : "correlation";
}

}  // namespace lsagc
