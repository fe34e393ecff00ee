#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace lsagc {

// N series (rows) by T samples (columns).
struct TimeSeriesEnsemble {
  Eigen::MatrixXd data;
  std::vector<std::string> series_names;
  std::optional<double> sample_period;  // seconds
  // Set by standardize(): rows that were constant and have been zeroed.
  std::vector<bool> constant_rows;

  TimeSeriesEnsemble() = default;
  explicit TimeSeriesEnsemble(Eigen::MatrixXd values, std::vector<std::string> names = {});

  std::size_t n_series() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t n_samples() const { return static_cast<std::size_t>(data.cols()); }
  bool any_constant() const;
};

// Default names x1..xN.
std::vector<std::string> default_series_names(std::size_t n);

// Throws ValidationError with a distinct kind for non-finite entries, fewer
// than two series, or fewer than max(2, min_samples) samples.
void validate(const TimeSeriesEnsemble& ensemble, std::size_t min_samples = 2);

// Per-row zero mean / unit sample standard deviation (divisor T-1).
// Constant rows become zero rows and are flagged in constant_rows.
TimeSeriesEnsemble standardize(const TimeSeriesEnsemble& ensemble);

// Sample variance with divisor n-1 of a row/column vector.
double sample_variance(const Eigen::Ref<const Eigen::RowVectorXd>& v);

// Copy of the ensemble with rows reordered so that row i of the result is
// row order[i] of the input.
TimeSeriesEnsemble permute_series(const TimeSeriesEnsemble& ensemble,
                                  const std::vector<std::size_t>& order);

}  // namespace lsagc

namespace lsagc {

// One subject's time series with its binary class label.
struct LabeledSeries {
  std::string subject_id;
  int label = 0;
  TimeSeriesEnsemble ensemble;
};

}  // namespace lsagc
