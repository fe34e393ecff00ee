#include "lsagc/timeseries.hpp"

#include "lsagc/errors.hpp"

#include <cmath>
#include <sstream>

namespace lsagc {

TimeSeriesEnsemble::TimeSeriesEnsemble(Eigen::MatrixXd values, std::vector<std::string> names)
    : data(std::move(values)), series_names(std::move(names)) {
  if (series_names.empty()) series_names = default_series_names(n_series());
  if (series_names.size() != n_series())
    throw DimensionError("series_names has " + std::to_string(series_names.size()) +
                         " entries for " + std::to_string(n_series()) + " series");
  constant_rows.assign(n_series(), false);
}

bool TimeSeriesEnsemble::any_constant() const {
  for (bool c : constant_rows)
    if (c) return true;
  return false;
}

std::vector<std::string> default_series_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

void validate(const TimeSeriesEnsemble& ensemble, std::size_t min_samples) {
  const auto& x = ensemble.data;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (!std::isfinite(x(i, j))) {
        std::ostringstream msg;
        msg << "non-finite value at row " << i << ", column " << j;
        throw ValidationError(ValidationErrc::non_finite, msg.str(), static_cast<std::size_t>(i),
                              static_cast<std::size_t>(j));
      }
    }
  }
  if (x.rows() < 2)
    throw ValidationError(ValidationErrc::too_few_series,
                          "need at least 2 series, got " + std::to_string(x.rows()));
  const auto need = std::max<std::size_t>(2, min_samples);
  if (ensemble.n_samples() < need)
    throw ValidationError(ValidationErrc::too_few_samples,
                          "need at least " + std::to_string(need) + " samples, got " +
                              std::to_string(x.cols()));
  if (!ensemble.series_names.empty() && ensemble.series_names.size() != ensemble.n_series())
    throw ValidationError(ValidationErrc::shape, "series_names does not match row count");
}

double sample_variance(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  const auto n = v.size();
  if (n < 2) return 0.0;
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(n - 1);
}

TimeSeriesEnsemble standardize(const TimeSeriesEnsemble& ensemble) {
  validate(ensemble);
  TimeSeriesEnsemble out = ensemble;
  out.constant_rows.assign(out.n_series(), false);
  const auto t = static_cast<double>(out.n_samples());
  for (Eigen::Index i = 0; i < out.data.rows(); ++i) {
    auto row = out.data.row(i);
    const double mean = row.mean();
    row.array() -= mean;
    const double sd = std::sqrt(row.squaredNorm() / (t - 1.0));
    // Constant up to rounding relative to the row's magnitude.
    const double scale = std::max(1.0, ensemble.data.row(i).cwiseAbs().maxCoeff());
    if (sd <= 1e-14 * scale) {
      row.setZero();
      out.constant_rows[static_cast<std::size_t>(i)] = true;
    } else {
      row /= sd;
    }
  }
  return out;
}

TimeSeriesEnsemble permute_series(const TimeSeriesEnsemble& ensemble,
                                  const std::vector<std::size_t>& order) {
  if (order.size() != ensemble.n_series()) throw DimensionError("permutation length mismatch");
  std::vector<bool> seen(order.size(), false);
  for (std::size_t k : order) {
    if (k >= order.size() || seen[k]) throw DimensionError("order is not a permutation");
    seen[k] = true;
  }
  TimeSeriesEnsemble out = ensemble;
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.data.row(static_cast<Eigen::Index>(i)) =
        ensemble.data.row(static_cast<Eigen::Index>(order[i]));
    out.series_names[i] = ensemble.series_names.at(order[i]);
    if (!ensemble.constant_rows.empty()) out.constant_rows[i] = ensemble.constant_rows.at(order[i]);
  }
  return out;
}

}  // namespace lsagc
