#include "doctest.h"
#include "support.hpp"

#include "lsagc/errors.hpp"
#include "lsagc/timeseries.hpp"

#include <cmath>
#include <limits>

using namespace lsagc;
using testing_support::gaussian;

namespace {

TimeSeriesEnsemble rows(std::initializer_list<std::initializer_list<double>> values) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : values) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return TimeSeriesEnsemble(m);
}

ValidationErrc kind_of(const TimeSeriesEnsemble& e, std::size_t min_samples) {
  try {
    validate(e, min_samples);
  } catch (const ValidationError& err) {
    return err.kind();
  }
  FAIL("validate accepted the ensemble");
  return ValidationErrc::shape;
}

}  // namespace

TEST_CASE("standardize maps 1 2 3 to -1 0 1") {
  const auto s = standardize(rows({{1, 2, 3}, {2, 0, 1}}));
  CHECK(s.data(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(s.data(0, 1)) < 1e-15);
  CHECK(s.data(0, 2) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("constant rows are zeroed and flagged") {
  const auto s = standardize(rows({{5, 5, 5}, {1, 2, 4}}));
  CHECK(s.data.row(0).isZero(0.0));
  REQUIRE(s.constant_rows.size() == 2);
  CHECK(s.constant_rows[0]);
  CHECK_FALSE(s.constant_rows[1]);
  CHECK(s.any_constant());
}

TEST_CASE("two-sample row standardizes to plus and minus one over root two") {
  const auto s = standardize(rows({{0, 4}, {1, 3}}));
  CHECK(s.data(0, 0) == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-14));
  CHECK(s.data(0, 1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("validate distinguishes error kinds") {
  CHECK_NOTHROW(validate(TimeSeriesEnsemble(gaussian(10, 100, 1)), 20));
  CHECK(kind_of(TimeSeriesEnsemble(gaussian(10, 5, 1)), 20) == ValidationErrc::too_few_samples);
  CHECK(kind_of(TimeSeriesEnsemble(gaussian(1, 50, 1)), 2) == ValidationErrc::too_few_series);

  Eigen::MatrixXd m = gaussian(4, 30, 2);
  m(2, 17) = std::numeric_limits<double>::quiet_NaN();
  try {
    validate(TimeSeriesEnsemble(m), 2);
    FAIL("NaN accepted");
  } catch (const ValidationError& e) {
    CHECK(e.kind() == ValidationErrc::non_finite);
    CHECK(e.row() == 2);
    CHECK(e.col() == 17);
  }
}

TEST_CASE("standardize rejects non-finite input with coordinates") {
  Eigen::MatrixXd m = gaussian(3, 10, 3);
  m(1, 4) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(standardize(TimeSeriesEnsemble(m)), ValidationError);
}

TEST_CASE("standardized rows have zero mean and unit sd") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::MatrixXd raw = gaussian(6, 40 + seed, seed);
    raw.row(2) = raw.row(2) * 37.0 + Eigen::RowVectorXd::Constant(raw.cols(), 5.0);
    const auto s = standardize(TimeSeriesEnsemble(raw));
    for (Eigen::Index i = 0; i < s.data.rows(); ++i) {
      CHECK(std::abs(s.data.row(i).mean()) < 1e-10);
      CHECK(std::abs(std::sqrt(sample_variance(s.data.row(i))) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("standardize is idempotent and keeps shape, order and names") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TimeSeriesEnsemble e(gaussian(5, 25, 100 + seed), {"a", "b", "c", "d", "e"});
    const auto once = standardize(e);
    const auto twice = standardize(once);
    CHECK(once.data.rows() == 5);
    CHECK(once.data.cols() == 25);
    CHECK(once.series_names == e.series_names);
    CHECK((once.data - twice.data).cwiseAbs().maxCoeff() <= 1e-12);
    // Order: each standardized row is an increasing affine map of its source row.
    for (Eigen::Index i = 0; i < 5; ++i) {
      Eigen::Index lo, hi;
      e.data.row(i).minCoeff(&lo);
      e.data.row(i).maxCoeff(&hi);
      CHECK(once.data(i, lo) == once.data.row(i).minCoeff());
      CHECK(once.data(i, hi) == once.data.row(i).maxCoeff());
    }
  }
}

TEST_CASE("default names and permutation") {
  TimeSeriesEnsemble e(gaussian(3, 8, 4));
  CHECK(e.series_names == std::vector<std::string>{"x1", "x2", "x3"});
  const auto p = permute_series(e, {2, 0, 1});
  CHECK(p.series_names == std::vector<std::string>{"x3", "x1", "x2"});
  CHECK(p.data.row(0) == e.data.row(2));
  CHECK(p.data.row(1) == e.data.row(0));
  CHECK_THROWS(permute_series(e, {0, 0, 1}));
}

TEST_CASE("sample variance uses divisor n minus one") {
  Eigen::RowVectorXd v(4);
  v << 1, 2, 3, 4;
  CHECK(sample_variance(v) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
}
