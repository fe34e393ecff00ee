#include "doctest.h"
#include "support.hpp"

#include "lsagc/errors.hpp"
#include "lsagc/pipeline.hpp"
#include "lsagc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace lsagc;
using namespace lsagc::cv;
using testing_support::gaussian;

namespace {

std::vector<SubjectLabel> cohort_labels(std::size_t n0, std::size_t n1) {
  std::vector<SubjectLabel> out;
  for (std::size_t i = 0; i < n0 + n1; ++i) out.push_back({"s" + std::to_string(i), i < n0 ? 0 : 1});
  return out;
}

std::size_t count_kept_off_diagonal(const Eigen::MatrixXi& adj) {
  return static_cast<std::size_t>(adj.sum() - adj.diagonal().sum());
}

}  // namespace

TEST_CASE("default grid has 27 points") {
  const auto g = AugmentationGrid::defaults(10);
  CHECK(g.p_values == std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(g.m_values == std::vector<std::size_t>{1, 2, 3});
  CHECK(g.factor() == 27);
  const auto small = AugmentationGrid::defaults(3);
  CHECK(small.factor() == 27);
  CHECK(*std::min_element(small.p_values.begin(), small.p_values.end()) == 1);
  CHECK(*std::max_element(small.p_values.begin(), small.p_values.end()) == 3);
}

TEST_CASE("top-k keeps the largest entries of each row") {
  Eigen::MatrixXd v(4, 4);
  v << 0, 5, 4, 3,
       1, 0, 2, 3,
       9, 8, 0, 7,
       1, 1, 1, 0;
  const auto adj = binarize(v, Binarization::top_k(2));
  Eigen::MatrixXi expected(4, 4);
  expected << 1, 1, 1, 0,
              0, 1, 1, 1,
              1, 1, 1, 0,
              1, 1, 0, 1;
  CHECK(adj == expected);
  CHECK_THROWS(binarize(v, Binarization::top_k(4)));
  CHECK(Binarization::default_for(10).k == 2);
}

TEST_CASE("quantile binarization counts") {
  const Eigen::MatrixXd v = gaussian(8, 8, 1);
  CHECK(count_kept_off_diagonal(binarize(v, Binarization::quantile(0.0))) == 56);
  CHECK(count_kept_off_diagonal(binarize(v, Binarization::quantile(0.8))) ==
        static_cast<std::size_t>(std::ceil(0.2 * 56)));
  const auto adj = binarize(v, Binarization::quantile(0.5));
  CHECK(adj.diagonal() == Eigen::VectorXi::Ones(8));
  // Every kept entry is at least as large as every dropped one.
  double min_kept = INFINITY, max_dropped = -INFINITY;
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) {
      if (i == j) continue;
      if (adj(i, j)) min_kept = std::min(min_kept, v(i, j));
      else max_dropped = std::max(max_dropped, v(i, j));
    }
  CHECK(min_kept >= max_dropped);
  CHECK_THROWS(binarize(v, Binarization::quantile(1.0)));
  CHECK_THROWS(binarize(v, Binarization::quantile(-0.1)));
}

TEST_CASE("binarization ties follow index order") {
  const Eigen::MatrixXd flat = Eigen::MatrixXd::Ones(4, 4);
  const auto adj = binarize(flat, Binarization::top_k(1));
  CHECK(adj(0, 1) == 1);
  CHECK(adj(1, 0) == 1);
  CHECK(adj(2, 0) == 1);
  CHECK(count_kept_off_diagonal(adj) == 4);
  const auto q = binarize(flat, Binarization::quantile(0.9));
  CHECK(count_kept_off_diagonal(q) == 2);
  CHECK(q(0, 1) == 1);
  CHECK(q(0, 2) == 1);
}

TEST_CASE("augmentation produces one matrix per grid point") {
  const auto x = standardize(TimeSeriesEnsemble(testing_support::chain(6, 200, 0.6, 0.5, 2)));
  const AugmentationGrid grid{{2, 3, 3}, {1, 2}};
  const auto out = augment(x, grid, ConnectivityMethod::lsagc);
  REQUIRE(out.size() == 6);
  CHECK(out[0].p == 2);
  CHECK(out[0].m == 1);
  CHECK(out[1].m == 2);
  CHECK(out[5].grid_index == 5);
  // Repeated (p, m) points are bit-identical.
  CHECK(out[2].matrix.values == out[4].matrix.values);
  CHECK(out[3].matrix.values == out[5].matrix.values);
  ArPredictorConfig cfg;
  cfg.p = 2;
  cfg.m = 1;
  CHECK(out[0].matrix.values == lsagc_connectivity(x, cfg).values);

  const auto single = augment(x, AugmentationGrid{{4}, {3}}, ConnectivityMethod::lsagc);
  REQUIRE(single.size() == 1);
  cfg.p = 4;
  cfg.m = 3;
  CHECK(single[0].matrix.values == lsagc_connectivity(x, cfg).values);
}

TEST_CASE("correlation augmentation is tagged copies") {
  const auto x = standardize(TimeSeriesEnsemble(gaussian(5, 100, 3)));
  const auto out = augment(x, AugmentationGrid::defaults(5), ConnectivityMethod::cross_correlation);
  REQUIRE(out.size() == 27);
  CHECK_FALSE(out[0].is_copy);
  for (std::size_t i = 1; i < out.size(); ++i) {
    CHECK(out[i].is_copy);
    CHECK(out[i].matrix.values == out[0].matrix.values);
  }
}

TEST_CASE("invalid grid points name their parameters") {
  const auto x = standardize(TimeSeriesEnsemble(gaussian(5, 30, 4)));
  try {
    augment(x, AugmentationGrid{{2, 9}, {1}}, ConnectivityMethod::lsagc);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("p=9") != std::string::npos);
  }
}

TEST_CASE("folds are stratified and deterministic") {
  const auto labels = cohort_labels(32, 28);
  const auto folds = make_folds(labels, 5, 42);
  REQUIRE(folds.size() == 60);
  for (int f = 0; f < 5; ++f) {
    int c0 = 0, c1 = 0;
    for (const auto& l : labels)
      if (folds.at(l.subject) == f) (l.label ? c1 : c0)++;
    CHECK(std::abs(c0 - 6.4) <= 1.0);
    CHECK(std::abs(c1 - 5.6) <= 1.0);
  }
  CHECK(make_folds(labels, 5, 42) == folds);
  CHECK(make_folds(labels, 5, 43) != folds);

  const auto five = make_folds(cohort_labels(3, 2), 5, 1);
  std::vector<int> seen;
  for (const auto& [id, f] : five) seen.push_back(f);
  std::sort(seen.begin(), seen.end());
  CHECK(seen == std::vector<int>{0, 1, 2, 3, 4});

  CHECK_THROWS_AS(make_folds(cohort_labels(2, 2), 5, 1), ConfigError);
  CHECK_THROWS_AS(make_folds({{"a", 0}, {"a", 1}, {"b", 0}}, 2, 1), ConfigError);
}

TEST_CASE("fold stratification holds across seeds and sizes") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n0 = 5 + seed % 7, n1 = 5 + (seed * 3) % 11;
    const auto labels = cohort_labels(n0, n1);
    const auto folds = make_folds(labels, 5, seed);
    for (int f = 0; f < 5; ++f) {
      double c0 = 0, c1 = 0;
      for (const auto& l : labels)
        if (folds.at(l.subject) == f) (l.label ? c1 : c0) += 1;
      CHECK(std::abs(c0 - n0 / 5.0) <= 1.0);
      CHECK(std::abs(c1 - n1 / 5.0) <= 1.0);
    }
  }
}

TEST_CASE("aggregation reproduces its own arithmetic") {
  std::vector<FoldResult> folds;
  const double lsagc[] = {62.28, 62.53, 59.73, 61.65, 63.18};
  for (int f = 0; f < 5; ++f) {
    FoldResult r;
    r.fold = f;
    r.lsagc_acc = lsagc[f] / 100.0;
    folds.push_back(r);
  }
  const CvReport report = aggregate(folds);
  CHECK(report.lsagc.mean * 100.0 == doctest::Approx(61.874).epsilon(1e-12));
  CHECK(report.lsagc.std * 100.0 == doctest::Approx(1.3179264015869794).epsilon(1e-9));
  const double one[] = {0.7};
  CHECK(summarize(one).std == 0.0);
}

TEST_CASE("report summaries match recomputation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<FoldResult> folds(5);
    for (auto& f : folds) {
      f.lsagc_acc = u(rng);
      f.corr_acc = u(rng);
      f.random_acc = u(rng);
    }
    const CvReport r = aggregate(folds);
    double mean = 0.0;
    for (const auto& f : folds) mean += f.corr_acc;
    mean /= 5.0;
    double var = 0.0;
    for (const auto& f : folds) var += (f.corr_acc - mean) * (f.corr_acc - mean);
    CHECK(std::abs(r.corr.mean - mean) < 1e-9);
    CHECK(std::abs(r.corr.std - std::sqrt(var / 4.0)) < 1e-9);
  }
}

TEST_CASE("majority vote ties go to class one and ignore order") {
  const int tie[] = {0, 1, 0, 1};
  CHECK(majority_vote(tie) == 1);
  const int mostly_zero[] = {0, 0, 1};
  CHECK(majority_vote(mostly_zero) == 0);
  std::vector<int> votes{1, 0, 0, 1, 1, 0, 0};
  const int expected = majority_vote(votes);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(votes.begin(), votes.end(), rng);
    CHECK(majority_vote(votes) == expected);
  }
}

TEST_CASE("random guessing is a fair coin") {
  std::vector<int> labels(60);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 2 ? 1 : 0;
  double total = 0.0;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) total += random_guess_accuracy(labels, rep);
  CHECK(std::abs(total / 1000.0 - 0.5) < 0.05);
  CHECK(random_guess_accuracy(labels, 3) == random_guess_accuracy(labels, 3));
  CHECK(random_guess_accuracy({}, 3) == 0.0);
}

TEST_CASE("leakage is detected") {
  LabeledGraphDataset ds;
  ds.samples.resize(3);
  ds.subject_ids = {"a", "b", "c"};
  ds.fold_of_subject = {{"a", 0}, {"b", 1}};
  CHECK_THROWS_AS(check_no_leakage(ds, 0), LeakageError);
  ds.fold_of_subject["c"] = 1;
  CHECK_NOTHROW(check_no_leakage(ds, 0));
}

namespace {

std::vector<LabeledSeries> separable_cohort(std::size_t per_class, std::uint64_t seed) {
  synth::CohortSpec spec;
  spec.base.n_nodes = 6;
  spec.base.coupling = 0.3;
  spec.base.noise_sd = 1.0;
  spec.base.t_samples = 300;
  spec.base.seed = seed;
  spec.class_edge_delta = {{5, 0, 0.9, 1}, {4, 1, 0.9, 1}};
  spec.n_class0 = per_class;
  spec.n_class1 = per_class;
  spec.subject_noise = 0.02;
  spec.seed = seed + 1;
  return synth::generate_two_class_cohort(spec);
}

CvOptions quick_options() {
  CvOptions o;
  o.data.grid = AugmentationGrid{{2, 4}, {1}};
  o.arch.hidden_dim = 8;
  o.arch.heads = 2;
  o.hyper.epochs = 150;
  o.hyper.learning_rate = 1e-2;
  o.seed = 7;
  return o;
}

}  // namespace

TEST_CASE("dataset construction keeps subjects together") {
  const auto subjects = separable_cohort(5, 1);
  DatasetOptions opts;
  opts.grid = AugmentationGrid{{2, 3}, {1, 2}};
  const auto ds = build_dataset(subjects, ConnectivityMethod::lsagc, opts);
  REQUIRE(ds.size() == 40);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(ds.subject_ids[i] == subjects[i / 4].subject_id);
    CHECK(ds.augmentation_index[i] == i % 4);
    CHECK(ds.samples[i].label == subjects[i / 4].label);
    CHECK(ds.samples[i].features.rows() == 6);
    CHECK(ds.samples[i].adjacency.diagonal() == Eigen::VectorXi::Ones(6));
  }
  const Eigen::MatrixXd mean0 = class_mean_features(ds, 0);
  CHECK(mean0.rows() == 6);
  CHECK(mean0.allFinite());
}

TEST_CASE("separable cohort is classified perfectly") {
  const CvReport r = run_cv(separable_cohort(10, 3), quick_options());
  REQUIRE(r.per_fold.size() == 5);
  for (const auto& f : r.per_fold) {
    CHECK(f.lsagc_acc == 1.0);
    CHECK(f.test_subjects == 4);
  }
  CHECK(r.lsagc.mean == 1.0);
}

TEST_CASE("cross-validation is reproducible and fold-parallel safe") {
  const auto subjects = separable_cohort(5, 9);
  auto o = quick_options();
  o.hyper.epochs = 20;
  const CvReport a = run_cv(subjects, o);
  const CvReport b = run_cv(subjects, o);
  o.parallel_folds = true;
  const CvReport c = run_cv(subjects, o, 3);
  for (std::size_t f = 0; f < 5; ++f) {
    CHECK(a.per_fold[f].lsagc_acc == b.per_fold[f].lsagc_acc);
    CHECK(a.per_fold[f].corr_sample_acc == b.per_fold[f].corr_sample_acc);
    CHECK(a.per_fold[f].lsagc_sample_acc == c.per_fold[f].lsagc_sample_acc);
    CHECK(a.per_fold[f].random_acc == c.per_fold[f].random_acc);
  }
}

TEST_CASE("identical classes stay near chance") {
  double lsagc = 0.0, corr = 0.0, random = 0.0;
  const int seeds = 4;
  for (int s = 0; s < seeds; ++s) {
    synth::CohortSpec spec;
    spec.base.n_nodes = 5;
    spec.base.t_samples = 150;
    spec.base.seed = 100 + s;
    spec.n_class0 = 10;
    spec.n_class1 = 10;
    spec.seed = 200 + s;
    auto o = quick_options();
    o.data.grid = AugmentationGrid{{2}, {1}};
    o.hyper.epochs = 40;
    o.seed = s;
    const CvReport r = run_cv(synth::generate_two_class_cohort(spec), o);
    lsagc += r.lsagc.mean;
    corr += r.corr.mean;
    random += r.random.mean;
  }
  CHECK(lsagc / seeds >= 0.2);
  CHECK(lsagc / seeds <= 0.8);
  CHECK(corr / seeds >= 0.2);
  CHECK(corr / seeds <= 0.8);
  CHECK(random / seeds >= 0.2);
  CHECK(random / seeds <= 0.8);
}
