#include "lsagc/pipeline.hpp"

#include "lsagc/errors.hpp"
#include "lsagc/parallel.hpp"
#include "lsagc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace lsagc::cv {

AugmentationGrid AugmentationGrid::defaults(std::size_t n_series) {
  AugmentationGrid grid;
  for (int tenth = 1; tenth <= 9; ++tenth) {
    const long p = std::lround(static_cast<double>(n_series) * tenth / 10.0);
    grid.p_values.push_back(static_cast<std::size_t>(std::clamp<long>(p, 1, static_cast<long>(n_series))));
  }
  grid.m_values = {1, 2, 3};
  return grid;
}

Binarization Binarization::default_for(std::size_t n_series) {
  const long k = std::lround(0.2 * static_cast<double>(n_series));
  return top_k(static_cast<std::size_t>(std::clamp<long>(k, 1, std::max<long>(1, static_cast<long>(n_series) - 1))));
}

Eigen::MatrixXi binarize(const Eigen::MatrixXd& values, const Binarization& strategy) {
  const Eigen::Index n = values.rows();
  if (values.cols() != n) throw DimensionError("binarize: matrix must be square");
  if (!values.allFinite()) throw DimensionError("binarize: non-finite connectivity value");
  Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(n, n);

  if (strategy.strategy == BinarizeStrategy::top_k_per_node) {
    if (strategy.k >= static_cast<std::size_t>(n))
      throw ConfigError("k", "top_k_per_node needs k < N (k=" + std::to_string(strategy.k) +
                                 ", N=" + std::to_string(n) + ")");
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < n; ++i) {
      cols.clear();
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i) cols.push_back(j);
      std::stable_sort(cols.begin(), cols.end(),
                       [&](Eigen::Index a, Eigen::Index b) { return values(i, a) > values(i, b); });
      for (std::size_t r = 0; r < strategy.k; ++r) adj(i, cols[r]) = 1;
    }
  } else {
    if (!(strategy.q >= 0.0 && strategy.q < 1.0))
      throw ConfigError("q", "global_quantile needs q in [0, 1)");
    std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) cells.emplace_back(i, j);
    std::stable_sort(cells.begin(), cells.end(), [&](const auto& a, const auto& b) {
      return values(a.first, a.second) > values(b.first, b.second);
    });
    const double share = (1.0 - strategy.q) * static_cast<double>(cells.size());
    const auto keep = std::min(cells.size(), static_cast<std::size_t>(std::ceil(share - 1e-9)));
    for (std::size_t r = 0; r < keep; ++r) adj(cells[r].first, cells[r].second) = 1;
  }
  adj.diagonal().setOnes();
  return adj;
}

Eigen::MatrixXi binarize(const ConnectivityMatrix& connectivity, const Binarization& strategy) {
  return binarize(connectivity.values, strategy);
}

std::vector<AugmentedMatrix> augment(const TimeSeriesEnsemble& subject, const AugmentationGrid& grid,
                                     ConnectivityMethod method, const ArPredictorConfig& base,
                                     unsigned threads) {
  if (grid.factor() == 0) throw ConfigError("grid", "augmentation grid is empty");
  std::vector<AugmentedMatrix> out;
  out.reserve(grid.factor());
  std::optional<ConnectivityMatrix> correlation;
  std::size_t index = 0;
  for (std::size_t p : grid.p_values) {
    for (std::size_t m : grid.m_values) {
      AugmentedMatrix item;
      item.grid_index = index++;
      item.p = p;
      item.m = m;
      if (method == ConnectivityMethod::lsagc) {
        ArPredictorConfig cfg = base;
        cfg.p = p;
        cfg.m = m;
        try {
          cfg.validate(subject.n_series(), subject.n_samples());
        } catch (const ConfigError& e) {
          throw ConfigError("grid", "invalid grid point (p=" + std::to_string(p) + ", m=" +
                                        std::to_string(m) + "): " + e.what());
        }
        item.matrix = lsagc_connectivity(subject, cfg, threads);
      } else {
        item.is_copy = correlation.has_value();
        if (!correlation) correlation = cross_correlation_matrix(subject);
        item.matrix = *correlation;
      }
      out.push_back(std::move(item));
    }
  }
  return out;
}

std::map<std::string, int> make_folds(const std::vector<SubjectLabel>& subjects, std::size_t n_folds,
                                      std::uint64_t seed) {
  if (n_folds < 1) throw ConfigError("folds", "need at least one fold");
  if (subjects.size() < n_folds)
    throw ConfigError("folds", "too few subjects (" + std::to_string(subjects.size()) + ") for " +
                                   std::to_string(n_folds) + " folds");
  std::map<int, std::vector<std::string>> by_label;
  std::set<std::string> seen;
  for (const auto& s : subjects) {
    if (!seen.insert(s.subject).second) throw ConfigError("subject_id", "duplicate subject '" + s.subject + "'");
    by_label[s.label].push_back(s.subject);
  }
  std::map<std::string, int> folds;
  std::size_t offset = 0;
  for (auto& [label, ids] : by_label) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    std::shuffle(ids.begin(), ids.end(), rng);
    for (std::size_t i = 0; i < ids.size(); ++i)
      folds[ids[i]] = static_cast<int>((offset + i) % n_folds);
    offset = (offset + ids.size()) % n_folds;
  }
  return folds;
}

LabeledGraphDataset build_dataset(const std::vector<LabeledSeries>& subjects, ConnectivityMethod method,
                                  const DatasetOptions& options, unsigned threads) {
  std::vector<std::vector<AugmentedMatrix>> per_subject(subjects.size());
  parallel_for(subjects.size(), threads, [&](std::size_t i) {
    const TimeSeriesEnsemble x =
        options.standardize ? standardize(subjects[i].ensemble) : subjects[i].ensemble;
    const AugmentationGrid grid =
        options.grid.factor() == 0 ? AugmentationGrid::defaults(x.n_series()) : options.grid;
    per_subject[i] = augment(x, grid, method, options.lsagc);
  });

  LabeledGraphDataset ds;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (subjects[i].label != 0 && subjects[i].label != 1)
      throw ConfigError("label", "subject '" + subjects[i].subject_id + "' has a non-binary label");
    const std::size_t n = subjects[i].ensemble.n_series();
    const Binarization bin = options.binarization.value_or(Binarization::default_for(n));
    for (auto& item : per_subject[i]) {
      gat::GraphSample sample;
      sample.adjacency = binarize(item.matrix.values, bin);
      sample.features = std::move(item.matrix.values);
      sample.label = subjects[i].label;
      ds.samples.push_back(std::move(sample));
      ds.subject_ids.push_back(subjects[i].subject_id);
      ds.augmentation_index.push_back(item.grid_index);
    }
  }
  return ds;
}

Eigen::MatrixXd class_mean_features(const LabeledGraphDataset& dataset, int label) {
  Eigen::MatrixXd sum;
  std::size_t count = 0;
  for (const auto& s : dataset.samples) {
    if (s.label != label) continue;
    if (count == 0) sum = Eigen::MatrixXd::Zero(s.features.rows(), s.features.cols());
    sum += s.features;
    ++count;
  }
  if (count == 0) return {};
  return sum / static_cast<double>(count);
}

MethodSummary summarize(std::span<const double> values) {
  MethodSummary s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

CvReport aggregate(std::vector<FoldResult> per_fold) {
  CvReport r;
  r.per_fold = std::move(per_fold);
  auto column = [&](double FoldResult::*field) {
    std::vector<double> v;
    for (const auto& f : r.per_fold) v.push_back(f.*field);
    return summarize(v);
  };
  r.lsagc = column(&FoldResult::lsagc_acc);
  r.corr = column(&FoldResult::corr_acc);
  r.random = column(&FoldResult::random_acc);
  r.lsagc_sample = column(&FoldResult::lsagc_sample_acc);
  r.corr_sample = column(&FoldResult::corr_sample_acc);
  return r;
}

double random_guess_accuracy(std::span<const int> labels, std::uint64_t seed) {
  if (labels.empty()) return 0.0;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::size_t correct = 0;
  for (int label : labels) correct += (coin(rng) ? 1 : 0) == label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

int majority_vote(std::span<const int> predictions) {
  std::size_t positive = 0;
  for (int p : predictions) positive += p == 1 ? 1 : 0;
  return 2 * positive >= predictions.size() ? 1 : 0;
}

void check_no_leakage(const LabeledGraphDataset& dataset, int fold) {
  std::set<std::string> train, test;
  for (const auto& id : dataset.subject_ids) {
    const auto it = dataset.fold_of_subject.find(id);
    if (it == dataset.fold_of_subject.end()) throw LeakageError("subject '" + id + "' has no fold");
    (it->second == fold ? test : train).insert(id);
  }
  for (const auto& id : test)
    if (train.count(id)) throw LeakageError("subject '" + id + "' appears in train and test of fold " + std::to_string(fold));
}

namespace {

struct MethodAccuracy {
  double subject = 0.0;
  double sample = 0.0;
  std::size_t train_samples = 0;
};

MethodAccuracy evaluate_fold(const LabeledGraphDataset& data, int fold, const CvOptions& options,
                             unsigned threads) {
  check_no_leakage(data, fold);
  std::vector<gat::GraphSample> train_set;
  std::map<std::string, std::vector<std::size_t>> test_by_subject;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.fold_of_subject.at(data.subject_ids[i]) == fold)
      test_by_subject[data.subject_ids[i]].push_back(i);
    else
      train_set.push_back(data.samples[i]);
  }
  MethodAccuracy acc;
  acc.train_samples = train_set.size();
  if (test_by_subject.empty()) return acc;
  if (train_set.empty()) throw ConfigError("folds", "fold " + std::to_string(fold) + " leaves no training data");

  gat::GatArchitecture arch = options.arch;
  arch.input_dim = data.samples.front().n_nodes();
  const gat::GatModel init = gat::init_model(arch, derive_seed(options.seed, static_cast<std::uint64_t>(fold) + 1));
  gat::TrainResult trained;
  try {
    trained = gat::train(init, train_set, options.hyper, nullptr, threads);
  } catch (const TrainingDivergedError& e) {
    throw TrainingDivergedError(e.epoch(), "fold " + std::to_string(fold) + ": " + e.what());
  }

  std::size_t correct_subjects = 0, correct_samples = 0, samples = 0;
  for (const auto& [id, indices] : test_by_subject) {
    std::vector<int> preds;
    preds.reserve(indices.size());
    for (std::size_t i : indices) {
      const int p = gat::predict_label(trained.model, data.samples[i]);
      preds.push_back(p);
      correct_samples += p == data.samples[i].label ? 1 : 0;
      ++samples;
    }
    correct_subjects += majority_vote(preds) == data.samples[indices.front()].label ? 1 : 0;
  }
  acc.subject = static_cast<double>(correct_subjects) / static_cast<double>(test_by_subject.size());
  acc.sample = static_cast<double>(correct_samples) / static_cast<double>(samples);
  return acc;
}

std::map<std::string, int> subject_labels(const LabeledGraphDataset& data) {
  std::map<std::string, int> labels;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto [it, inserted] = labels.emplace(data.subject_ids[i], data.samples[i].label);
    if (!inserted && it->second != data.samples[i].label)
      throw ConfigError("label", "subject '" + data.subject_ids[i] + "' has inconsistent labels");
  }
  return labels;
}

}  // namespace

CvReport run_cv(const LabeledGraphDataset& lsagc_data, const LabeledGraphDataset* corr_data,
                const CvOptions& options, unsigned threads) {
  if (options.n_folds < 1) throw ConfigError("folds", "need at least one fold");
  if (lsagc_data.size() == 0) throw ConfigError("cohort", "empty dataset");
  LabeledGraphDataset lsagc = lsagc_data;
  const auto labels = subject_labels(lsagc);
  if (lsagc.fold_of_subject.empty()) {
    std::vector<SubjectLabel> list;
    for (const auto& [id, label] : labels) list.push_back({id, label});
    lsagc.fold_of_subject = make_folds(list, options.n_folds, options.seed);
  }
  std::optional<LabeledGraphDataset> corr;
  if (corr_data && options.run_correlation) {
    corr = *corr_data;
    corr->fold_of_subject = lsagc.fold_of_subject;
  }

  std::vector<FoldResult> folds(options.n_folds);
  const unsigned fold_threads = options.parallel_folds ? threads : 1;
  const unsigned inner_threads = options.parallel_folds ? 1 : threads;
  parallel_for(options.n_folds, fold_threads, [&](std::size_t f) {
    const int fold = static_cast<int>(f);
    FoldResult r;
    r.fold = fold;
    const MethodAccuracy la = evaluate_fold(lsagc, fold, options, inner_threads);
    r.lsagc_acc = la.subject;
    r.lsagc_sample_acc = la.sample;
    r.train_samples = la.train_samples;
    if (corr) {
      const MethodAccuracy ca = evaluate_fold(*corr, fold, options, inner_threads);
      r.corr_acc = ca.subject;
      r.corr_sample_acc = ca.sample;
    }
    std::vector<int> test_labels;
    for (const auto& [id, fold_id] : lsagc.fold_of_subject)
      if (fold_id == fold) test_labels.push_back(labels.at(id));
    r.test_subjects = test_labels.size();
    r.random_acc = random_guess_accuracy(test_labels, derive_seed(options.seed, 1000 + f));
    folds[f] = r;
  });
  return aggregate(std::move(folds));
}

CvReport run_cv(const std::vector<LabeledSeries>& subjects, const CvOptions& options, unsigned threads) {
  std::vector<SubjectLabel> list;
  for (const auto& s : subjects) list.push_back({s.subject_id, s.label});
  const auto folds = make_folds(list, options.n_folds, options.seed);
  LabeledGraphDataset lsagc = build_dataset(subjects, ConnectivityMethod::lsagc, options.data, threads);
  lsagc.fold_of_subject = folds;
  if (!options.run_correlation) return run_cv(lsagc, nullptr, options, threads);
  LabeledGraphDataset corr = build_dataset(subjects, ConnectivityMethod::cross_correlation, options.data, threads);
  corr.fold_of_subject = folds;
  return run_cv(lsagc, &corr, options, threads);
}

}  // namespace lsagc::cv
