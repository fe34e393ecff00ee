#pragma once

#include "lsagc/gat.hpp"
#include "lsagc/granger.hpp"
#include "lsagc/timeseries.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lsagc::cv {

// (p, m) sweep used to augment each subject into several graphs.
struct AugmentationGrid {
  std::vector<std::size_t> p_values;
  std::vector<std::size_t> m_values;

  std::size_t factor() const { return p_values.size() * m_values.size(); }

  // p in {round(N*r) : r = 0.1..0.9}, m in {1, 2, 3}: 27 points.
  static AugmentationGrid defaults(std::size_t n_series);
};

enum class BinarizeStrategy { top_k_per_node, global_quantile };

struct Binarization {
  BinarizeStrategy strategy = BinarizeStrategy::top_k_per_node;
  std::size_t k = 2;
  double q = 0.8;

  static Binarization top_k(std::size_t k) { return {BinarizeStrategy::top_k_per_node, k, 0.0}; }
  static Binarization quantile(double q) { return {BinarizeStrategy::global_quantile, 0, q}; }
  // top_k_per_node with k = round(0.2 N).
  static Binarization default_for(std::size_t n_series);
};

// Binary mask with self-loops. Ties are broken by (row, column) order.
Eigen::MatrixXi binarize(const Eigen::MatrixXd& values, const Binarization& strategy);
Eigen::MatrixXi binarize(const ConnectivityMatrix& connectivity, const Binarization& strategy);

struct AugmentedMatrix {
  ConnectivityMatrix matrix;
  std::size_t grid_index = 0;
  std::size_t p = 0;
  std::size_t m = 0;
  bool is_copy = false;  // correlation has no (p, m); later grid points duplicate the first
};

// One matrix per grid point in row-major (p, m) order. `base` supplies the
// ridge, sign and reduced-model settings; its p and m are overridden.
std::vector<AugmentedMatrix> augment(const TimeSeriesEnsemble& subject, const AugmentationGrid& grid,
                                     ConnectivityMethod method, const ArPredictorConfig& base = {},
                                     unsigned threads = 1);

struct SubjectLabel {
  std::string subject;
  int label = 0;
};

// Stratified subject-level assignment to folds 0..n_folds-1.
std::map<std::string, int> make_folds(const std::vector<SubjectLabel>& subjects, std::size_t n_folds,
                                      std::uint64_t seed);

struct LabeledGraphDataset {
  std::vector<gat::GraphSample> samples;
  std::vector<std::string> subject_ids;          // parallel to samples
  std::vector<std::size_t> augmentation_index;   // parallel to samples
  std::map<std::string, int> fold_of_subject;

  std::size_t size() const { return samples.size(); }
};

struct DatasetOptions {
  AugmentationGrid grid;  // empty means AugmentationGrid::defaults(N)
  std::optional<Binarization> binarization;
  ArPredictorConfig lsagc;  // ridge/sign/reduced-model settings
  bool standardize = true;
};

LabeledGraphDataset build_dataset(const std::vector<LabeledSeries>& subjects, ConnectivityMethod method,
                                  const DatasetOptions& options, unsigned threads = 1);

// Element-wise mean of the feature matrices of one class.
Eigen::MatrixXd class_mean_features(const LabeledGraphDataset& dataset, int label);

struct FoldResult {
  int fold = 0;
  double lsagc_acc = 0.0;
  double corr_acc = 0.0;
  double random_acc = 0.0;
  double lsagc_sample_acc = 0.0;
  double corr_sample_acc = 0.0;
  std::size_t test_subjects = 0;
  std::size_t train_samples = 0;
};

struct MethodSummary {
  double mean = 0.0;
  double std = 0.0;  // divisor n-1
};

MethodSummary summarize(std::span<const double> values);

struct CvReport {
  std::vector<FoldResult> per_fold;
  MethodSummary lsagc, corr, random;
  MethodSummary lsagc_sample, corr_sample;
};

// Recomputes all summaries from per_fold.
CvReport aggregate(std::vector<FoldResult> per_fold);

struct CvOptions {
  DatasetOptions data;
  gat::GatArchitecture arch;  // input_dim is taken from the data
  gat::TrainHyper hyper;
  std::size_t n_folds = 5;
  std::uint64_t seed = 0;
  bool parallel_folds = false;
  bool run_correlation = true;
};

// Throws LeakageError when a subject lands on both sides of a split.
void check_no_leakage(const LabeledGraphDataset& dataset, int fold);

// Fair coin per subject, in the given order; 0 for an empty list.
double random_guess_accuracy(std::span<const int> labels, std::uint64_t seed);

// Majority vote over a subject's sample predictions; ties go to class 1.
int majority_vote(std::span<const int> predictions);

// Trains and evaluates on precomputed datasets (folds taken from lsagc_data).
CvReport run_cv(const LabeledGraphDataset& lsagc_data, const LabeledGraphDataset* corr_data,
                const CvOptions& options, unsigned threads = 1);

// Builds both datasets from raw subjects and runs cross-validation.
CvReport run_cv(const std::vector<LabeledSeries>& subjects, const CvOptions& options,
                unsigned threads = 1);

}  // namespace lsagc::cv
