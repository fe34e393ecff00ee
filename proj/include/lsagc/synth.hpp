#pragma once

#include "lsagc/granger.hpp"
#include "lsagc/timeseries.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lsagc::synth {

enum class Topology { chain, hub, random_dag, two_community };

struct VarNetworkSpec {
  std::size_t n_nodes = 10;
  Topology topology = Topology::chain;
  double edge_density = 0.2;  // random_dag only
  double coupling = 0.8;
  std::size_t lag_order = 1;
  double noise_sd = 0.2;
  std::size_t t_samples = 500;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// adjacency(s, t) = 1 iff s drives t at some lag.
struct GroundTruth {
  Eigen::MatrixXi adjacency;
  std::size_t edge_count() const;
};

// x(t) = sum_k lags[k-1] x(t-k) + noise; lags[k](target, source).
struct VarCoefficients {
  std::vector<Eigen::MatrixXd> lags;
  std::size_t n_nodes() const { return lags.empty() ? 0 : static_cast<std::size_t>(lags[0].rows()); }
  GroundTruth truth() const;
};

inline constexpr std::size_t kMaxDeltaLag = 16;

struct DirectedEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 0.0;
  std::size_t lag = 1;
};

// Spectral radius of the companion matrix.
double spectral_radius(const VarCoefficients& c);

// Uniformly shrinks all lag matrices until the companion spectral radius is
// below 0.95. Returns the total factor applied (1 when already stable).
double enforce_stability(VarCoefficients& c);

// Topology edges with magnitude `coupling`, random sign and (for
// lag_order > 1) random lag, drawn from spec.seed. Edges are reported even
// when coupling is zero.
VarCoefficients build_coefficients(const VarNetworkSpec& spec, GroundTruth* truth = nullptr);

// Gaussian innovations with sd noise_sd; 10*lag_order*n burn-in samples are
// discarded. Throws SimulationError on non-finite output.
TimeSeriesEnsemble simulate_var(const VarCoefficients& c, std::size_t t_samples, double noise_sd,
                                std::uint64_t seed);

struct SimulatedNetwork {
  TimeSeriesEnsemble ensemble;
  GroundTruth truth;
};

SimulatedNetwork generate_var(const VarNetworkSpec& spec);

struct RecoveryScore {
  double auc = 0.5;
  double top_k_precision = 0.0;
};

// Mann-Whitney AUC of true off-diagonal edges vs non-edges (ties 0.5) and
// precision of the k highest entries with k = number of true edges.
RecoveryScore score_recovery(const ConnectivityMatrix& connectivity, const GroundTruth& truth);
RecoveryScore score_recovery(const Eigen::MatrixXd& values, const GroundTruth& truth);

using CohortSubject = LabeledSeries;

struct CohortSpec {
  VarNetworkSpec base;
  std::vector<DirectedEdge> class_edge_delta;
  std::size_t n_class0 = 30;
  std::size_t n_class1 = 28;
  double subject_noise = 0.0;  // sd of per-subject coefficient jitter
  std::uint64_t seed = 0;

  void validate() const;
};

// Class 0 simulates the base network, class 1 adds the delta edges. Every
// nonzero coefficient gets N(0, subject_noise^2) jitter; subject i uses seed
// derive_seed(seed, i). Subjects are ordered class 0 first.
std::vector<CohortSubject> generate_two_class_cohort(const CohortSpec& spec,
                                                     unsigned threads = 1);

// Ground truth of class 1 (base plus delta).
GroundTruth class1_truth(const CohortSpec& spec);

Topology parse_topology(const std::string& s);
const char* to_string(Topology t);

}  // namespace lsagc::synth
