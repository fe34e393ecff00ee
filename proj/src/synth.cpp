#include "lsagc/synth.hpp"

#include "lsagc/errors.hpp"
#include "lsagc/parallel.hpp"
#include "lsagc/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lsagc::synth {

namespace {

constexpr double kStabilityCap = 0.95;

std::vector<std::pair<std::size_t, std::size_t>> topology_edges(const VarNetworkSpec& spec,
                                                                std::mt19937_64& rng) {
  const std::size_t n = spec.n_nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  switch (spec.topology) {
    case Topology::chain:
      for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      break;
    case Topology::hub:
      for (std::size_t j = 1; j < n; ++j) edges.emplace_back(0, j);
      break;
    case Topology::random_dag: {
      std::bernoulli_distribution keep(spec.edge_density);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (keep(rng)) edges.emplace_back(i, j);
      break;
    }
    case Topology::two_community: {
      // Each half is a hub on its first node, plus one bridge between hubs.
      const std::size_t half = n / 2;
      for (std::size_t j = 1; j < half; ++j) edges.emplace_back(0, j);
      for (std::size_t j = half + 1; j < n; ++j) edges.emplace_back(half, j);
      edges.emplace_back(0, half);
      break;
    }
  }
  return edges;
}

}  // namespace

void VarNetworkSpec::validate() const {
  if (n_nodes < 2) throw ConfigError("n_nodes", "need at least 2 nodes");
  if (topology == Topology::random_dag && !(edge_density > 0.0 && edge_density <= 1.0))
    throw ConfigError("edge_density", "must lie in (0, 1]");
  if (!std::isfinite(coupling)) throw ConfigError("coupling", "must be finite");
  if (lag_order < 1) throw ConfigError("lag_order", "must be >= 1");
  if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) throw ConfigError("noise_sd", "must be positive");
  if (t_samples < 2) throw ConfigError("t_samples", "must be >= 2");
}

std::size_t GroundTruth::edge_count() const {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < adjacency.rows(); ++i)
    for (Eigen::Index j = 0; j < adjacency.cols(); ++j)
      if (i != j && adjacency(i, j) != 0) ++count;
  return count;
}

GroundTruth VarCoefficients::truth() const {
  const auto n = static_cast<Eigen::Index>(n_nodes());
  GroundTruth g;
  g.adjacency = Eigen::MatrixXi::Zero(n, n);
  for (const auto& c : lags)
    for (Eigen::Index t = 0; t < n; ++t)
      for (Eigen::Index s = 0; s < n; ++s)
        if (s != t && c(t, s) != 0.0) g.adjacency(s, t) = 1;
  return g;
}

double spectral_radius(const VarCoefficients& c) {
  const auto n = static_cast<Eigen::Index>(c.n_nodes());
  const auto lags = static_cast<Eigen::Index>(c.lags.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n * lags, n * lags);
  for (Eigen::Index k = 0; k < lags; ++k) companion.block(0, k * n, n, n) = c.lags[static_cast<std::size_t>(k)];
  if (lags > 1) companion.block(n, 0, n * (lags - 1), n * (lags - 1)).setIdentity();
  Eigen::EigenSolver<Eigen::MatrixXd> eig(companion, false);
  if (eig.info() != Eigen::Success) throw SimulationError("companion eigendecomposition failed");
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double enforce_stability(VarCoefficients& c) {
  double total = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double rho = spectral_radius(c);
    if (!std::isfinite(rho)) throw SimulationError("non-finite spectral radius");
    if (rho < kStabilityCap) return total;
    const double factor = 0.9 * kStabilityCap / rho;
    for (auto& m : c.lags) m *= factor;
    total *= factor;
  }
  throw SimulationError("could not rescale VAR coefficients to a stable system");
}

VarCoefficients build_coefficients(const VarNetworkSpec& spec, GroundTruth* truth) {
  spec.validate();
  std::mt19937_64 rng(derive_seed(spec.seed, 0));
  const auto n = static_cast<Eigen::Index>(spec.n_nodes);
  VarCoefficients c;
  c.lags.assign(spec.lag_order, Eigen::MatrixXd::Zero(n, n));
  const auto edges = topology_edges(spec, rng);
  std::bernoulli_distribution flip(0.5);
  std::uniform_int_distribution<std::size_t> pick_lag(1, spec.lag_order);
  GroundTruth g;
  g.adjacency = Eigen::MatrixXi::Zero(n, n);
  for (const auto& [from, to] : edges) {
    const double sign = flip(rng) ? 1.0 : -1.0;
    const std::size_t lag = spec.lag_order > 1 ? pick_lag(rng) : 1;
    c.lags[lag - 1](static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from)) = sign * spec.coupling;
    g.adjacency(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to)) = 1;
  }
  enforce_stability(c);
  if (truth) *truth = std::move(g);
  return c;
}

TimeSeriesEnsemble simulate_var(const VarCoefficients& c, std::size_t t_samples, double noise_sd,
                                std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(c.n_nodes());
  const auto lags = static_cast<Eigen::Index>(c.lags.size());
  if (n == 0 || lags == 0) throw SimulationError("empty coefficient set");
  const Eigen::Index burn = 10 * lags * n;
  const Eigen::Index total = burn + static_cast<Eigen::Index>(t_samples);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sd);

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, total);
  Eigen::VectorXd eps(n);
  for (Eigen::Index t = 0; t < total; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) eps(i) = noise(rng);
    Eigen::VectorXd next = eps;
    for (Eigen::Index k = 1; k <= lags && t - k >= 0; ++k)
      next.noalias() += c.lags[static_cast<std::size_t>(k - 1)] * x.col(t - k);
    x.col(t) = next;
  }
  Eigen::MatrixXd kept = x.rightCols(static_cast<Eigen::Index>(t_samples));
  if (!kept.allFinite()) throw SimulationError("simulation produced non-finite values");
  return TimeSeriesEnsemble(std::move(kept));
}

SimulatedNetwork generate_var(const VarNetworkSpec& spec) {
  GroundTruth truth;
  const VarCoefficients c = build_coefficients(spec, &truth);
  return {simulate_var(c, spec.t_samples, spec.noise_sd, derive_seed(spec.seed, 1)), std::move(truth)};
}

RecoveryScore score_recovery(const ConnectivityMatrix& connectivity, const GroundTruth& truth) {
  return score_recovery(connectivity.values, truth);
}

RecoveryScore score_recovery(const Eigen::MatrixXd& values, const GroundTruth& truth) {
  if (values.rows() != truth.adjacency.rows() || values.cols() != truth.adjacency.cols() ||
      values.rows() != values.cols())
    throw DimensionError("score_recovery: matrix shapes differ");
  struct Entry {
    double value;
    Eigen::Index row, col;
    bool edge;
  };
  std::vector<Entry> entries;
  std::size_t positives = 0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (i == j) continue;
      if (!std::isfinite(values(i, j))) throw DimensionError("score_recovery: non-finite value");
      const bool edge = truth.adjacency(i, j) != 0;
      positives += edge ? 1 : 0;
      entries.push_back({values(i, j), i, j, edge});
    }
  }
  const std::size_t negatives = entries.size() - positives;
  if (positives == 0 || negatives == 0)
    throw std::domain_error("score_recovery: AUC undefined when ground truth has no edges or no non-edges");

  // Descending by value, then (row, col).
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.value > b.value; });

  RecoveryScore score;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < positives; ++i) hits += entries[i].edge ? 1 : 0;
  score.top_k_precision = static_cast<double>(hits) / static_cast<double>(positives);

  // Mann-Whitney: for each positive, count negatives strictly below plus half the tied ones.
  double wins = 0.0;
  std::size_t i = 0;
  std::size_t negatives_above = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    std::size_t pos = 0, neg = 0;
    while (j < entries.size() && entries[j].value == entries[i].value) {
      (entries[j].edge ? pos : neg) += 1;
      ++j;
    }
    const std::size_t negatives_below = negatives - negatives_above - neg;
    wins += static_cast<double>(pos) *
            (static_cast<double>(negatives_below) + 0.5 * static_cast<double>(neg));
    negatives_above += neg;
    i = j;
  }
  score.auc = wins / (static_cast<double>(positives) * static_cast<double>(negatives));
  return score;
}

void CohortSpec::validate() const {
  base.validate();
  if (n_class0 + n_class1 == 0) throw ConfigError("n_per_class", "cohort is empty");
  if (!(subject_noise >= 0.0) || !std::isfinite(subject_noise))
    throw ConfigError("subject_noise", "must be finite and non-negative");
  for (const auto& e : class_edge_delta) {
    if (e.from >= base.n_nodes || e.to >= base.n_nodes || e.from == e.to)
      throw ConfigError("class_edge_delta", "edge endpoints must be distinct nodes in range");
    if (e.lag < 1 || e.lag > kMaxDeltaLag)
      throw ConfigError("class_edge_delta", "edge lag must lie in [1, " + std::to_string(kMaxDeltaLag) + "]");
    if (!std::isfinite(e.weight)) throw ConfigError("class_edge_delta", "edge weight must be finite");
  }
}

namespace {

VarCoefficients with_delta(const CohortSpec& spec, VarCoefficients c) {
  const GroundTruth base_truth = c.truth();
  for (const auto& e : spec.class_edge_delta) {
    if (base_truth.adjacency(static_cast<Eigen::Index>(e.from), static_cast<Eigen::Index>(e.to)) != 0)
      throw ConfigError("class_edge_delta", "edge " + std::to_string(e.from) + "->" +
                                                std::to_string(e.to) + " already in base topology");
    if (c.lags.size() < e.lag) c.lags.resize(e.lag, Eigen::MatrixXd::Zero(c.lags[0].rows(), c.lags[0].cols()));
    c.lags[e.lag - 1](static_cast<Eigen::Index>(e.to), static_cast<Eigen::Index>(e.from)) = e.weight;
  }
  return c;
}

}  // namespace

GroundTruth class1_truth(const CohortSpec& spec) {
  spec.validate();
  return with_delta(spec, build_coefficients(spec.base)).truth();
}

std::vector<CohortSubject> generate_two_class_cohort(const CohortSpec& spec, unsigned threads) {
  spec.validate();
  const VarCoefficients base = build_coefficients(spec.base);
  const VarCoefficients altered = with_delta(spec, base);
  const std::size_t total = spec.n_class0 + spec.n_class1;
  std::vector<CohortSubject> out(total);
  parallel_for(total, threads, [&](std::size_t i) {
    const int label = i < spec.n_class0 ? 0 : 1;
    const std::uint64_t subject_seed = derive_seed(spec.seed, i);
    VarCoefficients c = label == 0 ? base : altered;
    if (spec.subject_noise > 0.0) {
      std::mt19937_64 rng(derive_seed(subject_seed, 0));
      std::normal_distribution<double> jitter(0.0, spec.subject_noise);
      for (auto& m : c.lags)
        for (Eigen::Index col = 0; col < m.cols(); ++col)
          for (Eigen::Index row = 0; row < m.rows(); ++row)
            if (m(row, col) != 0.0) m(row, col) += jitter(rng);
    }
    enforce_stability(c);
    char id[32];
    std::snprintf(id, sizeof id, "sub-%03zu", i + 1);
    out[i] = CohortSubject{id, label,
                           simulate_var(c, spec.base.t_samples, spec.base.noise_sd,
                                        derive_seed(subject_seed, 1))};
  });
  return out;
}

Topology parse_topology(const std::string& s) {
  if (s == "chain") return Topology::chain;
  if (s == "hub") return Topology::hub;
  if (s == "random_dag") return Topology::random_dag;
  if (s == "two_community") return Topology::two_community;
  throw ConfigError("topology", "unknown topology '" + s + "'");
}

const char* to_string(Topology t) {
  switch (t) {
    case Topology::chain: return "chain";
    case Topology::hub: return "hub";
    case Topology::random_dag: return "random_dag";
    case Topology::two_community: return "two_community";
  }
  return "?";
}

}  // namespace lsagc::synth
