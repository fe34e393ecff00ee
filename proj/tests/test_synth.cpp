#include "doctest.h"
#include "support.hpp"

#include "lsagc/errors.hpp"
#include "lsagc/granger.hpp"
#include "lsagc/synth.hpp"

#include <cmath>
#include <stdexcept>

using namespace lsagc;
using namespace lsagc::synth;

namespace {

double max_abs_correlation(const Eigen::MatrixXd& x) {
  const auto c = cross_correlation_matrix(standardize(TimeSeriesEnsemble(x)));
  return c.values.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("chain of four has exactly the forward edges") {
  VarNetworkSpec spec;
  spec.n_nodes = 4;
  const auto net = generate_var(spec);
  Eigen::MatrixXi expected = Eigen::MatrixXi::Zero(4, 4);
  expected(0, 1) = expected(1, 2) = expected(2, 3) = 1;
  CHECK(net.truth.adjacency == expected);
  CHECK(net.truth.edge_count() == 3);
  CHECK(net.ensemble.n_samples() == spec.t_samples);
}

TEST_CASE("zero coupling keeps the topology but yields independent noise") {
  VarNetworkSpec spec;
  spec.coupling = 0.0;
  spec.t_samples = 2000;
  spec.seed = 5;
  const auto net = generate_var(spec);
  CHECK(net.truth.edge_count() == 9);
  CHECK(max_abs_correlation(net.ensemble.data) < 0.1);
}

TEST_CASE("identical seeds give identical ensembles") {
  VarNetworkSpec spec;
  spec.topology = Topology::random_dag;
  spec.edge_density = 0.3;
  spec.seed = 77;
  CHECK(generate_var(spec).ensemble.data == generate_var(spec).ensemble.data);
  spec.seed = 78;
  CHECK(generate_var(spec).ensemble.data != generate_var(VarNetworkSpec{}).ensemble.data);
}

TEST_CASE("every topology builds a loop-free binary truth") {
  for (auto topo : {Topology::chain, Topology::hub, Topology::random_dag, Topology::two_community}) {
    VarNetworkSpec spec;
    spec.topology = topo;
    spec.n_nodes = 12;
    spec.edge_density = 0.25;
    spec.seed = 3;
    const auto truth = build_coefficients(spec).truth();
    CHECK(truth.adjacency.diagonal().isZero());
    CHECK(truth.adjacency.minCoeff() >= 0);
    CHECK(truth.adjacency.maxCoeff() <= 1);
    CHECK(truth.edge_count() > 0);
    CHECK(parse_topology(to_string(topo)) == topo);
  }
  VarNetworkSpec hub;
  hub.topology = Topology::hub;
  hub.n_nodes = 5;
  const auto t = build_coefficients(hub).truth();
  CHECK(t.adjacency.row(0).sum() == 4);
  CHECK(t.edge_count() == 4);
}

TEST_CASE("stability is enforced") {
  VarNetworkSpec spec;
  spec.topology = Topology::random_dag;
  spec.edge_density = 1.0;
  spec.coupling = 3.0;
  spec.lag_order = 2;
  VarCoefficients c = build_coefficients(spec);
  c.lags[0](0, 9) = 2.5;  // feedback makes the system explosive
  CHECK(spectral_radius(c) >= 0.95);
  const double factor = enforce_stability(c);
  CHECK(factor < 1.0);
  CHECK(spectral_radius(c) < 0.95);
}

TEST_CASE("generated ensembles are stationary") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    VarNetworkSpec spec;
    spec.topology = Topology::random_dag;
    spec.edge_density = 0.4;
    spec.lag_order = 2;
    spec.seed = seed;
    const auto x = generate_var(spec).ensemble.data;
    const auto half = x.cols() / 2;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double first = sample_variance(x.row(i).head(half));
      const double second = sample_variance(x.row(i).tail(half));
      CHECK(second < 3.0 * first);
      CHECK(first < 3.0 * second);
    }
  }
}

TEST_CASE("recovery scores of ideal, inverted and constant matrices") {
  VarNetworkSpec spec;
  spec.n_nodes = 6;
  const GroundTruth truth = build_coefficients(spec).truth();
  const Eigen::MatrixXd ideal = truth.adjacency.cast<double>();
  const auto perfect = score_recovery(ideal, truth);
  CHECK(perfect.auc == 1.0);
  CHECK(perfect.top_k_precision == 1.0);
  CHECK(score_recovery(Eigen::MatrixXd(-ideal), truth).auc == 0.0);
  CHECK(score_recovery(Eigen::MatrixXd::Constant(6, 6, 0.3), truth).auc == 0.5);

  GroundTruth empty;
  empty.adjacency = Eigen::MatrixXi::Zero(6, 6);
  CHECK_THROWS_AS(score_recovery(ideal, empty), std::domain_error);
  GroundTruth full;
  full.adjacency = Eigen::MatrixXi::Ones(6, 6) - Eigen::MatrixXi::Identity(6, 6);
  CHECK_THROWS_AS(score_recovery(ideal, full), std::domain_error);
  CHECK_THROWS_AS(score_recovery(Eigen::MatrixXd::Zero(5, 5), truth), DimensionError);
}

TEST_CASE("AUC against a hand count") {
  GroundTruth truth;
  truth.adjacency = Eigen::MatrixXi::Zero(3, 3);
  truth.adjacency(0, 1) = 1;
  truth.adjacency(1, 2) = 1;
  Eigen::MatrixXd v(3, 3);
  v << 0, 0.9, 0.2, 0.5, 0, 0.4, 0.4, 0.1, 0;
  // Edges {0.9, 0.4}, non-edges {0.2, 0.5, 0.4, 0.1}: (4 + 1.5 + ...) pairs.
  // 0.9 beats all 4; 0.4 beats 0.2 and 0.1, ties one 0.4, loses to 0.5.
  const auto s = score_recovery(v, truth);
  CHECK(s.auc == doctest::Approx((4.0 + 2.5) / 8.0));
  CHECK(s.top_k_precision == doctest::Approx(0.5));
}

TEST_CASE("two-class cohort layout") {
  CohortSpec spec;
  spec.base.n_nodes = 6;
  spec.base.t_samples = 120;
  spec.class_edge_delta = {{0, 3, 0.6, 1}};
  spec.n_class0 = 30;
  spec.n_class1 = 28;
  spec.subject_noise = 0.05;
  spec.seed = 4;
  const auto cohort = generate_two_class_cohort(spec, 3);
  REQUIRE(cohort.size() == 58);
  for (std::size_t i = 0; i < cohort.size(); ++i) CHECK(cohort[i].label == (i < 30 ? 0 : 1));
  CHECK(cohort.front().subject_id == "sub-001");
  CHECK(cohort.back().subject_id == "sub-058");

  const auto again = generate_two_class_cohort(spec, 1);
  for (std::size_t i = 0; i < cohort.size(); ++i) CHECK(cohort[i].ensemble.data == again[i].ensemble.data);

  const auto truth1 = class1_truth(spec);
  CHECK(truth1.adjacency(0, 3) == 1);
  CHECK(truth1.edge_count() == build_coefficients(spec.base).truth().edge_count() + 1);
}

TEST_CASE("delta edges may use longer lags than the base") {
  CohortSpec spec;
  spec.base.n_nodes = 6;
  spec.base.t_samples = 100;
  spec.class_edge_delta = {{0, 2, 0.6, 2}};
  spec.n_class0 = 1;
  spec.n_class1 = 1;
  CHECK(generate_two_class_cohort(spec).size() == 2);
  CHECK(class1_truth(spec).adjacency(0, 2) == 1);
}

TEST_CASE("invalid cohorts are rejected") {
  CohortSpec spec;
  spec.base.n_nodes = 5;
  spec.class_edge_delta = {{1, 2, 0.6, 1}};  // already a chain edge
  CHECK_THROWS_AS(generate_two_class_cohort(spec), ConfigError);
  spec.class_edge_delta = {{1, 1, 0.6, 1}};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.class_edge_delta = {{1, 7, 0.6, 1}};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.class_edge_delta = {{1, 3, 0.6, 0}};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.class_edge_delta.clear();
  spec.subject_noise = -1.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);

  VarNetworkSpec bad;
  bad.noise_sd = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = VarNetworkSpec{};
  bad.topology = Topology::random_dag;
  bad.edge_density = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = VarNetworkSpec{};
  bad.n_nodes = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(parse_topology("ring"), ConfigError);
}

TEST_CASE("lsAGC recovers a chain better than correlation") {
  double lsagc_auc = 0.0, corr_auc = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    VarNetworkSpec spec;
    spec.seed = seed;
    const auto net = generate_var(spec);
    const auto x = standardize(net.ensemble);
    ArPredictorConfig cfg;
    cfg.p = 5;
    lsagc_auc += score_recovery(lsagc_connectivity(x, cfg), net.truth).auc;
    corr_auc += score_recovery(cross_correlation_matrix(x), net.truth).auc;
  }
  CHECK(lsagc_auc / 5.0 > corr_auc / 5.0);
  CHECK(lsagc_auc / 5.0 > 0.9);
}
