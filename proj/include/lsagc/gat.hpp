#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lsagc::gat {

// One graph: binary mask (self-loops included) plus node features, d = N.
struct GraphSample {
  Eigen::MatrixXi adjacency;
  Eigen::MatrixXd features;
  int label = 0;

  std::size_t n_nodes() const { return static_cast<std::size_t>(features.rows()); }
};

struct GatHead {
  Eigen::MatrixXd w;  // d_out x d_in
  Eigen::VectorXd a;  // 2 * d_out: [source half; neighbour half]
};

struct GatLayerParams {
  std::vector<GatHead> heads;
  double leaky_slope = 0.2;

  std::size_t d_in() const { return heads.empty() ? 0 : static_cast<std::size_t>(heads[0].w.cols()); }
  std::size_t d_out() const { return heads.empty() ? 0 : static_cast<std::size_t>(heads[0].w.rows()); }
};

struct Readout {
  Eigen::VectorXd w;
  double b = 0.0;
};

// Attention layers, ELU between them, mean pooling over nodes, a linear
// readout for the class logit and a second readout on the pooled output of
// the first layer for the encoder logit. Gradients use the same type.
struct GatModel {
  std::vector<GatLayerParams> layers;
  Readout readout;
  Readout encoder_readout;
  std::uint64_t rng_seed = 0;

  std::size_t parameter_count() const;
};

struct GatArchitecture {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 16;
  std::size_t n_layers = 2;
  std::size_t heads = 4;
  double leaky_slope = 0.2;
};

// Glorot-uniform weights from rng_seed, zero biases.
GatModel init_model(const GatArchitecture& arch, std::uint64_t rng_seed);

// Parameters in declaration order: per layer, per head w (row-major) then a;
// readout w, b; encoder_readout w, b. Leaky slopes are hyperparameters and
// are not included.
std::vector<double> flatten(const GatModel& model);
void unflatten(GatModel& model, std::span<const double> values);
GatModel zeros_like(const GatModel& model);

// Masked entries hold -infinity.
std::vector<Eigen::MatrixXd> attention_scores(const GatLayerParams& layer,
                                              const Eigen::MatrixXd& features,
                                              const Eigen::MatrixXi& adjacency);

// Row softmax over finite entries with max subtraction; masked entries are 0.
std::vector<Eigen::MatrixXd> attention_softmax(const std::vector<Eigen::MatrixXd>& scores);
Eigen::MatrixXd attention_softmax(const Eigen::MatrixXd& scores);

// Head-averaged aggregation, optionally followed by ELU.
Eigen::MatrixXd gat_layer_forward(const GatLayerParams& layer, const Eigen::MatrixXd& features,
                                  const Eigen::MatrixXi& adjacency, bool apply_elu);

struct LayerCache {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> transformed;  // W h per head, N x d_out
  std::vector<Eigen::MatrixXd> raw_scores;   // pre-LeakyReLU
  std::vector<Eigen::MatrixXd> alpha;
  Eigen::MatrixXd pre_activation;  // head mean
  Eigen::MatrixXd output;
  bool elu = false;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Eigen::VectorXd pooled;
  Eigen::VectorXd pooled_encoder;
  std::uint64_t model_fingerprint = 0;
  std::size_t n_nodes = 0;
};

struct ForwardResult {
  double y_hat = 0.0;
  double y_enc = 0.0;
  ForwardCache cache;
};

ForwardResult forward(const GatModel& model, const GraphSample& sample);

// BCEWithLogits(y_hat, y) + BCEWithLogits(y_enc, y).
double bce_with_logits(double logit, double target);
double loss(double y_hat, double y_enc, int y);

// Exact gradient of loss() for this sample. Throws std::logic_error when the
// cache was produced by different parameters or another graph size.
GatModel backward(const GatModel& model, const GraphSample& sample, const ForwardCache& cache);

struct TrainHyper {
  int epochs = 300;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;  // model initialization seed when the caller builds the model
};

struct TrainResult {
  GatModel model;
  std::vector<double> train_loss;       // mean loss before each update
  std::vector<double> validation_loss;  // empty without a validation set
};

// Full-batch Adam on the mean loss. Per-sample gradients are reduced in fixed
// blocks and fixed order, so results do not depend on `threads`.
TrainResult train(GatModel model, const std::vector<GraphSample>& dataset, const TrainHyper& hyper,
                  const std::vector<GraphSample>* validation = nullptr, unsigned threads = 1);

double mean_loss(const GatModel& model, const std::vector<GraphSample>& dataset,
                 unsigned threads = 1);

// 1 when y_hat >= 0.
int predict_label(const GatModel& model, const GraphSample& sample);

std::uint64_t fingerprint(const GatModel& model);

// "GATC", u32 version, u32 layer count, per layer u32 heads/d_in/d_out,
// u64 rng_seed, per layer f64 leaky slope, then flatten() as little-endian
// f64.
std::vector<std::uint8_t> encode_checkpoint(const GatModel& model);
GatModel decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const GatModel& model, const std::filesystem::path& path);
GatModel load_checkpoint(const std::filesystem::path& path);

}  // namespace lsagc::gat
