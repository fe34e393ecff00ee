#include "lsagc/gat.hpp"

#include "lsagc/errors.hpp"
#include "lsagc/parallel.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace lsagc::gat {

namespace {

constexpr double kMasked = -std::numeric_limits<double>::infinity();
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr std::size_t kReduceBlock = 32;

template <class Model, class Fn>
void visit_parameters(Model& model, Fn&& fn) {
  for (auto& layer : model.layers) {
    for (auto& head : layer.heads) {
      for (Eigen::Index r = 0; r < head.w.rows(); ++r)
        for (Eigen::Index c = 0; c < head.w.cols(); ++c) fn(head.w(r, c));
      for (Eigen::Index i = 0; i < head.a.size(); ++i) fn(head.a(i));
    }
  }
  for (Eigen::Index i = 0; i < model.readout.w.size(); ++i) fn(model.readout.w(i));
  fn(model.readout.b);
  for (Eigen::Index i = 0; i < model.encoder_readout.w.size(); ++i) fn(model.encoder_readout.w(i));
  fn(model.encoder_readout.b);
}

double leaky(double x, double slope) { return x >= 0.0 ? x : slope * x; }

Eigen::MatrixXd elu(const Eigen::MatrixXd& x) {
  return x.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_layer_inputs(const GatLayerParams& layer, const Eigen::MatrixXd& features,
                        const Eigen::MatrixXi& adjacency) {
  if (layer.heads.empty()) throw DimensionError("GAT layer has no heads");
  if (adjacency.rows() != features.rows() || adjacency.cols() != features.rows())
    throw DimensionError("adjacency must be N x N for N = " + std::to_string(features.rows()));
  if (static_cast<std::size_t>(features.cols()) != layer.d_in())
    throw DimensionError("feature width " + std::to_string(features.cols()) +
                         " does not match layer input " + std::to_string(layer.d_in()));
}

// Scores for one head given W h (N x d_out).
void head_scores(const GatHead& head, double slope, const Eigen::MatrixXd& transformed,
                 const Eigen::MatrixXi& adjacency, Eigen::MatrixXd& raw, Eigen::MatrixXd& scores) {
  const Eigen::Index n = transformed.rows();
  const Eigen::Index d = transformed.cols();
  const Eigen::VectorXd src = transformed * head.a.head(d);
  const Eigen::VectorXd dst = transformed * head.a.tail(d);
  raw.resize(n, n);
  scores.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      raw(i, j) = src(i) + dst(j);
      scores(i, j) = adjacency(i, j) != 0 ? leaky(raw(i, j), slope) : kMasked;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(adjacency.row(i).array() != 0).any())
      throw DimensionError("node " + std::to_string(i) + " has an empty neighbourhood");
}

}  // namespace

std::size_t GatModel::parameter_count() const {
  std::size_t count = 0;
  visit_parameters(*this, [&](const double&) { ++count; });
  return count;
}

GatModel init_model(const GatArchitecture& arch, std::uint64_t rng_seed) {
  if (arch.input_dim < 1 || arch.hidden_dim < 1 || arch.n_layers < 1 || arch.heads < 1)
    throw ConfigError("gat", "architecture dimensions must be positive");
  std::mt19937_64 rng(rng_seed);
  auto glorot = [&](double fan_in, double fan_out) {
    return std::uniform_real_distribution<double>(-1.0, 1.0)(rng) * std::sqrt(6.0 / (fan_in + fan_out));
  };
  GatModel model;
  model.rng_seed = rng_seed;
  const auto hidden = static_cast<Eigen::Index>(arch.hidden_dim);
  for (std::size_t l = 0; l < arch.n_layers; ++l) {
    const auto d_in = static_cast<Eigen::Index>(l == 0 ? arch.input_dim : arch.hidden_dim);
    GatLayerParams layer;
    layer.leaky_slope = arch.leaky_slope;
    for (std::size_t k = 0; k < arch.heads; ++k) {
      GatHead head;
      head.w.resize(hidden, d_in);
      for (Eigen::Index r = 0; r < hidden; ++r)
        for (Eigen::Index c = 0; c < d_in; ++c)
          head.w(r, c) = glorot(static_cast<double>(d_in), static_cast<double>(hidden));
      head.a.resize(2 * hidden);
      for (Eigen::Index i = 0; i < 2 * hidden; ++i) head.a(i) = glorot(2.0 * static_cast<double>(hidden), 1.0);
      layer.heads.push_back(std::move(head));
    }
    model.layers.push_back(std::move(layer));
  }
  for (auto* r : {&model.readout, &model.encoder_readout}) {
    r->w.resize(hidden);
    for (Eigen::Index i = 0; i < hidden; ++i) r->w(i) = glorot(static_cast<double>(hidden), 1.0);
    r->b = 0.0;
  }
  return model;
}

std::vector<double> flatten(const GatModel& model) {
  std::vector<double> out;
  out.reserve(model.parameter_count());
  visit_parameters(model, [&](const double& v) { out.push_back(v); });
  return out;
}

void unflatten(GatModel& model, std::span<const double> values) {
  if (values.size() != model.parameter_count())
    throw DimensionError("unflatten: expected " + std::to_string(model.parameter_count()) +
                         " values, got " + std::to_string(values.size()));
  std::size_t i = 0;
  visit_parameters(model, [&](double& v) { v = values[i++]; });
}

GatModel zeros_like(const GatModel& model) {
  GatModel out = model;
  visit_parameters(out, [](double& v) { v = 0.0; });
  return out;
}

std::uint64_t fingerprint(const GatModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(model.layers.size());
  for (const auto& layer : model.layers) {
    mix(layer.heads.size());
    mix(layer.d_in());
    mix(layer.d_out());
    mix(std::bit_cast<std::uint64_t>(layer.leaky_slope));
  }
  visit_parameters(model, [&](const double& v) { mix(std::bit_cast<std::uint64_t>(v)); });
  return h;
}

std::vector<Eigen::MatrixXd> attention_scores(const GatLayerParams& layer,
                                              const Eigen::MatrixXd& features,
                                              const Eigen::MatrixXi& adjacency) {
  check_layer_inputs(layer, features, adjacency);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(layer.heads.size());
  Eigen::MatrixXd raw, scores;
  for (const auto& head : layer.heads) {
    head_scores(head, layer.leaky_slope, features * head.w.transpose(), adjacency, raw, scores);
    out.push_back(scores);
  }
  return out;
}

Eigen::MatrixXd attention_softmax(const Eigen::MatrixXd& scores) {
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Zero(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    double top = kMasked;
    bool any = false;
    for (Eigen::Index j = 0; j < scores.cols(); ++j)
      if (scores(i, j) != kMasked) {
        any = true;
        top = std::max(top, scores(i, j));
      }
    if (!any) throw DimensionError("attention row " + std::to_string(i) + " is fully masked");
    double sum = 0.0;
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      if (scores(i, j) == kMasked) continue;
      alpha(i, j) = std::exp(scores(i, j) - top);
      sum += alpha(i, j);
    }
    alpha.row(i) /= sum;
  }
  return alpha;
}

std::vector<Eigen::MatrixXd> attention_softmax(const std::vector<Eigen::MatrixXd>& scores) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(attention_softmax(s));
  return out;
}

Eigen::MatrixXd gat_layer_forward(const GatLayerParams& layer, const Eigen::MatrixXd& features,
                                  const Eigen::MatrixXi& adjacency, bool apply_elu) {
  check_layer_inputs(layer, features, adjacency);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(features.rows(), static_cast<Eigen::Index>(layer.d_out()));
  Eigen::MatrixXd raw, scores;
  for (const auto& head : layer.heads) {
    const Eigen::MatrixXd transformed = features * head.w.transpose();
    head_scores(head, layer.leaky_slope, transformed, adjacency, raw, scores);
    sum.noalias() += attention_softmax(scores) * transformed;
  }
  Eigen::MatrixXd mean = sum / static_cast<double>(layer.heads.size());
  return apply_elu ? elu(mean) : mean;
}

namespace {

ForwardResult forward_impl(const GatModel& model, const GraphSample& sample, std::uint64_t model_fingerprint);
void backward_impl(const GatModel& model, const GraphSample& sample, const ForwardCache& cache, GatModel& grad);

}  // namespace

double bce_with_logits(double logit, double target) {
  return std::max(logit, 0.0) - logit * target + std::log1p(std::exp(-std::abs(logit)));
}

double loss(double y_hat, double y_enc, int y) {
  const double target = static_cast<double>(y);
  return bce_with_logits(y_hat, target) + bce_with_logits(y_enc, target);
}

ForwardResult forward(const GatModel& model, const GraphSample& sample) {
  return forward_impl(model, sample, fingerprint(model));
}

GatModel backward(const GatModel& model, const GraphSample& sample, const ForwardCache& cache) {
  if (cache.model_fingerprint != fingerprint(model)) throw std::logic_error("backward: stale forward cache");
  GatModel grad = zeros_like(model);
  backward_impl(model, sample, cache, grad);
  return grad;
}

namespace {

ForwardResult forward_impl(const GatModel& model, const GraphSample& sample, std::uint64_t model_fingerprint) {
  if (model.layers.empty()) throw DimensionError("GAT model has no layers");
  if (!sample.features.allFinite()) throw DimensionError("sample features are not finite");
  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.n_nodes = sample.n_nodes();
  cache.model_fingerprint = model_fingerprint;
  cache.layers.resize(model.layers.size());

  Eigen::MatrixXd h = sample.features;
  Eigen::MatrixXd scores;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const GatLayerParams& layer = model.layers[l];
    check_layer_inputs(layer, h, sample.adjacency);
    LayerCache& lc = cache.layers[l];
    lc.input = h;
    lc.elu = l + 1 < model.layers.size();
    const auto k = layer.heads.size();
    lc.transformed.resize(k);
    lc.raw_scores.resize(k);
    lc.alpha.resize(k);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(h.rows(), static_cast<Eigen::Index>(layer.d_out()));
    for (std::size_t hk = 0; hk < k; ++hk) {
      lc.transformed[hk] = h * layer.heads[hk].w.transpose();
      head_scores(layer.heads[hk], layer.leaky_slope, lc.transformed[hk], sample.adjacency,
                  lc.raw_scores[hk], scores);
      lc.alpha[hk] = attention_softmax(scores);
      sum.noalias() += lc.alpha[hk] * lc.transformed[hk];
    }
    lc.pre_activation = sum / static_cast<double>(k);
    lc.output = lc.elu ? elu(lc.pre_activation) : lc.pre_activation;
    h = lc.output;
  }
  cache.pooled = cache.layers.back().output.colwise().mean().transpose();
  cache.pooled_encoder = cache.layers.front().output.colwise().mean().transpose();
  if (model.readout.w.size() != cache.pooled.size() ||
      model.encoder_readout.w.size() != cache.pooled_encoder.size())
    throw DimensionError("readout width does not match layer output");
  result.y_hat = model.readout.w.dot(cache.pooled) + model.readout.b;
  result.y_enc = model.encoder_readout.w.dot(cache.pooled_encoder) + model.encoder_readout.b;
  return result;
}

// Adds this sample's gradient into `grad`.
void backward_impl(const GatModel& model, const GraphSample& sample, const ForwardCache& cache, GatModel& grad) {
  if (cache.n_nodes != sample.n_nodes() ||
      cache.layers.size() != model.layers.size())
    throw std::logic_error("backward: stale forward cache");

  const double target = static_cast<double>(sample.label);
  const double y_hat = model.readout.w.dot(cache.pooled) + model.readout.b;
  const double y_enc = model.encoder_readout.w.dot(cache.pooled_encoder) + model.encoder_readout.b;
  const double d_hat = sigmoid(y_hat) - target;
  const double d_enc = sigmoid(y_enc) - target;

  grad.readout.w.noalias() += d_hat * cache.pooled;
  grad.readout.b += d_hat;
  grad.encoder_readout.w.noalias() += d_enc * cache.pooled_encoder;
  grad.encoder_readout.b += d_enc;

  const auto n = static_cast<Eigen::Index>(cache.n_nodes);
  const double inv_n = 1.0 / static_cast<double>(n);
  // Mean pooling spreads the pooled gradient evenly over nodes.
  Eigen::MatrixXd d_out = (d_hat * inv_n * model.readout.w).transpose().replicate(n, 1);

  for (std::size_t li = model.layers.size(); li-- > 0;) {
    const GatLayerParams& layer = model.layers[li];
    const LayerCache& lc = cache.layers[li];
    if (li == 0) d_out += (d_enc * inv_n * model.encoder_readout.w).transpose().replicate(n, 1);

    Eigen::MatrixXd d_pre = d_out;
    if (lc.elu)
      d_pre.array() *= lc.pre_activation.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); }).array();

    const double inv_k = 1.0 / static_cast<double>(layer.heads.size());
    const Eigen::Index d = static_cast<Eigen::Index>(layer.d_out());
    Eigen::MatrixXd d_input = Eigen::MatrixXd::Zero(lc.input.rows(), lc.input.cols());
    for (std::size_t hk = 0; hk < layer.heads.size(); ++hk) {
      const GatHead& head = layer.heads[hk];
      const Eigen::MatrixXd& g = lc.transformed[hk];
      const Eigen::MatrixXd& alpha = lc.alpha[hk];
      const Eigen::MatrixXd& raw = lc.raw_scores[hk];
      const Eigen::MatrixXd d_o = d_pre * inv_k;

      const Eigen::MatrixXd d_alpha = d_o * g.transpose();
      Eigen::MatrixXd d_g = alpha.transpose() * d_o;

      Eigen::MatrixXd d_raw = Eigen::MatrixXd::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double inner = alpha.row(i).dot(d_alpha.row(i));
        for (Eigen::Index j = 0; j < n; ++j) {
          if (sample.adjacency(i, j) == 0) continue;
          const double d_e = alpha(i, j) * (d_alpha(i, j) - inner);
          d_raw(i, j) = raw(i, j) >= 0.0 ? d_e : layer.leaky_slope * d_e;
        }
      }
      const Eigen::VectorXd d_src = d_raw.rowwise().sum();
      const Eigen::VectorXd d_dst = d_raw.colwise().sum().transpose();
      const auto a_src = head.a.head(d);
      const auto a_dst = head.a.tail(d);
      d_g.noalias() += d_src * a_src.transpose();
      d_g.noalias() += d_dst * a_dst.transpose();

      GatHead& gh = grad.layers[li].heads[hk];
      gh.a.head(d).noalias() += g.transpose() * d_src;
      gh.a.tail(d).noalias() += g.transpose() * d_dst;
      gh.w.noalias() += d_g.transpose() * lc.input;
      d_input.noalias() += d_g * head.w;
    }
    d_out = std::move(d_input);
  }
}

struct BatchEval {
  double loss = 0.0;
  std::vector<double> grad;
};

BatchEval evaluate_batch(const GatModel& model, const std::vector<GraphSample>& data,
                         bool with_grad, unsigned threads) {
  const std::size_t blocks = (data.size() + kReduceBlock - 1) / kReduceBlock;
  const std::size_t count = model.parameter_count();
  std::vector<BatchEval> partial(blocks);
  const std::uint64_t model_fp = fingerprint(model);
  parallel_for(blocks, threads, [&](std::size_t b) {
    BatchEval& acc = partial[b];
    GatModel block_grad = with_grad ? zeros_like(model) : GatModel{};
    const std::size_t lo = b * kReduceBlock;
    const std::size_t hi = std::min(data.size(), lo + kReduceBlock);
    for (std::size_t i = lo; i < hi; ++i) {
      const ForwardResult fr = forward_impl(model, data[i], model_fp);
      acc.loss += loss(fr.y_hat, fr.y_enc, data[i].label);
      if (!with_grad) continue;
      backward_impl(model, data[i], fr.cache, block_grad);
    }
    if (with_grad) acc.grad = flatten(block_grad);
  });
  BatchEval total;
  if (with_grad) total.grad.assign(count, 0.0);
  for (const auto& p : partial) {
    total.loss += p.loss;
    for (std::size_t k = 0; k < p.grad.size(); ++k) total.grad[k] += p.grad[k];
  }
  const double inv = 1.0 / static_cast<double>(data.size());
  total.loss *= inv;
  for (double& g : total.grad) g *= inv;
  return total;
}

}  // namespace

double mean_loss(const GatModel& model, const std::vector<GraphSample>& dataset, unsigned threads) {
  if (dataset.empty()) throw DimensionError("mean_loss: empty dataset");
  return evaluate_batch(model, dataset, false, threads).loss;
}

TrainResult train(GatModel model, const std::vector<GraphSample>& dataset, const TrainHyper& hyper,
                  const std::vector<GraphSample>* validation, unsigned threads) {
  if (dataset.empty()) throw DimensionError("train: empty dataset");
  if (hyper.epochs < 0) throw ConfigError("epochs", "must be non-negative");
  if (!(hyper.learning_rate >= 0.0)) throw ConfigError("learning_rate", "must be non-negative");

  TrainResult result;
  std::vector<double> params = flatten(model);
  std::vector<double> m1(params.size(), 0.0), m2(params.size(), 0.0);
  double b1_pow = 1.0, b2_pow = 1.0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    const BatchEval eval = evaluate_batch(model, dataset, true, threads);
    if (!std::isfinite(eval.loss))
      throw TrainingDivergedError(epoch, "training loss became non-finite at epoch " + std::to_string(epoch));
    result.train_loss.push_back(eval.loss);
    if (validation && !validation->empty())
      result.validation_loss.push_back(evaluate_batch(model, *validation, false, threads).loss);

    b1_pow *= hyper.beta1;
    b2_pow *= hyper.beta2;
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double g = eval.grad[k];
      m1[k] = hyper.beta1 * m1[k] + (1.0 - hyper.beta1) * g;
      m2[k] = hyper.beta2 * m2[k] + (1.0 - hyper.beta2) * g * g;
      const double m_hat = m1[k] / (1.0 - b1_pow);
      const double v_hat = m2[k] / (1.0 - b2_pow);
      params[k] -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.adam_epsilon);
    }
    unflatten(model, params);
  }
  result.model = std::move(model);
  return result;
}

int predict_label(const GatModel& model, const GraphSample& sample) {
  return forward_impl(model, sample, 0).y_hat >= 0.0 ? 1 : 0;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t take(int width) {
    if (pos_ + static_cast<std::size_t>(width) > bytes_.size())
      throw std::runtime_error("checkpoint truncated");
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * b);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  std::uint64_t u64() { return take(8); }
  double f64() { return std::bit_cast<double>(take(8)); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const GatModel& model) {
  std::vector<std::uint8_t> out{'G', 'A', 'T', 'C'};
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(model.layers.size()));
  for (const auto& layer : model.layers) {
    put_u32(out, static_cast<std::uint32_t>(layer.heads.size()));
    put_u32(out, static_cast<std::uint32_t>(layer.d_in()));
    put_u32(out, static_cast<std::uint32_t>(layer.d_out()));
  }
  put_u64(out, model.rng_seed);
  for (const auto& layer : model.layers) put_u64(out, std::bit_cast<std::uint64_t>(layer.leaky_slope));
  visit_parameters(model, [&](const double& v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); });
  return out;
}

GatModel decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || bytes[0] != 'G' || bytes[1] != 'A' || bytes[2] != 'T' || bytes[3] != 'C')
    throw std::runtime_error("not a GATC checkpoint");
  Reader in(bytes.subspan(4));
  const std::uint32_t version = in.u32();
  if (version != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t n_layers = in.u32();
  if (n_layers == 0 || n_layers > 1024) throw std::runtime_error("implausible layer count");
  GatModel model;
  model.layers.resize(n_layers);
  Eigen::Index prev_out = -1;
  for (auto& layer : model.layers) {
    const std::uint32_t heads = in.u32(), d_in = in.u32(), d_out = in.u32();
    if (heads == 0 || d_in == 0 || d_out == 0 || heads > 4096 || d_in > (1u << 20) || d_out > (1u << 20))
      throw std::runtime_error("implausible layer dimensions");
    if (prev_out >= 0 && prev_out != static_cast<Eigen::Index>(d_in))
      throw std::runtime_error("layer dimensions do not chain");
    prev_out = d_out;
    layer.heads.resize(heads);
    for (auto& h : layer.heads) {
      h.w.resize(d_out, d_in);
      h.a.resize(2 * static_cast<Eigen::Index>(d_out));
    }
  }
  model.readout.w.resize(prev_out);
  model.encoder_readout.w.resize(static_cast<Eigen::Index>(model.layers.front().d_out()));
  model.rng_seed = in.u64();
  for (auto& layer : model.layers) layer.leaky_slope = in.f64();
  visit_parameters(model, [&](double& v) { v = in.f64(); });
  if (!in.done()) throw std::runtime_error("trailing bytes after checkpoint payload");
  return model;
}

void save_checkpoint(const GatModel& model, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

GatModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace lsagc::gat
