#include "lsagc/io.hpp"

#include "lsagc/errors.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace lsagc::io {

using nlohmann::json;

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  for (auto& l : lines)
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::size_t parse_size(std::string_view text, const char* what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw DimensionError(std::string("malformed ") + what + ": '" + std::string(text) + "'");
  return v;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& prefix) {
  if (!j.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(prefix.empty() ? key : prefix + "." + key, "unknown key");
}

template <class T>
T get_or(const json& j, const std::string& key, const std::string& prefix, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(prefix.empty() ? key : prefix + "." + key, "has the wrong type");
  }
}

std::size_t get_count(const json& j, const std::string& key, const std::string& prefix, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) throw ConfigError(prefix.empty() ? key : prefix + "." + key, "must be a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw DimensionError("malformed number '" + std::string(text) + "'");
  return v;
}

std::string timeseries_to_csv(const TimeSeriesEnsemble& ensemble) {
  std::string out = "# rows=" + std::to_string(ensemble.n_series()) + " cols=" +
                    std::to_string(ensemble.n_samples()) + "\n";
  const auto names = ensemble.series_names.empty() ? default_series_names(ensemble.n_series())
                                                   : ensemble.series_names;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  out += '\n';
  for (Eigen::Index i = 0; i < ensemble.data.rows(); ++i) {
    for (Eigen::Index j = 0; j < ensemble.data.cols(); ++j) {
      if (j) out += ',';
      out += format_double(ensemble.data(i, j));
    }
    out += '\n';
  }
  return out;
}

TimeSeriesEnsemble timeseries_from_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.size() < 2) throw DimensionError("time-series CSV needs a header and a names line");
  const std::string_view header = lines[0];
  constexpr std::string_view prefix = "# rows=";
  const auto cols_at = header.find(" cols=");
  if (header.substr(0, prefix.size()) != prefix || cols_at == std::string_view::npos)
    throw DimensionError("time-series CSV must start with '# rows=N cols=T'");
  const std::size_t n = parse_size(header.substr(prefix.size(), cols_at - prefix.size()), "row count");
  const std::size_t t = parse_size(header.substr(cols_at + 6), "column count");
  if (lines.size() != n + 2)
    throw DimensionError("expected " + std::to_string(n) + " data lines, found " + std::to_string(lines.size() - 2));
  std::vector<std::string> names;
  for (auto name : split(lines[1], ',')) names.emplace_back(trim(name));
  if (names.size() != n) throw DimensionError("names line has " + std::to_string(names.size()) + " entries, expected " + std::to_string(n));
  Eigen::MatrixXd data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
  for (std::size_t i = 0; i < n; ++i) {
    const auto cells = split(lines[i + 2], ',');
    if (cells.size() != t)
      throw DimensionError("line " + std::to_string(i + 3) + " has " + std::to_string(cells.size()) +
                           " values, expected " + std::to_string(t));
    for (std::size_t j = 0; j < t; ++j)
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(cells[j]);
  }
  return TimeSeriesEnsemble(std::move(data), std::move(names));
}

TimeSeriesEnsemble read_timeseries_csv(const std::filesystem::path& path) {
  return timeseries_from_csv(read_file(path));
}

namespace {

template <class Matrix, class Format>
std::string square_to_csv(const Matrix& values, const std::vector<std::string>& names, Format fmt) {
  if (values.rows() != values.cols() || names.size() != static_cast<std::size_t>(values.rows()))
    throw DimensionError("matrix_to_csv: matrix must be square with one name per row");
  std::string out = "source";
  for (const auto& n : names) out += "," + n;
  out += '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out += names[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < values.cols(); ++j) out += "," + fmt(values(i, j));
    out += '\n';
  }
  return out;
}

}  // namespace

std::string matrix_to_csv(const Eigen::MatrixXd& values, const std::vector<std::string>& names) {
  return square_to_csv(values, names, [](double v) { return format_double(v); });
}

std::string matrix_to_csv(const Eigen::MatrixXi& values, const std::vector<std::string>& names) {
  return square_to_csv(values, names, [](int v) { return std::to_string(v); });
}

Eigen::MatrixXd matrix_from_csv(std::string_view text, std::vector<std::string>* names) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw DimensionError("empty matrix CSV");
  const auto header = split(lines[0], ',');
  const auto n = header.size() - 1;
  if (lines.size() != n + 1) throw DimensionError("matrix CSV is not square");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (names) names->clear();
  for (std::size_t i = 0; i < n; ++i) {
    const auto cells = split(lines[i + 1], ',');
    if (cells.size() != n + 1) throw DimensionError("matrix CSV row " + std::to_string(i + 1) + " has the wrong width");
    if (names) names->emplace_back(trim(cells[0]));
    for (std::size_t j = 0; j < n; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(cells[j + 1]);
  }
  return out;
}

std::string labels_to_csv(const std::vector<cv::SubjectLabel>& labels) {
  std::string out = "subject_id,label\n";
  for (const auto& l : labels) out += l.subject + "," + std::to_string(l.label) + "\n";
  return out;
}

std::vector<cv::SubjectLabel> labels_from_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || trim(lines[0]) != "subject_id,label")
    throw DimensionError("labels file must start with 'subject_id,label'");
  std::vector<cv::SubjectLabel> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != 2) throw DimensionError("labels line " + std::to_string(i + 1) + " needs two columns");
    const auto label = trim(cells[1]);
    if (label != "0" && label != "1")
      throw DimensionError("labels line " + std::to_string(i + 1) + ": label must be 0 or 1");
    out.push_back({std::string(trim(cells[0])), label == "1" ? 1 : 0});
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

SynthConfig parse_synth_config(const json& j) {
  check_keys(j, {"network", "cohort"}, "");
  if (!j.contains("network")) throw ConfigError("network", "missing section");
  const json& net = j.at("network");
  check_keys(net, {"n_nodes", "topology", "edge_density", "coupling", "lag_order", "noise_sd", "t_samples", "seed"},
             "network");
  SynthConfig cfg;
  auto& base = cfg.cohort.base;
  base.n_nodes = get_count(net, "n_nodes", "network", base.n_nodes);
  try {
    base.topology = synth::parse_topology(get_or<std::string>(net, "topology", "network", "chain"));
  } catch (const ConfigError& e) {
    throw ConfigError("network.topology", e.reason());
  }
  base.edge_density = get_or<double>(net, "edge_density", "network", base.edge_density);
  base.coupling = get_or<double>(net, "coupling", "network", base.coupling);
  base.lag_order = get_count(net, "lag_order", "network", base.lag_order);
  base.noise_sd = get_or<double>(net, "noise_sd", "network", base.noise_sd);
  base.t_samples = get_count(net, "t_samples", "network", base.t_samples);
  base.seed = get_or<std::uint64_t>(net, "seed", "network", base.seed);
  try {
    base.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("network." + e.key(), e.reason());
  }

  cfg.cohort.n_class0 = 1;
  cfg.cohort.n_class1 = 0;
  cfg.cohort.seed = base.seed;
  if (j.contains("cohort")) {
    cfg.has_cohort = true;
    const json& c = j.at("cohort");
    check_keys(c, {"n_class0", "n_class1", "subject_noise", "seed", "class_edge_delta"}, "cohort");
    cfg.cohort.n_class0 = get_count(c, "n_class0", "cohort", 30);
    cfg.cohort.n_class1 = get_count(c, "n_class1", "cohort", 28);
    cfg.cohort.subject_noise = get_or<double>(c, "subject_noise", "cohort", 0.0);
    cfg.cohort.seed = get_or<std::uint64_t>(c, "seed", "cohort", 0);
    if (c.contains("class_edge_delta")) {
      const json& edges = c.at("class_edge_delta");
      if (!edges.is_array()) throw ConfigError("cohort.class_edge_delta", "must be an array");
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string prefix = "cohort.class_edge_delta[" + std::to_string(i) + "]";
        check_keys(edges[i], {"from", "to", "weight", "lag"}, prefix);
        if (!edges[i].contains("from") || !edges[i].contains("to"))
          throw ConfigError(prefix, "needs 'from' and 'to'");
        synth::DirectedEdge e;
        e.from = get_count(edges[i], "from", prefix, 0);
        e.to = get_count(edges[i], "to", prefix, 0);
        e.weight = get_or<double>(edges[i], "weight", prefix, base.coupling);
        e.lag = get_count(edges[i], "lag", prefix, 1);
        cfg.cohort.class_edge_delta.push_back(e);
      }
    }
    try {
      cfg.cohort.validate();
      if (!cfg.cohort.class_edge_delta.empty()) synth::class1_truth(cfg.cohort);
    } catch (const ConfigError& e) {
      throw ConfigError(e.key().rfind("cohort", 0) == 0 || e.key().empty() ? e.key() : "cohort." + e.key(), e.reason());
    }
  }
  return cfg;
}

json to_json(const SynthConfig& config) {
  const auto& b = config.cohort.base;
  json j;
  j["network"] = {{"n_nodes", b.n_nodes},       {"topology", synth::to_string(b.topology)},
                  {"edge_density", b.edge_density}, {"coupling", b.coupling},
                  {"lag_order", b.lag_order},   {"noise_sd", b.noise_sd},
                  {"t_samples", b.t_samples},   {"seed", b.seed}};
  if (config.has_cohort) {
    json edges = json::array();
    for (const auto& e : config.cohort.class_edge_delta)
      edges.push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}, {"lag", e.lag}});
    j["cohort"] = {{"n_class0", config.cohort.n_class0}, {"n_class1", config.cohort.n_class1},
                   {"subject_noise", config.cohort.subject_noise}, {"seed", config.cohort.seed},
                   {"class_edge_delta", edges}};
  }
  return j;
}

cv::CvOptions parse_classify_config(const json& j) {
  cv::CvOptions o;
  if (j.is_null()) return o;
  check_keys(j, {"p_values", "m_values", "binarize", "lsagc", "gat", "folds", "seed", "parallel_folds"}, "");
  auto size_list = [&](const char* key) {
    std::vector<std::size_t> v;
    if (!j.contains(key)) return v;
    const json& arr = j.at(key);
    if (!arr.is_array() || arr.empty()) throw ConfigError(key, "must be a non-empty array of positive integers");
    for (const auto& x : arr) {
      if (!x.is_number_unsigned() || x.get<std::size_t>() == 0)
        throw ConfigError(key, "must be a non-empty array of positive integers");
      v.push_back(x.get<std::size_t>());
    }
    return v;
  };
  o.data.grid.p_values = size_list("p_values");
  o.data.grid.m_values = size_list("m_values");
  if (o.data.grid.p_values.empty() != o.data.grid.m_values.empty())
    throw ConfigError(o.data.grid.p_values.empty() ? "p_values" : "m_values",
                      "p_values and m_values must be given together");
  if (j.contains("binarize")) {
    const json& b = j.at("binarize");
    check_keys(b, {"strategy", "k", "q"}, "binarize");
    const auto strategy = get_or<std::string>(b, "strategy", "binarize", "top_k_per_node");
    if (strategy == "top_k_per_node") {
      if (!b.contains("k")) throw ConfigError("binarize.k", "required for top_k_per_node");
      o.data.binarization = cv::Binarization::top_k(get_count(b, "k", "binarize", 0));
    } else if (strategy == "global_quantile") {
      if (!b.contains("q")) throw ConfigError("binarize.q", "required for global_quantile");
      const double q = get_or<double>(b, "q", "binarize", 0.8);
      if (!(q >= 0.0 && q < 1.0)) throw ConfigError("binarize.q", "must lie in [0, 1)");
      o.data.binarization = cv::Binarization::quantile(q);
    } else {
      throw ConfigError("binarize.strategy", "unknown strategy '" + strategy + "'");
    }
  }
  if (j.contains("lsagc")) {
    const json& l = j.at("lsagc");
    check_keys(l, {"ridge_epsilon", "sign", "reduced_model", "standardize"}, "lsagc");
    o.data.lsagc.ridge_epsilon = get_or<double>(l, "ridge_epsilon", "lsagc", o.data.lsagc.ridge_epsilon);
    if (!(o.data.lsagc.ridge_epsilon >= 0.0)) throw ConfigError("lsagc.ridge_epsilon", "must be non-negative");
    const auto sign = get_or<std::string>(l, "sign", "lsagc", "positive");
    if (sign == "positive") o.data.lsagc.sign_convention = SignConvention::positive_influence;
    else if (sign == "literal") o.data.lsagc.sign_convention = SignConvention::literal;
    else throw ConfigError("lsagc.sign", "must be 'literal' or 'positive'");
    const auto reduced = get_or<std::string>(l, "reduced_model", "lsagc", "drop_column");
    if (reduced == "drop_column") o.data.lsagc.reduced_model = ReducedModel::drop_column;
    else if (reduced == "full_projection") o.data.lsagc.reduced_model = ReducedModel::full_projection;
    else throw ConfigError("lsagc.reduced_model", "must be 'drop_column' or 'full_projection'");
    o.data.standardize = get_or<bool>(l, "standardize", "lsagc", true);
  }
  if (j.contains("gat")) {
    const json& g = j.at("gat");
    check_keys(g, {"hidden_dim", "layers", "heads", "leaky_slope", "epochs", "learning_rate", "beta1", "beta2"}, "gat");
    o.arch.hidden_dim = get_count(g, "hidden_dim", "gat", o.arch.hidden_dim);
    o.arch.n_layers = get_count(g, "layers", "gat", o.arch.n_layers);
    o.arch.heads = get_count(g, "heads", "gat", o.arch.heads);
    o.arch.leaky_slope = get_or<double>(g, "leaky_slope", "gat", o.arch.leaky_slope);
    o.hyper.epochs = static_cast<int>(get_count(g, "epochs", "gat", static_cast<std::size_t>(o.hyper.epochs)));
    o.hyper.learning_rate = get_or<double>(g, "learning_rate", "gat", o.hyper.learning_rate);
    o.hyper.beta1 = get_or<double>(g, "beta1", "gat", o.hyper.beta1);
    o.hyper.beta2 = get_or<double>(g, "beta2", "gat", o.hyper.beta2);
    if (o.arch.hidden_dim == 0) throw ConfigError("gat.hidden_dim", "must be positive");
    if (o.arch.n_layers == 0) throw ConfigError("gat.layers", "must be positive");
    if (o.arch.heads == 0) throw ConfigError("gat.heads", "must be positive");
    if (!(o.hyper.learning_rate >= 0.0)) throw ConfigError("gat.learning_rate", "must be non-negative");
  }
  o.n_folds = get_count(j, "folds", "", o.n_folds);
  o.seed = get_count(j, "seed", "", o.seed);
  o.parallel_folds = get_or<bool>(j, "parallel_folds", "", false);
  return o;
}

json to_json(const cv::CvOptions& o) {
  json j;
  // Empty grids and a missing binarization mean "derive from N" and are omitted.
  if (o.data.grid.factor() > 0) {
    j["p_values"] = o.data.grid.p_values;
    j["m_values"] = o.data.grid.m_values;
  }
  if (o.data.binarization) {
    if (o.data.binarization->strategy == cv::BinarizeStrategy::top_k_per_node)
      j["binarize"] = {{"strategy", "top_k_per_node"}, {"k", o.data.binarization->k}};
    else
      j["binarize"] = {{"strategy", "global_quantile"}, {"q", o.data.binarization->q}};
  }
  j["lsagc"] = {{"ridge_epsilon", o.data.lsagc.ridge_epsilon},
                {"sign", to_string(o.data.lsagc.sign_convention)},
                {"reduced_model", to_string(o.data.lsagc.reduced_model)},
                {"standardize", o.data.standardize}};
  j["gat"] = {{"hidden_dim", o.arch.hidden_dim}, {"layers", o.arch.n_layers},   {"heads", o.arch.heads},
              {"leaky_slope", o.arch.leaky_slope}, {"epochs", o.hyper.epochs},  {"learning_rate", o.hyper.learning_rate},
              {"beta1", o.hyper.beta1},           {"beta2", o.hyper.beta2}};
  j["folds"] = o.n_folds;
  j["seed"] = o.seed;
  j["parallel_folds"] = o.parallel_folds;
  return j;
}

std::string format_report(const cv::CvReport& report) {
  std::string out;
  char line[256];
  out += "Subject-level accuracy by fold\n";
  std::snprintf(line, sizeof line, "%-6s %20s %26s %27s\n", "Fold", "lsAGC Accuracy (%)",
                "Correlation Accuracy (%)", "Random Guess Accuracy (%)");
  out += line;
  for (const auto& f : report.per_fold) {
    std::snprintf(line, sizeof line, "%-6d %20.2f %26.2f %27.2f\n", f.fold, 100.0 * f.lsagc_acc,
                  100.0 * f.corr_acc, 100.0 * f.random_acc);
    out += line;
  }
  std::snprintf(line, sizeof line, "%-6s %20.2f %26.2f %27.2f\n", "Mean", 100.0 * report.lsagc.mean,
                100.0 * report.corr.mean, 100.0 * report.random.mean);
  out += line;
  std::snprintf(line, sizeof line, "%-6s %20.2f %26.2f %27.2f\n", "Std", 100.0 * report.lsagc.std,
                100.0 * report.corr.std, 100.0 * report.random.std);
  out += line;
  out += "\nSample-level accuracy by fold\n";
  std::snprintf(line, sizeof line, "%-6s %20s %26s\n", "Fold", "lsAGC Accuracy (%)", "Correlation Accuracy (%)");
  out += line;
  for (const auto& f : report.per_fold) {
    std::snprintf(line, sizeof line, "%-6d %20.2f %26.2f\n", f.fold, 100.0 * f.lsagc_sample_acc,
                  100.0 * f.corr_sample_acc);
    out += line;
  }
  std::snprintf(line, sizeof line, "%-6s %20.2f %26.2f\n", "Mean", 100.0 * report.lsagc_sample.mean,
                100.0 * report.corr_sample.mean);
  out += line;
  std::snprintf(line, sizeof line, "%-6s %20.2f %26.2f\n", "Std", 100.0 * report.lsagc_sample.std,
                100.0 * report.corr_sample.std);
  out += line;
  return out;
}

json report_to_json(const cv::CvReport& report) {
  json folds = json::array();
  for (const auto& f : report.per_fold)
    folds.push_back({{"fold", f.fold},
                     {"lsagc_acc", f.lsagc_acc},
                     {"corr_acc", f.corr_acc},
                     {"random_acc", f.random_acc},
                     {"lsagc_sample_acc", f.lsagc_sample_acc},
                     {"corr_sample_acc", f.corr_sample_acc},
                     {"test_subjects", f.test_subjects},
                     {"train_samples", f.train_samples}});
  auto summary = [](const cv::MethodSummary& s) { return json{{"mean", s.mean}, {"std", s.std}}; };
  return {{"per_fold", folds},
          {"summary",
           {{"lsagc", summary(report.lsagc)},
            {"correlation", summary(report.corr)},
            {"random", summary(report.random)},
            {"lsagc_sample", summary(report.lsagc_sample)},
            {"correlation_sample", summary(report.corr_sample)}}},
          {"std_divisor", "n-1"}};
}

cv::CvReport report_from_json(const json& j) {
  std::vector<cv::FoldResult> folds;
  for (const auto& f : j.at("per_fold")) {
    cv::FoldResult r;
    r.fold = f.at("fold").get<int>();
    r.lsagc_acc = f.at("lsagc_acc").get<double>();
    r.corr_acc = f.at("corr_acc").get<double>();
    r.random_acc = f.at("random_acc").get<double>();
    r.lsagc_sample_acc = f.value("lsagc_sample_acc", 0.0);
    r.corr_sample_acc = f.value("corr_sample_acc", 0.0);
    r.test_subjects = f.value("test_subjects", std::size_t{0});
    r.train_samples = f.value("train_samples", std::size_t{0});
    folds.push_back(r);
  }
  return cv::aggregate(std::move(folds));
}

std::string RunManifest::config_hash() const { return sha256_hex(config.dump()); }

json to_json(const RunManifest& m) {
  json seeds = json::object();
  for (const auto& [k, v] : m.seeds) seeds[k] = v;
  return {{"schema", kManifestSchema},
          {"tool_version", m.tool_version},
          {"command", m.command},
          {"config", m.config},
          {"config_hash", m.config_hash()},
          {"seeds", seeds},
          {"timestamps",
           {{"start_utc", m.start_utc ? json(*m.start_utc) : json(nullptr)},
            {"end_utc", m.end_utc ? json(*m.end_utc) : json(nullptr)}}},
          {"outputs", m.outputs}};
}

std::vector<std::string> validate_manifest(const json& j) {
  std::vector<std::string> problems;
  if (!j.is_object()) return {"manifest is not an object"};
  auto need = [&](const char* key, auto&& pred, const char* what) {
    if (!j.contains(key)) problems.push_back(std::string("missing ") + key);
    else if (!pred(j.at(key))) problems.push_back(std::string(key) + " must be " + what);
  };
  need("schema", [](const json& v) { return v.is_string() && v.get<std::string>() == kManifestSchema; }, kManifestSchema);
  need("tool_version", [](const json& v) {
    if (!v.is_string()) return false;
    const auto parts = split(v.get_ref<const std::string&>(), '.');
    if (parts.size() != 3) return false;
    for (auto p : parts)
      if (p.empty() || p.find_first_not_of("0123456789") != std::string_view::npos) return false;
    return true;
  }, "a semver string");
  need("command", [](const json& v) {
    if (!v.is_array() || v.empty()) return false;
    for (const auto& a : v) if (!a.is_string()) return false;
    return true;
  }, "a non-empty array of strings");
  need("config", [](const json& v) { return v.is_object(); }, "an object");
  need("config_hash", [](const json& v) {
    return v.is_string() && v.get<std::string>().size() == 64 &&
           v.get<std::string>().find_first_not_of("0123456789abcdef") == std::string::npos;
  }, "a 64-character hex digest");
  need("seeds", [](const json& v) {
    if (!v.is_object()) return false;
    for (const auto& [k, s] : v.items()) if (!s.is_number_unsigned()) return false;
    return true;
  }, "an object of unsigned integers");
  need("timestamps", [](const json& v) {
    return v.is_object() && v.contains("start_utc") && v.contains("end_utc") &&
           (v["start_utc"].is_null() || v["start_utc"].is_string()) &&
           (v["end_utc"].is_null() || v["end_utc"].is_string());
  }, "an object with start_utc and end_utc");
  need("outputs", [](const json& v) {
    if (!v.is_array()) return false;
    for (const auto& a : v) if (!a.is_string()) return false;
    return true;
  }, "an array of strings");
  if (problems.empty() && j.at("config_hash") != sha256_hex(j.at("config").dump()))
    problems.push_back("config_hash does not match config");
  return problems;
}

std::string utc_now_iso8601() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace lsagc::io
