#include "lsagc/errors.hpp"
#include "lsagc/granger.hpp"
#include "lsagc/io.hpp"
#include "lsagc/parallel.hpp"
#include "lsagc/pipeline.hpp"
#include "lsagc/rng.hpp"
#include "lsagc/synth.hpp"
#include "lsagc/timeseries.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lsagc;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kIo = 3, kValidation = 4, kLeakage = 5 };

struct Common {
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = default_thread_count();
  bool record_time = false;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--seed", common.seed, "Random seed");
  cmd->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--record-time", common.record_time, "Write wall-clock timestamps into the manifest");
}

fs::path sibling(const fs::path& path, const std::string& suffix) {
  return path.parent_path() / (path.stem().string() + suffix);
}

// Every file of a run goes through here so the manifest can list it.
struct Outputs {
  std::vector<std::string> names;
  void write(const fs::path& path, std::string_view content) {
    io::write_file_atomic(path, content);
    names.push_back(path.filename().string());
  }
};

void write_manifest(const fs::path& path, io::RunManifest manifest, const Outputs& outputs,
                    const Common& common) {
  manifest.outputs = outputs.names;
  if (common.record_time) manifest.end_utc = io::utc_now_iso8601();
  io::write_file_atomic(path, io::to_json(manifest).dump(2) + "\n");
}

io::RunManifest start_manifest(const std::vector<std::string>& argv, const Common& common) {
  io::RunManifest m;
  m.command = argv;
  if (common.record_time) m.start_utc = io::utc_now_iso8601();
  return m;
}

json read_json(const fs::path& path) {
  const std::string text = io::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON in ") + path.string() + ": " + e.what());
  }
}

std::string subject_file(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sub-%03zu", index + 1);
  return buf;
}

int run_synth(const fs::path& spec_path, const fs::path& out_dir, const Common& common,
              const std::vector<std::string>& argv) {
  auto manifest = start_manifest(argv, common);
  io::SynthConfig cfg = io::parse_synth_config(read_json(spec_path));
  if (common.seed_given) {
    cfg.cohort.seed = common.seed;
    if (!cfg.has_cohort) cfg.cohort.base.seed = common.seed;
  }

  std::vector<LabeledSeries> subjects;
  synth::GroundTruth truth;
  if (cfg.has_cohort) {
    subjects = synth::generate_two_class_cohort(cfg.cohort, common.threads);
    truth = synth::build_coefficients(cfg.cohort.base).truth();
  } else {
    auto net = synth::generate_var(cfg.cohort.base);
    subjects.push_back({subject_file(0), 0, std::move(net.ensemble)});
    truth = std::move(net.truth);
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string());

  Outputs outputs;
  std::vector<cv::SubjectLabel> labels;
  for (const auto& s : subjects) {
    outputs.write(out_dir / (s.subject_id + ".csv"), io::timeseries_to_csv(s.ensemble));
    labels.push_back({s.subject_id, s.label});
  }
  const auto names = default_series_names(cfg.cohort.base.n_nodes);
  outputs.write(out_dir / "labels.csv", io::labels_to_csv(labels));
  outputs.write(out_dir / "truth.csv", io::matrix_to_csv(truth.adjacency, names));
  if (cfg.has_cohort && !cfg.cohort.class_edge_delta.empty())
    outputs.write(out_dir / "truth_class1.csv",
                  io::matrix_to_csv(synth::class1_truth(cfg.cohort).adjacency, names));

  manifest.config = io::to_json(cfg);
  manifest.seeds = {{"network", cfg.cohort.base.seed}, {"cohort", cfg.cohort.seed}};
  write_manifest(out_dir / "manifest.json", std::move(manifest), outputs, common);
  return kOk;
}

struct ConnectivityArgs {
  fs::path input, out;
  std::string method = "lsagc";
  std::size_t p = 0;
  std::size_t m = 1;
  std::string sign = "positive";
  std::string reduced = "drop_column";
  double ridge = ArPredictorConfig{}.ridge_epsilon;
  bool no_standardize = false;
};

int run_connectivity(const ConnectivityArgs& a, const Common& common, const std::vector<std::string>& argv) {
  auto manifest = start_manifest(argv, common);
  TimeSeriesEnsemble x = io::read_timeseries_csv(a.input);
  validate(x);
  if (!a.no_standardize) x = standardize(x);

  json config = {{"input", a.input.filename().string()},
                 {"method", a.method},
                 {"standardize", !a.no_standardize}};
  ConnectivityMatrix result;
  if (a.method == "lsagc") {
    ArPredictorConfig cfg;
    const auto n = x.n_series();
    cfg.p = a.p ? a.p : std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(0.5 * n)), 1, n);
    cfg.m = a.m;
    cfg.ridge_epsilon = a.ridge;
    cfg.sign_convention = a.sign == "literal" ? SignConvention::literal : SignConvention::positive_influence;
    cfg.reduced_model = a.reduced == "full_projection" ? ReducedModel::full_projection : ReducedModel::drop_column;
    config["p"] = cfg.p;
    config["m"] = cfg.m;
    config["sign"] = to_string(cfg.sign_convention);
    config["reduced_model"] = to_string(cfg.reduced_model);
    config["ridge_epsilon"] = cfg.ridge_epsilon;
    try {
      result = lsagc_connectivity(x, cfg, common.threads);
    } catch (const ConfigError& e) {
      throw ValidationError(ValidationErrc::shape, e.what());
    }
    if (result.saturated) std::cerr << "warning: some entries hit the saturation bound\n";
  } else {
    result = cross_correlation_matrix(x);
  }
  for (std::size_t i = 0; i < x.constant_rows.size(); ++i)
    if (x.constant_rows[i]) std::cerr << "warning: series " << x.series_names[i] << " is constant\n";

  Outputs outputs;
  outputs.write(a.out, io::matrix_to_csv(result.values, x.series_names));
  manifest.config = std::move(config);
  manifest.seeds = {{"seed", common.seed}};
  write_manifest(sibling(a.out, ".manifest.json"), std::move(manifest), outputs, common);
  return kOk;
}

struct ClassifyArgs {
  fs::path cohort, grid, report;
  std::size_t folds = 5;
  bool folds_given = false;
  bool no_correlation = false;
};

int run_classify(const ClassifyArgs& a, const Common& common, const std::vector<std::string>& argv) {
  auto manifest = start_manifest(argv, common);
  cv::CvOptions options = io::parse_classify_config(a.grid.empty() ? json(nullptr) : read_json(a.grid));
  if (a.folds_given) options.n_folds = a.folds;
  if (options.n_folds < 2) throw ConfigError("folds", "must be at least 2");
  if (common.seed_given) options.seed = common.seed;
  options.run_correlation = !a.no_correlation;

  const fs::path json_path = sibling(a.report, ".json");
  if (json_path == a.report) throw ConfigError("report", "must not end in .json; the JSON twin uses that name");

  const auto labels = io::labels_from_csv(io::read_file(a.cohort / "labels.csv"));
  std::vector<LabeledSeries> subjects;
  for (const auto& l : labels) {
    TimeSeriesEnsemble x = io::read_timeseries_csv(a.cohort / (l.subject + ".csv"));
    validate(x);
    if (!subjects.empty() && (x.n_series() != subjects.front().ensemble.n_series()))
      throw ValidationError(ValidationErrc::shape, "subject " + l.subject + " has a different series count");
    subjects.push_back({l.subject, l.label, std::move(x)});
  }
  if (subjects.empty()) throw ValidationError(ValidationErrc::shape, "cohort has no subjects");

  const auto folds = cv::make_folds(labels, options.n_folds, options.seed);
  auto lsagc_data = cv::build_dataset(subjects, ConnectivityMethod::lsagc, options.data, common.threads);
  lsagc_data.fold_of_subject = folds;
  std::optional<cv::LabeledGraphDataset> corr_data;
  if (options.run_correlation) {
    corr_data = cv::build_dataset(subjects, ConnectivityMethod::cross_correlation, options.data, common.threads);
    corr_data->fold_of_subject = folds;
  }
  const cv::CvReport report =
      cv::run_cv(lsagc_data, corr_data ? &*corr_data : nullptr, options, common.threads);

  Outputs outputs;
  outputs.write(a.report, io::format_report(report));
  outputs.write(json_path, io::report_to_json(report).dump(2) + "\n");
  const auto& names = subjects.front().ensemble.series_names;
  auto write_means = [&](const cv::LabeledGraphDataset& ds, const std::string& tag) {
    for (int label : {0, 1}) {
      const bool present = std::any_of(ds.samples.begin(), ds.samples.end(),
                                       [&](const gat::GraphSample& s) { return s.label == label; });
      if (!present) continue;
      outputs.write(sibling(a.report, "." + tag + "_class" + std::to_string(label) + "_mean.csv"),
                    io::matrix_to_csv(cv::class_mean_features(ds, label), names));
    }
  };
  write_means(lsagc_data, "lsagc");
  if (corr_data) write_means(*corr_data, "correlation");

  json config = io::to_json(options);
  config["cohort"] = a.cohort.filename().string();
  config["run_correlation"] = options.run_correlation;
  manifest.config = std::move(config);
  manifest.seeds = {{"cv", options.seed}};
  for (std::size_t f = 0; f < options.n_folds; ++f) {
    manifest.seeds["model_fold" + std::to_string(f)] = derive_seed(options.seed, f + 1);
    manifest.seeds["random_fold" + std::to_string(f)] = derive_seed(options.seed, 1000 + f);
  }
  write_manifest(sibling(a.report, ".manifest.json"), std::move(manifest), outputs, common);
  std::cout << io::format_report(report);
  return kOk;
}

template <class Fn>
int guarded(Fn&& fn, bool config_is_validation = false) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_is_validation ? kValidation : kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const LeakageError& e) {
    std::cerr << "error: fold leakage: " << e.what() << "\n";
    return kLeakage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const SingularSystemError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Directed connectivity and graph-attention classification of multivariate time series"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kToolVersion);

  Common common;
  fs::path spec, out_dir;
  auto* synth_cmd = app.add_subcommand("synth", "Simulate VAR networks or a two-class cohort");
  synth_cmd->add_option("--spec", spec, "JSON configuration")->required();
  synth_cmd->add_option("--out", out_dir, "Output directory")->required();
  add_common(synth_cmd, common);

  ConnectivityArgs conn;
  auto* conn_cmd = app.add_subcommand("connectivity", "Compute a connectivity matrix for one subject");
  conn_cmd->add_option("--input", conn.input, "Time-series CSV")->required();
  conn_cmd->add_option("--method", conn.method)->check(CLI::IsMember({"lsagc", "correlation"}));
  conn_cmd->add_option("--p", conn.p, "Retained principal components (default round(N/2))");
  conn_cmd->add_option("--m", conn.m, "Autoregressive order");
  conn_cmd->add_option("--sign", conn.sign)->check(CLI::IsMember({"literal", "positive"}));
  conn_cmd->add_option("--reduced", conn.reduced)->check(CLI::IsMember({"drop_column", "full_projection"}));
  conn_cmd->add_option("--ridge", conn.ridge, "Ridge strength relative to the Gram trace");
  conn_cmd->add_flag("--no-standardize", conn.no_standardize);
  conn_cmd->add_option("--out", conn.out, "Output CSV")->required();
  add_common(conn_cmd, common);

  ClassifyArgs cls;
  auto* cls_cmd = app.add_subcommand("classify", "Cross-validated GAT classification of a cohort");
  cls_cmd->add_option("--cohort", cls.cohort, "Directory with labels.csv and subject CSVs")->required();
  cls_cmd->add_option("--grid", cls.grid, "JSON grid and model configuration");
  auto* folds_opt = cls_cmd->add_option("--folds", cls.folds, "Number of folds");
  cls_cmd->add_option("--report", cls.report, "Report text path")->required();
  cls_cmd->add_flag("--no-correlation", cls.no_correlation, "Skip the correlation baseline");
  add_common(cls_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  for (auto* cmd : {synth_cmd, conn_cmd, cls_cmd})
    if (cmd->count("--seed")) common.seed_given = true;

  if (*synth_cmd) return guarded([&] { return run_synth(spec, out_dir, common, args); });
  if (*conn_cmd) return guarded([&] { return run_connectivity(conn, common, args); }, true);
  cls.folds_given = folds_opt->count() > 0;
  if (cls.folds_given && cls.folds == 0) {
    std::cerr << "error: --folds must be at least 2\n";
    return kUsage;
  }
  return guarded([&] { return run_classify(cls, common, args); });
}
