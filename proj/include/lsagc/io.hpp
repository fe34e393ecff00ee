#pragma once

#include "lsagc/granger.hpp"
#include "lsagc/pipeline.hpp"
#include "lsagc/synth.hpp"
#include "lsagc/timeseries.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lsagc::io {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kManifestSchema = "lsagc-run-manifest/1";

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

// Time-series CSV:
//   # rows=N cols=T
//   name_1,...,name_N
//   N lines of T comma-separated values
std::string timeseries_to_csv(const TimeSeriesEnsemble& ensemble);
TimeSeriesEnsemble timeseries_from_csv(std::string_view text);
TimeSeriesEnsemble read_timeseries_csv(const std::filesystem::path& path);

// Square matrix CSV with a header row and a leading column of series names.
// Cell (s, t) is the influence of s on t.
std::string matrix_to_csv(const Eigen::MatrixXd& values, const std::vector<std::string>& names);
std::string matrix_to_csv(const Eigen::MatrixXi& values, const std::vector<std::string>& names);
Eigen::MatrixXd matrix_from_csv(std::string_view text, std::vector<std::string>* names = nullptr);

// subject_id,label with header.
std::string labels_to_csv(const std::vector<cv::SubjectLabel>& labels);
std::vector<cv::SubjectLabel> labels_from_csv(std::string_view text);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);

// Synthetic-data configuration. Without a "cohort" section the result has a
// single class-0 subject.
struct SynthConfig {
  synth::CohortSpec cohort;
  bool has_cohort = false;
};
SynthConfig parse_synth_config(const nlohmann::json& j);
nlohmann::json to_json(const SynthConfig& config);

// Grid/classifier configuration for the classify command. Every key is
// optional.
cv::CvOptions parse_classify_config(const nlohmann::json& j);
nlohmann::json to_json(const cv::CvOptions& options);

// Table layout: one row per fold, Mean and Std footer, accuracies in percent.
std::string format_report(const cv::CvReport& report);
nlohmann::json report_to_json(const cv::CvReport& report);
cv::CvReport report_from_json(const nlohmann::json& j);

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::vector<std::string> command;
  nlohmann::json config;
  std::map<std::string, std::uint64_t> seeds;
  std::optional<std::string> start_utc;
  std::optional<std::string> end_utc;
  std::vector<std::string> outputs;

  std::string config_hash() const;  // sha256 of config.dump()
};

nlohmann::json to_json(const RunManifest& manifest);
// Returns problems found; empty when the document matches the schema.
std::vector<std::string> validate_manifest(const nlohmann::json& j);

std::string utc_now_iso8601();

}  // namespace lsagc::io
