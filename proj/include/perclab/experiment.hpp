#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "perclab/analysis.hpp"
#include "perclab/percolation.hpp"

namespace perclab {

struct FitRequest {
  ModelSpec model;
  FitWindow window;
  std::string model_text;
  std::string window_text;  // empty: default window
};

struct BatchRequest {
  double p = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t n_samples = 0;
  std::size_t size_cap = kDefaultSizeCap;
};

struct ExperimentConfig {
  std::string name = "experiment";
  FamilyDescriptor graph;
  Sampler sampler = Sampler::direct;
  std::vector<BatchRequest> batches;  // one per (p, seed) tuple
  bool tail = true;
  std::vector<FitRequest> fits;
  bool compare_models = false;
  unsigned workers = 0;
  std::string out_dir = "out";
  nlohmann::json source;  // config as given, echoed into the manifest
};

/// Validates every field and reports all problems at once, one
/// "field: message" per line (ErrorKind::invalid_argument).
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Named presets: "one_regime_d2_r3".
nlohmann::json preset_config(const std::string& name);

/// Git blob SHA-1 of the canonical histogram content (wall time excluded).
std::string histogram_hash(const SizeHistogram& h);
std::string git_blob_sha1(const std::string& content);

struct RunResult {
  nlohmann::json manifest;
  std::vector<std::string> failures;
  std::filesystem::path manifest_path;
};

/// Writes histograms.jsonl, tail_<k>.csv, fits.csv and manifest.json into
/// out_dir. Analyses read the histograms back from histograms.jsonl.
RunResult run_experiment(const ExperimentConfig& config);

struct ReplayResult {
  bool identical = false;
  std::vector<std::string> mismatches;
  RunResult run;
};

/// Re-runs the config stored in a manifest into out_dir and compares the
/// histogram hashes.
ReplayResult replay_manifest(const std::filesystem::path& manifest, const std::string& out_dir);

std::vector<SizeHistogram> read_histograms(const std::filesystem::path& jsonl);

struct OracleRow {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct OracleOptions {
  bool corrupt_dwass = false;  // mutation test: perturbs one Dwass value
  unsigned workers = 0;
};

std::vector<OracleRow> oracle_suite(const OracleOptions& opts = {});

}  // namespace perclab
