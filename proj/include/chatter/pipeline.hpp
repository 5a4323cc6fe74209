#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chatter/learn.hpp"

namespace chatter {

// Everything a full pipeline run needs. Flags override config-file values;
// fields that do not affect numeric results (out_dir, jobs, no_cache) are
// excluded from the config hash.
struct PipelineConfig {
  std::string dataset_dir;
  std::string out_dir = "out";
  std::string method = "carlsson";
  int chunk_len = 10000;
  int tau = 0;  // 0 = estimate per chunk (FFT + LMS noise floor)
  int dim = 0;  // 0 = estimate per chunk (FNN)
  double split = -1.0;      // <0 = per-method default (0.75 images/signatures, else 0.67)
  int iterations = 10;
  std::uint64_t seed = 0;
  double sigma = -1.0;      // <0 = per-method default (1.0 images, 0.25 kernel)
  double pixel_size = 0.1;
  std::vector<int> k_set{1, 2, 3, 4, 5};
  int max_points = 600;     // farthest-point cap before persistence
  double target_rate = 0.0;  // >0 enables low-pass decimation at load
  double cutoff = 0.0;       // 0 = 0.45 * target_rate
  double svm_c = 1.0;
  double svm_gamma = 0.0;   // <=0 auto
  bool mild_is_chatter = true;
  bool standardize = true;
  int jobs = 0;             // 0 = hardware concurrency
  bool no_cache = false;
};

PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& cfg);

// FNV-1a hash of the canonical JSON of the numeric-relevant fields.
std::string config_hash(const PipelineConfig& cfg);

double resolved_split(const PipelineConfig& cfg);
double resolved_sigma(const PipelineConfig& cfg);

struct StageTimings {
  std::map<std::string, double> seconds;  // ingest, embedding, persistence, featurization, training

  double total() const;
};

struct PipelineResult {
  DiagramDataset dataset;  // included (labeled) records only
  // every chunk, including Unknown-labeled records kept for inspection
  std::vector<std::string> all_chunk_ids;
  std::vector<std::array<PersistenceDiagram, 2>> all_diagrams;  // {h0, h1}
  std::vector<EvalReport> reports;          // one, or 31 for carlsson search
  std::optional<SubsetSearchResult> subsets;  // carlsson method only
  StageTimings timings;
  std::string hash;
  std::vector<std::string> artifacts;  // paths written
};

// Prepares diagrams only (ingest through persistence), honoring the diagram
// cache under <out_dir>/cache. Unknown-labeled records are diagrammed for
// inspection but excluded from the returned dataset.
PipelineResult prepare_diagrams(const PipelineConfig& cfg);

// Full run: diagrams, featurization, repeated split evaluation, artifacts
// (diagrams JSON, feature matrix CSV, report JSON and text table, timings).
PipelineResult run_pipeline(const PipelineConfig& cfg);

struct BenchRow {
  std::string method;
  double total_seconds = 0.0;
  double mean_test_accuracy = 0.0;
  std::map<std::string, double> stage_seconds;
};

// Runs every listed method on the same dataset and returns one timing row
// per method. Also writes bench.json and a text table under out_dir.
std::vector<BenchRow> run_bench(const PipelineConfig& base,
                                const std::vector<std::string>& methods);

std::string bench_table(const std::vector<BenchRow>& rows);

}  // namespace chatter
