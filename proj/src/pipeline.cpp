#include "chatter/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chatter/ingest.hpp"
#include "chatter/parallel.hpp"
#include "chatter/signatures.hpp"
#include "chatter/synth.hpp"

namespace fs = std::filesystem;

namespace chatter {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t fnv1a64(const void* data, std::size_t n,
                      std::uint64_t h = 14695981039346656037ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  c.dataset_dir = j.value("dataset", c.dataset_dir);
  c.out_dir = j.value("out", c.out_dir);
  c.method = j.value("method", c.method);
  c.chunk_len = j.value("chunk_len", c.chunk_len);
  c.tau = j.value("tau", c.tau);
  c.dim = j.value("dim", c.dim);
  c.split = j.value("split", c.split);
  c.iterations = j.value("iterations", c.iterations);
  c.seed = j.value("seed", c.seed);
  c.sigma = j.value("sigma", c.sigma);
  c.pixel_size = j.value("pixel_size", c.pixel_size);
  if (j.contains("k_set")) c.k_set = j.at("k_set").get<std::vector<int>>();
  c.max_points = j.value("max_points", c.max_points);
  c.target_rate = j.value("target_rate", c.target_rate);
  c.cutoff = j.value("cutoff", c.cutoff);
  c.svm_c = j.value("svm_c", c.svm_c);
  c.svm_gamma = j.value("svm_gamma", c.svm_gamma);
  c.mild_is_chatter = j.value("mild_is_chatter", c.mild_is_chatter);
  c.standardize = j.value("standardize", c.standardize);
  c.jobs = j.value("jobs", c.jobs);
  c.no_cache = j.value("no_cache", c.no_cache);
  return c;
}

nlohmann::json config_to_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["dataset"] = c.dataset_dir;
  j["out"] = c.out_dir;
  j["method"] = c.method;
  j["chunk_len"] = c.chunk_len;
  j["tau"] = c.tau;
  j["dim"] = c.dim;
  j["split"] = c.split;
  j["iterations"] = c.iterations;
  j["seed"] = c.seed;
  j["sigma"] = c.sigma;
  j["pixel_size"] = c.pixel_size;
  j["k_set"] = c.k_set;
  j["max_points"] = c.max_points;
  j["target_rate"] = c.target_rate;
  j["cutoff"] = c.cutoff;
  j["svm_c"] = c.svm_c;
  j["svm_gamma"] = c.svm_gamma;
  j["mild_is_chatter"] = c.mild_is_chatter;
  j["standardize"] = c.standardize;
  j["jobs"] = c.jobs;
  j["no_cache"] = c.no_cache;
  return j;
}

std::string config_hash(const PipelineConfig& cfg) {
  // out_dir, jobs and no_cache do not affect numeric outputs.
  nlohmann::json j = config_to_json(cfg);
  j.erase("out");
  j.erase("jobs");
  j.erase("no_cache");
  const std::string s = j.dump();
  return hex64(fnv1a64(s.data(), s.size()));
}

double resolved_split(const PipelineConfig& cfg) {
  if (cfg.split > 0.0) return cfg.split;
  const Method m = parse_method(cfg.method);
  return (m == Method::Images || m == Method::Signatures) ? 0.75 : 0.67;
}

double resolved_sigma(const PipelineConfig& cfg) {
  if (cfg.sigma > 0.0) return cfg.sigma;
  return parse_method(cfg.method) == Method::Images ? 1.0 : 0.25;
}

double StageTimings::total() const {
  double t = 0.0;
  for (const auto& [_, v] : seconds) t += v;
  return t;
}

namespace {

struct ChunkWork {
  Chunk chunk;
  int record_index = 0;  // into the full (loaded) record list
};

std::uint64_t chunk_cache_key(const Eigen::VectorXd& samples, int tau, int dim,
                              int max_points) {
  std::uint64_t h = fnv1a64(samples.data(), std::size_t(samples.size()) * sizeof(double));
  const int ints[3] = {tau, dim, max_points};
  return fnv1a64(ints, sizeof(ints), h);
}

struct ChunkDiagrams {
  PersistenceDiagram h0, h1;
  double embed_seconds = 0.0;
  double persistence_seconds = 0.0;
  bool from_cache = false;
};

ChunkDiagrams compute_chunk_diagrams(const Chunk& chunk, double sample_rate,
                                     const PipelineConfig& cfg) {
  ChunkDiagrams out;
  const auto t0 = Clock::now();
  const int tau = cfg.tau > 0 ? cfg.tau
                              : estimate_delay_fft_lms(chunk.samples, sample_rate);
  const int dim =
      cfg.dim > 0 ? cfg.dim : estimate_dim_fnn(chunk.samples, tau).dim;
  PointCloud cloud = delay_embed(chunk.samples, {tau, dim});
  bool subsampled = false;
  cloud = cap_cloud(cloud, cfg.max_points, &subsampled);
  out.embed_seconds = seconds_since(t0);

  const auto t1 = Clock::now();
  const DistanceMatrix dist = distance_matrix(cloud);
  auto diagrams = rips_persistence(dist, 1);
  out.persistence_seconds = seconds_since(t1);

  DiagramProvenance prov;
  prov.chunk_id = chunk.id();
  prov.tau = tau;
  prov.dim = dim;
  prov.subsampled = subsampled;
  out.h0 = std::move(diagrams.at(0));
  out.h1 = std::move(diagrams.at(1));
  out.h0.provenance = prov;
  out.h1.provenance = prov;
  return out;
}

nlohmann::json chunk_diagrams_json(const ChunkDiagrams& cd, const std::string& hash) {
  nlohmann::json j;
  j["config_hash"] = hash;
  j["h0"] = diagram_to_json(cd.h0);
  j["h1"] = diagram_to_json(cd.h1);
  return j;
}

}  // namespace

PipelineResult prepare_diagrams(const PipelineConfig& cfg) {
  PipelineResult res;
  res.hash = config_hash(cfg);
  auto& timings = res.timings.seconds;

  // ingest: load, optionally decimate, normalize
  const auto t_ingest = Clock::now();
  std::vector<TimeSeriesRecord> records;
  try {
    records = load_dataset(cfg.dataset_dir);
  } catch (const Error& e) {
    throw DataError(std::string("ingest: ") + e.what());
  }
  if (records.empty()) throw DataError("ingest: no CSV records in " + cfg.dataset_dir);
  for (auto& rec : records) {
    if (cfg.target_rate > 0.0) {
      const double cutoff = cfg.cutoff > 0.0 ? cfg.cutoff : 0.45 * cfg.target_rate;
      rec = lowpass_decimate(rec, cfg.target_rate, cutoff);
    }
    rec.samples = normalize(rec.samples);
  }

  std::vector<ChunkWork> work;
  for (std::size_t r = 0; r < records.size(); ++r)
    for (auto& ch : split_chunks(records[r], cfg.chunk_len))
      work.push_back({std::move(ch), int(r)});
  timings["ingest"] = seconds_since(t_ingest);

  // embedding + persistence per chunk, cached on disk
  const fs::path cache_dir = fs::path(cfg.out_dir) / "cache" / "diagrams";
  if (!cfg.no_cache) fs::create_directories(cache_dir);

  std::vector<ChunkDiagrams> diagrams(work.size());
  parallel_for(work.size(), cfg.jobs, [&](std::size_t i) {
    const auto key = chunk_cache_key(work[i].chunk.samples, cfg.tau, cfg.dim,
                                     cfg.max_points);
    const fs::path cache_file = cache_dir / (hex64(key) + ".json");
    if (!cfg.no_cache && fs::exists(cache_file)) {
      std::ifstream in(cache_file);
      nlohmann::json j;
      in >> j;
      diagrams[i].h0 = diagram_from_json(j.at("h0"));
      diagrams[i].h1 = diagram_from_json(j.at("h1"));
      diagrams[i].from_cache = true;
      return;
    }
    diagrams[i] = compute_chunk_diagrams(work[i].chunk,
                                         records[std::size_t(work[i].record_index)].sample_rate,
                                         cfg);
    if (!cfg.no_cache) {
      const fs::path tmp = cache_dir / (hex64(key) + ".tmp" + std::to_string(i));
      write_json_file(tmp, chunk_diagrams_json(diagrams[i], res.hash));
      fs::rename(tmp, cache_file);
    }
  });
  double embed_s = 0.0, pers_s = 0.0;
  for (const auto& d : diagrams) {
    embed_s += d.embed_seconds;
    pers_s += d.persistence_seconds;
  }
  timings["embedding"] = embed_s;
  timings["persistence"] = pers_s;

  // dataset over records with a binary label; Unknown stays out
  std::vector<int> record_remap(records.size(), -1);
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].excluded_from_training) continue;
    record_remap[r] = res.dataset.n_records();
    res.dataset.record_labels.push_back(
        binary_label(records[r].label, cfg.mild_is_chatter));
  }
  for (std::size_t i = 0; i < work.size(); ++i) {
    const int rec = work[i].record_index;
    res.all_chunk_ids.push_back(work[i].chunk.id());
    res.all_diagrams.push_back({diagrams[i].h0, diagrams[i].h1});
    if (record_remap[std::size_t(rec)] < 0) continue;
    res.dataset.diagrams.push_back(diagrams[i].h1);
    res.dataset.chunk_labels.push_back(
        binary_label(work[i].chunk.label, cfg.mild_is_chatter));
    res.dataset.chunk_record.push_back(record_remap[std::size_t(rec)]);
    res.dataset.chunk_ids.push_back(work[i].chunk.id());
  }
  return res;
}

namespace {

EvalConfig make_eval_config(const PipelineConfig& cfg) {
  EvalConfig ec;
  ec.method = parse_method(cfg.method);
  ec.split = resolved_split(cfg);
  ec.iterations = cfg.iterations;
  ec.seed = cfg.seed;
  ec.standardize = cfg.standardize;
  ec.params.k_set = cfg.k_set;
  ec.params.image_pixel_size = cfg.pixel_size;
  ec.params.image_sigma =
      parse_method(cfg.method) == Method::Images ? resolved_sigma(cfg) : 1.0;
  ec.params.kernel_sigma =
      parse_method(cfg.method) == Method::Kernel ? resolved_sigma(cfg) : 0.25;
  ec.svm.C = cfg.svm_c;
  ec.svm.gamma = cfg.svm_gamma;
  ec.jobs = cfg.jobs;
  return ec;
}

// Inspection artifact: a feature matrix over the whole included dataset.
// Training-time artifacts (meshes, bounds) are refit per split inside
// evaluate; this one uses the full dataset.
FeatureMatrix dataset_feature_matrix(const DiagramDataset& ds,
                                     const EvalConfig& ec) {
  FeatureMatrix fm;
  fm.labels.resize(ds.n_chunks());
  for (int c = 0; c < ds.n_chunks(); ++c) fm.labels[c] = ds.chunk_labels[std::size_t(c)];
  switch (ec.method) {
    case Method::Carlsson: {
      fm.features.resize(ds.n_chunks(), 5);
      for (int c = 0; c < ds.n_chunks(); ++c)
        fm.features.row(c) = carlsson_coordinates(ds.diagrams[std::size_t(c)]).transpose();
      fm.column_names = {"f1", "f2", "f3", "f4", "f5"};
      return fm;
    }
    case Method::Signatures:
      return signature_features(ds.diagrams, ds.chunk_labels, ec.params.k_set);
    case Method::Landscapes: {
      int k_max = 1;
      for (int k : ec.params.k_set) k_max = std::max(k_max, k);
      std::vector<Landscape> ls(static_cast<std::size_t>(ds.n_chunks()));
      parallel_for(ls.size(), ec.jobs, [&](std::size_t i) {
        ls[i] = compute_landscapes(ds.diagrams[i], k_max);
      });
      const LandscapeMesh mesh = build_meshes(ls, ec.params.k_set);
      for (int c = 0; c < ds.n_chunks(); ++c) {
        const Eigen::VectorXd f = landscape_features(ls[std::size_t(c)], mesh, ec.params.k_set);
        if (fm.features.size() == 0) fm.features.resize(ds.n_chunks(), f.size());
        fm.features.row(c) = f.transpose();
      }
      return fm;
    }
    case Method::Images: {
      const ImageBounds bounds =
          training_image_bounds(ds.diagrams, ec.params.image_sigma);
      std::vector<Eigen::VectorXd> feats(static_cast<std::size_t>(ds.n_chunks()));
      parallel_for(feats.size(), ec.jobs, [&](std::size_t i) {
        feats[i] = image_features(persistence_image(
            ds.diagrams[i], ec.params.image_pixel_size, ec.params.image_sigma, bounds));
      });
      for (int c = 0; c < ds.n_chunks(); ++c) {
        if (fm.features.size() == 0) fm.features.resize(ds.n_chunks(), feats[std::size_t(c)].size());
        fm.features.row(c) = feats[std::size_t(c)].transpose();
      }
      return fm;
    }
    case Method::Kernel:
      break;
  }
  throw ConfigError("dataset_feature_matrix: kernel method has no feature matrix");
}

std::uint64_t dataset_hash(const DiagramDataset& ds) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& id : ds.chunk_ids) h = fnv1a64(id.data(), id.size(), h);
  for (const auto& d : ds.diagrams)
    if (d.pairs.size() > 0)
      h = fnv1a64(d.pairs.data(), std::size_t(d.pairs.size()) * sizeof(double), h);
  return h;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  PipelineResult res = prepare_diagrams(cfg);
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);

  nlohmann::json cj = config_to_json(cfg);
  cj["config_hash"] = res.hash;
  cj["resolved_split"] = resolved_split(cfg);
  cj["resolved_sigma"] = resolved_sigma(cfg);
  write_json_file(out / "config.json", cj);
  res.artifacts.push_back((out / "config.json").string());

  // diagrams for inspection, one JSON per chunk
  const fs::path diag_dir = out / "diagrams";
  fs::create_directories(diag_dir);
  for (std::size_t i = 0; i < res.all_diagrams.size(); ++i) {
    nlohmann::json j;
    j["config_hash"] = res.hash;
    j["h0"] = diagram_to_json(res.all_diagrams[i][0]);
    j["h1"] = diagram_to_json(res.all_diagrams[i][1]);
    const fs::path p = diag_dir / (res.all_chunk_ids[i] + ".json");
    write_json_file(p, j);
  }
  res.artifacts.push_back(diag_dir.string());

  const EvalConfig ec = make_eval_config(cfg);
  const auto t_feat = Clock::now();

  KernelMatrix gram;
  EvalConfig ec_run = ec;
  if (ec.method == Method::Kernel) {
    // Gram cache keyed by (dataset hash, sigma): the dominant cost
    const fs::path gram_path =
        out / "cache" /
        ("gram_" + hex64(dataset_hash(res.dataset)) + "_sigma" +
         format_double(ec.params.kernel_sigma) + ".csv");
    if (!cfg.no_cache && fs::exists(gram_path)) {
      gram = read_kernel_csv(gram_path.string());
    } else {
      gram = kernel_matrix(res.dataset.diagrams, ec.params.kernel_sigma, cfg.jobs);
      gram.row_ids = res.dataset.chunk_ids;
      gram.col_ids = res.dataset.chunk_ids;
      if (!cfg.no_cache) {
        fs::create_directories(out / "cache");
        write_kernel_csv(gram_path.string(), gram, "config_hash=" + res.hash);
      }
    }
    res.artifacts.push_back(gram_path.string());
    ec_run.precomputed_gram = &gram;
  } else {
    const FeatureMatrix fm = dataset_feature_matrix(res.dataset, ec);
    const fs::path fpath = out / ("features_" + cfg.method + ".csv");
    write_feature_csv(fpath.string(), fm, "config_hash=" + res.hash);
    res.artifacts.push_back(fpath.string());
  }

  if (ec.method == Method::Carlsson) {
    res.subsets = carlsson_subset_search(res.dataset, ec_run);
    for (const auto& sr : res.subsets->reports) res.reports.push_back(sr.report);
  } else {
    res.reports.push_back(evaluate(res.dataset, ec_run));
  }

  double train_s = 0.0, predict_s = 0.0, feat_total = seconds_since(t_feat);
  for (const auto& r : res.reports) {
    auto it = r.stage_seconds.find("train");
    if (it != r.stage_seconds.end()) train_s += it->second;
    it = r.stage_seconds.find("predict");
    if (it != r.stage_seconds.end()) predict_s += it->second;
  }
  res.timings.seconds["featurization"] = std::max(0.0, feat_total - train_s - predict_s);
  res.timings.seconds["training"] = train_s + predict_s;

  // report: deterministic content only; wall-clock goes to timings.json
  nlohmann::json rj;
  rj["config_hash"] = res.hash;
  rj["method"] = cfg.method;
  auto arr = nlohmann::json::array();
  for (const auto& r : res.reports) arr.push_back(report_to_json(r));
  rj["reports"] = std::move(arr);
  if (res.subsets) {
    rj["best_subset"] = res.subsets->reports[std::size_t(res.subsets->best_index)].subset;
    rj["best_mean_test"] =
        res.subsets->reports[std::size_t(res.subsets->best_index)].report.mean_test;
  }
  const fs::path rpath = out / ("report_" + cfg.method + ".json");
  write_json_file(rpath, rj);
  res.artifacts.push_back(rpath.string());

  std::vector<EvalReport> flat;
  for (const auto& r : res.reports) flat.push_back(r);
  write_text(out / ("report_" + cfg.method + ".txt"),
             "config_hash " + res.hash + "\n" + report_table(flat));
  res.artifacts.push_back((out / ("report_" + cfg.method + ".txt")).string());

  nlohmann::json tj;
  tj["config_hash"] = res.hash;
  tj["stage_seconds"] = res.timings.seconds;
  write_json_file(out / ("timings_" + cfg.method + ".json"), tj);
  res.artifacts.push_back((out / ("timings_" + cfg.method + ".json")).string());
  return res;
}

std::vector<BenchRow> run_bench(const PipelineConfig& base,
                                const std::vector<std::string>& methods) {
  if (methods.empty()) throw ConfigError("bench: empty method set");
  std::vector<BenchRow> rows;
  for (const auto& m : methods) {
    PipelineConfig cfg = base;
    cfg.method = m;
    parse_method(m);  // validate early
    PipelineResult pr = run_pipeline(cfg);
    BenchRow row;
    row.method = m;
    row.stage_seconds = pr.timings.seconds;
    row.total_seconds = pr.timings.total();
    double best = 0.0;
    for (const auto& r : pr.reports) best = std::max(best, r.mean_test);
    row.mean_test_accuracy = best;
    rows.push_back(std::move(row));
  }

  nlohmann::json bj = nlohmann::json::array();
  for (const auto& r : rows)
    bj.push_back({{"method", r.method},
                  {"total_seconds", r.total_seconds},
                  {"mean_test_accuracy", r.mean_test_accuracy},
                  {"stage_seconds", r.stage_seconds}});
  fs::create_directories(base.out_dir);
  write_json_file(fs::path(base.out_dir) / "bench.json", bj);
  write_text(fs::path(base.out_dir) / "bench.txt", bench_table(rows));
  return rows;
}

std::string bench_table(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-14s %12s %12s\n", "method", "seconds",
                "test acc");
  out << line;
  out << std::string(40, '-') << "\n";
  double kernel_total = -1.0, max_other = 0.0;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-14s %12.3f %11.1f%%\n", r.method.c_str(),
                  r.total_seconds, 100.0 * r.mean_test_accuracy);
    out << line;
    if (r.method == "kernel") kernel_total = r.total_seconds;
    else max_other = std::max(max_other, r.total_seconds);
  }
  if (kernel_total >= 0.0)
    out << (kernel_total >= max_other
                ? "note: kernel method is the slowest, as expected\n"
                : "note: kernel method was NOT the slowest on this data\n");
  return out.str();
}

}  // namespace chatter
