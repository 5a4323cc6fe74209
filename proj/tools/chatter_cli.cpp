// Command-line front end for the chatter-detection pipeline:
//   chatter synth  --out data ...        generate a labeled synthetic dataset
//   chatter run    --dataset data ...    run one featurization method end to end
//   chatter bench  --dataset data ...    time every method on the same data
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chatter/pipeline.hpp"
#include "chatter/synth.hpp"

namespace {

void add_pipeline_flags(CLI::App* cmd, chatter::PipelineConfig& cfg,
                        std::string& config_file) {
  cmd->add_option("--config", config_file, "JSON config file (flags override it)");
  cmd->add_option("--dataset", cfg.dataset_dir, "dataset directory (CSV + JSON sidecars)");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--chunk-len", cfg.chunk_len, "samples per chunk");
  cmd->add_option("--tau", cfg.tau, "delay override (0 = estimate per chunk)");
  cmd->add_option("--dim", cfg.dim, "embedding dimension override (0 = estimate)");
  cmd->add_option("--split", cfg.split, "training fraction (default per method)");
  cmd->add_option("--iterations", cfg.iterations, "split-train-test repetitions");
  cmd->add_option("--seed", cfg.seed, "RNG seed");
  cmd->add_option("--sigma", cfg.sigma, "kernel/image sigma (default per method)");
  cmd->add_option("--pixel-size", cfg.pixel_size, "persistence image pixel size");
  cmd->add_option("--k-set", cfg.k_set, "landscape indices, e.g. --k-set 1 2 3 4 5");
  cmd->add_option("--max-points", cfg.max_points, "farthest-point cap before persistence");
  cmd->add_option("--target-rate", cfg.target_rate, "decimate to this rate (Hz) at load");
  cmd->add_option("--cutoff", cfg.cutoff, "low-pass cutoff (Hz), default 0.45*target");
  cmd->add_option("--svm-c", cfg.svm_c, "SVM box constraint C");
  cmd->add_option("--svm-gamma", cfg.svm_gamma, "RBF gamma (<=0 auto)");
  cmd->add_option("--jobs", cfg.jobs, "worker threads (0 = hardware)");
  cmd->add_flag("--no-cache", cfg.no_cache, "disable the on-disk diagram/Gram cache");
  cmd->add_flag("!--no-standardize", cfg.standardize, "disable feature standardization");
  cmd->add_flag("!--keep-mild-stable", cfg.mild_is_chatter,
                "map mild chatter to the stable class instead of chatter");
}

chatter::PipelineConfig merge_config(const chatter::PipelineConfig& flag_cfg,
                                     const std::string& config_file,
                                     const CLI::App* cmd) {
  if (config_file.empty()) return flag_cfg;
  std::ifstream in(config_file);
  if (!in) throw chatter::ConfigError("cannot read config file " + config_file);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw chatter::ConfigError("bad config JSON: " + std::string(e.what()));
  }
  chatter::PipelineConfig cfg = chatter::config_from_json(j);
  // Flags the user actually passed win over the file.
  auto passed = [&](const std::string& name) { return cmd->count(name) > 0; };
  if (passed("--dataset")) cfg.dataset_dir = flag_cfg.dataset_dir;
  if (passed("--out")) cfg.out_dir = flag_cfg.out_dir;
  if (passed("--chunk-len")) cfg.chunk_len = flag_cfg.chunk_len;
  if (passed("--tau")) cfg.tau = flag_cfg.tau;
  if (passed("--dim")) cfg.dim = flag_cfg.dim;
  if (passed("--split")) cfg.split = flag_cfg.split;
  if (passed("--iterations")) cfg.iterations = flag_cfg.iterations;
  if (passed("--seed")) cfg.seed = flag_cfg.seed;
  if (passed("--sigma")) cfg.sigma = flag_cfg.sigma;
  if (passed("--pixel-size")) cfg.pixel_size = flag_cfg.pixel_size;
  if (passed("--k-set")) cfg.k_set = flag_cfg.k_set;
  if (passed("--max-points")) cfg.max_points = flag_cfg.max_points;
  if (passed("--target-rate")) cfg.target_rate = flag_cfg.target_rate;
  if (passed("--cutoff")) cfg.cutoff = flag_cfg.cutoff;
  if (passed("--svm-c")) cfg.svm_c = flag_cfg.svm_c;
  if (passed("--svm-gamma")) cfg.svm_gamma = flag_cfg.svm_gamma;
  if (passed("--jobs")) cfg.jobs = flag_cfg.jobs;
  if (passed("--no-cache")) cfg.no_cache = flag_cfg.no_cache;
  if (passed("--no-standardize")) cfg.standardize = flag_cfg.standardize;
  if (passed("--keep-mild-stable")) cfg.mild_is_chatter = flag_cfg.mild_is_chatter;
  return cfg;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"topological chatter detection pipeline"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run one featurization method end to end");
  chatter::PipelineConfig run_cfg;
  std::string run_config_file;
  std::string method = "carlsson";
  run->add_option("--method", method,
                  "landscapes|images|carlsson|kernel|signatures");
  add_pipeline_flags(run, run_cfg, run_config_file);

  // bench
  auto* bench = app.add_subcommand("bench", "time every method on one dataset");
  chatter::PipelineConfig bench_cfg;
  std::string bench_config_file;
  std::vector<std::string> bench_methods{"landscapes", "images", "carlsson",
                                         "kernel", "signatures"};
  bench->add_option("--methods", bench_methods, "subset of methods to bench");
  add_pipeline_flags(bench, bench_cfg, bench_config_file);

  // synth
  auto* synth = app.add_subcommand("synth", "write a labeled synthetic dataset");
  std::string synth_out = "data";
  int n_stable = 40, n_chatter = 40;
  chatter::SynthSpec spec;
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--n-stable", n_stable, "stable record count");
  synth->add_option("--n-chatter", n_chatter, "chatter record count");
  synth->add_option("--fs", spec.fs, "sample rate (Hz)");
  synth->add_option("--duration", spec.duration, "seconds per record");
  synth->add_option("--spindle-freq", spec.spindle_freq, "spindle tone (Hz)");
  synth->add_option("--chatter-freq", spec.chatter_freq, "chatter tone (Hz)");
  synth->add_option("--noise", spec.noise_sigma, "noise standard deviation");
  synth->add_option("--seed", spec.seed, "base seed");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    const auto ids = chatter::write_synth_dataset(synth_out, n_stable, n_chatter, spec);
    std::printf("wrote %zu records to %s\n", ids.size(), synth_out.c_str());
    return 0;
  }
  if (run->parsed()) {
    chatter::PipelineConfig cfg = merge_config(run_cfg, run_config_file, run);
    cfg.method = method;
    chatter::parse_method(cfg.method);
    if (cfg.dataset_dir.empty())
      throw chatter::ConfigError("run: --dataset is required");
    const auto res = chatter::run_pipeline(cfg);
    std::vector<chatter::EvalReport> flat = res.reports;
    std::printf("config %s\n%s", res.hash.c_str(),
                chatter::report_table(flat).c_str());
    if (res.subsets) {
      std::string best;
      for (int k : res.subsets->reports[std::size_t(res.subsets->best_index)].subset)
        best += (best.empty() ? "" : "-") + std::to_string(k);
      std::printf("best subset: %s\n", best.c_str());
    }
    for (const auto& [stage, s] : res.timings.seconds)
      std::printf("%-14s %10.3f s\n", stage.c_str(), s);
    return 0;
  }
  if (bench->parsed()) {
    chatter::PipelineConfig cfg = merge_config(bench_cfg, bench_config_file, bench);
    if (cfg.dataset_dir.empty())
      throw chatter::ConfigError("bench: --dataset is required");
    const auto rows = chatter::run_bench(cfg, bench_methods);
    std::printf("%s", chatter::bench_table(rows).c_str());
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const chatter::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const chatter::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const chatter::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
