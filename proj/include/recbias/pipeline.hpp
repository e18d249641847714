#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "recbias/cache.hpp"
#include "recbias/config.hpp"
#include "recbias/report.hpp"

namespace recbias {

/// Standard run-directory layout.
struct RunPaths {
  std::filesystem::path dir;

  std::filesystem::path config_snapshot() const { return dir / "config.snapshot"; }
  std::filesystem::path transcripts() const { return dir / "transcripts.jsonl"; }
  std::filesystem::path serps_dir() const { return dir / "serps"; }
  std::filesystem::path pairs_dir() const { return dir / "pairs"; }
  std::filesystem::path failures() const { return dir / "failures.json"; }
  std::filesystem::path run_stats() const { return dir / "run_stats.json"; }
  std::filesystem::path metrics_json() const { return dir / "metrics.json"; }
  std::filesystem::path report_md() const { return dir / "report.md"; }
  std::filesystem::path tau_svg() const { return dir / "tau_plot.svg"; }
  std::filesystem::path tau_csv() const { return dir / "tau_points.csv"; }

  std::filesystem::path serp_file(const std::string& topic) const {
    return serps_dir() / (topic + ".json");
  }
  std::filesystem::path pairs_file(const std::string& topic) const {
    return pairs_dir() / (topic + ".json");
  }
};

struct LoadedCorpus {
  TopicMap topics;
  RunMap judged_runs;  // judged topics only, truncated to top_k
  Qrels qrels;
  PassageStore passages;
};

/// Load and cross-validate all four input files for a config.
LoadedCorpus load_corpus(const RunConfig& config);

struct ExperimentOutcome {
  bool interrupted = false;  // stopped by a call budget; resume to finish
  std::uint64_t transport_calls = 0;
  std::uint64_t cache_hits = 0;
  std::vector<std::string> completed_topics;
  std::vector<std::string> failed_topics;
};

struct RunOptions {
  std::optional<std::uint64_t> max_backend_calls;
  bool listwise = true;
  bool pairwise = true;
  std::shared_ptr<Transport> transport;  // test seam for remote backends
};

/// Initialize (or open) the run directory and execute the enabled
/// experiments, skipping topics whose outputs already exist and serving
/// previously transcribed prompts from cache. Safe to call repeatedly.
ExperimentOutcome run_experiments(const RunConfig& config, const RunPaths& paths,
                                  const RunOptions& options = {});

/// Recompute metrics.json from the persisted SERPs and trials (no backend
/// calls).
void compute_metrics(const RunPaths& paths);

/// Render report.md, tables.{md,csv,json} and the tau plot from
/// metrics.json.
void render_report(const RunPaths& paths);

/// Continue an interrupted run from its config snapshot, then refresh
/// metrics and report.
ExperimentOutcome resume_run(const RunPaths& paths,
                             std::optional<std::uint64_t> max_backend_calls = std::nullopt);

/// Config used by `demo`: the bundled synthetic collection with mock
/// backends (recency_greedy listwise, coin_flip pairwise).
RunConfig demo_config(const std::filesystem::path& data_dir, const std::filesystem::path& output,
                      double lambda = 0.5, std::uint64_t seed = 42);

/// End-to-end offline demo; returns the outcome of the experiment stage.
ExperimentOutcome run_demo(const RunConfig& config,
                           std::optional<std::uint64_t> max_backend_calls = std::nullopt);

}  // namespace recbias
