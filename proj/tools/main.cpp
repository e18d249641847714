// recbias: batch audit of date-injection sensitivity in LLM-based rerankers.

#include <CLI11.hpp>
#include <cstdio>
#include <optional>

#include "recbias/errors.hpp"
#include "recbias/log.hpp"
#include "recbias/pipeline.hpp"

namespace {

using recbias::RunConfig;
using recbias::RunPaths;

struct GlobalArgs {
  std::string config_path;
  std::string output;
  std::string backend_override;
  bool strict_parse = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_calls;
};

RunConfig load_config(const GlobalArgs& args) {
  if (args.config_path.empty())
    recbias::raise(recbias::Errc::InvalidConfig, "--config is required for this subcommand");
  RunConfig config = RunConfig::load(args.config_path);
  if (!args.output.empty()) config.paths.output = args.output;
  if (!args.backend_override.empty()) {
    config.backend.kind = args.backend_override;
    if (config.backend.kind != "remote") config.backend.remote = {};
  }
  if (args.strict_parse) config.parse_mode = recbias::ParseMode::strict;
  if (args.seed) config.metrics.seed = *args.seed;
  config.validate();
  return config;
}

RunPaths run_paths(const GlobalArgs& args, const RunConfig* config = nullptr) {
  if (!args.output.empty()) return RunPaths{args.output};
  if (config && !config->paths.output.empty()) return RunPaths{config->paths.output};
  recbias::raise(recbias::Errc::InvalidConfig, "an output/run directory is required (--output)");
}

void print_outcome(const recbias::ExperimentOutcome& outcome, const RunPaths& paths) {
  std::printf("backend calls: %llu (cache hits %llu)\n",
              static_cast<unsigned long long>(outcome.transport_calls),
              static_cast<unsigned long long>(outcome.cache_hits));
  if (!outcome.failed_topics.empty()) {
    std::printf("failed topics:");
    for (const auto& topic : outcome.failed_topics) std::printf(" %s", topic.c_str());
    std::printf("\n");
  }
  if (outcome.interrupted)
    std::printf("run interrupted by call budget; finish it with: recbias resume --output %s\n",
                paths.dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit recency bias in listwise and pairwise rerankers by injecting synthetic "
               "publication dates and measuring rank, year, correlation and preference shifts."};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalArgs args;
  app.add_option("--config", args.config_path, "Path to the JSON run config");
  app.add_option("--output", args.output, "Run directory (overrides config paths.output)");
  app.add_option("--backend", args.backend_override,
                 "Backend override: remote or a mock kind (identity, reverse, lexical_overlap, "
                 "recency_greedy, date_blind, fresh_preferring, coin_flip)");
  app.add_flag("--strict-parse", args.strict_parse, "Strict model-output parsing (with repair fallback)");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed for pair sampling and seeded mocks");
  std::uint64_t max_calls_value = 0;
  auto* max_calls_opt =
      app.add_option("--max-calls", max_calls_value,
                     "Stop after this many backend calls (resume later to finish)");

  auto* cmd_validate = app.add_subcommand("validate", "Check config and input files");
  auto* cmd_listwise = app.add_subcommand("listwise", "Run the listwise date-injection experiment");
  auto* cmd_pairwise = app.add_subcommand("pairwise", "Run the pairwise preference experiment");
  auto* cmd_metrics =
      app.add_subcommand("metrics", "Recompute metrics.json from persisted outputs (no backend calls)");
  auto* cmd_report = app.add_subcommand("report", "Render report.md, tables and the tau plot");
  auto* cmd_resume = app.add_subcommand("resume", "Continue an interrupted run");
  auto* cmd_demo =
      app.add_subcommand("demo", "Run the bundled synthetic collection offline with mock backends");

  std::string demo_data = "data/demo";
  double demo_lambda = 0.5;
  cmd_demo->add_option("--data", demo_data, "Demo fixture directory");
  cmd_demo->add_option("--lambda", demo_lambda, "recency_greedy lambda for the demo listwise run");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) args.seed = seed_value;
  if (*max_calls_opt) args.max_calls = max_calls_value;

  try {
    if (cmd_validate->parsed()) {
      RunConfig config = load_config(args);
      config.validate_paths();
      recbias::LoadedCorpus corpus = recbias::load_corpus(config);
      std::printf("config ok (hash %s)\n", config.hash().c_str());
      std::printf("topics: %zu, judged run topics: %zu, passages: %zu, judgments: %zu\n",
                  corpus.topics.size(), corpus.judged_runs.size(), corpus.passages.size(),
                  corpus.qrels.size());
      return 0;
    }
    if (cmd_listwise->parsed() || cmd_pairwise->parsed()) {
      RunConfig config = load_config(args);
      RunPaths paths = run_paths(args, &config);
      recbias::RunOptions options;
      options.max_backend_calls = args.max_calls;
      options.listwise = cmd_listwise->parsed();
      options.pairwise = cmd_pairwise->parsed();
      auto outcome = recbias::run_experiments(config, paths, options);
      print_outcome(outcome, paths);
      return outcome.interrupted ? 3 : 0;
    }
    if (cmd_metrics->parsed()) {
      recbias::compute_metrics(run_paths(args));
      return 0;
    }
    if (cmd_report->parsed()) {
      RunPaths paths = run_paths(args);
      recbias::render_report(paths);
      std::printf("report written to %s\n", paths.report_md().string().c_str());
      return 0;
    }
    if (cmd_resume->parsed()) {
      RunPaths paths = run_paths(args);
      auto outcome = recbias::resume_run(paths, args.max_calls);
      print_outcome(outcome, paths);
      return outcome.interrupted ? 3 : 0;
    }
    if (cmd_demo->parsed()) {
      RunConfig config =
          recbias::demo_config(demo_data, args.output.empty() ? "demo-run" : args.output,
                               demo_lambda, args.seed.value_or(42));
      if (args.strict_parse) config.parse_mode = recbias::ParseMode::strict;
      auto outcome = recbias::run_demo(config, args.max_calls);
      RunPaths paths{config.paths.output};
      print_outcome(outcome, paths);
      if (!outcome.interrupted)
        std::printf("demo complete: %s\n", paths.report_md().string().c_str());
      return outcome.interrupted ? 3 : 0;
    }
  } catch (const recbias::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", recbias::errc_name(e.code()), e.what());
    return e.code() == recbias::Errc::InvalidConfig ? 1 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
