#include "recbias/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "recbias/errors.hpp"
#include "recbias/log.hpp"
#include "recbias/metrics.hpp"

namespace recbias {

namespace {

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open " + path.string());
  nlohmann::json json = nlohmann::json::parse(in, nullptr, false);
  if (json.is_discarded()) raise(Errc::IoError, "not valid JSON: " + path.string());
  return json;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot write " + path.string());
  out << json.dump(2) << "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot write " + path.string());
  out << content;
}

std::string describe_backend(const RunConfig::BackendChoice& choice) {
  if (choice.is_remote())
    return choice.remote.model + " @ " + choice.remote.endpoint +
           " (temperature=" + format_fixed(choice.remote.temperature, 2) +
           ", top_p=" + format_fixed(choice.remote.top_p, 2) + ")";
  std::string out = choice.kind;
  if (choice.kind == "recency_greedy") out += " (lambda=" + format_fixed(choice.lambda, 2) + ")";
  if (choice.kind == "coin_flip") out += " (seed=" + std::to_string(choice.seed) + ")";
  return out;
}

/// Bounded worker pool over a topic list. `work` returns false to stop
/// scheduling (budget exhausted).
void for_each_topic(const std::vector<std::string>& topics, int workers,
                    const std::function<bool(const std::string&)>& work) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  auto loop = [&] {
    for (;;) {
      if (stop.load()) return;
      std::size_t i = next.fetch_add(1);
      if (i >= topics.size()) return;
      if (!work(topics[i])) {
        stop.store(true);
        return;
      }
    }
  };
  int n = std::max(1, std::min<int>(workers, static_cast<int>(topics.size())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n) - 1);
  for (int i = 1; i < n; ++i) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
}

}  // namespace

LoadedCorpus load_corpus(const RunConfig& config) {
  LoadedCorpus corpus;
  corpus.topics = load_topics(config.paths.topics);
  corpus.qrels = load_qrels(config.paths.qrels, config.metrics.max_grade);
  corpus.passages = load_passages(config.paths.passages);
  RunMap runs = load_run(config.paths.runs);
  RunMap judged = filter_judged_topics(runs, corpus.qrels);
  for (auto& [qid, list] : judged) {
    if (!corpus.topics.count(qid))
      raise(Errc::InvalidConfig, "run topic " + qid + " has no query text in the topics file");
    for (const auto& entry : list.entries) corpus.passages.at(entry.passage_id);
    corpus.judged_runs.emplace(qid, truncate_top_k(list, static_cast<std::size_t>(config.top_k)));
  }
  return corpus;
}

ExperimentOutcome run_experiments(const RunConfig& config, const RunPaths& paths,
                                  const RunOptions& options) {
  config.validate();
  config.validate_paths();

  const bool want_listwise = config.experiments.listwise && options.listwise;
  const bool want_pairwise = config.experiments.pairwise && options.pairwise;

  // Remote credentials are checked up front so a misconfigured run aborts
  // before a single request (or topic) is attempted.
  auto check_credentials = [](const RunConfig::BackendChoice& choice) {
    if (!choice.is_remote()) return;
    const char* key = std::getenv(choice.remote.credential_env.c_str());
    if (!key || !*key)
      raise(Errc::AuthFailure, "credential environment variable " + choice.remote.credential_env +
                                   " is not set; no request was sent");
  };
  if (want_listwise) check_credentials(config.backend);
  if (want_pairwise) check_credentials(config.pairwise_choice());

  std::filesystem::create_directories(paths.dir);
  std::filesystem::create_directories(paths.serps_dir());
  std::filesystem::create_directories(paths.pairs_dir());

  const std::string config_hash = config.hash();
  if (std::filesystem::exists(paths.config_snapshot())) {
    auto snapshot = read_json_file(paths.config_snapshot());
    if (snapshot.value("config_hash", "") != config_hash)
      raise(Errc::InvalidConfig,
            "run directory " + paths.dir.string() + " was initialized with a different config");
  } else {
    // Snapshot with absolute paths so `resume` works from any directory.
    RunConfig stored = config;
    stored.paths.runs = std::filesystem::absolute(config.paths.runs);
    stored.paths.qrels = std::filesystem::absolute(config.paths.qrels);
    stored.paths.passages = std::filesystem::absolute(config.paths.passages);
    stored.paths.topics = std::filesystem::absolute(config.paths.topics);
    stored.paths.output = std::filesystem::absolute(config.paths.output);
    write_json_file(paths.config_snapshot(), {{"schema_version", kSchemaVersion},
                                              {"created_at", utc_now()},
                                              {"config_hash", config_hash},
                                              {"config", stored.to_json()}});
  }

  LoadedCorpus corpus = load_corpus(config);

  auto transcript = std::make_shared<TranscriptCache>(paths.transcripts());
  auto budget = std::make_shared<CallBudget>(options.max_backend_calls);
  auto listwise_backend = std::make_shared<CachingBackend>(
      make_backend(config.backend, options.transport), transcript, budget);
  auto pairwise_backend = std::make_shared<CachingBackend>(
      make_backend(config.pairwise_choice(), options.transport), transcript, budget);

  ExperimentOutcome outcome;
  std::mutex state_mutex;
  std::map<std::string, std::string> failures;
  std::set<std::string> completed;
  std::atomic<bool> interrupted{false};
  ParseEvents events;

  std::vector<std::string> topic_ids;
  for (const auto& [qid, _] : corpus.judged_runs) topic_ids.push_back(qid);

  const bool do_listwise = want_listwise;
  const bool do_pairwise = want_pairwise;

  if (do_listwise) {
    for_each_topic(topic_ids, config.workers, [&](const std::string& qid) {
      if (std::filesystem::exists(paths.serp_file(qid))) return true;
      const Topic& topic = corpus.topics.at(qid);
      ParseEvents topic_events;
      try {
        PairedSerps serps =
            run_listwise(*listwise_backend, topic, corpus.judged_runs.at(qid), corpus.passages,
                         config.schedule.listwise, config.window, config.parse_mode, &topic_events);
        write_json_file(paths.serp_file(qid), to_json(serps));
      } catch (const Error& e) {
        if (e.code() == Errc::BudgetExhausted) {
          interrupted.store(true);
          return false;
        }
        std::lock_guard<std::mutex> lock(state_mutex);
        failures[qid] = std::string("listwise: ") + e.what();
        log::error("topic ", qid, " failed: ", e.what());
        return true;
      }
      std::lock_guard<std::mutex> lock(state_mutex);
      completed.insert(qid);
      events.strict_failures += topic_events.strict_failures;
      events.retries += topic_events.retries;
      events.repairs += topic_events.repairs;
      return true;
    });
  }

  if (do_pairwise && !interrupted.load()) {
    for_each_topic(topic_ids, config.workers, [&](const std::string& qid) {
      if (std::filesystem::exists(paths.pairs_file(qid))) return true;
      const Topic& topic = corpus.topics.at(qid);
      auto pairs = enumerate_pairs(corpus.qrels, qid, config.metrics.level_map,
                                   config.metrics.pair_cap, config.metrics.seed);
      // Only judged passages with text in the store can be compared.
      std::vector<PairDef> usable;
      usable.reserve(pairs.size());
      for (auto& pair : pairs)
        if (corpus.passages.find(pair.passage_a) && corpus.passages.find(pair.passage_b))
          usable.push_back(std::move(pair));
      if (usable.size() != pairs.size())
        log::warn("topic ", qid, ": ", pairs.size() - usable.size(),
                  " pair(s) skipped, passage text missing");
      ParseEvents topic_events;
      try {
        auto trials = run_pairwise(*pairwise_backend, topic, corpus.passages, usable,
                                   config.schedule.listwise, config.schedule.pairwise_old_year,
                                   config.schedule.pairwise_fresh_year, config.parse_mode,
                                   &topic_events);
        nlohmann::json out = nlohmann::json::array();
        for (const auto& trial : trials) out.push_back(to_json(trial));
        write_json_file(paths.pairs_file(qid),
                        {{"schema_version", kSchemaVersion}, {"topic", qid}, {"trials", out}});
      } catch (const Error& e) {
        if (e.code() == Errc::BudgetExhausted) {
          interrupted.store(true);
          return false;
        }
        std::lock_guard<std::mutex> lock(state_mutex);
        failures[qid] = std::string("pairwise: ") + e.what();
        log::error("topic ", qid, " failed: ", e.what());
        return true;
      }
      std::lock_guard<std::mutex> lock(state_mutex);
      events.strict_failures += topic_events.strict_failures;
      events.retries += topic_events.retries;
      events.repairs += topic_events.repairs;
      return true;
    });
  }

  outcome.interrupted = interrupted.load();
  outcome.transport_calls = listwise_backend->transport_calls() + pairwise_backend->transport_calls();
  outcome.cache_hits = listwise_backend->cache_hits() + pairwise_backend->cache_hits();
  outcome.completed_topics.assign(completed.begin(), completed.end());
  for (const auto& [qid, reason] : failures) outcome.failed_topics.push_back(qid);

  if (!outcome.interrupted) {
    nlohmann::json failures_json = nlohmann::json::object();
    for (const auto& [qid, reason] : failures) failures_json[qid] = reason;
    write_json_file(paths.failures(), {{"schema_version", kSchemaVersion}, {"failed", failures_json}});
  }

  // Operational tallies; cumulative across invocations of the same run.
  nlohmann::json stats{{"schema_version", kSchemaVersion},
                       {"transport_calls", 0},
                       {"cache_hits", 0},
                       {"strict_failures", 0},
                       {"retries", 0},
                       {"repairs", 0},
                       {"interrupted", outcome.interrupted}};
  if (std::filesystem::exists(paths.run_stats())) {
    auto prev = read_json_file(paths.run_stats());
    for (const char* key : {"transport_calls", "cache_hits", "strict_failures", "retries", "repairs"})
      stats[key] = prev.value(key, std::uint64_t{0});
  }
  stats["transport_calls"] = stats["transport_calls"].get<std::uint64_t>() + outcome.transport_calls;
  stats["cache_hits"] = stats["cache_hits"].get<std::uint64_t>() + outcome.cache_hits;
  stats["strict_failures"] = stats["strict_failures"].get<std::uint64_t>() + events.strict_failures;
  stats["retries"] = stats["retries"].get<std::uint64_t>() + events.retries;
  stats["repairs"] = stats["repairs"].get<std::uint64_t>() + events.repairs;
  write_json_file(paths.run_stats(), stats);

  if (outcome.interrupted)
    log::warn("run interrupted by call budget; resume with `recbias resume --output ",
              paths.dir.string(), "`");
  return outcome;
}

namespace {

RunConfig config_from_snapshot(const RunPaths& paths) {
  if (!std::filesystem::exists(paths.config_snapshot()))
    raise(Errc::InvalidConfig, "no config.snapshot in " + paths.dir.string());
  auto snapshot = read_json_file(paths.config_snapshot());
  RunConfig config = RunConfig::from_json(snapshot.at("config"));
  config.validate();
  return config;
}

std::vector<std::string> sorted_json_stems(const std::filesystem::path& dir) {
  std::vector<std::string> stems;
  if (!std::filesystem::exists(dir)) return stems;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") stems.push_back(entry.path().stem().string());
  std::sort(stems.begin(), stems.end());
  return stems;
}

}  // namespace

void compute_metrics(const RunPaths& paths) {
  RunConfig config = config_from_snapshot(paths);
  auto snapshot = read_json_file(paths.config_snapshot());

  std::vector<std::string> failed;
  if (std::filesystem::exists(paths.failures())) {
    auto failures = read_json_file(paths.failures());
    for (const auto& [qid, _] : failures.at("failed").items()) failed.push_back(qid);
  }

  nlohmann::json topics_json = nlohmann::json::object();

  std::vector<ListwiseTopicMetrics> listwise_topics;
  for (const auto& stem : sorted_json_stems(paths.serps_dir())) {
    PairedSerps serps = paired_serps_from_json(read_json_file(paths.serp_file(stem)));
    ListwiseTopicMetrics m = compute_listwise_topic_metrics(serps, config.metrics.ys_k);
    listwise_topics.push_back(m);
    nlohmann::json ys = nlohmann::json::object();
    for (const auto& [k, v] : m.ys) ys[std::to_string(k)] = v;
    topics_json[stem]["listwise"] = {{"n", m.n},           {"aars", m.aars_value},
                                     {"alrs", m.alrs_value}, {"tau", m.tau},
                                     {"ys", ys},            {"ysg", m.ysg}};
  }

  std::vector<PairTrial> all_trials;
  long excluded_trials = 0;
  for (const auto& stem : sorted_json_stems(paths.pairs_dir())) {
    auto file = read_json_file(paths.pairs_file(stem));
    for (const auto& trial_json : file.at("trials")) {
      PairTrial trial = pair_trial_from_json(trial_json);
      if (trial.excluded) ++excluded_trials;
      all_trials.push_back(std::move(trial));
    }
  }
  for (const auto& topic : compute_pairwise_topic_metrics(all_trials)) {
    nlohmann::json levels = nlohmann::json::object();
    for (const auto& [level, cell] : topic.by_level)
      levels[std::to_string(level)] = {{"reversed", cell.reversed},
                                       {"evaluated", cell.evaluated},
                                       {"raw", cell.raw},
                                       {"rr", cell.rate()}};
    topics_json[topic.topic_id]["pairwise"] = {
        {"levels", levels},
        {"pooled",
         {{"reversed", topic.pooled.reversed},
          {"evaluated", topic.pooled.evaluated},
          {"raw", topic.pooled.raw},
          {"rr", topic.pooled.rate()}}}};
  }

  nlohmann::json metrics{{"schema_version", kSchemaVersion},
                         {"model", config.model_label},
                         {"collection_label", config.collection_label},
                         {"config_hash", snapshot.value("config_hash", "")},
                         {"topics", topics_json},
                         {"exclusions",
                          {{"failed_topics", failed}, {"excluded_trials", excluded_trials}}}};
  if (!listwise_topics.empty()) {
    CollectionMetrics collection = aggregate_listwise(listwise_topics);
    if (!all_trials.empty()) collection.rr = reversal_rates(all_trials);
    metrics["collection"] = to_json(collection);
  } else if (!all_trials.empty()) {
    CollectionMetrics collection;
    collection.rr = reversal_rates(all_trials);
    metrics["collection"] = to_json(collection);
  }
  write_json_file(paths.metrics_json(), metrics);
}

void render_report(const RunPaths& paths) {
  if (!std::filesystem::exists(paths.metrics_json()))
    raise(Errc::InvalidConfig, "no metrics.json in " + paths.dir.string() + "; run `metrics` first");
  auto metrics = read_json_file(paths.metrics_json());
  RunConfig config = config_from_snapshot(paths);

  std::vector<ReportRow> rows;
  if (metrics.contains("collection")) {
    ReportRow row;
    row.model = metrics.value("model", "model");
    row.collection = metrics.value("collection_label", "collection");
    row.metrics = collection_metrics_from_json(metrics.at("collection"));
    rows.push_back(std::move(row));
  }

  emit_tables(rows, {TableFormat::markdown, TableFormat::csv, TableFormat::json}, paths.dir);

  std::vector<TauPoint> taus;
  for (const auto& [qid, blocks] : metrics.at("topics").items())
    if (blocks.contains("listwise"))
      taus.push_back(TauPoint{metrics.value("model", "model"), qid,
                              blocks.at("listwise").at("tau").get<double>()});
  if (!taus.empty()) emit_tau_plot(taus, paths.tau_svg(), paths.tau_csv());

  ReportProvenance provenance;
  provenance.config_hash = metrics.value("config_hash", "");
  provenance.backend_description = describe_backend(config.backend);
  if (config.experiments.pairwise)
    provenance.pairwise_backend_description = describe_backend(config.pairwise_choice());
  provenance.schedule_description =
      "newest " + std::to_string(config.schedule.listwise.newest_year) + ", step " +
      std::to_string(config.schedule.listwise.step_years) + "y, template \"" +
      config.schedule.listwise.template_text + "\"; pairwise " +
      std::to_string(config.schedule.pairwise_old_year) + " vs " +
      std::to_string(config.schedule.pairwise_fresh_year);
  provenance.window_description = "size " + std::to_string(config.window.window) + ", stride " +
                                  std::to_string(config.window.stride) + ", bottom-up, " +
                                  std::to_string(config.window.passes) + " pass(es)";
  for (const auto& qid : metrics.at("exclusions").at("failed_topics"))
    provenance.failed_topics.push_back(qid.get<std::string>());
  provenance.excluded_trials = metrics.at("exclusions").at("excluded_trials").get<long>();
  if (std::filesystem::exists(paths.run_stats())) {
    auto stats = read_json_file(paths.run_stats());
    provenance.parse_events.strict_failures = stats.value("strict_failures", std::uint64_t{0});
    provenance.parse_events.retries = stats.value("retries", std::uint64_t{0});
    provenance.parse_events.repairs = stats.value("repairs", std::uint64_t{0});
  }

  write_text_file(paths.report_md(), render_report_markdown(provenance, rows));
}

ExperimentOutcome resume_run(const RunPaths& paths, std::optional<std::uint64_t> max_backend_calls) {
  RunConfig config = config_from_snapshot(paths);
  RunOptions options;
  options.max_backend_calls = max_backend_calls;
  ExperimentOutcome outcome = run_experiments(config, paths, options);
  if (!outcome.interrupted) {
    compute_metrics(paths);
    render_report(paths);
  }
  return outcome;
}

RunConfig demo_config(const std::filesystem::path& data_dir, const std::filesystem::path& output,
                      double lambda, std::uint64_t seed) {
  RunConfig config;
  config.paths.runs = data_dir / "bm25_run.txt";
  config.paths.qrels = data_dir / "qrels.txt";
  config.paths.passages = data_dir / "passages.tsv";
  config.paths.topics = data_dir / "topics.tsv";
  config.paths.output = output;
  config.backend.kind = "recency_greedy";
  config.backend.lambda = lambda;
  RunConfig::BackendChoice pairwise;
  pairwise.kind = "coin_flip";
  pairwise.seed = seed;
  config.pairwise_backend = pairwise;
  config.model_label = "recency-greedy-" + format_fixed(lambda, 2);
  config.collection_label = "demo";
  return config;
}

ExperimentOutcome run_demo(const RunConfig& config, std::optional<std::uint64_t> max_backend_calls) {
  RunPaths paths{config.paths.output};
  RunOptions options;
  options.max_backend_calls = max_backend_calls;
  ExperimentOutcome outcome = run_experiments(config, paths, options);
  if (!outcome.interrupted) {
    compute_metrics(paths);
    render_report(paths);
  }
  return outcome;
}

}  // namespace recbias
