#include "recbias/config.hpp"

#include <algorithm>
#include <fstream>

#include "recbias/errors.hpp"
#include "recbias/hash.hpp"

namespace recbias {

MockSpec RunConfig::BackendChoice::mock_spec() const {
  MockSpec spec;
  spec.kind = mock_kind_from_string(kind);
  spec.lambda = lambda;
  spec.seed = seed;
  return spec;
}

nlohmann::json RunConfig::BackendChoice::signature() const {
  return is_remote() ? remote.signature() : mock_spec().signature();
}

void RunConfig::validate() const {
  if (top_k < 1) raise(Errc::InvalidConfig, "top_k must be >= 1");
  if (workers < 1) raise(Errc::InvalidConfig, "workers must be >= 1");
  window.validate();
  schedule.listwise.validate();
  if (schedule.pairwise_old_year <= 0 || schedule.pairwise_fresh_year <= 0)
    raise(Errc::InvalidConfig, "pairwise years must be positive");
  if (metrics.ys_k.empty()) raise(Errc::InvalidConfig, "ys_k must not be empty");
  if (!std::is_sorted(metrics.ys_k.begin(), metrics.ys_k.end()))
    raise(Errc::InvalidConfig, "ys_k values must be ascending");
  for (int k : metrics.ys_k)
    if (k < 1 || k > top_k)
      raise(Errc::InvalidConfig, "ys_k value " + std::to_string(k) + " outside 1..top_k");
  if (metrics.max_grade < 0) raise(Errc::InvalidConfig, "max_grade must be >= 0");
  auto check_backend = [](const BackendChoice& choice, const std::string& which) {
    if (choice.is_remote()) {
      choice.remote.validate();
    } else {
      choice.mock_spec().validate();
    }
    (void)which;
  };
  check_backend(backend, "backend");
  if (pairwise_backend) check_backend(*pairwise_backend, "pairwise_backend");
}

void RunConfig::validate_paths() const {
  auto require = [](const std::filesystem::path& p, const std::string& field) {
    if (p.empty()) raise(Errc::InvalidConfig, "paths." + field + " is required");
    if (!std::filesystem::exists(p))
      raise(Errc::InvalidConfig, "paths." + field + " does not exist: " + p.string());
  };
  require(paths.runs, "runs");
  require(paths.qrels, "qrels");
  require(paths.passages, "passages");
  require(paths.topics, "topics");
  if (paths.output.empty()) raise(Errc::InvalidConfig, "paths.output is required");
}

namespace {

nlohmann::json backend_to_json(const RunConfig::BackendChoice& choice) {
  nlohmann::json json{{"kind", choice.kind}};
  if (choice.is_remote()) {
    json["endpoint"] = choice.remote.endpoint;
    json["model"] = choice.remote.model;
    json["top_p"] = choice.remote.top_p;
    json["temperature"] = choice.remote.temperature;
    json["frequency_penalty"] = choice.remote.frequency_penalty;
    json["presence_penalty"] = choice.remote.presence_penalty;
    json["timeout_ms"] = choice.remote.timeout.count();
    json["max_retries"] = choice.remote.max_retries;
    json["max_in_flight"] = choice.remote.max_in_flight;
    json["credential_env"] = choice.remote.credential_env;
  } else {
    if (choice.kind == "recency_greedy") json["lambda"] = choice.lambda;
    if (choice.kind == "coin_flip") json["seed"] = choice.seed;
  }
  return json;
}

RunConfig::BackendChoice backend_from_json(const nlohmann::json& json) {
  RunConfig::BackendChoice choice;
  choice.kind = json.value("kind", "identity");
  if (choice.is_remote()) {
    choice.remote.endpoint = json.value("endpoint", "");
    choice.remote.model = json.value("model", "");
    choice.remote.top_p = json.value("top_p", 1.0);
    choice.remote.temperature = json.value("temperature", 0.0);
    choice.remote.frequency_penalty = json.value("frequency_penalty", 0.0);
    choice.remote.presence_penalty = json.value("presence_penalty", 0.0);
    choice.remote.timeout = std::chrono::milliseconds(json.value("timeout_ms", 30000));
    choice.remote.max_retries = json.value("max_retries", 3);
    choice.remote.max_in_flight = json.value("max_in_flight", 4);
    choice.remote.credential_env = json.value("credential_env", "RECBIAS_API_KEY");
  } else {
    choice.lambda = json.value("lambda", 0.0);
    choice.seed = json.value("seed", std::uint64_t{0});
  }
  return choice;
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  nlohmann::json level_map = nlohmann::json::object();
  for (const auto& [grade, level] : metrics.level_map.grade_to_level)
    level_map[std::to_string(grade)] = level;

  nlohmann::json json{
      {"schema_version", 1},
      {"paths",
       {{"runs", paths.runs.string()},
        {"qrels", paths.qrels.string()},
        {"passages", paths.passages.string()},
        {"topics", paths.topics.string()},
        {"output", paths.output.string()}}},
      {"backend", backend_to_json(backend)},
      {"schedule",
       {{"newest_year", schedule.listwise.newest_year},
        {"month_day", schedule.listwise.month_day},
        {"step_years", schedule.listwise.step_years},
        {"template", schedule.listwise.template_text},
        {"pairwise_old_year", schedule.pairwise_old_year},
        {"pairwise_fresh_year", schedule.pairwise_fresh_year}}},
      {"window", {{"size", window.window}, {"stride", window.stride}, {"passes", window.passes}}},
      {"experiments", {{"listwise", experiments.listwise}, {"pairwise", experiments.pairwise}}},
      {"metrics",
       {{"ys_k", metrics.ys_k},
        {"level_map", level_map},
        {"pair_cap", metrics.pair_cap ? nlohmann::json(*metrics.pair_cap) : nlohmann::json()},
        {"seed", metrics.seed},
        {"max_grade", metrics.max_grade}}},
      {"parse_mode", parse_mode == ParseMode::strict ? "strict" : "repair"},
      {"top_k", top_k},
      {"workers", workers},
      {"model_label", model_label},
      {"collection_label", collection_label},
  };
  if (pairwise_backend) json["pairwise_backend"] = backend_to_json(*pairwise_backend);
  return json;
}

RunConfig RunConfig::from_json(const nlohmann::json& json) {
  RunConfig config;
  if (json.contains("paths")) {
    const auto& p = json.at("paths");
    config.paths.runs = p.value("runs", "");
    config.paths.qrels = p.value("qrels", "");
    config.paths.passages = p.value("passages", "");
    config.paths.topics = p.value("topics", "");
    config.paths.output = p.value("output", "");
  }
  if (json.contains("backend")) config.backend = backend_from_json(json.at("backend"));
  if (json.contains("pairwise_backend"))
    config.pairwise_backend = backend_from_json(json.at("pairwise_backend"));
  if (json.contains("schedule")) {
    const auto& s = json.at("schedule");
    config.schedule.listwise.newest_year = s.value("newest_year", 2025);
    config.schedule.listwise.month_day = s.value("month_day", "01/01");
    config.schedule.listwise.step_years = s.value("step_years", 1);
    config.schedule.listwise.template_text = s.value("template", "Published on {DATE}. ");
    config.schedule.pairwise_old_year = s.value("pairwise_old_year", 1980);
    config.schedule.pairwise_fresh_year = s.value("pairwise_fresh_year", 2025);
  }
  if (json.contains("window")) {
    const auto& w = json.at("window");
    config.window.window = w.value("size", 10);
    config.window.stride = w.value("stride", 5);
    config.window.passes = w.value("passes", 1);
  }
  if (json.contains("experiments")) {
    const auto& e = json.at("experiments");
    config.experiments.listwise = e.value("listwise", true);
    config.experiments.pairwise = e.value("pairwise", true);
  }
  if (json.contains("metrics")) {
    const auto& m = json.at("metrics");
    if (m.contains("ys_k")) config.metrics.ys_k = m.at("ys_k").get<std::vector<int>>();
    if (m.contains("level_map")) {
      config.metrics.level_map.grade_to_level.clear();
      for (const auto& [grade, level] : m.at("level_map").items())
        config.metrics.level_map.grade_to_level[std::stoi(grade)] = level.get<int>();
    }
    if (m.contains("pair_cap") && !m.at("pair_cap").is_null())
      config.metrics.pair_cap = m.at("pair_cap").get<std::size_t>();
    config.metrics.seed = m.value("seed", std::uint64_t{42});
    config.metrics.max_grade = m.value("max_grade", 3);
  }
  if (json.contains("parse_mode")) {
    auto mode = json.at("parse_mode").get<std::string>();
    if (mode == "strict")
      config.parse_mode = ParseMode::strict;
    else if (mode == "repair")
      config.parse_mode = ParseMode::repair;
    else
      raise(Errc::InvalidConfig, "parse_mode must be strict or repair, got '" + mode + "'");
  }
  config.top_k = json.value("top_k", 100);
  config.workers = json.value("workers", 4);
  config.model_label = json.value("model_label", config.backend.kind);
  config.collection_label = json.value("collection_label", "collection");
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) raise(Errc::InvalidConfig, "cannot open config file " + file.string());
  nlohmann::json json = nlohmann::json::parse(in, nullptr, false);
  if (json.is_discarded()) raise(Errc::InvalidConfig, "config file is not valid JSON: " + file.string());
  RunConfig config = from_json(json);
  config.validate();
  return config;
}

std::string RunConfig::hash() const {
  // Semantic identity only: where the inputs live (and how many workers
  // process them) cannot change any result, so runs stay byte-comparable
  // across machines and directories.
  nlohmann::json json = to_json();
  json.erase("paths");
  json.erase("workers");
  return sha256_hex(json.dump());
}

std::shared_ptr<Backend> make_backend(const RunConfig::BackendChoice& choice,
                                      std::shared_ptr<Transport> transport) {
  if (choice.is_remote()) return make_remote_backend(choice.remote, std::move(transport));
  return make_mock_backend(choice.mock_spec());
}

}  // namespace recbias
