#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recbias/backend.hpp"
#include "recbias/experiment.hpp"
#include "recbias/injection.hpp"

namespace recbias {

/// Declarative run description, loaded from a JSON config file and
/// snapshotted into every run directory.
struct RunConfig {
  struct Paths {
    std::filesystem::path runs;
    std::filesystem::path qrels;
    std::filesystem::path passages;
    std::filesystem::path topics;
    std::filesystem::path output;
  } paths;

  struct BackendChoice {
    std::string kind = "identity";  // mock kind or "remote"
    // remote settings
    BackendConfig remote;
    // mock settings
    double lambda = 0.0;
    std::uint64_t seed = 0;

    bool is_remote() const { return kind == "remote"; }
    MockSpec mock_spec() const;
    nlohmann::json signature() const;
  };

  BackendChoice backend;
  std::optional<BackendChoice> pairwise_backend;  // defaults to `backend`

  struct Schedule {
    DateSchedule listwise;
    int pairwise_old_year = 1980;
    int pairwise_fresh_year = 2025;
  } schedule;

  WindowPlan window;

  struct Experiments {
    bool listwise = true;
    bool pairwise = true;
  } experiments;

  struct Metrics {
    std::vector<int> ys_k = {10, 20, 30, 50};
    LevelMap level_map;
    std::optional<std::size_t> pair_cap;
    std::uint64_t seed = 42;
    int max_grade = 3;
  } metrics;

  ParseMode parse_mode = ParseMode::repair;
  int top_k = 100;
  int workers = 4;
  std::string model_label = "identity";
  std::string collection_label = "collection";

  const BackendChoice& pairwise_choice() const {
    return pairwise_backend ? *pairwise_backend : backend;
  }

  /// Structural validation (value ranges; not path existence).
  void validate() const;
  /// Path existence checks for the enabled experiments.
  void validate_paths() const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& json);
  static RunConfig load(const std::filesystem::path& file);

  /// Hash over the full normalized config; identifies a run.
  std::string hash() const;
};

/// Instantiate the configured backend (no cache layer).
std::shared_ptr<Backend> make_backend(const RunConfig::BackendChoice& choice,
                                      std::shared_ptr<Transport> transport = nullptr);

}  // namespace recbias
