#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "recbias/corpus.hpp"
#include "recbias/protocol.hpp"

namespace recbias {

inline constexpr int kSchemaVersion = 1;

/// Pre- and post-injection reranked lists for one topic, plus the year each
/// passage carried. Both lists hold the identical id set; years follow the
/// schedule applied to `before` order (rank 1 oldest).
struct PairedSerps {
  std::string topic_id;
  RankedList before;
  RankedList after;
  std::map<std::string, int> injected_year;
};

/// One pairwise preference trial. reversed == (round1 != round2); excluded
/// trials had an unparseable response and never count in RR denominators.
struct PairTrial {
  std::string topic_id;
  int level = 0;
  std::string passage_a;
  std::string passage_b;
  std::optional<Preference> round1;
  std::optional<Preference> round2;
  bool reversed = false;
  bool excluded = false;
};

nlohmann::json to_json(const PairedSerps& serps);
PairedSerps paired_serps_from_json(const nlohmann::json& json);

nlohmann::json to_json(const PairTrial& trial);
PairTrial pair_trial_from_json(const nlohmann::json& json);

}  // namespace recbias
