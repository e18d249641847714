#include "recbias/serps.hpp"

#include "recbias/errors.hpp"

namespace recbias {

namespace {

nlohmann::json list_to_json(const RankedList& list) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : list.entries)
    entries.push_back({{"id", e.passage_id}, {"rank", e.rank}, {"score", e.score}});
  return entries;
}

RankedList list_from_json(const std::string& topic_id, const nlohmann::json& json) {
  RankedList list;
  list.topic_id = topic_id;
  for (const auto& e : json)
    list.entries.push_back(RunEntry{e.at("id").get<std::string>(), e.at("rank").get<int>(),
                                    e.at("score").get<double>()});
  validate_ranked_list(list);
  return list;
}

std::string preference_str(const std::optional<Preference>& p) {
  if (!p) return "";
  return std::string(1, preference_letter(*p));
}

std::optional<Preference> preference_from(const nlohmann::json& json) {
  if (json.is_null()) return std::nullopt;
  auto s = json.get<std::string>();
  if (s == "A") return Preference::A;
  if (s == "B") return Preference::B;
  raise(Errc::InvalidArgument, "preference must be A or B, got '" + s + "'");
}

}  // namespace

nlohmann::json to_json(const PairedSerps& serps) {
  nlohmann::json years = nlohmann::json::object();
  for (const auto& [id, year] : serps.injected_year) years[id] = year;
  return {{"schema_version", kSchemaVersion},
          {"topic", serps.topic_id},
          {"before", list_to_json(serps.before)},
          {"after", list_to_json(serps.after)},
          {"injected_year", years}};
}

PairedSerps paired_serps_from_json(const nlohmann::json& json) {
  PairedSerps serps;
  serps.topic_id = json.at("topic").get<std::string>();
  serps.before = list_from_json(serps.topic_id, json.at("before"));
  serps.after = list_from_json(serps.topic_id, json.at("after"));
  for (const auto& [id, year] : json.at("injected_year").items())
    serps.injected_year[id] = year.get<int>();
  return serps;
}

nlohmann::json to_json(const PairTrial& trial) {
  return {{"schema_version", kSchemaVersion},
          {"topic", trial.topic_id},
          {"level", trial.level},
          {"a", trial.passage_a},
          {"b", trial.passage_b},
          {"round1", trial.round1 ? nlohmann::json(preference_str(trial.round1)) : nlohmann::json()},
          {"round2", trial.round2 ? nlohmann::json(preference_str(trial.round2)) : nlohmann::json()},
          {"reversed", trial.reversed},
          {"excluded", trial.excluded}};
}

PairTrial pair_trial_from_json(const nlohmann::json& json) {
  PairTrial trial;
  trial.topic_id = json.at("topic").get<std::string>();
  trial.level = json.at("level").get<int>();
  trial.passage_a = json.at("a").get<std::string>();
  trial.passage_b = json.at("b").get<std::string>();
  trial.round1 = preference_from(json.at("round1"));
  trial.round2 = preference_from(json.at("round2"));
  trial.reversed = json.at("reversed").get<bool>();
  trial.excluded = json.at("excluded").get<bool>();
  return trial;
}

}  // namespace recbias
