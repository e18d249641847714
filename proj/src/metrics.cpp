#include "recbias/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "recbias/errors.hpp"

namespace recbias {

namespace {

/// id -> rank map with duplicate detection.
std::map<std::string, int> rank_index(const RankedList& list) {
  std::map<std::string, int> index;
  for (const auto& entry : list.entries)
    if (!index.emplace(entry.passage_id, entry.rank).second)
      raise(Errc::DuplicateEntry, "duplicate passage " + entry.passage_id);
  return index;
}

void require_same_ids(const RankedList& before, const RankedList& after) {
  if (before.entries.size() != after.entries.size())
    raise(Errc::IdSetMismatch, "lists differ in length (" + std::to_string(before.entries.size()) +
                                   " vs " + std::to_string(after.entries.size()) + ")");
}

int injected_year_of(const PairedSerps& paired, const std::string& id) {
  auto it = paired.injected_year.find(id);
  if (it == paired.injected_year.end())
    raise(Errc::InvalidArgument, "missing injected year for passage " + id);
  return it->second;
}

/// Merge-sort inversion count.
long long count_inversions(std::vector<int>& values) {
  std::vector<int> buffer(values.size());
  std::function<long long(std::size_t, std::size_t)> go = [&](std::size_t lo,
                                                              std::size_t hi) -> long long {
    if (hi - lo < 2) return 0;
    std::size_t mid = lo + (hi - lo) / 2;
    long long count = go(lo, mid) + go(mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
      if (values[i] <= values[j]) {
        buffer[k++] = values[i++];
      } else {
        count += static_cast<long long>(mid - i);
        buffer[k++] = values[j++];
      }
    }
    while (i < mid) buffer[k++] = values[i++];
    while (j < hi) buffer[k++] = values[j++];
    std::copy(buffer.begin() + static_cast<long>(lo), buffer.begin() + static_cast<long>(hi),
              values.begin() + static_cast<long>(lo));
    return count;
  };
  return go(0, values.size());
}

}  // namespace

std::vector<ShiftRecord> rank_shifts(const RankedList& before, const RankedList& after) {
  require_same_ids(before, after);
  auto after_rank = rank_index(after);
  std::vector<ShiftRecord> shifts;
  shifts.reserve(before.entries.size());
  for (const auto& entry : before.entries) {
    auto it = after_rank.find(entry.passage_id);
    if (it == after_rank.end())
      raise(Errc::IdSetMismatch, "passage " + entry.passage_id + " missing from after-list");
    shifts.push_back(
        ShiftRecord{entry.passage_id, entry.rank, it->second, it->second - entry.rank});
  }
  return shifts;
}

double aars(const std::vector<ShiftRecord>& shifts) {
  if (shifts.empty()) raise(Errc::EmptyMetricInput, "no shift records");
  long long sum = 0;
  for (const auto& s : shifts) sum += std::llabs(s.delta);
  return static_cast<double>(sum) / static_cast<double>(shifts.size());
}

int alrs(const std::vector<ShiftRecord>& shifts) {
  if (shifts.empty()) raise(Errc::EmptyMetricInput, "no shift records");
  int best = 0;
  for (const auto& s : shifts) best = std::max(best, std::abs(s.delta));
  return best;
}

double maars(const std::vector<double>& per_topic_aars) {
  if (per_topic_aars.empty()) raise(Errc::EmptyMetricInput, "no topics");
  return std::accumulate(per_topic_aars.begin(), per_topic_aars.end(), 0.0) /
         static_cast<double>(per_topic_aars.size());
}

int alrs_all(const std::vector<int>& per_topic_alrs) {
  if (per_topic_alrs.empty()) raise(Errc::EmptyMetricInput, "no topics");
  return *std::max_element(per_topic_alrs.begin(), per_topic_alrs.end());
}

double year_shift_topk(const PairedSerps& paired, int k) {
  const int n = static_cast<int>(paired.before.entries.size());
  if (k < 1 || k > n)
    raise(Errc::KOutOfRange, "K=" + std::to_string(k) + " outside 1.." + std::to_string(n));
  require_same_ids(paired.before, paired.after);
  long long sum = 0;
  for (int i = 0; i < k; ++i) {
    sum += injected_year_of(paired, paired.after.entries[static_cast<std::size_t>(i)].passage_id);
    sum -= injected_year_of(paired, paired.before.entries[static_cast<std::size_t>(i)].passage_id);
  }
  return static_cast<double>(sum) / static_cast<double>(k);
}

std::vector<int> decile_group_sizes(int n) {
  std::vector<int> sizes;
  for (int start = 0; start < n; start += 10) sizes.push_back(std::min(10, n - start));
  return sizes;
}

std::vector<double> year_shift_groups(const PairedSerps& paired) {
  const int n = static_cast<int>(paired.before.entries.size());
  if (n < 10) raise(Errc::KOutOfRange, "grouped year shift needs N >= 10, got " + std::to_string(n));
  require_same_ids(paired.before, paired.after);
  std::vector<double> out;
  for (int start = 0; start < n; start += 10) {
    int size = std::min(10, n - start);
    long long sum = 0;
    for (int i = start; i < start + size; ++i) {
      sum += injected_year_of(paired, paired.after.entries[static_cast<std::size_t>(i)].passage_id);
      sum -= injected_year_of(paired, paired.before.entries[static_cast<std::size_t>(i)].passage_id);
    }
    out.push_back(static_cast<double>(sum) / static_cast<double>(size));
  }
  return out;
}

double kendall_tau(const RankedList& before, const RankedList& after) {
  require_same_ids(before, after);
  const std::size_t n = before.entries.size();
  if (n < 2) raise(Errc::TooFewSamples, "Kendall's tau needs at least 2 items");
  auto after_rank = rank_index(after);
  std::vector<int> sequence;
  sequence.reserve(n);
  for (const auto& entry : before.entries) {
    auto it = after_rank.find(entry.passage_id);
    if (it == after_rank.end())
      raise(Errc::IdSetMismatch, "passage " + entry.passage_id + " missing from after-list");
    sequence.push_back(it->second);
  }
  long long inversions = count_inversions(sequence);
  long long pairs = static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
  return 1.0 - 2.0 * static_cast<double>(inversions) / static_cast<double>(pairs);
}

TTestResult t_test_one_sample(const std::vector<double>& values, double mu0) {
  const std::size_t n = values.size();
  if (n < 2) raise(Errc::TooFewSamples, "t-test needs at least 2 values");
  double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double variance = ss / static_cast<double>(n - 1);
  if (variance <= 0.0) raise(Errc::ZeroVariance, "sample variance is zero");
  double se = std::sqrt(variance / static_cast<double>(n));
  TTestResult result;
  result.t = (mean - mu0) / se;
  result.df = static_cast<int>(n - 1);
  boost::math::students_t dist(static_cast<double>(result.df));
  result.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(result.t)));
  return result;
}

MeanStat mean_with_ttest(const std::vector<double>& values, double mu0) {
  if (values.empty()) raise(Errc::EmptyMetricInput, "no values to average");
  MeanStat stat;
  stat.value = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  stat.n = static_cast<int>(values.size());
  try {
    stat.ttest = t_test_one_sample(values, mu0);
  } catch (const Error& e) {
    if (e.code() != Errc::ZeroVariance && e.code() != Errc::TooFewSamples) throw;
  }
  return stat;
}

ListwiseTopicMetrics compute_listwise_topic_metrics(const PairedSerps& paired,
                                                    const std::vector<int>& ks) {
  ListwiseTopicMetrics m;
  m.topic_id = paired.topic_id;
  m.n = static_cast<int>(paired.before.entries.size());
  auto shifts = rank_shifts(paired.before, paired.after);
  m.aars_value = aars(shifts);
  m.alrs_value = alrs(shifts);
  m.tau = kendall_tau(paired.before, paired.after);
  for (int k : ks)
    if (k >= 1 && k <= m.n) m.ys[k] = year_shift_topk(paired, k);
  if (m.n >= 10) m.ysg = year_shift_groups(paired);
  return m;
}

std::vector<PairwiseTopicMetrics> compute_pairwise_topic_metrics(
    const std::vector<PairTrial>& trials) {
  std::map<std::string, PairwiseTopicMetrics> by_topic;
  for (const auto& trial : trials) {
    auto& topic = by_topic[trial.topic_id];
    topic.topic_id = trial.topic_id;
    auto& cell = topic.by_level[trial.level];
    ++cell.raw;
    ++topic.pooled.raw;
    if (trial.excluded) continue;
    ++cell.evaluated;
    ++topic.pooled.evaluated;
    if (trial.reversed) {
      ++cell.reversed;
      ++topic.pooled.reversed;
    }
  }
  std::vector<PairwiseTopicMetrics> out;
  out.reserve(by_topic.size());
  for (auto& [id, topic] : by_topic) out.push_back(std::move(topic));
  return out;
}

namespace {

RRLevelStat summarize_level(const std::vector<RRCounts>& cells) {
  RRLevelStat stat;
  std::vector<double> rates;
  for (const auto& cell : cells) {
    stat.reversed += cell.reversed;
    stat.evaluated += cell.evaluated;
    stat.raw += cell.raw;
    if (cell.evaluated > 0) rates.push_back(cell.rate());
  }
  if (!rates.empty()) {
    stat.mean_rr = mean_with_ttest(rates);
    stat.max_rr = *std::max_element(rates.begin(), rates.end());
  }
  return stat;
}

}  // namespace

RRSummary reversal_rates(const std::vector<PairTrial>& trials) {
  auto topics = compute_pairwise_topic_metrics(trials);
  RRSummary summary;
  std::set<int> levels;
  for (const auto& topic : topics)
    for (const auto& [level, cell] : topic.by_level) levels.insert(level);
  for (int level : levels) {
    std::vector<RRCounts> cells;
    for (const auto& topic : topics) {
      auto it = topic.by_level.find(level);
      if (it != topic.by_level.end()) cells.push_back(it->second);
    }
    summary.by_level[level] = summarize_level(cells);
  }
  std::vector<RRCounts> pooled;
  pooled.reserve(topics.size());
  for (const auto& topic : topics) pooled.push_back(topic.pooled);
  summary.pooled = summarize_level(pooled);
  return summary;
}

CollectionMetrics aggregate_listwise(const std::vector<ListwiseTopicMetrics>& topics) {
  if (topics.empty()) raise(Errc::EmptyMetricInput, "no topics to aggregate");
  CollectionMetrics out;
  out.topic_count = static_cast<int>(topics.size());

  std::vector<double> aars_values, tau_values;
  std::vector<int> alrs_values;
  for (const auto& t : topics) {
    aars_values.push_back(t.aars_value);
    alrs_values.push_back(t.alrs_value);
    tau_values.push_back(t.tau);
  }
  out.maars_stat = mean_with_ttest(aars_values);
  out.alrs_all_value = alrs_all(alrs_values);
  out.m_tau = mean_with_ttest(tau_values);

  std::set<int> ks;
  for (const auto& t : topics)
    for (const auto& [k, _] : t.ys) ks.insert(k);
  for (int k : ks) {
    std::vector<double> values;
    for (const auto& t : topics) {
      auto it = t.ys.find(k);
      if (it != t.ys.end()) values.push_back(it->second);
    }
    out.m_ys[k] = mean_with_ttest(values);
  }

  std::size_t max_groups = 0;
  for (const auto& t : topics) max_groups = std::max(max_groups, t.ysg.size());
  for (std::size_t g = 0; g < max_groups; ++g) {
    std::vector<double> values;
    for (const auto& t : topics)
      if (g < t.ysg.size()) values.push_back(t.ysg[g]);
    out.m_ysg.push_back(mean_with_ttest(values));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const MeanStat& stat) {
  nlohmann::json json{{"value", stat.value}, {"n_topics", stat.n}};
  if (stat.ttest) {
    json["t"] = stat.ttest->t;
    json["p"] = stat.ttest->p;
    json["df"] = stat.ttest->df;
  } else {
    json["t"] = nullptr;
    json["p"] = nullptr;
    json["df"] = nullptr;
  }
  return json;
}

MeanStat mean_stat_from_json(const nlohmann::json& json) {
  MeanStat stat;
  stat.value = json.at("value").get<double>();
  stat.n = json.at("n_topics").get<int>();
  if (json.contains("t") && !json.at("t").is_null()) {
    TTestResult tt;
    tt.t = json.at("t").get<double>();
    tt.p = json.at("p").get<double>();
    tt.df = json.at("df").get<int>();
    stat.ttest = tt;
  }
  return stat;
}

nlohmann::json to_json(const RRLevelStat& stat) {
  return {{"mean", to_json(stat.mean_rr)}, {"max", stat.max_rr},     {"reversed", stat.reversed},
          {"evaluated", stat.evaluated},   {"raw", stat.raw}};
}

RRLevelStat rr_level_stat_from_json(const nlohmann::json& json) {
  RRLevelStat stat;
  stat.mean_rr = mean_stat_from_json(json.at("mean"));
  stat.max_rr = json.at("max").get<double>();
  stat.reversed = json.at("reversed").get<long>();
  stat.evaluated = json.at("evaluated").get<long>();
  stat.raw = json.at("raw").get<long>();
  return stat;
}

nlohmann::json to_json(const RRSummary& summary) {
  nlohmann::json levels = nlohmann::json::object();
  for (const auto& [level, stat] : summary.by_level) levels[std::to_string(level)] = to_json(stat);
  return {{"by_level", levels}, {"all", to_json(summary.pooled)}};
}

RRSummary rr_summary_from_json(const nlohmann::json& json) {
  RRSummary summary;
  for (const auto& [key, value] : json.at("by_level").items())
    summary.by_level[std::stoi(key)] = rr_level_stat_from_json(value);
  summary.pooled = rr_level_stat_from_json(json.at("all"));
  return summary;
}

nlohmann::json to_json(const CollectionMetrics& metrics) {
  nlohmann::json m_ys = nlohmann::json::object();
  for (const auto& [k, stat] : metrics.m_ys) m_ys[std::to_string(k)] = to_json(stat);
  nlohmann::json m_ysg = nlohmann::json::array();
  for (const auto& stat : metrics.m_ysg) m_ysg.push_back(to_json(stat));
  nlohmann::json json{{"topic_count", metrics.topic_count},
                      {"maars", to_json(metrics.maars_stat)},
                      {"alrs_all", metrics.alrs_all_value},
                      {"m_ys", m_ys},
                      {"m_ysg", m_ysg},
                      {"m_tau", to_json(metrics.m_tau)}};
  if (metrics.rr) json["rr"] = to_json(*metrics.rr);
  return json;
}

CollectionMetrics collection_metrics_from_json(const nlohmann::json& json) {
  CollectionMetrics metrics;
  metrics.topic_count = json.at("topic_count").get<int>();
  metrics.maars_stat = mean_stat_from_json(json.at("maars"));
  metrics.alrs_all_value = json.at("alrs_all").get<int>();
  for (const auto& [key, value] : json.at("m_ys").items())
    metrics.m_ys[std::stoi(key)] = mean_stat_from_json(value);
  for (const auto& value : json.at("m_ysg")) metrics.m_ysg.push_back(mean_stat_from_json(value));
  metrics.m_tau = mean_stat_from_json(json.at("m_tau"));
  if (json.contains("rr")) metrics.rr = rr_summary_from_json(json.at("rr"));
  return metrics;
}

}  // namespace recbias
