#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recbias/serps.hpp"

namespace recbias {

struct ShiftRecord {
  std::string passage_id;
  int r_before = 0;
  int r_after = 0;
  int delta = 0;  // r_after - r_before
};

/// One record per passage, ordered by before-rank. Lists must hold the same
/// id set.
std::vector<ShiftRecord> rank_shifts(const RankedList& before, const RankedList& after);

/// Mean absolute displacement across the SERP.
double aars(const std::vector<ShiftRecord>& shifts);

/// Largest absolute displacement.
int alrs(const std::vector<ShiftRecord>& shifts);

/// Collection-level mean of per-topic AARS values.
double maars(const std::vector<double>& per_topic_aars);

/// Collection-level maximum of per-topic ALRS values.
int alrs_all(const std::vector<int>& per_topic_alrs);

/// Mean injected-year change over the top-K positions (after minus before).
double year_shift_topk(const PairedSerps& paired, int k);

/// Year shift per rank decile; for N not a multiple of 10 the final group is
/// partial. Requires N >= 10.
std::vector<double> year_shift_groups(const PairedSerps& paired);

/// Sizes of the groups year_shift_groups uses for a list of length n.
std::vector<int> decile_group_sizes(int n);

/// No-ties Kendall rank correlation between the two orderings, computed with
/// an O(n log n) merge count.
double kendall_tau(const RankedList& before, const RankedList& after);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  int df = 0;

  bool operator==(const TTestResult&) const = default;
};

/// Two-sided one-sample t-test of `values` against mu0. Requires >= 2 values
/// and nonzero sample variance.
TTestResult t_test_one_sample(const std::vector<double>& values, double mu0 = 0.0);

/// A reported mean plus its significance test (absent when the test is
/// undefined: fewer than two samples or zero variance).
struct MeanStat {
  double value = 0.0;
  int n = 0;
  std::optional<TTestResult> ttest;

  bool significant() const { return ttest && ttest->p < 0.05; }
  bool operator==(const MeanStat&) const = default;
};

MeanStat mean_with_ttest(const std::vector<double>& values, double mu0 = 0.0);

// ---------------------------------------------------------------------------
// Per-topic and collection-level aggregates

struct ListwiseTopicMetrics {
  std::string topic_id;
  int n = 0;
  double aars_value = 0.0;
  int alrs_value = 0;
  double tau = 0.0;
  std::map<int, double> ys;       // K -> YS^(K), for each configured K <= n
  std::vector<double> ysg;        // per decile group
};

ListwiseTopicMetrics compute_listwise_topic_metrics(const PairedSerps& paired,
                                                    const std::vector<int>& ks);

struct RRCounts {
  long reversed = 0;
  long evaluated = 0;
  long raw = 0;  // includes excluded trials

  double rate() const { return evaluated > 0 ? static_cast<double>(reversed) / evaluated : 0.0; }
  bool operator==(const RRCounts&) const = default;
};

struct PairwiseTopicMetrics {
  std::string topic_id;
  std::map<int, RRCounts> by_level;
  RRCounts pooled;
};

std::vector<PairwiseTopicMetrics> compute_pairwise_topic_metrics(
    const std::vector<PairTrial>& trials);

struct RRLevelStat {
  MeanStat mean_rr;   // over topics with >= 1 evaluated pair at this level
  double max_rr = 0.0;
  long reversed = 0;
  long evaluated = 0;
  long raw = 0;

  bool operator==(const RRLevelStat&) const = default;
};

struct RRSummary {
  std::map<int, RRLevelStat> by_level;
  RRLevelStat pooled;

  bool operator==(const RRSummary&) const = default;
};

/// Mean and max reversal rate per level and pooled across levels.
RRSummary reversal_rates(const std::vector<PairTrial>& trials);

struct CollectionMetrics {
  int topic_count = 0;
  MeanStat maars_stat;
  int alrs_all_value = 0;
  std::map<int, MeanStat> m_ys;
  std::vector<MeanStat> m_ysg;
  MeanStat m_tau;
  std::optional<RRSummary> rr;

  bool operator==(const CollectionMetrics&) const = default;
};

CollectionMetrics aggregate_listwise(const std::vector<ListwiseTopicMetrics>& topics);

nlohmann::json to_json(const MeanStat& stat);
MeanStat mean_stat_from_json(const nlohmann::json& json);
nlohmann::json to_json(const RRLevelStat& stat);
RRLevelStat rr_level_stat_from_json(const nlohmann::json& json);
nlohmann::json to_json(const RRSummary& summary);
RRSummary rr_summary_from_json(const nlohmann::json& json);
nlohmann::json to_json(const CollectionMetrics& metrics);
CollectionMetrics collection_metrics_from_json(const nlohmann::json& json);

}  // namespace recbias
