#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recbias/backend.hpp"
#include "recbias/injection.hpp"
#include "recbias/serps.hpp"

namespace recbias {

/// Sliding-window schedule: the deepest window is processed first, each
/// subsequent window moves `stride` ranks toward the top.
struct WindowPlan {
  int window = 10;
  int stride = 5;
  int passes = 1;

  void validate() const;
};

/// Window start ranks (1-based) in processing order for a list of length n.
std::vector<int> window_starts(int n, const WindowPlan& plan);

/// Rerank a list by sliding the backend over it bottom-up. `items` is the
/// current rank order; returns the same ids renumbered 1..N.
RankedList slide_rerank(Backend& backend, const Topic& topic, const std::vector<WindowItem>& items,
                        const WindowPlan& plan, ParseMode mode, ParseEvents* events = nullptr);

/// Full listwise protocol for one topic: rerank plain texts, date the
/// resulting SERP (rank 1 oldest), rerank again.
PairedSerps run_listwise(Backend& backend, const Topic& topic, const RankedList& baseline,
                         const PassageStore& passages, const DateSchedule& schedule,
                         const WindowPlan& plan, ParseMode mode, ParseEvents* events = nullptr);

/// Grade -> paper relevance level. Grades without a mapping are skipped.
struct LevelMap {
  std::map<int, int> grade_to_level = {{0, 0}, {1, 1}, {2, 2}, {3, 2}};

  std::optional<int> level_of(int grade) const;
};

struct PairDef {
  int level = 0;
  std::string passage_a;  // lexicographically smaller id
  std::string passage_b;
};

/// All unordered same-level pairs of judged passages for a topic, in
/// lexicographic order; optionally a seeded uniform sample of `cap` pairs
/// per level.
std::vector<PairDef> enumerate_pairs(const Qrels& qrels, const std::string& topic_id,
                                     const LevelMap& levels,
                                     std::optional<std::size_t> cap = std::nullopt,
                                     std::uint64_t seed = 0);

/// Two-round pairwise protocol: plain round, then the round-1 winner dated
/// old_year and the loser fresh_year, positions unchanged. Unparseable
/// responses mark the trial excluded.
std::vector<PairTrial> run_pairwise(Backend& backend, const Topic& topic,
                                    const PassageStore& passages,
                                    const std::vector<PairDef>& pairs,
                                    const DateSchedule& schedule, int old_year, int fresh_year,
                                    ParseMode mode, ParseEvents* events = nullptr);

}  // namespace recbias
