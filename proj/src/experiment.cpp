#include "recbias/experiment.hpp"

#include <algorithm>

#include "recbias/errors.hpp"
#include "recbias/hash.hpp"
#include "recbias/log.hpp"
#include "recbias/rng.hpp"

namespace recbias {

void WindowPlan::validate() const {
  if (window < 1) raise(Errc::InvalidConfig, "window size must be >= 1");
  if (stride < 1 || stride > window)
    raise(Errc::InvalidConfig, "stride must satisfy 1 <= stride <= window");
  if (passes < 1) raise(Errc::InvalidConfig, "passes must be >= 1");
}

std::vector<int> window_starts(int n, const WindowPlan& plan) {
  plan.validate();
  std::vector<int> starts;
  int start = std::max(1, n - plan.window + 1);
  for (;;) {
    starts.push_back(start);
    if (start == 1) break;
    start = std::max(1, start - plan.stride);
  }
  return starts;
}

RankedList slide_rerank(Backend& backend, const Topic& topic, const std::vector<WindowItem>& items,
                        const WindowPlan& plan, ParseMode mode, ParseEvents* events) {
  const int n = static_cast<int>(items.size());
  if (n == 0) raise(Errc::EmptyInput, "nothing to rerank for topic " + topic.id);
  if (plan.window > n)
    log::warn("topic ", topic.id, ": window ", plan.window, " exceeds list size ", n);

  std::vector<WindowItem> order = items;
  for (int pass = 0; pass < plan.passes; ++pass) {
    for (int start : window_starts(n, plan)) {
      int lo = start - 1;
      int size = std::min(plan.window, n - lo);
      if (size < 2) continue;
      std::vector<WindowItem> window(order.begin() + lo, order.begin() + lo + size);
      WindowContext context{topic.text, window};
      ListwisePrompt prompt = build_listwise_prompt(topic, window);
      Permutation permutation = rank_window(backend, prompt, context, mode, events);
      for (int i = 0; i < size; ++i)
        order[static_cast<std::size_t>(lo + i)] =
            window[static_cast<std::size_t>(permutation.order[static_cast<std::size_t>(i)] - 1)];
    }
  }

  RankedList out;
  out.topic_id = topic.id;
  out.entries.reserve(order.size());
  for (int i = 0; i < n; ++i)
    out.entries.push_back(RunEntry{order[static_cast<std::size_t>(i)].passage_id, i + 1, 0.0});
  return out;
}

namespace {

std::vector<WindowItem> plain_items(const RankedList& list, const PassageStore& passages) {
  std::vector<WindowItem> items;
  items.reserve(list.entries.size());
  for (const auto& entry : list.entries) {
    const Passage& passage = passages.at(entry.passage_id);
    items.push_back(WindowItem{passage.id, passage.text, passage.text, std::nullopt});
  }
  return items;
}

}  // namespace

PairedSerps run_listwise(Backend& backend, const Topic& topic, const RankedList& baseline,
                         const PassageStore& passages, const DateSchedule& schedule,
                         const WindowPlan& plan, ParseMode mode, ParseEvents* events) {
  PairedSerps serps;
  serps.topic_id = topic.id;

  serps.before = slide_rerank(backend, topic, plain_items(baseline, passages), plan, mode, events);

  // Dates follow the post-rerank SERP order: rank 1 oldest, rank N newest.
  auto injected = inject_listwise(serps.before, passages, schedule);
  std::vector<WindowItem> dated;
  dated.reserve(injected.size());
  for (const auto& ip : injected) {
    serps.injected_year[ip.passage.id] = ip.year;
    dated.push_back(WindowItem{ip.passage.id, ip.rendered_text, ip.passage.text, ip.year});
  }

  serps.after = slide_rerank(backend, topic, dated, plan, mode, events);
  return serps;
}

std::optional<int> LevelMap::level_of(int grade) const {
  auto it = grade_to_level.find(grade);
  if (it == grade_to_level.end()) return std::nullopt;
  return it->second;
}

std::vector<PairDef> enumerate_pairs(const Qrels& qrels, const std::string& topic_id,
                                     const LevelMap& levels, std::optional<std::size_t> cap,
                                     std::uint64_t seed) {
  auto topic_it = qrels.by_topic().find(topic_id);
  std::vector<PairDef> out;
  if (topic_it == qrels.by_topic().end()) return out;

  // level -> sorted judged ids (map iteration is already lexicographic)
  std::map<int, std::vector<std::string>> groups;
  for (const auto& [passage_id, grade] : topic_it->second)
    if (auto level = levels.level_of(grade)) groups[*level].push_back(passage_id);

  for (const auto& [level, ids] : groups) {
    std::vector<PairDef> level_pairs;
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        level_pairs.push_back(PairDef{level, ids[i], ids[j]});
    if (cap && level_pairs.size() > *cap) {
      auto keep = sample_indices(level_pairs.size(), *cap,
                                 seed ^ sha256_u64(topic_id + "\x1f" + std::to_string(level)));
      std::vector<PairDef> sampled;
      sampled.reserve(keep.size());
      for (auto idx : keep) sampled.push_back(level_pairs[idx]);
      level_pairs = std::move(sampled);
    }
    out.insert(out.end(), level_pairs.begin(), level_pairs.end());
  }
  return out;
}


namespace {

bool parse_failure(Errc code) {
  return code == Errc::NoPreferenceFound || code == Errc::AmbiguousPreference ||
         code == Errc::NoIdentifiersFound || code == Errc::NoMatch ||
         code == Errc::DuplicateId || code == Errc::OutOfRange || code == Errc::Incomplete;
}

}  // namespace

std::vector<PairTrial> run_pairwise(Backend& backend, const Topic& topic,
                                    const PassageStore& passages,
                                    const std::vector<PairDef>& pairs,
                                    const DateSchedule& schedule, int old_year, int fresh_year,
                                    ParseMode mode, ParseEvents* events) {
  std::vector<PairTrial> trials;
  trials.reserve(pairs.size());
  for (const auto& pair : pairs) {
    const Passage& pa = passages.at(pair.passage_a);
    const Passage& pb = passages.at(pair.passage_b);

    PairTrial trial;
    trial.topic_id = topic.id;
    trial.level = pair.level;
    trial.passage_a = pair.passage_a;
    trial.passage_b = pair.passage_b;

    WindowItem item_a{pa.id, pa.text, pa.text, std::nullopt};
    WindowItem item_b{pb.id, pb.text, pb.text, std::nullopt};
    PairwisePrompt round1_prompt = build_pairwise_prompt(topic, item_a, item_b);
    PairContext round1_context{topic.text, item_a, item_b};
    try {
      trial.round1 = prefer(backend, round1_prompt, round1_context, mode, events);
    } catch (const Error& e) {
      if (!parse_failure(e.code())) throw;
      log::warn("topic ", topic.id, " pair (", pa.id, ", ", pb.id,
                "): round 1 unparseable, trial excluded (", e.what(), ")");
      trial.excluded = true;
      trials.push_back(std::move(trial));
      continue;
    }

    // Round 2: winner carries the old date, loser the fresh one; A/B
    // positions are identical to round 1.
    const bool a_won = *trial.round1 == Preference::A;
    auto [old_dated, fresh_dated] =
        inject_pairwise(a_won ? pa : pb, a_won ? pb : pa, schedule, old_year, fresh_year);
    const InjectedPassage& dated_a = a_won ? old_dated : fresh_dated;
    const InjectedPassage& dated_b = a_won ? fresh_dated : old_dated;
    WindowItem dated_item_a{pa.id, dated_a.rendered_text, pa.text, dated_a.year};
    WindowItem dated_item_b{pb.id, dated_b.rendered_text, pb.text, dated_b.year};
    PairwisePrompt round2_prompt = build_pairwise_prompt(topic, dated_item_a, dated_item_b);
    PairContext round2_context{topic.text, dated_item_a, dated_item_b};
    try {
      trial.round2 = prefer(backend, round2_prompt, round2_context, mode, events);
    } catch (const Error& e) {
      if (!parse_failure(e.code())) throw;
      log::warn("topic ", topic.id, " pair (", pa.id, ", ", pb.id,
                "): round 2 unparseable, trial excluded (", e.what(), ")");
      trial.excluded = true;
      trials.push_back(std::move(trial));
      continue;
    }

    trial.reversed = *trial.round1 != *trial.round2;
    trials.push_back(std::move(trial));
  }
  return trials;
}

}  // namespace recbias
