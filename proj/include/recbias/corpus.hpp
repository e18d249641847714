#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace recbias {

struct Topic {
  std::string id;
  std::string text;
};

struct Passage {
  std::string id;
  std::string text;
};

struct RunEntry {
  std::string passage_id;
  int rank = 0;  // 1-based
  double score = 0.0;
};

/// One topic's ranked passage list (a SERP). Invariant: entries sorted by
/// rank, ranks exactly 1..N, passage ids unique.
struct RankedList {
  std::string topic_id;
  std::vector<RunEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::vector<std::string> passage_ids() const;
};

/// Throws if the contiguous-ranks / unique-ids invariant is violated.
void validate_ranked_list(const RankedList& list);

/// Relevance judgments: (topic, passage) -> grade in [0, max_grade].
class Qrels {
 public:
  explicit Qrels(int max_grade = 3);

  void add(const std::string& topic_id, const std::string& passage_id, int grade);
  std::optional<int> grade(const std::string& topic_id, const std::string& passage_id) const;
  bool has_topic(const std::string& topic_id) const;
  int max_grade() const { return max_grade_; }
  std::size_t size() const { return count_; }

  /// topic -> (passage -> grade), ordered.
  const std::map<std::string, std::map<std::string, int>>& by_topic() const { return by_topic_; }

 private:
  int max_grade_;
  std::size_t count_ = 0;
  std::map<std::string, std::map<std::string, int>> by_topic_;
};

class PassageStore {
 public:
  void add(Passage passage);
  const Passage* find(const std::string& id) const;
  const Passage& at(const std::string& id) const;
  std::size_t size() const { return passages_.size(); }

 private:
  std::map<std::string, Passage> passages_;
};

using RunMap = std::map<std::string, RankedList>;
using TopicMap = std::map<std::string, Topic>;

/// TREC run format: `qid Q0 docid rank score tag`, whitespace-separated.
/// The rank column is validated but ignored; ranks are recomputed from
/// scores (descending, docid ascending tiebreak).
RunMap load_run(const std::filesystem::path& path);

/// TREC qrels format: `qid 0 docid grade`.
Qrels load_qrels(const std::filesystem::path& path, int max_grade = 3);

/// Passage TSV: `docid<TAB>text`, UTF-8; text after the first tab is kept
/// verbatim.
PassageStore load_passages(const std::filesystem::path& path);

/// Topics TSV: `qid<TAB>query`.
TopicMap load_topics(const std::filesystem::path& path);

/// Keep only run topics that have at least one judgment.
RunMap filter_judged_topics(const RunMap& runs, const Qrels& qrels);

/// First min(k, N) entries; k >= 1.
RankedList truncate_top_k(const RankedList& list, std::size_t k);

/// Serialize back to TREC run format (stable output, used for round-trip
/// checks and debugging).
void write_run(const RunMap& runs, const std::filesystem::path& path, const std::string& tag);

}  // namespace recbias
