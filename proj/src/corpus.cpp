#include "recbias/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "recbias/errors.hpp"
#include "recbias/log.hpp"
#include "recbias/strings.hpp"

namespace recbias {

namespace {

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open " + path.string());
  return in;
}

std::string at_line(const std::filesystem::path& path, std::size_t lineno) {
  return path.filename().string() + ":" + std::to_string(lineno);
}

bool parse_int(std::string_view s, long& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  // from_chars for doubles is incomplete on some stdlibs; go through strtod.
  std::string tmp(s);
  char* end = nullptr;
  out = std::strtod(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size() && !tmp.empty();
}

}  // namespace

std::vector<std::string> RankedList::passage_ids() const {
  std::vector<std::string> ids;
  ids.reserve(entries.size());
  for (const auto& e : entries) ids.push_back(e.passage_id);
  return ids;
}

void validate_ranked_list(const RankedList& list) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    const auto& e = list.entries[i];
    if (e.rank != static_cast<int>(i + 1))
      raise(Errc::InvalidArgument, "ranks not contiguous for topic " + list.topic_id + " at index " +
                                       std::to_string(i));
    if (!seen.insert(e.passage_id).second)
      raise(Errc::DuplicateEntry, "duplicate passage " + e.passage_id + " in topic " + list.topic_id);
  }
}

Qrels::Qrels(int max_grade) : max_grade_(max_grade) {
  if (max_grade < 0) raise(Errc::InvalidArgument, "max_grade must be non-negative");
}

void Qrels::add(const std::string& topic_id, const std::string& passage_id, int grade) {
  if (grade < 0 || grade > max_grade_)
    raise(Errc::GradeOutOfRange, "grade " + std::to_string(grade) + " for (" + topic_id + ", " +
                                     passage_id + ") outside 0.." + std::to_string(max_grade_));
  auto& topic = by_topic_[topic_id];
  if (!topic.emplace(passage_id, grade).second)
    raise(Errc::DuplicateJudgment, "duplicate judgment for (" + topic_id + ", " + passage_id + ")");
  ++count_;
}

std::optional<int> Qrels::grade(const std::string& topic_id, const std::string& passage_id) const {
  auto t = by_topic_.find(topic_id);
  if (t == by_topic_.end()) return std::nullopt;
  auto p = t->second.find(passage_id);
  if (p == t->second.end()) return std::nullopt;
  return p->second;
}

bool Qrels::has_topic(const std::string& topic_id) const { return by_topic_.count(topic_id) > 0; }

void PassageStore::add(Passage passage) {
  auto id = passage.id;
  if (!passages_.emplace(id, std::move(passage)).second)
    raise(Errc::DuplicatePassage, "duplicate passage id " + id);
}

const Passage* PassageStore::find(const std::string& id) const {
  auto it = passages_.find(id);
  return it == passages_.end() ? nullptr : &it->second;
}

const Passage& PassageStore::at(const std::string& id) const {
  const Passage* p = find(id);
  if (!p) raise(Errc::MissingPassage, "passage " + id + " not in store");
  return *p;
}

RunMap load_run(const std::filesystem::path& path) {
  auto in = open_text(path);
  RunMap runs;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!valid_utf8(line)) raise(Errc::InvalidUtf8, "invalid UTF-8 at " + at_line(path, lineno));
    auto fields = split_ws(line);
    if (fields.size() != 6)
      raise(Errc::MalformedLine, "expected 6 fields, got " + std::to_string(fields.size()) + " at " +
                                     at_line(path, lineno));
    std::string qid(fields[0]);
    std::string docid(fields[2]);
    long rank = 0;
    double score = 0.0;
    if (!parse_int(fields[3], rank))
      raise(Errc::MalformedLine, "rank not an integer at " + at_line(path, lineno));
    if (!parse_double(fields[4], score))
      raise(Errc::MalformedLine, "score not a number at " + at_line(path, lineno));
    if (!seen.emplace(qid, docid).second)
      raise(Errc::DuplicateEntry, "duplicate (" + qid + ", " + docid + ") at " + at_line(path, lineno));
    auto& list = runs[qid];
    list.topic_id = qid;
    list.entries.push_back(RunEntry{docid, static_cast<int>(rank), score});
  }
  if (runs.empty()) raise(Errc::EmptyInput, "no run entries in " + path.string());
  // Input ranks are advisory; rebuild from score desc, docid asc.
  for (auto& [qid, list] : runs) {
    std::stable_sort(list.entries.begin(), list.entries.end(), [](const RunEntry& a, const RunEntry& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.passage_id < b.passage_id;
    });
    for (std::size_t i = 0; i < list.entries.size(); ++i) list.entries[i].rank = static_cast<int>(i + 1);
  }
  return runs;
}

Qrels load_qrels(const std::filesystem::path& path, int max_grade) {
  auto in = open_text(path);
  Qrels qrels(max_grade);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!valid_utf8(line)) raise(Errc::InvalidUtf8, "invalid UTF-8 at " + at_line(path, lineno));
    auto fields = split_ws(line);
    if (fields.size() != 4)
      raise(Errc::MalformedLine, "expected 4 fields, got " + std::to_string(fields.size()) + " at " +
                                     at_line(path, lineno));
    long grade = 0;
    if (!parse_int(fields[3], grade) || grade < 0)
      raise(Errc::MalformedLine, "grade not a non-negative integer at " + at_line(path, lineno));
    try {
      qrels.add(std::string(fields[0]), std::string(fields[2]), static_cast<int>(grade));
    } catch (const Error& e) {
      if (e.code() == Errc::GradeOutOfRange)
        raise(Errc::GradeOutOfRange, std::string(e.what()) + " at " + at_line(path, lineno));
      throw;
    }
  }
  if (qrels.size() == 0) raise(Errc::EmptyInput, "no judgments in " + path.string());
  return qrels;
}

namespace {

/// Shared loader for `key<TAB>value` files.
template <class Fn>
void load_tsv(const std::filesystem::path& path, Fn&& handle) {
  auto in = open_text(path);
  std::string line;
  std::size_t lineno = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!valid_utf8(line)) raise(Errc::InvalidUtf8, "invalid UTF-8 at " + at_line(path, lineno));
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      raise(Errc::MalformedLine, "missing tab separator at " + at_line(path, lineno));
    std::string_view key = std::string_view(line).substr(0, tab);
    std::string_view value = std::string_view(line).substr(tab + 1);
    if (trim(key).empty()) raise(Errc::MalformedLine, "empty id at " + at_line(path, lineno));
    if (trim(value).empty()) raise(Errc::MalformedLine, "empty text at " + at_line(path, lineno));
    handle(std::string(key), std::string(value), lineno);
    ++rows;
  }
  if (rows == 0) raise(Errc::EmptyInput, "no rows in " + path.string());
}

}  // namespace

PassageStore load_passages(const std::filesystem::path& path) {
  PassageStore store;
  load_tsv(path, [&](std::string id, std::string text, std::size_t) {
    store.add(Passage{std::move(id), std::move(text)});
  });
  return store;
}

TopicMap load_topics(const std::filesystem::path& path) {
  TopicMap topics;
  load_tsv(path, [&](std::string id, std::string text, std::size_t lineno) {
    if (!topics.emplace(id, Topic{id, std::move(text)}).second)
      raise(Errc::DuplicateEntry, "duplicate topic id " + id + " at " + at_line(path, lineno));
  });
  return topics;
}

RunMap filter_judged_topics(const RunMap& runs, const Qrels& qrels) {
  RunMap kept;
  for (const auto& [qid, list] : runs)
    if (qrels.has_topic(qid)) kept.emplace(qid, list);
  if (kept.empty()) raise(Errc::EmptyIntersection, "no run topic has judgments");
  log::info("retained ", kept.size(), " of ", runs.size(), " run topics with judgments");
  return kept;
}

RankedList truncate_top_k(const RankedList& list, std::size_t k) {
  if (k < 1) raise(Errc::InvalidArgument, "k must be >= 1");
  RankedList out = list;
  if (out.entries.size() > k) {
    out.entries.resize(k);
  } else if (out.entries.size() < k) {
    log::warn("topic ", list.topic_id, " has only ", list.entries.size(), " entries (k=", k, ")");
  }
  return out;
}

void write_run(const RunMap& runs, const std::filesystem::path& path, const std::string& tag) {
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot write " + path.string());
  std::ostringstream buf;
  buf.precision(6);
  for (const auto& [qid, list] : runs)
    for (const auto& e : list.entries)
      buf << qid << " Q0 " << e.passage_id << " " << e.rank << " " << e.score << " " << tag << "\n";
  out << buf.str();
}

}  // namespace recbias
