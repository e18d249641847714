#include "recbias/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>
#include <sstream>

#include "recbias/errors.hpp"
#include "recbias/strings.hpp"

namespace recbias {

namespace {

constexpr std::string_view kListwiseSystem =
    "You are RankLLM, an intelligent assistant that can rank passages based on their relevancy "
    "to the query.";

constexpr std::string_view kPairwiseSystem =
    "You are an expert relevance assessor. Given a search query and two passages, state which "
    "passage is more relevant to the query. Answer with a single letter: 'A' or 'B'.";

}  // namespace

std::vector<ChatMessage> ListwisePrompt::messages() const {
  return {{"system", system_text}, {"user", user_text}};
}

std::vector<ChatMessage> PairwisePrompt::messages() const {
  return {{"system", system_text}, {"user", user_text}};
}

bool Permutation::complete(int n) const {
  if (static_cast<int>(order.size()) != n) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  for (int v : order) {
    if (v < 1 || v > n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

ListwisePrompt build_listwise_prompt(const Topic& topic, const std::vector<WindowItem>& window) {
  if (window.empty()) raise(Errc::EmptyInput, "listwise window is empty");
  if (window.size() < 2) raise(Errc::InvalidArgument, "listwise window needs at least 2 passages");
  const int n = static_cast<int>(window.size());

  std::ostringstream user;
  user << "I will provide you with " << n
       << " passages, each indicated by a numerical identifier [].\n"
       << "Rank the passages based on their relevance to the search query: " << topic.text
       << ".\n\n";
  for (int i = 0; i < n; ++i)
    user << "[" << (i + 1) << "] " << window[static_cast<std::size_t>(i)].text << "\n\n";
  user << "Search Query: " << topic.text << "\n\n"
       << "Rank the " << n
       << " passages above based on their relevance to the search query.\n"
       << "All the passages should be included and listed using identifiers, in descending order "
          "of relevance.\n\n"
       << "The output format should be [] > [], e.g., [4] > [2].\n"
       << "Only respond with the ranking results, do not say any word or explain.";

  ListwisePrompt prompt;
  prompt.system_text = std::string(kListwiseSystem);
  prompt.user_text = user.str();
  prompt.window_size = n;
  prompt.topic_id = topic.id;
  for (const auto& item : window) prompt.passage_ids.push_back(item.passage_id);
  return prompt;
}

PairwisePrompt build_pairwise_prompt(const Topic& topic, const WindowItem& a, const WindowItem& b) {
  if (a.passage_id == b.passage_id)
    raise(Errc::IdenticalIds, "pairwise prompt needs two distinct passages");

  std::ostringstream user;
  user << "Search Query: " << topic.text << "\n"
       << "Passage A: " << a.text << "\n"
       << "Passage B: " << b.text << "\n"
       << "Which passage is more relevant? (A/B)";

  PairwisePrompt prompt;
  prompt.system_text = std::string(kPairwiseSystem);
  prompt.user_text = user.str();
  prompt.topic_id = topic.id;
  prompt.passage_a = a.passage_id;
  prompt.passage_b = b.passage_id;
  return prompt;
}

namespace {

/// Digit run -> value, saturating on overflow so absurd identifiers are
/// treated as out-of-range instead of crashing the parser.
long digits_value(std::string_view digits) {
  if (digits.size() > 9) return std::numeric_limits<long>::max();
  long v = 0;
  for (char c : digits) v = v * 10 + (c - '0');
  return v;
}

/// Scan for bracketed integers like `[12]` (internal spaces tolerated).
/// Returns values in order of appearance.
std::vector<long> scan_bracketed(std::string_view text) {
  std::vector<long> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '[') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
    std::size_t digits_begin = j;
    while (j < text.size() && isdigit(static_cast<unsigned char>(text[j]))) ++j;
    std::size_t digits_end = j;
    while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
    if (digits_end > digits_begin && j < text.size() && text[j] == ']') {
      out.push_back(digits_value(text.substr(digits_begin, digits_end - digits_begin)));
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

Permutation parse_ranking_strict(std::string_view text, int n) {
  std::string_view body = trim(text);
  std::vector<int> order;
  std::set<int> seen;
  std::size_t i = 0;
  bool expect_id = true;
  while (i < body.size()) {
    if (body[i] == ' ' || body[i] == '\t' || body[i] == '\n' || body[i] == '\r') {
      ++i;
      continue;
    }
    if (expect_id) {
      if (body[i] != '[') raise(Errc::NoMatch, "expected '[' in ranking output");
      std::size_t j = i + 1;
      std::size_t start = j;
      while (j < body.size() && isdigit(static_cast<unsigned char>(body[j]))) ++j;
      if (j == start || j >= body.size() || body[j] != ']')
        raise(Errc::NoMatch, "malformed identifier in ranking output");
      long value = digits_value(body.substr(start, j - start));
      if (value < 1 || value > n)
        raise(Errc::OutOfRange, "identifier " + std::to_string(value) + " outside 1.." +
                                    std::to_string(n));
      if (!seen.insert(static_cast<int>(value)).second)
        raise(Errc::DuplicateId, "identifier " + std::to_string(value) + " repeated");
      order.push_back(static_cast<int>(value));
      i = j + 1;
      expect_id = false;
    } else {
      if (body[i] != '>') raise(Errc::NoMatch, "expected '>' between identifiers");
      ++i;
      expect_id = true;
    }
  }
  if (order.empty()) raise(Errc::NoMatch, "no ranking found");
  if (expect_id) raise(Errc::NoMatch, "dangling '>' at end of ranking");
  if (static_cast<int>(order.size()) < n)
    raise(Errc::Incomplete, "ranking covers " + std::to_string(order.size()) + " of " +
                                std::to_string(n) + " identifiers");
  return Permutation{std::move(order)};
}

Permutation parse_ranking_repair(std::string_view text, int n) {
  std::vector<int> order;
  std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
  for (long v : scan_bracketed(text)) {
    if (v < 1 || v > n) continue;  // drop out-of-range
    if (used[static_cast<std::size_t>(v)]) continue;  // dedupe, first occurrence wins
    used[static_cast<std::size_t>(v)] = true;
    order.push_back(static_cast<int>(v));
  }
  if (order.empty()) raise(Errc::NoIdentifiersFound, "no valid identifiers in model output");
  for (int v = 1; v <= n; ++v)
    if (!used[static_cast<std::size_t>(v)]) order.push_back(v);
  return Permutation{std::move(order)};
}

}  // namespace

Permutation parse_ranking(std::string_view text, int n, ParseMode mode) {
  if (n < 1) raise(Errc::InvalidArgument, "window size must be >= 1");
  return mode == ParseMode::strict ? parse_ranking_strict(text, n)
                                   : parse_ranking_repair(text, n);
}

Preference parse_preference(std::string_view text, ParseMode mode) {
  std::string_view body = trim(text);
  if (mode == ParseMode::strict) {
    if (body == "A") return Preference::A;
    if (body == "B") return Preference::B;
    bool has_a = false, has_b = false;
    for (const auto& token : split_ws(body)) {
      std::string t = to_lower(trim(token));
      while (!t.empty() && !isalnum(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
      while (!t.empty() && !isalnum(static_cast<unsigned char>(t.back()))) t.pop_back();
      if (t == "a") has_a = true;
      if (t == "b") has_b = true;
    }
    if (has_a && has_b) raise(Errc::AmbiguousPreference, "output names both A and B");
    raise(Errc::NoPreferenceFound, "output is not exactly 'A' or 'B'");
  }
  for (std::string_view raw : split_ws(body)) {
    std::string_view token = raw;
    while (!token.empty() && !isalnum(static_cast<unsigned char>(token.front())))
      token.remove_prefix(1);
    while (!token.empty() && !isalnum(static_cast<unsigned char>(token.back())))
      token.remove_suffix(1);
    if (token.size() == 1) {
      if (token[0] == 'A' || token[0] == 'a') return Preference::A;
      if (token[0] == 'B' || token[0] == 'b') return Preference::B;
    }
  }
  raise(Errc::NoPreferenceFound, "no A/B token in model output");
}

std::string render_ranking(const Permutation& permutation) {
  std::ostringstream os;
  for (std::size_t i = 0; i < permutation.order.size(); ++i) {
    if (i) os << " > ";
    os << "[" << permutation.order[i] << "]";
  }
  return os.str();
}

}  // namespace recbias
