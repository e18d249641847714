#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recbias/corpus.hpp"

namespace recbias {

/// Version tag for the embedded prompt templates; recorded in every report
/// header so audits stay byte-reproducible.
inline constexpr std::string_view kPromptTemplateVersion = "rankllm-templates-v1";

struct ChatMessage {
  std::string role;  // "system" | "user"
  std::string content;
};

/// One member of a reranking window as presented to a backend.
struct WindowItem {
  std::string passage_id;
  std::string text;        // text as shown in the prompt (dated or plain)
  std::string plain_text;  // original passage text, always date-free
  std::optional<int> year; // injected year, when dates are active
};

struct ListwisePrompt {
  std::string system_text;
  std::string user_text;
  int window_size = 0;
  std::string topic_id;
  std::vector<std::string> passage_ids;  // window order

  std::vector<ChatMessage> messages() const;
};

struct PairwisePrompt {
  std::string system_text;
  std::string user_text;
  std::string topic_id;
  std::string passage_a;
  std::string passage_b;

  std::vector<ChatMessage> messages() const;
};

/// Window identifiers (1-based) in preference order. A complete permutation
/// covers 1..n exactly once.
struct Permutation {
  std::vector<int> order;

  bool complete(int n) const;
};

enum class Preference { A, B };

inline char preference_letter(Preference p) { return p == Preference::A ? 'A' : 'B'; }

enum class ParseMode { strict, repair };

ListwisePrompt build_listwise_prompt(const Topic& topic, const std::vector<WindowItem>& window);

PairwisePrompt build_pairwise_prompt(const Topic& topic, const WindowItem& a, const WindowItem& b);

/// strict: the whole (trimmed) text must be `[i] > [j] > ...` covering 1..n
/// exactly once. repair: bracketed integers are collected in order of first
/// appearance, out-of-range values dropped, repeats deduplicated, missing
/// identifiers appended in ascending order.
Permutation parse_ranking(std::string_view text, int n, ParseMode mode);

/// strict: trimmed text is exactly "A" or "B". repair: first standalone
/// token equal to A or B (case-insensitive, surrounding punctuation ignored).
Preference parse_preference(std::string_view text, ParseMode mode);

/// `[4] > [2] > ...` — the inverse of parse_ranking for round-trip checks
/// and mock backends.
std::string render_ranking(const Permutation& permutation);

}  // namespace recbias
