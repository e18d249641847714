#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recbias/protocol.hpp"
#include "recbias/transport.hpp"

namespace recbias {

/// Remote chat-completion settings. Decoding defaults follow the audited
/// setup: greedy, no penalties.
struct BackendConfig {
  std::string endpoint;
  std::string model;
  double top_p = 1.0;
  double temperature = 0.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  int max_in_flight = 4;
  std::string credential_env = "RECBIAS_API_KEY";

  void validate() const;
  nlohmann::json signature() const;
};

enum class MockKind {
  identity,
  reverse,
  lexical_overlap,
  recency_greedy,
  date_blind,
  fresh_preferring,
  coin_flip,
};

MockKind mock_kind_from_string(const std::string& name);
const char* mock_kind_name(MockKind kind);

struct MockSpec {
  MockKind kind = MockKind::identity;
  double lambda = 0.0;     // recency weight, recency_greedy only
  std::uint64_t seed = 0;  // coin_flip only

  void validate() const;
  nlohmann::json signature() const;
};

/// Listwise window as seen by a mock: query plus ordered items.
struct WindowContext {
  std::string query;
  std::vector<WindowItem> items;
};

/// Pairwise trial as seen by a mock. Positions are fixed: `a` renders as
/// Passage A, `b` as Passage B.
struct PairContext {
  std::string query;
  WindowItem a;
  WindowItem b;
};

/// Everything a backend may need for one call: canonical chat messages for
/// remote models, structured context for mocks, and the exact text that
/// keys the response cache.
struct PromptBundle {
  std::vector<ChatMessage> messages;
  std::string cache_text;
  const WindowContext* window = nullptr;
  const PairContext* pair = nullptr;
};

PromptBundle bundle_listwise(const ListwisePrompt& prompt, const WindowContext& context);
PromptBundle bundle_pairwise(const PairwisePrompt& prompt, const PairContext& context);

/// A reranker backend produces raw response text; parsing happens uniformly
/// in the harness. Implementations must be safe to call concurrently.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  /// Semantic identity of this backend (model, decoding parameters, mock
  /// parameters); hashed into cache keys and report provenance.
  virtual nlohmann::json signature() const = 0;
  /// force_fresh asks cache layers to bypass a stored response.
  virtual std::string complete(const PromptBundle& bundle, bool force_fresh) = 0;
};

/// recency_greedy scoring: (1 - lambda) * (1 / position) + lambda *
/// year_norm, year_norm min-max normalized over the window's injected
/// years (undated items take 0). Exposed for tests.
double mock_score(const MockSpec& spec, const WindowItem& item, const WindowContext& context,
                  int position);

std::shared_ptr<Backend> make_mock_backend(const MockSpec& spec);

/// Remote chat-completion backend over the given transport (defaults to
/// real HTTP). Respects max_in_flight via an internal semaphore.
std::shared_ptr<Backend> make_remote_backend(const BackendConfig& config,
                                             std::shared_ptr<Transport> transport = nullptr,
                                             std::function<void(std::chrono::milliseconds)> sleeper = {});

/// One chat-completion call with retry/backoff: 429 and 5xx retry with
/// exponential backoff up to config.max_retries, 401/403 fail immediately,
/// connection failures retry. Returns the first choice's message content.
std::string chat_complete(const BackendConfig& config, const std::vector<ChatMessage>& messages,
                          Transport& transport,
                          const std::function<void(std::chrono::milliseconds)>& sleeper = {},
                          int* retries_out = nullptr);

/// Tallies of parse fallbacks, retries, and repairs across a run.
struct ParseEvents {
  std::uint64_t strict_failures = 0;
  std::uint64_t retries = 0;
  std::uint64_t repairs = 0;
};

/// Obtain a complete window permutation from a backend. In strict mode a
/// malformed response triggers one fresh retry, then repair; every fallback
/// is tallied.
Permutation rank_window(Backend& backend, const ListwisePrompt& prompt,
                        const WindowContext& context, ParseMode mode,
                        ParseEvents* events = nullptr);

/// Obtain an A/B preference from a backend, with the same fallback policy.
Preference prefer(Backend& backend, const PairwisePrompt& prompt, const PairContext& context,
                  ParseMode mode, ParseEvents* events = nullptr);

}  // namespace recbias
