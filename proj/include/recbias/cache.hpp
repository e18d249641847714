#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "recbias/backend.hpp"

namespace recbias {

/// Hash of a backend's semantic signature; part of every cache key, so any
/// change to model or decoding parameters is a full cache miss.
std::string backend_config_hash(const nlohmann::json& signature);

std::string prompt_hash(std::string_view prompt_text);

std::string cache_key(const std::string& config_hash, std::string_view prompt_text);

/// Append-only JSONL transcript doubling as the response cache. Records
/// carry timestamp, config hash, prompt hash and the raw response; corrupt
/// lines are skipped with a warning on load.
class TranscriptCache {
 public:
  explicit TranscriptCache(std::filesystem::path file);

  std::optional<std::string> find(const std::string& key) const;
  void append(const std::string& config_hash, const std::string& prompt_hash_value,
              const std::string& key, const std::string& response);
  std::size_t size() const;

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> responses_;
};

/// Shared cap on calls that reach real backends; lets a run stop cleanly
/// half-way (cost control, interruption tests) and be resumed later.
struct CallBudget {
  explicit CallBudget(std::optional<std::uint64_t> limit_value) : limit(limit_value) {}

  std::optional<std::uint64_t> limit;
  std::atomic<std::uint64_t> used{0};

  /// True if a call slot was acquired.
  bool try_acquire() {
    std::uint64_t current = used.load();
    for (;;) {
      if (limit && current >= *limit) return false;
      if (used.compare_exchange_weak(current, current + 1)) return true;
    }
  }
};

/// Serves responses from the transcript and forwards misses to the wrapped
/// backend, recording every fresh response. Counts transport calls and can
/// enforce a shared call budget (Error(BudgetExhausted) once spent).
class CachingBackend final : public Backend {
 public:
  CachingBackend(std::shared_ptr<Backend> inner, std::shared_ptr<TranscriptCache> cache,
                 std::shared_ptr<CallBudget> budget = nullptr);

  std::string name() const override;
  nlohmann::json signature() const override;
  std::string complete(const PromptBundle& bundle, bool force_fresh) override;

  std::uint64_t transport_calls() const;
  std::uint64_t cache_hits() const;
  /// Keys that reached the wrapped backend, in call order.
  std::vector<std::string> called_keys() const;

 private:
  std::shared_ptr<Backend> inner_;
  std::shared_ptr<TranscriptCache> cache_;
  std::string config_hash_;
  std::shared_ptr<CallBudget> budget_;
  mutable std::mutex mutex_;
  std::uint64_t calls_ = 0;
  std::uint64_t hits_ = 0;
  std::vector<std::string> called_keys_;
};

}  // namespace recbias
