#include "recbias/cache.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "recbias/errors.hpp"
#include "recbias/hash.hpp"
#include "recbias/log.hpp"

namespace recbias {

namespace {

std::string utc_now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string backend_config_hash(const nlohmann::json& signature) {
  return sha256_hex(signature.dump());
}

std::string prompt_hash(std::string_view prompt_text) { return sha256_hex(prompt_text); }

std::string cache_key(const std::string& config_hash, std::string_view prompt_text) {
  return sha256_hex(config_hash + "\x1f" + std::string(prompt_text));
}

TranscriptCache::TranscriptCache(std::filesystem::path file) : file_(std::move(file)) {
  std::ifstream in(file_);
  if (!in) return;  // fresh run; file is created on first append
  std::string line;
  std::size_t lineno = 0;
  std::size_t skipped = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.contains("key") || !record.contains("response") ||
        !record["key"].is_string() || !record["response"].is_string()) {
      ++skipped;
      continue;
    }
    // Later records win so a forced-fresh retry supersedes the original.
    responses_[record["key"].get<std::string>()] = record["response"].get<std::string>();
  }
  if (skipped > 0)
    log::warn("skipped ", skipped, " corrupt transcript record(s) in ", file_.string());
}

std::optional<std::string> TranscriptCache::find(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = responses_.find(key);
  if (it == responses_.end()) return std::nullopt;
  return it->second;
}

void TranscriptCache::append(const std::string& config_hash, const std::string& prompt_hash_value,
                             const std::string& key, const std::string& response) {
  std::lock_guard<std::mutex> lock(mutex_);
  nlohmann::json record{{"schema_version", 1},
                        {"timestamp", utc_now_iso8601()},
                        {"config_hash", config_hash},
                        {"prompt_hash", prompt_hash_value},
                        {"key", key},
                        {"response", response}};
  std::ofstream out(file_, std::ios::app);
  if (!out) raise(Errc::IoError, "cannot append to transcript " + file_.string());
  out << record.dump() << "\n";
  out.flush();
  responses_[key] = response;
}

std::size_t TranscriptCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return responses_.size();
}

CachingBackend::CachingBackend(std::shared_ptr<Backend> inner,
                               std::shared_ptr<TranscriptCache> cache,
                               std::shared_ptr<CallBudget> budget)
    : inner_(std::move(inner)),
      cache_(std::move(cache)),
      config_hash_(backend_config_hash(inner_->signature())),
      budget_(std::move(budget)) {}

std::string CachingBackend::name() const { return inner_->name(); }

nlohmann::json CachingBackend::signature() const { return inner_->signature(); }

std::string CachingBackend::complete(const PromptBundle& bundle, bool force_fresh) {
  const std::string key = cache_key(config_hash_, bundle.cache_text);
  if (!force_fresh) {
    if (auto cached = cache_->find(key)) {
      std::lock_guard<std::mutex> lock(mutex_);
      ++hits_;
      return *cached;
    }
  }
  if (budget_ && !budget_->try_acquire())
    raise(Errc::BudgetExhausted, "backend call budget spent");
  {
    std::lock_guard<std::mutex> lock(mutex_);
    ++calls_;
    called_keys_.push_back(key);
  }
  std::string response = inner_->complete(bundle, force_fresh);
  cache_->append(config_hash_, prompt_hash(bundle.cache_text), key, response);
  return response;
}

std::uint64_t CachingBackend::transport_calls() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return calls_;
}

std::uint64_t CachingBackend::cache_hits() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return hits_;
}

std::vector<std::string> CachingBackend::called_keys() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return called_keys_;
}

}  // namespace recbias
