#include "recbias/backend.hpp"

#include <algorithm>
#include <cstdlib>
#include <semaphore>
#include <thread>

#include "recbias/errors.hpp"
#include "recbias/log.hpp"

namespace recbias {

void BackendConfig::validate() const {
  if (temperature < 0) raise(Errc::InvalidConfig, "temperature must be >= 0");
  if (top_p <= 0 || top_p > 1) raise(Errc::InvalidConfig, "top_p must be in (0, 1]");
  if (max_in_flight < 1) raise(Errc::InvalidConfig, "max_in_flight must be >= 1");
  if (max_retries < 0) raise(Errc::InvalidConfig, "max_retries must be >= 0");
  if (endpoint.empty()) raise(Errc::InvalidConfig, "endpoint URL is required");
  if (model.empty()) raise(Errc::InvalidConfig, "model name is required");
}

nlohmann::json BackendConfig::signature() const {
  return {
      {"kind", "remote"},
      {"endpoint", endpoint},
      {"model", model},
      {"top_p", top_p},
      {"temperature", temperature},
      {"frequency_penalty", frequency_penalty},
      {"presence_penalty", presence_penalty},
      {"prompt_template", std::string(kPromptTemplateVersion)},
  };
}

PromptBundle bundle_listwise(const ListwisePrompt& prompt, const WindowContext& context) {
  PromptBundle bundle;
  bundle.messages = prompt.messages();
  bundle.cache_text = prompt.system_text + "\n\n" + prompt.user_text;
  bundle.window = &context;
  return bundle;
}

PromptBundle bundle_pairwise(const PairwisePrompt& prompt, const PairContext& context) {
  PromptBundle bundle;
  bundle.messages = prompt.messages();
  bundle.cache_text = prompt.system_text + "\n\n" + prompt.user_text;
  bundle.pair = &context;
  return bundle;
}

namespace {

std::string response_content(const std::string& body) {
  nlohmann::json json = nlohmann::json::parse(body, nullptr, false);
  if (json.is_discarded()) raise(Errc::MalformedResponse, "response body is not JSON");
  if (!json.contains("choices") || !json["choices"].is_array() || json["choices"].empty())
    raise(Errc::MalformedResponse, "response has no choices");
  const auto& message = json["choices"][0];
  if (!message.contains("message") || !message["message"].contains("content") ||
      !message["message"]["content"].is_string())
    raise(Errc::MalformedResponse, "response choice has no message content");
  return message["message"]["content"].get<std::string>();
}

}  // namespace

std::string chat_complete(const BackendConfig& config, const std::vector<ChatMessage>& messages,
                          Transport& transport,
                          const std::function<void(std::chrono::milliseconds)>& sleeper,
                          int* retries_out) {
  config.validate();
  const char* key = std::getenv(config.credential_env.c_str());
  if (!key || !*key)
    raise(Errc::AuthFailure, "credential environment variable " + config.credential_env +
                                 " is not set; no request was sent");

  nlohmann::json body = {
      {"model", config.model},
      {"messages", nlohmann::json::array()},
      {"temperature", config.temperature},
      {"top_p", config.top_p},
      {"frequency_penalty", config.frequency_penalty},
      {"presence_penalty", config.presence_penalty},
  };
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  const std::string payload = body.dump();
  const std::vector<std::pair<std::string, std::string>> headers = {
      {"Authorization", std::string("Bearer ") + key}};

  auto sleep_for = [&](std::chrono::milliseconds d) {
    if (sleeper)
      sleeper(d);
    else
      std::this_thread::sleep_for(d);
  };

  int retries = 0;
  std::chrono::milliseconds backoff{250};
  for (;;) {
    bool retryable = false;
    std::string failure;
    Errc failure_code = Errc::TransportFailure;
    try {
      HttpResponse res = transport.post_json(config.endpoint, headers, payload, config.timeout);
      if (res.status == 200) {
        if (retries_out) *retries_out = retries;
        if (retries > 0) log::info("chat completion succeeded after ", retries, " retries");
        return response_content(res.body);
      }
      if (res.status == 401 || res.status == 403)
        raise(Errc::AuthFailure, "endpoint rejected credentials (HTTP " +
                                     std::to_string(res.status) + ")");
      if (res.status == 429) {
        retryable = true;
        failure = "rate limited (HTTP 429)";
        failure_code = Errc::RateLimited;
      } else if (res.status >= 500) {
        retryable = true;
        failure = "server error (HTTP " + std::to_string(res.status) + ")";
        failure_code = Errc::TransportFailure;
      } else {
        raise(Errc::TransportFailure,
              "unexpected HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200));
      }
    } catch (const Error& e) {
      if (e.code() == Errc::Timeout || e.code() == Errc::TransportFailure) {
        retryable = true;
        failure = e.what();
        failure_code = e.code();
      } else {
        throw;
      }
    }
    if (!retryable || retries >= config.max_retries)
      raise(failure_code, failure + " after " + std::to_string(retries) + " retries");
    ++retries;
    log::warn("retrying chat completion (", retries, "/", config.max_retries, "): ", failure);
    sleep_for(backoff);
    backoff = std::min(backoff * 2, std::chrono::milliseconds{4000});
  }
}

namespace {

class RemoteBackend final : public Backend {
 public:
  RemoteBackend(BackendConfig config, std::shared_ptr<Transport> transport,
                std::function<void(std::chrono::milliseconds)> sleeper)
      : config_(std::move(config)),
        transport_(transport ? std::move(transport) : make_http_transport()),
        sleeper_(std::move(sleeper)),
        in_flight_(config_.max_in_flight) {}

  std::string name() const override { return config_.model; }
  nlohmann::json signature() const override { return config_.signature(); }

  std::string complete(const PromptBundle& bundle, bool) override {
    in_flight_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{in_flight_};
    return chat_complete(config_, bundle.messages, *transport_, sleeper_);
  }

 private:
  BackendConfig config_;
  std::shared_ptr<Transport> transport_;
  std::function<void(std::chrono::milliseconds)> sleeper_;
  std::counting_semaphore<> in_flight_;
};

}  // namespace

std::shared_ptr<Backend> make_remote_backend(const BackendConfig& config,
                                             std::shared_ptr<Transport> transport,
                                             std::function<void(std::chrono::milliseconds)> sleeper) {
  config.validate();
  return std::make_shared<RemoteBackend>(config, std::move(transport), std::move(sleeper));
}

namespace {

Permutation parse_with_policy(Backend& backend, const PromptBundle& bundle, int n, ParseMode mode,
                              ParseEvents* events) {
  std::string raw = backend.complete(bundle, false);
  // Well-formed responses parse identically in both modes; anything else is
  // a repair (logged and tallied) or, in strict mode, one fresh retry first.
  try {
    return parse_ranking(raw, n, ParseMode::strict);
  } catch (const Error& first) {
    if (events) ++events->strict_failures;
    if (mode == ParseMode::repair) {
      if (events) ++events->repairs;
      log::warn("repairing malformed ranking: ", raw.substr(0, 120));
      return parse_ranking(raw, n, ParseMode::repair);
    }
    log::warn("strict parse failed (", first.what(), "); retrying once");
    if (events) ++events->retries;
    raw = backend.complete(bundle, true);
    try {
      return parse_ranking(raw, n, ParseMode::strict);
    } catch (const Error&) {
      if (events) ++events->repairs;
      log::warn("strict parse failed after retry; repairing response: ", raw.substr(0, 120));
      return parse_ranking(raw, n, ParseMode::repair);
    }
  }
}

}  // namespace

Permutation rank_window(Backend& backend, const ListwisePrompt& prompt,
                        const WindowContext& context, ParseMode mode, ParseEvents* events) {
  PromptBundle bundle = bundle_listwise(prompt, context);
  return parse_with_policy(backend, bundle, prompt.window_size, mode, events);
}

Preference prefer(Backend& backend, const PairwisePrompt& prompt, const PairContext& context,
                  ParseMode mode, ParseEvents* events) {
  PromptBundle bundle = bundle_pairwise(prompt, context);
  std::string raw = backend.complete(bundle, false);
  try {
    return parse_preference(raw, ParseMode::strict);
  } catch (const Error& first) {
    if (events) ++events->strict_failures;
    if (mode == ParseMode::repair) {
      if (events) ++events->repairs;
      log::warn("repairing malformed preference: ", raw.substr(0, 120));
      return parse_preference(raw, ParseMode::repair);
    }
    log::warn("strict preference parse failed (", first.what(), "); retrying once");
    if (events) ++events->retries;
    raw = backend.complete(bundle, true);
    try {
      return parse_preference(raw, ParseMode::strict);
    } catch (const Error&) {
      if (events) ++events->repairs;
      return parse_preference(raw, ParseMode::repair);
    }
  }
}

}  // namespace recbias
