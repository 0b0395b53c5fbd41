#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "scriptmind/csid.hpp"

namespace scriptmind {

struct RetryPolicy {
  int max_attempts = 3;
  double backoff_base_s = 0.5;  // delay before attempt k+1 is base * 2^(k-1)
};

/// A chat-completions style endpoint. `base_url` may be http(s)://... or one
/// of the packaged mocks: mock://keyword, mock://overlap-judge, mock://oracle.
struct ModelEndpoint {
  std::string base_url;
  std::string model_name;
  std::string token_env;  // environment variable holding the bearer token; empty for none
  double timeout_s = 60.0;
  std::size_t max_in_flight = 4;
  RetryPolicy retry;
  double temperature = 0.0;

  void validate() const;  // ConfigError
};

struct ChatMessage {
  std::string role;
  std::string content;
};

/// Result of one wire attempt. status 0 is a transport failure, -1 a timeout.
struct ChatReply {
  int status = 0;
  std::string text;   // assistant content when status == 200
  std::string error;  // diagnostic otherwise
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual ChatReply send(const ModelEndpoint& ep, const std::vector<ChatMessage>& messages) = 0;
};

/// Transport for http:// and https:// endpoints: POST {base_url}/chat/completions.
std::shared_ptr<ChatTransport> make_http_transport();

/// Deterministic scam detector driven by a keyword list.
std::shared_ptr<ChatTransport> make_keyword_mock();
/// Judge that scores token-set overlap between prediction and ground truth.
std::shared_ptr<ChatTransport> make_overlap_judge();
/// Answers every prompt with the gold output of the matching instance.
std::shared_ptr<ChatTransport> make_oracle_mock(std::span<const CsidInstance> instances,
                                                const PromptTemplates& templates = PromptTemplates::defaults());

/// Picks the transport for `ep.base_url`. mock://oracle needs `instances`.
std::shared_ptr<ChatTransport> make_transport(const ModelEndpoint& ep, std::span<const CsidInstance> instances = {},
                                              const PromptTemplates& templates = PromptTemplates::defaults());

/// Simple counting semaphore (std::counting_semaphore needs a compile-time max).
class InFlightLimit {
 public:
  explicit InFlightLimit(std::size_t slots) : free_(slots) {}
  void acquire();
  void release();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t free_;
};

struct QueryResult {
  std::string text;
  int attempts = 0;
};

/// Endpoint client with retries and a per-endpoint in-flight bound. Safe to
/// share between threads.
class ModelClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  ModelClient(ModelEndpoint ep, std::shared_ptr<ChatTransport> transport, Sleeper sleeper = {});

  /// Retries transport failures, timeouts, 429 and 5xx. 401/403 fail at once
  /// with AuthError; other statuses with TransportError. Exhausted retries
  /// raise RetriesExhausted. Messages carry the attempt count.
  QueryResult query(const std::vector<ChatMessage>& messages);
  QueryResult query(const PromptRendering& prompt);

  const ModelEndpoint& endpoint() const { return ep_; }

 private:
  ModelEndpoint ep_;
  std::shared_ptr<ChatTransport> transport_;
  Sleeper sleeper_;
  InFlightLimit limit_;
};

}  // namespace scriptmind
