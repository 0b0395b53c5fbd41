#include "scriptmind/client.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "json_util.hpp"
#include "scriptmind/error.hpp"

namespace scriptmind {

void ModelEndpoint::validate() const {
  if (base_url.empty()) throw Error(Errc::ConfigError, "endpoint base_url is empty");
  if (max_in_flight < 1) throw Error(Errc::ConfigError, "max_in_flight must be at least 1", base_url);
  if (!(timeout_s > 0.0)) throw Error(Errc::ConfigError, "timeout must be positive", base_url);
  if (retry.max_attempts < 1) throw Error(Errc::ConfigError, "retry attempts must be at least 1", base_url);
  if (retry.backoff_base_s < 0.0) throw Error(Errc::ConfigError, "backoff base must be non-negative", base_url);
}

void InFlightLimit::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return free_ > 0; });
  --free_;
}

void InFlightLimit::release() {
  {
    std::lock_guard lock(mu_);
    ++free_;
  }
  cv_.notify_one();
}

namespace {

class HttpTransport final : public ChatTransport {
 public:
  ChatReply send(const ModelEndpoint& ep, const std::vector<ChatMessage>& messages) override {
    // Split "scheme://host[:port]" from an optional path prefix.
    const auto scheme_end = ep.base_url.find("://");
    if (scheme_end == std::string::npos) return {0, {}, "base_url has no scheme"};
    const auto path_start = ep.base_url.find('/', scheme_end + 3);
    const std::string origin = ep.base_url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? std::string{} : ep.base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    httplib::Client cli(origin);
    const auto secs = static_cast<time_t>(ep.timeout_s);
    const auto usecs = static_cast<time_t>((ep.timeout_s - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);

    httplib::Headers headers;
    if (!ep.token_env.empty()) {
      const char* token = std::getenv(ep.token_env.c_str());
      if (token != nullptr && *token != '\0') headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    detail::ordered_json body;
    body["model"] = ep.model_name;
    body["temperature"] = ep.temperature;
    body["messages"] = detail::json::array();
    for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});

    auto res = cli.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) {
      const auto err = res.error();
      const int status = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) ? -1 : 0;
      return {status, {}, httplib::to_string(err)};
    }
    if (res->status != 200) return {res->status, {}, res->body.substr(0, 200)};
    try {
      const auto doc = detail::json::parse(res->body);
      return {200, doc.at("choices").at(0).at("message").at("content").get<std::string>(), {}};
    } catch (const std::exception& e) {
      return {0, {}, std::string("unexpected response body: ") + e.what()};
    }
  }
};

bool retryable(int status) { return status <= 0 || status == 429 || status >= 500; }

}  // namespace

std::shared_ptr<ChatTransport> make_http_transport() { return std::make_shared<HttpTransport>(); }

std::shared_ptr<ChatTransport> make_transport(const ModelEndpoint& ep, std::span<const CsidInstance> instances,
                                              const PromptTemplates& templates) {
  const auto& url = ep.base_url;
  if (url == "mock://keyword") return make_keyword_mock();
  if (url == "mock://overlap-judge") return make_overlap_judge();
  if (url == "mock://oracle") return make_oracle_mock(instances, templates);
  if (url.rfind("http://", 0) == 0 || url.rfind("https://", 0) == 0) return make_http_transport();
  throw Error(Errc::ConfigError, "unsupported endpoint url", url);
}

ModelClient::ModelClient(ModelEndpoint ep, std::shared_ptr<ChatTransport> transport, Sleeper sleeper)
    : ep_(std::move(ep)), transport_(std::move(transport)), sleeper_(std::move(sleeper)), limit_(ep_.max_in_flight) {
  ep_.validate();
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

QueryResult ModelClient::query(const PromptRendering& prompt) {
  return query({{"system", prompt.system}, {"user", prompt.user}});
}

QueryResult ModelClient::query(const std::vector<ChatMessage>& messages) {
  ChatReply last;
  for (int attempt = 1; attempt <= ep_.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      const double delay = ep_.retry.backoff_base_s * std::pow(2.0, attempt - 2);
      sleeper_(std::chrono::milliseconds(static_cast<long long>(delay * 1000.0)));
    }
    limit_.acquire();
    try {
      last = transport_->send(ep_, messages);
    } catch (...) {
      limit_.release();
      throw;
    }
    limit_.release();

    if (last.status == 200) return {std::move(last.text), attempt};
    if (last.status == 401 || last.status == 403) {
      throw Error(Errc::AuthError, fmt::format("HTTP {} after {} attempt(s)", last.status, attempt), ep_.base_url);
    }
    if (!retryable(last.status)) {
      throw Error(Errc::TransportError,
                  fmt::format("HTTP {} after {} attempt(s): {}", last.status, attempt, last.error), ep_.base_url);
    }
  }
  const int n = ep_.retry.max_attempts;
  if (n == 1) {
    const auto code = last.status == -1 ? Errc::Timeout : Errc::TransportError;
    throw Error(code, fmt::format("{} after 1 attempt(s)", last.error), ep_.base_url);
  }
  const std::string cause = last.status == -1  ? "timeout"
                            : last.status == 0 ? "transport error: " + last.error
                                               : fmt::format("HTTP {}", last.status);
  throw Error(Errc::RetriesExhausted, fmt::format("{} after {} attempt(s)", cause, n), ep_.base_url);
}

}  // namespace scriptmind
