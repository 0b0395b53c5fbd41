#include "scriptmind/experiment/http_api.hpp"

#include <thread>

#include <httplib.h>

#include "json_util.hpp"
#include "scriptmind/error.hpp"

namespace scriptmind::experiment {

using detail::json;
using detail::ordered_json;

namespace {

ordered_json session_json(const Session& s) {
  ordered_json j;
  j["session_id"] = s.session_id;
  j["age_band"] = to_string(s.age_band);
  j["condition"] = to_string(s.condition);
  j["consent"] = s.consent;
  j["stage_cursor"] = s.stage_cursor;
  j["responses"] = ordered_json::array();
  for (const auto& r : s.responses) {
    j["responses"].push_back({{"stage", r.stage},
                              {"suspicion", r.suspicion},
                              {"importance", r.importance},
                              {"relevance", r.relevance},
                              {"anxiety", r.anxiety},
                              {"elapsed_ms", r.elapsed_ms}});
  }
  j["created_at"] = s.created_at;
  j["completed_at"] = s.completed_at ? ordered_json(*s.completed_at) : ordered_json(nullptr);
  return j;
}

ordered_json bundle_json(const StimulusBundle& b) {
  ordered_json j;
  j["stage"] = b.stage;
  j["stage_name"] = b.stage_name;
  j["utterances"] = b.utterances;
  if (b.audio_url) j["audio_url"] = *b.audio_url;
  j["warnings"] = ordered_json::array();
  for (const auto& w : b.warnings) {
    j["warnings"].push_back(
        {{"stage", w.stage}, {"kind", to_string(w.kind)}, {"content", w.content}, {"audio_cue", w.audio_cue}});
  }
  return j;
}

int status_for(Errc code) {
  switch (code) {
    case Errc::UnknownSession: return 404;
    case Errc::SessionComplete:
    case Errc::OutOfOrderStage: return 409;
    case Errc::NoCompletedSessions: return 409;
    default: return 400;
  }
}

void send_json(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, ordered_json{{"error", code}, {"message", message}});
}

int get_int(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_number_integer()) {
    throw Error(Errc::InvalidArgument, std::string("field '") + key + "' must be an integer");
  }
  return it->get<int>();
}

}  // namespace

struct HttpApi::Impl {
  ExperimentService& service;
  AnalysisOptions analysis;
  httplib::Server server;
  std::thread thread;

  Impl(ExperimentService& s, AnalysisOptions a) : service(s), analysis(a) { routes(); }

  template <typename F>
  void guarded(httplib::Response& res, F&& f) {
    try {
      f();
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), to_string(e.code()), e.detail());
    } catch (const json::exception& e) {
      send_error(res, 400, "BadRequest", e.what());
    }
  }

  Variable variable_from(const httplib::Request& req) {
    const auto v = parse_variable(req.matches[1].str());
    if (!v) throw Error(Errc::InvalidArgument, "unknown variable '" + req.matches[1].str() + "'");
    return *v;
  }

  void routes() {
    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = json::parse(req.body);
        const auto band = parse_age_band(body.at("age_band").get<std::string>());
        if (!band) throw Error(Errc::InvalidArgument, "age_band must be one of 20s, 30s, 40s, 50s");
        const bool consent = body.value("consent", true);
        const auto s = service.create_session(*band, consent);
        ordered_json out;
        out["session"] = session_json(s);
        out["stimulus"] = bundle_json(service.next_stimulus(s.session_id));
        send_json(res, 201, out);
      });
    });
    server.Get(R"(/sessions/([^/]+)/stimulus)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, bundle_json(service.next_stimulus(req.matches[1].str()))); });
    });
    server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, session_json(service.session(req.matches[1].str()))); });
    });
    server.Post(R"(/sessions/([^/]+)/responses)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = json::parse(req.body);
        StageResponse r;
        r.stage = get_int(body, "stage");
        r.suspicion = get_int(body, "suspicion");
        r.importance = get_int(body, "importance");
        r.relevance = get_int(body, "relevance");
        r.anxiety = get_int(body, "anxiety");
        r.elapsed_ms = body.value("elapsed_ms", std::int64_t{0});
        send_json(res, 200, session_json(service.submit_response(req.matches[1].str(), r)));
      });
    });
    server.Get(R"(/export/([a-z]+)\.csv)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto sessions = service.snapshot();
        const auto a = export_analysis(sessions, variable_from(req), analysis);
        res.status = 200;
        res.set_content(grid_csv(a), "text/csv");
      });
    });
    server.Get(R"(/analysis/([a-z]+)\.json)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto sessions = service.snapshot();
        const auto a = export_analysis(sessions, variable_from(req), analysis);
        res.status = 200;
        res.set_content(analysis_json(a), "application/json");
      });
    });
  }
};

HttpApi::HttpApi(ExperimentService& service, AnalysisOptions analysis)
    : impl_(std::make_unique<Impl>(service, analysis)) {}

HttpApi::~HttpApi() { stop(); }

int HttpApi::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(Errc::IoError, "cannot bind", host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpApi::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error(Errc::IoError, "cannot listen", host + ":" + std::to_string(port));
  }
}

void HttpApi::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace scriptmind::experiment
