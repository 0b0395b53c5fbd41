#pragma once

#include <memory>
#include <string>

#include "scriptmind/experiment/analysis.hpp"
#include "scriptmind/experiment/service.hpp"

namespace scriptmind::experiment {

/// JSON-over-HTTP front end for ExperimentService.
///   POST /sessions                  {"age_band": "30s", "consent": true}
///   GET  /sessions/{id}/stimulus
///   POST /sessions/{id}/responses   {"stage", "suspicion", "importance", "relevance", "anxiety"[, "elapsed_ms"]}
///   GET  /export/{variable}.csv
///   GET  /analysis/{variable}.json
/// Errors come back as {"error": code, "message": text} with a 4xx status.
class HttpApi {
 public:
  explicit HttpApi(ExperimentService& service, AnalysisOptions analysis = {});
  ~HttpApi();

  /// Binds and serves on a background thread. Returns the bound port
  /// (useful with port 0).
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace scriptmind::experiment
