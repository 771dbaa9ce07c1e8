#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "poolforge/error.h"
#include "poolforge/session.h"
#include "poolforge/simulate.h"

namespace poolforge {

// JSON over HTTP, all routes under /v1:
//   POST /sessions                    {topic_id, client_token?, config?}
//   GET  /sessions/{id}
//   GET  /sessions/{id}/next-batch
//   POST /sessions/{id}/judgments     {judgments: [{doc_id, label}], expected_version?}
//   GET  /sessions/{id}/qrels?mode=human_only|hybrid
//   GET  /topics
// Errors come back as {code, message}: not_found 404, conflict 409,
// validation_error 422, invalid_config/parse_error 400, anything else 500.
class JudgingService {
 public:
  // `defaults` fills whatever a create request's config leaves out. When
  // static_dir is set its files are served from /.
  JudgingService(SessionManager &sessions, SimulationConfig defaults,
                 std::filesystem::path static_dir = {});
  ~JudgingService();

  JudgingService(const JudgingService &) = delete;
  JudgingService &operator=(const JudgingService &) = delete;

  // Port 0 binds any free port. Returns the bound port.
  int bind(const std::string &host, int port);
  // Blocks until stop().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int http_status_for(ErrorCode code);

}  // namespace poolforge
