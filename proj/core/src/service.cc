#include "poolforge/service.h"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "poolforge/error.h"

namespace poolforge {

namespace {

using json = nlohmann::json;

void send_error(httplib::Response &res, ErrorCode code,
                const std::string &message) {
  res.status = http_status_for(code);
  res.set_content(json{{"code", error_code_name(code)}, {"message", message}}
                      .dump(),
                  "application/json");
}

void send_json(httplib::Response &res, const std::string &body,
               int status = 200) {
  res.status = status;
  res.set_content(body, "application/json");
}

json parse_body(const httplib::Request &req) {
  if (req.body.empty()) return json::object();
  json body;
  try {
    body = json::parse(req.body);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("request body: ") + e.what());
  }
  if (!body.is_object()) {
    throw Error(ErrorCode::kValidation, "request body must be a JSON object");
  }
  return body;
}

template <typename T>
T field(const json &obj, const char *key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception &) {
    throw Error(ErrorCode::kValidation,
                std::string("missing or malformed field '") + key + "'");
  }
}

// Runs a handler and turns exceptions into {code, message} responses.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request &req, httplib::Response &res) {
    try {
      f(req, res);
    } catch (const Error &e) {
      send_error(res, e.code(), e.what());
    } catch (const std::exception &e) {
      send_error(res, ErrorCode::kIo, e.what());
    }
  };
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
      return 409;
    case ErrorCode::kValidation:
      return 422;
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kParse:
    case ErrorCode::kDomain:
      return 400;
    default:
      return 500;
  }
}

struct JudgingService::Impl {
  Impl(SessionManager &s, SimulationConfig d)
      : sessions(s), defaults(std::move(d)) {}

  SessionManager &sessions;
  SimulationConfig defaults;
  httplib::Server server;
  int port = 0;
};

JudgingService::JudgingService(SessionManager &sessions,
                               SimulationConfig defaults,
                               std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>(sessions, std::move(defaults))) {
  auto &srv = impl_->server;
  Impl *self = impl_.get();

  srv.Post("/v1/sessions", guarded([self](const httplib::Request &req,
                                          httplib::Response &res) {
    const json body = parse_body(req);
    CreateRequest cr;
    cr.topic_id = field<std::string>(body, "topic_id");
    if (body.contains("client_token")) {
      cr.client_token = field<std::string>(body, "client_token");
    }
    cr.config = self->defaults;
    if (body.contains("config")) {
      cr.config = simulation_config_from_json(body.at("config").dump(),
                                              self->defaults);
    }
    send_json(res, session_state_to_json(self->sessions.create(cr)), 201);
  }));

  srv.Get("/v1/sessions/:id",
          guarded([self](const httplib::Request &req, httplib::Response &res) {
            send_json(res, session_state_to_json(
                               self->sessions.get(req.path_params.at("id"))));
          }));

  srv.Get("/v1/sessions/:id/next-batch",
          guarded([self](const httplib::Request &req, httplib::Response &res) {
            const std::string id = req.path_params.at("id");
            json docs = json::array();
            for (const auto &item : self->sessions.next_batch(id)) {
              docs.push_back({{"doc_id", item.doc_id}, {"text", item.text}});
            }
            json out{{"session_id", id},
                     {"documents", std::move(docs)},
                     {"session",
                      json::parse(session_state_to_json(self->sessions.get(id)))}};
            send_json(res, out.dump());
          }));

  srv.Post("/v1/sessions/:id/judgments",
           guarded([self](const httplib::Request &req, httplib::Response &res) {
             const json body = parse_body(req);
             if (!body.contains("judgments") || !body["judgments"].is_array()) {
               throw Error(ErrorCode::kValidation,
                           "field 'judgments' must be an array");
             }
             std::vector<std::pair<std::string, int>> labels;
             for (const auto &j : body["judgments"]) {
               if (!j.is_object()) {
                 throw Error(ErrorCode::kValidation,
                             "each judgment must be an object");
               }
               labels.emplace_back(field<std::string>(j, "doc_id"),
                                   field<int>(j, "label"));
             }
             std::optional<std::int64_t> expected;
             if (body.contains("expected_version")) {
               expected = field<std::int64_t>(body, "expected_version");
             }
             send_json(res, session_state_to_json(self->sessions.submit(
                                req.path_params.at("id"), labels, expected)));
           }));

  srv.Get("/v1/sessions/:id/qrels",
          guarded([self](const httplib::Request &req, httplib::Response &res) {
            const std::string mode_name = req.has_param("mode")
                                              ? req.get_param_value("mode")
                                              : std::string("human_only");
            const ExportMode mode = parse_export_mode(mode_name);
            res.set_content(
                self->sessions.export_qrels(req.path_params.at("id"), mode),
                "text/plain");
          }));

  srv.Get("/v1/topics", guarded([self](const httplib::Request &,
                                       httplib::Response &res) {
    json topics = json::array();
    for (const auto &t : self->sessions.topics()) {
      topics.push_back({{"topic_id", t.topic_id},
                        {"pool_size", t.pool.size()},
                        {"baseline_system", t.baseline_system}});
    }
    send_json(res, json{{"topics", std::move(topics)}}.dump());
  }));

  if (!static_dir.empty()) {
    if (!srv.set_mount_point("/", static_dir.string())) {
      throw Error(ErrorCode::kNotFound,
                  "static directory not found: " + static_dir.string());
    }
  }

  srv.set_error_handler([](const httplib::Request &, httplib::Response &res) {
    if (res.status == 404 && res.body.empty()) {
      send_error(res, ErrorCode::kNotFound, "no such route");
    }
  });
}

JudgingService::~JudgingService() { stop(); }

int JudgingService::bind(const std::string &host, int port) {
  auto &srv = impl_->server;
  if (port == 0) {
    impl_->port = srv.bind_to_any_port(host);
  } else {
    impl_->port = srv.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port < 0) {
    throw Error(ErrorCode::kIo,
                "cannot bind " + host + ":" + std::to_string(port));
  }
  return impl_->port;
}

void JudgingService::listen() { impl_->server.listen_after_bind(); }

void JudgingService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool JudgingService::running() const { return impl_->server.is_running(); }

}  // namespace poolforge
