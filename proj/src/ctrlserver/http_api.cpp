#include "ctrlserver/http_api.hpp"

#include <sys/socket.h>

#include <atomic>
#include <cmath>

#include "httplib.h"

#include "common/error.hpp"
#include "ctrlserver/messages.hpp"

namespace digirr::ctrlserver {
namespace {

int http_status(ErrorKind k) {
  switch (k) {
    case ErrorKind::auth:
    case ErrorKind::session_expired: return 401;
    case ErrorKind::locked_out: return 423;
    case ErrorKind::not_found: return 404;
    case ErrorKind::validation:
    case ErrorKind::parse:
    case ErrorKind::config:
    case ErrorKind::range: return 400;
    case ErrorKind::io: return 500;
  }
  return 500;
}

const char* error_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::auth: return "unauthorized";
    case ErrorKind::session_expired: return "session_expired";
    case ErrorKind::locked_out: return "locked_out";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::io: return "internal";
    default: return "invalid_request";
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string bearer(const httplib::Request& req) {
  const auto h = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (h.size() > prefix.size() && h.compare(0, prefix.size(), prefix) == 0) return h.substr(prefix.size());
  return {};
}

json parse_body(const httplib::Request& req) {
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(ErrorKind::validation, "request body must be a JSON object");
  return j;
}

std::string str_field(const json& j, const char* name, bool required = true) {
  if (!j.contains(name)) {
    if (required) fail(ErrorKind::validation, std::string("missing field '") + name + "'");
    return {};
  }
  if (!j[name].is_string()) fail(ErrorKind::validation, std::string("field '") + name + "' must be a string");
  return j[name].get<std::string>();
}

std::optional<double> num_field(const json& j, const char* name) {
  if (!j.contains(name) || j[name].is_null()) return std::nullopt;
  if (!j[name].is_number()) fail(ErrorKind::validation, std::string("field '") + name + "' must be a number");
  return j[name].get<double>();
}

double query_double(const httplib::Request& req, const char* name, double fallback) {
  if (!req.has_param(name)) return fallback;
  const auto v = req.get_param_value(name);
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || std::isnan(d))
    fail(ErrorKind::validation, std::string("query parameter '") + name + "' must be a number");
  return d;
}

// Runs a handler, turning library errors into JSON error responses.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_json(res, http_status(e.kind()), {{"error", error_code(e.kind())}, {"message", e.what()}});
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", "internal"}, {"message", e.what()}});
    }
  };
}

}  // namespace

struct HttpApi::Impl {
  explicit Impl(ControlServer& s) : server(s) {}

  ControlServer& server;
  httplib::Server http;
};

HttpApi::HttpApi(ControlServer& server) : impl_(std::make_unique<Impl>(server)) {
  auto& http = impl_->http;
  auto& srv = impl_->server;

  // Exclusive bind: a second server on the same port must fail.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  http.Get("/api/health", guarded([](const httplib::Request&, httplib::Response& res) {
             send_json(res, 200, {{"ok", true}});
           }));

  http.Post("/api/login", guarded([&srv](const httplib::Request& req, httplib::Response& res) {
              const json body = parse_body(req);
              const auto s = srv.login(str_field(body, "user"), str_field(body, "password"));
              send_json(res, 200,
                        {{"token", s.token}, {"user", s.user}, {"role", s.role == Role::admin ? "admin" : "operator"}});
            }));

  http.Post("/api/logout", guarded([&srv](const httplib::Request& req, httplib::Response& res) {
              srv.logout(bearer(req));
              res.status = 204;
            }));

  http.Get("/api/status-table", guarded([&srv](const httplib::Request& req, httplib::Response& res) {
             send_json(res, 200, encode_status_table(srv.status_table(bearer(req))));
           }));

  http.Get("/api/control-table", guarded([&srv](const httplib::Request& req, httplib::Response& res) {
             send_json(res, 200, encode_control_table(srv.control_table(bearer(req))));
           }));

  http.Post("/api/command", guarded([&srv](const httplib::Request& req, httplib::Response& res) {
              // Authenticate before looking at the body: tokenless garbage is a 401, not a 400.
              const std::string token = bearer(req);
              srv.authenticate(token);
              const json body = parse_body(req);
              const auto env = srv.issue_command(token, str_field(body, "device"), str_field(body, "command"),
                                                 num_field(body, "duration_s"), str_field(body, "target", false));
              send_json(res, 202, encode(env));
            }));

  http.Get("/api/commands", guarded([&srv](const httplib::Request& req, httplib::Response& res) {
             json a = json::array();
             for (const auto& c : srv.commands(bearer(req))) a.push_back(encode(c));
             send_json(res, 200, a);
           }));

  http.Get(R"(/api/commands/(\d+))", guarded([&srv](const httplib::Request& req, httplib::Response& res) {
             const auto all = srv.commands(bearer(req));
             const auto id = std::stoull(req.matches[1]);
             for (const auto& c : all)
               if (c.id == id) return send_json(res, 200, encode(c));
             fail(ErrorKind::not_found, "no command " + std::to_string(id));
           }));

  http.Post("/api/schedule", guarded([&srv](const httplib::Request& req, httplib::Response& res) {
              const std::string token = bearer(req);
              srv.authenticate(token);
              const json body = parse_body(req);
              const auto start = num_field(body, "start_time_of_day");
              const auto duration = num_field(body, "duration_s");
              if (!start || !duration) fail(ErrorKind::validation, "start_time_of_day and duration_s are required");
              const auto env = srv.set_schedule(token, str_field(body, "actuator"), *start, *duration);
              send_json(res, 202, encode(env));
            }));

  http.Get("/api/history", guarded([&srv](const httplib::Request& req, httplib::Response& res) {
             const std::string token = bearer(req);
             srv.authenticate(token);
             if (!req.has_param("sensor")) fail(ErrorKind::validation, "query parameter 'sensor' is required");
             const double from = query_double(req, "from", -INFINITY);
             const double to = query_double(req, "to", INFINITY);
             res.status = 200;
             res.set_content(srv.export_history(token, req.get_param_value("sensor"), from, to), "text/csv");
           }));

  http.Get("/api/events", guarded([&srv](const httplib::Request& req, httplib::Response& res) {
             std::string token = bearer(req);
             if (token.empty() && req.has_param("token")) token = req.get_param_value("token");
             srv.authenticate(token);
             std::uint64_t after = 0;
             if (req.has_header("Last-Event-ID")) after = std::stoull(req.get_header_value("Last-Event-ID"));
             res.set_header("Cache-Control", "no-cache");
             res.set_chunked_content_provider(
                 "text/event-stream", [&srv, token, after](std::size_t, httplib::DataSink& sink) mutable {
                   try {
                     srv.authenticate(token);  // stop streaming once the session lapses
                   } catch (const Error&) {
                     sink.done();
                     return true;
                   }
                   const auto events = srv.events_since(after, 1.0);
                   if (srv.stopping()) {
                     sink.done();
                     return true;
                   }
                   std::string chunk;
                   for (const auto& e : events) {
                     after = e.seq;
                     chunk += "id: " + std::to_string(e.seq) + "\nevent: " + e.type + "\ndata: " +
                              json{{"alarm", e.alarm}, {"data", json::parse(e.payload)}}.dump() + "\n\n";
                   }
                   if (chunk.empty()) chunk = ": keepalive\n\n";
                   return sink.write(chunk.data(), chunk.size());
                 });
           }));
}

HttpApi::~HttpApi() { stop(); }

int HttpApi::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

void HttpApi::run() { impl_->http.listen_after_bind(); }

void HttpApi::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

bool HttpApi::running() const { return impl_->http.is_running(); }

}  // namespace digirr::ctrlserver
