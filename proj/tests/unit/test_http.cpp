#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <thread>

#include "ctrlserver/auth.hpp"
#include "ctrlserver/http_api.hpp"
#include "ctrlserver/server.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace digirr;
using namespace digirr::ctrlserver;
using json = nlohmann::json;

namespace {

UserStore users() {
  UserStore u;
  u.add("op", "operator-pass", Role::operator_);
  u.add("boss", "admin-pass-123", Role::admin);
  return u;
}

ServerParams params() {
  ServerParams p;
  p.sensors = {{1, SensorKind::temperature}, {3, SensorKind::tank_level}};
  return p;
}

// A control server with its HTTP front end on a free loopback port.
struct Harness {
  ControlServer server{params(), users()};
  HttpApi api{server};
  int port = -1;
  std::thread thread;

  Harness() {
    port = api.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    thread = std::thread([this] { api.run(); });
    for (int i = 0; i < 200 && !api.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ~Harness() {
    server.shutdown();
    api.stop();
    thread.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(5, 0);
    return c;
  }

  std::string login(const std::string& user, const std::string& pass) {
    auto r = client().Post("/api/login", json{{"user", user}, {"password", pass}}.dump(), "application/json");
    REQUIRE(r);
    REQUIRE(r->status == 200);
    return json::parse(r->body).at("token").get<std::string>();
  }
};

httplib::Headers auth(const std::string& token) { return {{"Authorization", "Bearer " + token}}; }

}  // namespace

TEST_CASE("health needs no token, everything else does") {
  Harness h;
  auto c = h.client();
  auto r = c.Get("/api/health");
  REQUIRE(r);
  CHECK(r->status == 200);
  for (const char* path : {"/api/status-table", "/api/control-table", "/api/commands", "/api/commands/1",
                           "/api/history?sensor=tank_level", "/api/events"}) {
    CAPTURE(path);
    r = c.Get(path);
    REQUIRE(r);
    CHECK(r->status == 401);
    CHECK(json::parse(r->body).at("error") == "unauthorized");
  }
}

TEST_CASE("login, tables and command round-trip over HTTP") {
  Harness h;
  const auto tok = h.login("op", "operator-pass");
  auto c = h.client();

  auto r = c.Get("/api/status-table", auth(tok));
  REQUIRE(r);
  CHECK(r->status == 200);
  const auto status = json::parse(r->body);
  REQUIRE(status.is_array());
  CHECK(status.size() == 2);

  r = c.Post("/api/command", auth(tok), json{{"device", "lake_pump"}, {"command", "ON"}, {"duration_s", 30}}.dump(),
             "application/json");
  REQUIRE(r);
  CHECK(r->status == 202);
  const auto env = json::parse(r->body);
  CHECK(env.at("id") == 1);
  CHECK(env.at("state") == "Pending");

  r = c.Get("/api/commands/1", auth(tok));
  REQUIRE(r);
  CHECK(r->status == 200);
  r = c.Get("/api/commands/99", auth(tok));
  REQUIRE(r);
  CHECK(r->status == 404);

  r = c.Get("/api/control-table", auth(tok));
  REQUIRE(r);
  const auto control = json::parse(r->body);
  REQUIRE(control.size() == 5);
  CHECK(control[1].at("control_command") == "ON");

  r = c.Post("/api/logout", auth(tok), "", "application/json");
  REQUIRE(r);
  CHECK(r->status == 204);
  r = c.Get("/api/commands", auth(tok));
  REQUIRE(r);
  CHECK(r->status == 401);
}

TEST_CASE("malformed bodies are 400 once authenticated") {
  Harness h;
  const auto tok = h.login("op", "operator-pass");
  auto c = h.client();
  for (const std::string body : {"not json", "[]", R"({"device":"lake_pump"})",
                                 R"({"device":"lake_pump","command":"ON","duration_s":"30"})",
                                 R"({"device":"lake_pump","command":"ON"})"}) {
    CAPTURE(body);
    auto r = c.Post("/api/command", auth(tok), body, "application/json");
    REQUIRE(r);
    CHECK(r->status == 400);
  }
  auto r = c.Get("/api/history?sensor=tank_level&from=abc", auth(tok));
  REQUIRE(r);
  CHECK(r->status == 400);
  r = c.Get("/api/history?sensor=tank_level", auth(tok));
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->get_header_value("Content-Type").rfind("text/csv", 0) == 0);
}

TEST_CASE("schedule changes need an admin") {
  Harness h;
  auto c = h.client();
  const auto body = json{{"actuator", "feed_tap"}, {"start_time_of_day", 3600}, {"duration_s", 600}}.dump();
  auto r = c.Post("/api/schedule", auth(h.login("op", "operator-pass")), body, "application/json");
  REQUIRE(r);
  CHECK(r->status == 401);
  r = c.Post("/api/schedule", auth(h.login("boss", "admin-pass-123")), body, "application/json");
  REQUIRE(r);
  CHECK(r->status == 202);
}

TEST_CASE("ten bad logins lock the account with 423") {
  Harness h;
  auto c = h.client();
  const auto bad = json{{"user", "op"}, {"password", "wrong"}}.dump();
  for (int i = 1; i < 10; ++i) {
    auto r = c.Post("/api/login", bad, "application/json");
    REQUIRE(r);
    CHECK(r->status == 401);
  }
  auto r = c.Post("/api/login", bad, "application/json");
  REQUIRE(r);
  CHECK(r->status == 423);
  r = c.Post("/api/login", json{{"user", "op"}, {"password", "operator-pass"}}.dump(), "application/json");
  REQUIRE(r);
  CHECK(r->status == 423);
}

TEST_CASE("event stream delivers backlog as server-sent events") {
  Harness h;
  h.server.issue_as("scenario", "feed_tap", "ON", 10.0);
  const auto tok = h.login("op", "operator-pass");
  auto c = h.client();
  std::string got;
  auto r = c.Get("/api/events?token=" + tok, [&](const char* data, std::size_t n) {
    got.append(data, n);
    return got.find("event: control") == std::string::npos;  // stop once we have both
  });
  CHECK(got.find("id: 1\nevent: command\ndata: ") != std::string::npos);
  CHECK(got.find("event: control") != std::string::npos);
  CHECK(got.find("\"alarm\":false") != std::string::npos);
}

TEST_CASE("a port in use is refused") {
  Harness h;
  ControlServer other(params(), users());
  HttpApi second(other);
  CHECK(second.bind("127.0.0.1", h.port) == -1);
}
