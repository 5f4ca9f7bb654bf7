#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "digirr/digirr.h"

namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir = DIGIRR_CONFIG_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("digirr_capi_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// Takes ownership of a returned string.
std::string take(char* s) {
  std::string out = s ? s : "";
  digirr_string_free(s);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(digirr_version()).size() > 0);
  CHECK(std::string(digirr_status_name(DIGIRR_OK)) == "ok");
  CHECK(std::string(digirr_status_name(DIGIRR_E_LOCKED_OUT)) == "locked_out");
}

TEST_CASE("null arguments are argument errors with a message") {
  CHECK(digirr_run(nullptr, nullptr) == DIGIRR_E_ARGUMENT);
  CHECK(std::string(digirr_last_error()).size() > 0);
  digirr_scenario* sc = nullptr;
  CHECK(digirr_scenario_open(nullptr, nullptr, 0, 0, &sc) == DIGIRR_E_ARGUMENT);
  CHECK(sc == nullptr);
  CHECK(digirr_frame_describe(nullptr, nullptr) == DIGIRR_E_ARGUMENT);
}

TEST_CASE("stepped scenario through the C API") {
  digirr_scenario* sc = nullptr;
  const auto path = (kConfigDir / "table2_scenario.yaml").string();
  REQUIRE(digirr_scenario_open(path.c_str(), nullptr, 0, 0, &sc) == DIGIRR_OK);
  CHECK(digirr_scenario_time(sc) == 0.0);
  REQUIRE(digirr_scenario_run_until(sc, 35) == DIGIRR_OK);
  char* s = nullptr;
  REQUIRE(digirr_scenario_actuators(sc, &s) == DIGIRR_OK);
  CHECK(take(s).find("\"lake_pump\":true") != std::string::npos);

  std::uint64_t id = 0;
  CHECK(digirr_scenario_issue(sc, "feed_tap", "ON", 20, nullptr, &id) == DIGIRR_OK);
  CHECK(id == 3);  // the third scripted command is not due until t=60
  CHECK(digirr_scenario_issue(sc, "feed_tap", "ON", -1, nullptr, &id) == DIGIRR_E_VALIDATION);
  CHECK(std::string(digirr_last_error()).find("duration") != std::string::npos);

  REQUIRE(digirr_scenario_run_until(sc, 300) == DIGIRR_OK);
  REQUIRE(digirr_scenario_status_table(sc, &s) == DIGIRR_OK);
  CHECK(take(s).find("Water level in overhead tank") != std::string::npos);
  REQUIRE(digirr_scenario_control_table(sc, &s) == DIGIRR_OK);
  CHECK(take(s).find("Standby Transducer") != std::string::npos);
  REQUIRE(digirr_scenario_commands(sc, &s) == DIGIRR_OK);
  CHECK(take(s).find("Completed") != std::string::npos);
  digirr_scenario_close(sc);

  CHECK(digirr_scenario_open(nullptr, "dt: 0\n", 0, 0, &sc) == DIGIRR_E_CONFIG);
  CHECK(std::string(digirr_last_error()).find(":1:") != std::string::npos);
}

TEST_CASE("batch run writes artifacts") {
  TempDir d;
  const auto cfg = (kConfigDir / "table1_scenario.yaml").string();
  const auto out = (d.path / "run").string();
  digirr_run_options o{};
  o.config_path = cfg.c_str();
  o.out_dir = out.c_str();
  o.has_seed = 1;
  o.seed = 99;
  char* res = nullptr;
  REQUIRE(digirr_run(&o, &res) == DIGIRR_OK);
  const auto r = take(res);
  CHECK(r.find("\"seed\":99") != std::string::npos);
  CHECK(fs::exists(d.path / "run" / "manifest.json"));

  const auto manifest = (d.path / "run" / "manifest.json").string();
  const auto out2 = (d.path / "replay").string();
  digirr_run_options m{};
  m.manifest_path = manifest.c_str();
  m.out_dir = out2.c_str();
  REQUIRE(digirr_run(&m, nullptr) == DIGIRR_OK);
  CHECK(slurp(d.path / "run" / "history.csv") == slurp(d.path / "replay" / "history.csv"));

  digirr_run_options none{};
  none.config_path = cfg.c_str();
  CHECK(digirr_run(&none, nullptr) == DIGIRR_E_ARGUMENT);
}

TEST_CASE("frame encode and describe") {
  char* hex = nullptr;
  REQUIRE(digirr_frame_encode(3, 2, 7, 2.5f, 0, &hex) == DIGIRR_OK);
  const auto h = take(hex);
  CHECK(h.rfind("A5 03 02 00 07 40 20 00 00 00", 0) == 0);
  char* text = nullptr;
  REQUIRE(digirr_frame_describe(h.c_str(), &text) == DIGIRR_OK);
  CHECK(take(text).find("value  2.5") != std::string::npos);
  std::string bad = h;
  bad[bad.size() - 1] = bad.back() == '0' ? '1' : '0';
  REQUIRE(digirr_frame_describe(bad.c_str(), &text) == DIGIRR_OK);
  CHECK(take(text).find("REJECTED") != std::string::npos);
  CHECK(digirr_frame_describe("zz", &text) == DIGIRR_E_PARSE);
}

TEST_CASE("finance through the C API") {
  TempDir d;
  const auto cf = (d.path / "cf.csv").string();
  const auto ex = (d.path / "ex.csv").string();
  char* js = nullptr;
  REQUIRE(digirr_analyze_finance(nullptr, cf.c_str(), ex.c_str(), &js) == DIGIRR_OK);
  CHECK(take(js).find("\"break_even_year\":2") != std::string::npos);
  CHECK(slurp(cf).find("10,") != std::string::npos);
}

TEST_CASE("user management") {
  TempDir d;
  const auto users = (d.path / "users.txt").string();
  CHECK(digirr_user_add(users.c_str(), "ann", "short", "operator") == DIGIRR_E_VALIDATION);
  CHECK(digirr_user_add(users.c_str(), "ann", "long-enough", "root") == DIGIRR_E_VALIDATION);
  REQUIRE(digirr_user_add(users.c_str(), "ann", "long-enough", "operator") == DIGIRR_OK);
  REQUIRE(digirr_user_add(users.c_str(), "bob", "long-enough", "admin") == DIGIRR_OK);
  const auto text = slurp(users);
  CHECK(text.find("ann:operator:") == 0);
  CHECK(text.find("bob:admin:") != std::string::npos);
  CHECK(text.find("long-enough") == std::string::npos);
}

TEST_CASE("service lifecycle and busy port") {
  TempDir d;
  const auto users = (d.path / "users.txt").string();
  REQUIRE(digirr_user_add(users.c_str(), "ann", "long-enough", "operator") == DIGIRR_OK);
  std::ofstream(d.path / "svc.yaml") << "dt: 5\nduration: 60\nenvironment: {mode: constant}\n"
                                     << "server: {credentials: users.txt, port: 0}\n";
  const auto cfg = (d.path / "svc.yaml").string();

  digirr_service* a = nullptr;
  REQUIRE(digirr_service_open(cfg.c_str(), 0, 100.0, &a) == DIGIRR_OK);
  const int port = digirr_service_port(a);
  CHECK(port > 0);
  char* w = nullptr;
  REQUIRE(digirr_service_warnings(a, &w) == DIGIRR_OK);
  take(w);

  digirr_service* b = nullptr;
  CHECK(digirr_service_open(cfg.c_str(), port, 1.0, &b) == DIGIRR_E_IO);
  CHECK(b == nullptr);
  CHECK(std::string(digirr_last_error()).find("cannot bind") != std::string::npos);

  digirr_status rc = DIGIRR_E_INTERNAL;
  std::thread t([&] { rc = digirr_service_run(a); });
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  digirr_service_stop(a);
  t.join();
  CHECK(rc == DIGIRR_OK);
  digirr_service_close(a);
}
