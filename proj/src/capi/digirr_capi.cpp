#include "digirr/digirr.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "analysis/finance.hpp"
#include "analysis/history.hpp"
#include "analysis/suitability.hpp"
#include "analysis/summary.hpp"
#include "common/error.hpp"
#include "ctrlserver/messages.hpp"
#include "fieldnet/frame.hpp"
#include "runtime/artifacts.hpp"
#include "runtime/scenario.hpp"
#include "runtime/service.hpp"

struct digirr_scenario {
  std::unique_ptr<digirr::runtime::Scenario> impl;
};

struct digirr_service {
  std::unique_ptr<digirr::runtime::Service> impl;
};

namespace {

using namespace digirr;
using ctrlserver::json;
namespace fs = std::filesystem;

thread_local std::string g_last_error;

digirr_status status_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return DIGIRR_E_CONFIG;
    case ErrorKind::range: return DIGIRR_E_RANGE;
    case ErrorKind::validation: return DIGIRR_E_VALIDATION;
    case ErrorKind::auth: return DIGIRR_E_AUTH;
    case ErrorKind::session_expired: return DIGIRR_E_SESSION_EXPIRED;
    case ErrorKind::locked_out: return DIGIRR_E_LOCKED_OUT;
    case ErrorKind::not_found: return DIGIRR_E_NOT_FOUND;
    case ErrorKind::io: return DIGIRR_E_IO;
    case ErrorKind::parse: return DIGIRR_E_PARSE;
  }
  return DIGIRR_E_INTERNAL;
}

template <class F>
digirr_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return DIGIRR_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return DIGIRR_E_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorKind::validation, std::string(what) + " must not be null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

digirr_status arg_error(const char* what) {
  g_last_error = what;
  return DIGIRR_E_ARGUMENT;
}

template <class Write>
void write_file(const std::string& path, Write&& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path);
  w(out);
  if (!out) fail(ErrorKind::io, "write failed: " + path);
}

}  // namespace

extern "C" {

const char* digirr_version(void) { return DIGIRR_VERSION; }

const char* digirr_status_name(digirr_status s) {
  switch (s) {
    case DIGIRR_OK: return "ok";
    case DIGIRR_E_CONFIG: return "config";
    case DIGIRR_E_RANGE: return "range";
    case DIGIRR_E_VALIDATION: return "validation";
    case DIGIRR_E_AUTH: return "auth";
    case DIGIRR_E_SESSION_EXPIRED: return "session_expired";
    case DIGIRR_E_LOCKED_OUT: return "locked_out";
    case DIGIRR_E_NOT_FOUND: return "not_found";
    case DIGIRR_E_IO: return "io";
    case DIGIRR_E_PARSE: return "parse";
    case DIGIRR_E_ARGUMENT: return "argument";
    case DIGIRR_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* digirr_last_error(void) { return g_last_error.c_str(); }

void digirr_string_free(char* s) { std::free(s); }

digirr_status digirr_run(const digirr_run_options* o, char** result_json) {
  if (!o) return arg_error("options must not be null");
  if (!o->out_dir || !*o->out_dir) return arg_error("out_dir is required");
  if (!o->config_path == !o->manifest_path) return arg_error("give exactly one of config_path and manifest_path");
  return guarded([&] {
    runtime::RunRequest req;
    if (o->manifest_path) req = runtime::request_from_manifest(o->manifest_path);
    else req.config = runtime::load_scenario(o->config_path);
    if (o->has_seed) req.seed = o->seed;
    if (o->has_duration) req.duration = o->duration;
    if (!o->manifest_path || o->accel != 0.0) req.accel = o->accel;
    req.out_dir = o->out_dir;
    const auto r = runtime::run_to_directory(req);
    put(result_json, json{{"manifest", r.manifest.string()},
                          {"seed", r.seed},
                          {"ticks", r.ticks},
                          {"wall_seconds", r.wall_seconds},
                          {"artifacts", r.artifacts},
                          {"warnings", r.warnings}}
                         .dump());
  });
}

digirr_status digirr_scenario_open(const char* config_path, const char* yaml_text, int has_seed, uint64_t seed,
                                   digirr_scenario** out) {
  if (!out) return arg_error("out must not be null");
  if (!config_path == !yaml_text) return arg_error("give exactly one of config_path and yaml_text");
  *out = nullptr;
  return guarded([&] {
    const auto cfg = config_path ? runtime::load_scenario(config_path) : runtime::parse_scenario(yaml_text);
    runtime::ScenarioOptions opts;
    if (has_seed) opts.seed = seed;
    auto h = std::make_unique<digirr_scenario>();
    h->impl = std::make_unique<runtime::Scenario>(cfg, std::move(opts));
    *out = h.release();
  });
}

void digirr_scenario_close(digirr_scenario* s) { delete s; }

double digirr_scenario_time(const digirr_scenario* s) { return s ? s->impl->time() : 0.0; }

digirr_status digirr_scenario_run_until(digirr_scenario* s, double t_end) {
  if (!s) return arg_error("scenario must not be null");
  return guarded([&] { s->impl->run_until(t_end); });
}

digirr_status digirr_scenario_issue(digirr_scenario* s, const char* device, const char* command, double duration_s,
                                    const char* target, uint64_t* command_id) {
  if (!s) return arg_error("scenario must not be null");
  return guarded([&] {
    need(device, "device");
    need(command, "command");
    std::optional<double> d;
    if (duration_s >= 0.0) d = duration_s;
    const auto env = s->impl->issue(device, command, d, target ? target : "");
    if (command_id) *command_id = env.id;
  });
}

digirr_status digirr_scenario_status_table(digirr_scenario* s, char** out) {
  if (!s || !out) return arg_error("scenario and out must not be null");
  return guarded([&] { put(out, ctrlserver::encode_status_table(s->impl->server().status_rows()).dump()); });
}

digirr_status digirr_scenario_control_table(digirr_scenario* s, char** out) {
  if (!s || !out) return arg_error("scenario and out must not be null");
  return guarded([&] { put(out, ctrlserver::encode_control_table(s->impl->server().control_rows()).dump()); });
}

digirr_status digirr_scenario_commands(digirr_scenario* s, char** out) {
  if (!s || !out) return arg_error("scenario and out must not be null");
  return guarded([&] {
    json arr = json::array();
    for (const auto& c : s->impl->server().ledger()) arr.push_back(ctrlserver::encode(c));
    put(out, arr.dump());
  });
}

digirr_status digirr_scenario_actuators(digirr_scenario* s, char** out) {
  if (!s || !out) return arg_error("scenario and out must not be null");
  return guarded([&] { put(out, ctrlserver::encode(s->impl->controller().state()).dump()); });
}

digirr_status digirr_service_open(const char* config_path, int port, double accel, digirr_service** out) {
  if (!out || !config_path) return arg_error("config_path and out must not be null");
  if (port > 65535) return arg_error("port must be <= 65535");
  *out = nullptr;
  return guarded([&] {
    auto cfg = runtime::load_scenario(config_path);
    runtime::apply_environment_overrides(cfg.server);
    runtime::ServiceOptions opts;
    if (port >= 0) opts.port = port;
    opts.accel = accel;
    auto h = std::make_unique<digirr_service>();
    h->impl = std::make_unique<runtime::Service>(cfg, opts);
    *out = h.release();
  });
}

int digirr_service_port(const digirr_service* s) { return s ? s->impl->port() : -1; }

digirr_status digirr_service_warnings(const digirr_service* s, char** text) {
  if (!s || !text) return arg_error("service and text must not be null");
  return guarded([&] {
    std::string all;
    for (const auto& w : s->impl->warnings()) all += w + "\n";
    put(text, all);
  });
}

digirr_status digirr_service_run(digirr_service* s) {
  if (!s) return arg_error("service must not be null");
  return guarded([&] { s->impl->run(); });
}

void digirr_service_stop(digirr_service* s) {
  if (s) s->impl->stop();
}

void digirr_service_close(digirr_service* s) { delete s; }

digirr_status digirr_user_add(const char* path, const char* name, const char* password, const char* role) {
  if (!path || !name || !password || !role) return arg_error("arguments must not be null");
  return guarded([&] {
    const std::string r = role;
    if (r != "operator" && r != "admin") fail(ErrorKind::validation, "role must be operator or admin");
    if (std::strlen(password) < 8) fail(ErrorKind::validation, "password must be at least 8 characters");
    ctrlserver::UserStore store = fs::exists(path) ? ctrlserver::UserStore::load(path) : ctrlserver::UserStore{};
    store.add(name, password, r == "admin" ? ctrlserver::Role::admin : ctrlserver::Role::operator_);
    store.save(path);
  });
}

digirr_status digirr_analyze_summary(const char* history_csv, const char* out_csv, const char* out_meta_csv) {
  if (!history_csv || !out_csv) return arg_error("history_csv and out_csv must not be null");
  return guarded([&] {
    const auto rows = analysis::read_history_csv(fs::path(history_csv));
    const auto s = analysis::summarize(rows);
    write_file(out_csv, [&](std::ostream& o) { analysis::write_summary_csv(o, s); });
    if (out_meta_csv) write_file(out_meta_csv, [&](std::ostream& o) { analysis::write_summary_meta_csv(o, s); });
  });
}

digirr_status digirr_analyze_suitability(const char* history_csv, const char* crops_yaml, const char* out_csv) {
  if (!history_csv || !crops_yaml || !out_csv) return arg_error("arguments must not be null");
  return guarded([&] {
    const auto rules = analysis::load_crop_rules(crops_yaml);
    const auto rows = analysis::read_history_csv(fs::path(history_csv));
    const auto recs = analysis::rank_crops(analysis::summarize(rows), rules);
    write_file(out_csv, [&](std::ostream& o) { analysis::write_recommendations_csv(o, recs); });
  });
}

digirr_status digirr_analyze_finance(const char* finance_yaml, const char* out_cash, const char* out_exp,
                                     char** summary_json) {
  if (!out_cash || !out_exp) return arg_error("output paths must not be null");
  return guarded([&] {
    const auto cfg = finance_yaml ? analysis::load_finance_config(finance_yaml) : analysis::FinanceConfig{};
    const auto cf = analysis::cumulative_cash_flow(cfg.cash_flow);
    const auto ex = analysis::expenditure_comparison(cfg.expenditure);
    write_file(out_cash, [&](std::ostream& o) { analysis::write_cash_flow_csv(o, cf); });
    write_file(out_exp, [&](std::ostream& o) { analysis::write_expenditure_csv(o, ex); });
    put(summary_json, json{{"break_even_year", cf.break_even_year},
                           {"multiple_of_investment", cf.multiple_of_investment()},
                           {"final_ccf", cf.ccf.back()},
                           {"manual_total", ex.manual.back()},
                           {"digital_total", ex.digital.back()}}
                          .dump());
  });
}

digirr_status digirr_frame_describe(const char* hex, char** text) {
  if (!hex || !text) return arg_error("hex and text must not be null");
  return guarded([&] {
    std::string digits;
    for (const char* p = hex; *p; ++p) {
      if (*p == ' ' || *p == ':' || *p == '\t') continue;
      if (!std::isxdigit(static_cast<unsigned char>(*p))) fail(ErrorKind::parse, "not a hex string");
      digits += *p;
    }
    if (digits.size() % 2) fail(ErrorKind::parse, "odd number of hex digits");
    std::vector<std::uint8_t> bytes;
    for (std::size_t i = 0; i < digits.size(); i += 2)
      bytes.push_back(static_cast<std::uint8_t>(std::stoi(digits.substr(i, 2), nullptr, 16)));
    put(text, fieldnet::describe(bytes));
  });
}

digirr_status digirr_frame_encode(uint8_t node_id, uint8_t sensor_kind, uint16_t seq, float value, uint8_t flags,
                                  char** hex) {
  if (!hex) return arg_error("hex must not be null");
  return guarded([&] {
    const fieldnet::Frame f{node_id, sensor_kind, seq, value, flags};
    put(hex, fieldnet::to_hex(fieldnet::encode(f)));
  });
}

}  // extern "C"
