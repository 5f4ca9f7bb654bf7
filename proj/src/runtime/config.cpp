#include "runtime/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "common/error.hpp"
#include "common/yaml_util.hpp"

namespace digirr::runtime {
namespace {

using envsim::EnvParams;
using envsim::EnvState;

struct EnvField {
  const char* name;
  double EnvParams::*member;
};

constexpr EnvField kEnvFields[] = {
    {"t_mean", &EnvParams::t_mean},
    {"a_season", &EnvParams::a_season},
    {"a_diurnal", &EnvParams::a_diurnal},
    {"year_length", &EnvParams::year_length},
    {"day_length", &EnvParams::day_length},
    {"season_peak", &EnvParams::season_peak},
    {"diurnal_peak", &EnvParams::diurnal_peak},
    {"temp_noise_sigma", &EnvParams::temp_noise_sigma},
    {"evap_coeff", &EnvParams::evap_coeff},
    {"lake_evap_coeff", &EnvParams::lake_evap_coeff},
    {"tank_evap_coeff", &EnvParams::tank_evap_coeff},
    {"rain_rate", &EnvParams::rain_rate},
    {"rain_moisture", &EnvParams::rain_moisture},
    {"rain_lake", &EnvParams::rain_lake},
    {"rain_stream_pulse", &EnvParams::rain_stream_pulse},
    {"rain_humidity", &EnvParams::rain_humidity},
    {"snowmelt_coeff", &EnvParams::snowmelt_coeff},
    {"snowmelt_start_day", &EnvParams::snowmelt_start_day},
    {"snowmelt_end_day", &EnvParams::snowmelt_end_day},
    {"wind_mean", &EnvParams::wind_mean},
    {"wind_reversion", &EnvParams::wind_reversion},
    {"wind_sigma", &EnvParams::wind_sigma},
    {"humidity_mean", &EnvParams::humidity_mean},
    {"humidity_temp_coeff", &EnvParams::humidity_temp_coeff},
    {"humidity_tau", &EnvParams::humidity_tau},
    {"humidity_sigma", &EnvParams::humidity_sigma},
    {"ph_sigma", &EnvParams::ph_sigma},
    {"ph_min", &EnvParams::ph_min},
    {"ph_max", &EnvParams::ph_max},
    {"light_noise_sigma", &EnvParams::light_noise_sigma},
    {"stream_base", &EnvParams::stream_base},
    {"stream_season_amp", &EnvParams::stream_season_amp},
    {"stream_tau", &EnvParams::stream_tau},
    {"stream_to_lake", &EnvParams::stream_to_lake},
    {"fire_rate_dry", &EnvParams::fire_rate_dry},
    {"fire_rate_wet", &EnvParams::fire_rate_wet},
    {"dry_season_start_day", &EnvParams::dry_season_start_day},
    {"dry_season_end_day", &EnvParams::dry_season_end_day},
    {"fire_boost", &EnvParams::fire_boost},
    {"fire_halflife", &EnvParams::fire_halflife},
    {"lake_depth_max", &EnvParams::lake_depth_max},
    {"lake_area", &EnvParams::lake_area},
    {"tank_height", &EnvParams::tank_height},
    {"tank_area", &EnvParams::tank_area},
    {"lake_pump_flow", &EnvParams::lake_pump_flow},
    {"deep_well_pump_flow", &EnvParams::deep_well_pump_flow},
    {"sprayer_flow", &EnvParams::sprayer_flow},
    {"feed_tap_flow", &EnvParams::feed_tap_flow},
    {"tap_moisture_gain", &EnvParams::tap_moisture_gain},
    {"spray_moisture_gain", &EnvParams::spray_moisture_gain},
    {"saturation", &EnvParams::saturation},
};

struct StateField {
  const char* name;
  double EnvState::*member;
};

constexpr StateField kStateFields[] = {
    {"temperature", &EnvState::temperature},     {"soil_moisture", &EnvState::soil_moisture},
    {"lake_level", &EnvState::lake_level},       {"tank_level", &EnvState::tank_level},
    {"wind_speed", &EnvState::wind_speed},       {"ambient_light", &EnvState::ambient_light},
    {"humidity", &EnvState::humidity},           {"soil_ph", &EnvState::soil_ph},
    {"stream_flow", &EnvState::stream_flow},     {"fire_intensity", &EnvState::fire_intensity},
};

void check_map_keys(const std::string& src, const YAML::Node& map, const std::vector<std::string>& allowed) {
  if (!map.IsMap()) yaml::fail_at(src, map, "expected a mapping");
  for (const auto& kv : map) {
    const auto k = kv.first.as<std::string>();
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == k;
    if (!ok) yaml::fail_at(src, kv.first, "unknown key '" + k + "'");
  }
}

double read_time(const std::string& src, const YAML::Node& n, const char* field) {
  const auto text = yaml::as<std::string>(src, n, field);
  try {
    return parse_time_of_day(text);
  } catch (const Error& e) {
    yaml::fail_at(src, n, std::string("field '") + field + "': " + e.what());
  }
}

// The field's own node when present so diagnostics name its line.
YAML::Node field_node(const YAML::Node& map, const char* field) {
  if (map.IsMap())
    if (const YAML::Node f = map[field]) return f;
  return map;
}

void require_positive(const std::string& src, const YAML::Node& at, double v, const char* field) {
  if (!(std::isfinite(v) && v > 0.0))
    yaml::fail_at(src, field_node(at, field), std::string(field) + " must be > 0");
}

void parse_environment(const std::string& src, const YAML::Node& n, EnvParams& env) {
  std::vector<std::string> allowed = {"mode", "evaporation", "initial"};
  for (const auto& f : kEnvFields) allowed.emplace_back(f.name);
  check_map_keys(src, n, allowed);
  if (auto mode = yaml::opt<std::string>(src, n, "mode")) {
    if (*mode == "dynamic") env.mode = envsim::EnvMode::dynamic;
    else if (*mode == "constant") env.mode = envsim::EnvMode::constant;
    else yaml::fail_at(src, n["mode"], "mode must be 'dynamic' or 'constant'");
  }
  env.evaporation = yaml::opt<bool>(src, n, "evaporation").value_or(env.evaporation);
  for (const auto& f : kEnvFields)
    if (auto v = yaml::opt<double>(src, n, f.name)) env.*f.member = *v;
  if (const auto init = n["initial"]) {
    std::vector<std::string> keys;
    for (const auto& f : kStateFields) keys.emplace_back(f.name);
    check_map_keys(src, init, keys);
    for (const auto& f : kStateFields)
      if (auto v = yaml::opt<double>(src, init, f.name)) env.initial.*f.member = *v;
  }
}

FaultInjection parse_fault(const std::string& src, const YAML::Node& n) {
  yaml::check_keys(src, n, {"sensor", "unit", "state", "at"});
  FaultInjection f;
  const auto sensor = yaml::req<std::string>(src, n, "sensor");
  const auto kind = parse_sensor_kind(sensor);
  if (!kind) yaml::fail_at(src, n["sensor"], "unknown sensor '" + sensor + "'");
  f.sensor = *kind;
  const auto unit = yaml::opt<std::string>(src, n, "unit").value_or("primary");
  if (unit == "primary") f.unit = fieldnet::ActiveUnit::primary;
  else if (unit == "standby") f.unit = fieldnet::ActiveUnit::standby;
  else yaml::fail_at(src, n["unit"], "unit must be 'primary' or 'standby'");
  const auto state = yaml::req<std::string>(src, n, "state");
  if (state == "healthy") f.state = xducer::FaultState::healthy;
  else if (state == "stuck") f.state = xducer::FaultState::stuck;
  else if (state == "open_circuit") f.state = xducer::FaultState::open_circuit;
  else yaml::fail_at(src, n["state"], "state must be healthy, stuck or open_circuit");
  f.at = yaml::opt<double>(src, n, "at").value_or(0.0);
  if (!(f.at >= 0.0)) yaml::fail_at(src, field_node(n, "at"), "at must be >= 0");
  return f;
}

void parse_sensors(const std::string& src, const YAML::Node& n, SensorSettings& s) {
  yaml::check_keys(src, n, {"adc_bits", "adc_vfs", "noise_sigma", "sample_period", "self_test_period",
                            "eps_test_fraction", "faults"});
  s.adc_bits = yaml::opt<int>(src, n, "adc_bits").value_or(s.adc_bits);
  s.adc_vfs = yaml::opt<double>(src, n, "adc_vfs").value_or(s.adc_vfs);
  s.noise_sigma = yaml::opt<double>(src, n, "noise_sigma").value_or(s.noise_sigma);
  s.sample_period = yaml::opt<double>(src, n, "sample_period").value_or(s.sample_period);
  s.self_test_period = yaml::opt<double>(src, n, "self_test_period").value_or(s.self_test_period);
  s.eps_test_fraction = yaml::opt<double>(src, n, "eps_test_fraction").value_or(s.eps_test_fraction);
  if (s.adc_bits < 4 || s.adc_bits > 16)
    yaml::fail_at(src, field_node(n, "adc_bits"), "adc_bits must be in [4, 16]");
  require_positive(src, n, s.adc_vfs, "adc_vfs");
  require_positive(src, n, s.self_test_period, "self_test_period");
  require_positive(src, n, s.eps_test_fraction, "eps_test_fraction");
  if (!(s.noise_sigma >= 0.0)) yaml::fail_at(src, field_node(n, "noise_sigma"), "noise_sigma must be >= 0");
  if (!(s.sample_period >= 0.0))
    yaml::fail_at(src, field_node(n, "sample_period"), "sample_period must be >= 0");
  if (const auto faults = n["faults"]) {
    if (!faults.IsSequence()) yaml::fail_at(src, faults, "'faults' must be a list");
    for (const auto& f : faults) s.faults.push_back(parse_fault(src, f));
  }
}

void parse_channel(const std::string& src, const YAML::Node& n, fieldnet::ChannelParams& c) {
  yaml::check_keys(src, n, {"profile", "p_drop", "p_bit", "eb_n0_db", "latency"});
  if (auto profile = yaml::opt<std::string>(src, n, "profile")) {
    if (*profile == "satellite") c = fieldnet::ChannelParams::satellite();
    else if (*profile != "local_wireless") yaml::fail_at(src, n["profile"], "profile must be local_wireless or satellite");
  }
  c.p_drop = yaml::opt<double>(src, n, "p_drop").value_or(c.p_drop);
  if (auto v = yaml::opt<double>(src, n, "p_bit")) c.p_bit = v;
  if (auto v = yaml::opt<double>(src, n, "eb_n0_db")) c.eb_n0_db = v;
  c.latency = yaml::opt<double>(src, n, "latency").value_or(c.latency);
  try {
    c.validate();
  } catch (const Error& e) {
    yaml::fail_at(src, n, e.what());
  }
}

void parse_gateway(const std::string& src, const YAML::Node& n, gateway::GatewayParams& g) {
  yaml::check_keys(src, n, {"sync_period", "history_capacity", "max_buffered_snapshots"});
  g.sync_period = yaml::opt<double>(src, n, "sync_period").value_or(g.sync_period);
  g.history_capacity = yaml::opt<std::size_t>(src, n, "history_capacity").value_or(g.history_capacity);
  g.max_buffered_snapshots = yaml::opt<std::size_t>(src, n, "max_buffered_snapshots").value_or(g.max_buffered_snapshots);
  require_positive(src, n, g.sync_period, "sync_period");
  if (g.history_capacity == 0)
    yaml::fail_at(src, field_node(n, "history_capacity"), "history_capacity must be > 0");
  if (g.max_buffered_snapshots == 0)
    yaml::fail_at(src, field_node(n, "max_buffered_snapshots"), "max_buffered_snapshots must be > 0");
}

void parse_controller(const std::string& src, const YAML::Node& n, fieldctl::ControllerConfig& c) {
  yaml::check_keys(src, n, {"auto_pumps", "auto_irrigation", "moisture_low", "tank_low", "tank_high", "lake_min",
                            "balance_margin_h", "moisture_hysteresis", "off_hold_s", "schedule", "spray"});
  c.auto_pumps = yaml::opt<bool>(src, n, "auto_pumps").value_or(c.auto_pumps);
  c.auto_irrigation = yaml::opt<bool>(src, n, "auto_irrigation").value_or(c.auto_irrigation);
  auto& p = c.pumps;
  p.moisture_low = yaml::opt<double>(src, n, "moisture_low").value_or(p.moisture_low);
  p.tank_low = yaml::opt<double>(src, n, "tank_low").value_or(p.tank_low);
  p.tank_high = yaml::opt<double>(src, n, "tank_high").value_or(p.tank_high);
  p.lake_min = yaml::opt<double>(src, n, "lake_min").value_or(p.lake_min);
  p.balance_margin_h = yaml::opt<double>(src, n, "balance_margin_h").value_or(p.balance_margin_h);
  c.moisture_hysteresis = yaml::opt<double>(src, n, "moisture_hysteresis").value_or(c.moisture_hysteresis);
  c.off_hold_s = yaml::opt<double>(src, n, "off_hold_s").value_or(c.off_hold_s);
  if (!(p.tank_low < p.tank_high))
    yaml::fail_at(src, field_node(n, "tank_low"), "tank_low must be below tank_high");
  require_positive(src, n, c.off_hold_s, "off_hold_s");

  if (const auto sched = n["schedule"]) {
    if (!sched.IsSequence()) yaml::fail_at(src, sched, "'schedule' must be a list");
    for (const auto& e : sched) {
      yaml::check_keys(src, e, {"actuator", "start", "duration"});
      fieldctl::ScheduleEntry entry;
      const auto name = yaml::req<std::string>(src, e, "actuator");
      const auto a = parse_actuator(name);
      if (!a) yaml::fail_at(src, e["actuator"], "unknown actuator '" + name + "'");
      entry.target = *a;
      if (!e["start"]) yaml::fail_at(src, e, "missing required field 'start'");
      entry.start_time_of_day = read_time(src, e["start"], "start");
      entry.duration = yaml::req<double>(src, e, "duration");
      c.schedule.push_back(entry);
    }
    try {
      fieldctl::validate_schedule(c.schedule, c.day_length);
    } catch (const Error& e) {
      yaml::fail_at(src, sched, e.what());
    }
  }
  if (const auto spray = n["spray"]) {
    yaml::check_keys(src, spray, {"period_days", "duration", "first_start"});
    const auto period = yaml::req<double>(src, spray, "period_days");
    const auto duration = yaml::req<double>(src, spray, "duration");
    const double first = spray["first_start"] ? read_time(src, spray["first_start"], "first_start") : 9 * 3600.0;
    try {
      c.spray = fieldctl::pest_spray_cycle(period, duration, first);
    } catch (const Error& e) {
      yaml::fail_at(src, spray, e.what());
    }
  }
}

void parse_server(const std::string& src, const YAML::Node& n, ServerSettings& s,
                  const std::filesystem::path& base) {
  yaml::check_keys(src, n, {"host", "port", "credentials", "state_dir", "session_ttl", "lockout_threshold",
                            "ack_timeout"});
  s.host = yaml::opt<std::string>(src, n, "host").value_or(s.host);
  s.port = yaml::opt<int>(src, n, "port").value_or(s.port);
  if (s.port < 0 || s.port > 65535) yaml::fail_at(src, n["port"], "port must be in [0, 65535]");
  if (auto c = yaml::opt<std::string>(src, n, "credentials")) s.credentials = base / *c;
  if (auto d = yaml::opt<std::string>(src, n, "state_dir")) s.state_dir = base / *d;
  s.session_ttl = yaml::opt<double>(src, n, "session_ttl").value_or(s.session_ttl);
  s.lockout_threshold = yaml::opt<int>(src, n, "lockout_threshold").value_or(s.lockout_threshold);
  s.ack_timeout = yaml::opt<double>(src, n, "ack_timeout").value_or(s.ack_timeout);
  require_positive(src, n, s.session_ttl, "session_ttl");
  require_positive(src, n, s.ack_timeout, "ack_timeout");
  if (s.lockout_threshold < 1)
    yaml::fail_at(src, field_node(n, "lockout_threshold"), "lockout_threshold must be >= 1");
}

std::vector<Window> parse_windows(const std::string& src, const YAML::Node& n) {
  if (!n.IsSequence()) yaml::fail_at(src, n, "expected a list of {from, to}");
  std::vector<Window> out;
  for (const auto& w : n) {
    yaml::check_keys(src, w, {"from", "to"});
    Window win{yaml::req<double>(src, w, "from"), yaml::req<double>(src, w, "to")};
    if (!(win.from < win.to)) yaml::fail_at(src, w, "outage window needs from < to");
    out.push_back(win);
  }
  return out;
}

ScenarioConfig parse_doc(const yaml::Doc& doc, std::string text, const std::filesystem::path& base) {
  const auto& src = doc.source;
  ScenarioConfig cfg;
  cfg.source = src;
  cfg.text = std::move(text);
  if (!doc.root || doc.root.IsNull()) fail(ErrorKind::config, src + ": empty scenario");
  const auto& r = doc.root;
  yaml::check_keys(src, r, {"seed", "duration", "dt", "environment", "sensors", "channel", "gateway",
                            "controller", "server", "commands", "outages"});
  cfg.seed = yaml::opt<std::uint64_t>(src, r, "seed").value_or(cfg.seed);
  cfg.duration = yaml::opt<double>(src, r, "duration").value_or(cfg.duration);
  cfg.dt = yaml::opt<double>(src, r, "dt").value_or(cfg.dt);
  require_positive(src, r, cfg.duration, "duration");
  require_positive(src, r, cfg.dt, "dt");

  if (const auto n = r["environment"]) parse_environment(src, n, cfg.env);
  cfg.env.dt = cfg.dt;
  cfg.env.rng_seed = cfg.seed;
  try {
    cfg.env.validate();
  } catch (const Error& e) {
    yaml::fail_at(src, r["environment"] ? r["environment"] : r, e.what());
  }

  if (const auto n = r["sensors"]) parse_sensors(src, n, cfg.sensors);
  if (const auto n = r["channel"]) parse_channel(src, n, cfg.channel);
  if (const auto n = r["gateway"]) parse_gateway(src, n, cfg.gateway);
  cfg.controller.dt = cfg.dt;
  cfg.controller.day_length = cfg.env.day_length;
  if (const auto n = r["controller"]) parse_controller(src, n, cfg.controller);
  if (const auto n = r["server"]) parse_server(src, n, cfg.server, base);

  if (const auto cmds = r["commands"]) {
    if (!cmds.IsSequence()) yaml::fail_at(src, cmds, "'commands' must be a list");
    for (const auto& c : cmds) {
      yaml::check_keys(src, c, {"at", "device", "command", "duration_s", "target"});
      ScriptedCommand sc;
      sc.at = yaml::req<double>(src, c, "at");
      sc.device = yaml::req<std::string>(src, c, "device");
      sc.command = yaml::req<std::string>(src, c, "command");
      sc.duration_s = yaml::opt<double>(src, c, "duration_s");
      sc.target = yaml::opt<std::string>(src, c, "target").value_or("");
      if (!(sc.at >= 0.0)) yaml::fail_at(src, field_node(c, "at"), "at must be >= 0");
      cfg.commands.push_back(std::move(sc));
    }
  }
  if (const auto o = r["outages"]) {
    yaml::check_keys(src, o, {"uplink", "field"});
    if (o["uplink"]) cfg.uplink_outages = parse_windows(src, o["uplink"]);
    if (o["field"]) cfg.field_outages = parse_windows(src, o["field"]);
  }
  return cfg;
}

}  // namespace

double parse_time_of_day(const std::string& text) {
  if (text.find(':') == std::string::npos) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || !std::isfinite(v) || v < 0.0)
      fail(ErrorKind::config, "bad time '" + text + "'");
    return v;
  }
  int h = -1, m = -1, s = 0, used = 0;
  const int n = std::sscanf(text.c_str(), "%2d:%2d%n:%2d%n", &h, &m, &used, &s, &used);
  if (n < 2 || static_cast<std::size_t>(used) != text.size() || h < 0 || h > 23 || m < 0 || m > 59 || s < 0 ||
      s > 59)
    fail(ErrorKind::config, "bad time of day '" + text + "', expected HH:MM[:SS]");
  return h * 3600.0 + m * 60.0 + s;
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& source) {
  return parse_doc(yaml::load_string(text, source), text, std::filesystem::current_path());
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::config, path.string() + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto text = buf.str();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_doc(yaml::load_string(text, path.string()), text, base);
}

void apply_environment_overrides(ServerSettings& s) {
  if (const char* port = std::getenv("DIGIRR_PORT")) {
    char* end = nullptr;
    const long v = std::strtol(port, &end, 10);
    if (!*port || *end || v < 0 || v > 65535) fail(ErrorKind::config, "DIGIRR_PORT must be an integer in [0, 65535]");
    s.port = static_cast<int>(v);
  }
  if (const char* c = std::getenv("DIGIRR_CREDENTIALS")) s.credentials = std::filesystem::path(c);
  if (const char* d = std::getenv("DIGIRR_STATE_DIR")) s.state_dir = std::filesystem::path(d);
}

}  // namespace digirr::runtime
