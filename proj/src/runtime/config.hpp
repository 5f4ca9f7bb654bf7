#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "envsim/env.hpp"
#include "fieldctl/controller.hpp"
#include "fieldnet/channel.hpp"
#include "fieldnet/node.hpp"
#include "gateway/gateway.hpp"
#include "xducer/sensor.hpp"

namespace digirr::runtime {

struct FaultInjection {
  SensorKind sensor = SensorKind::temperature;
  fieldnet::ActiveUnit unit = fieldnet::ActiveUnit::primary;
  xducer::FaultState state = xducer::FaultState::open_circuit;
  double at = 0.0;  // sim s
};

struct ScriptedCommand {
  double at = 0.0;
  std::string device;
  std::string command;
  std::optional<double> duration_s;
  std::string target;
};

struct Window {
  double from = 0.0;
  double to = 0.0;  // [from, to)
  bool contains(double t) const { return t >= from && t < to; }
};

struct SensorSettings {
  int adc_bits = 12;
  double adc_vfs = 5.0;
  double noise_sigma = 0.0;        // V
  double sample_period = 0.0;      // s, 0 = every tick
  double self_test_period = 600.0; // s
  double eps_test_fraction = 0.02;
  std::vector<FaultInjection> faults;
};

struct ServerSettings {
  int port = 8080;
  std::string host = "127.0.0.1";
  std::optional<std::filesystem::path> credentials;
  std::optional<std::filesystem::path> state_dir;
  double session_ttl = 30 * 60.0;
  int lockout_threshold = 10;
  double ack_timeout = 600.0;
};

// Everything a run needs, parsed from one YAML scenario file.
struct ScenarioConfig {
  std::string source;  // file name for diagnostics
  std::string text;    // verbatim YAML, embedded in run manifests

  std::uint64_t seed = 1;
  double duration = 86400.0;  // s, default for `run`
  double dt = 60.0;

  envsim::EnvParams env;
  SensorSettings sensors;
  fieldnet::ChannelParams channel;
  gateway::GatewayParams gateway;
  fieldctl::ControllerConfig controller;
  ServerSettings server;
  std::vector<ScriptedCommand> commands;
  std::vector<Window> uplink_outages;
  std::vector<Window> field_outages;
};

// Throws Error(config) with "file:line:col: message" diagnostics.
ScenarioConfig parse_scenario(const std::string& yaml_text, const std::string& source = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

// Applies DIGIRR_PORT, DIGIRR_CREDENTIALS and DIGIRR_STATE_DIR if set.
void apply_environment_overrides(ServerSettings& s);

// "HH:MM[:SS]" or plain seconds.
double parse_time_of_day(const std::string& text);

}  // namespace digirr::runtime
