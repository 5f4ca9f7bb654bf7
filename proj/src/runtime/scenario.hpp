#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctrlserver/server.hpp"
#include "envsim/env.hpp"
#include "fieldctl/controller.hpp"
#include "fieldnet/channel.hpp"
#include "fieldnet/node.hpp"
#include "gateway/gateway.hpp"
#include "runtime/config.hpp"

namespace digirr::runtime {

struct ScenarioOptions {
  std::optional<std::uint64_t> seed;  // replaces the config seed
  double start_time = 0.0;            // sim s of the first tick
  // Start on the tick after the server's recovered clock instead.
  bool resume = false;
  bool publish_events = false;        // server event stream (serve mode)
  bool persist = false;               // server durable state under server.state_dir
  ctrlserver::UserStore users;
  ctrlserver::SessionManager::Clock session_clock;
};

// The whole site wired together: environment, ten sensor nodes, the lossy
// field link, gateway, control server and field controller. Each tick at
// time t runs, in order:
//   1. scripted faults and manager commands due at t
//   2. node self-tests (when due), then one sample per node into the channel
//   3. channel deliveries up to t into the gateway
//   4. gateway sync with the server and the field controller (when due)
//   5. field controller tick on the latest gateway readings
//   6. environment step under the resulting actuator bits
class Scenario {
public:
  explicit Scenario(const ScenarioConfig& config, ScenarioOptions options = {});
  ~Scenario();
  Scenario(const Scenario&) = delete;
  Scenario& operator=(const Scenario&) = delete;

  double time() const { return t_; }  // time of the next tick
  double dt() const { return config_.dt; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t ticks() const { return ticks_; }

  void step();
  // Ticks while time() < t_end.
  void run_until(double t_end);

  // Manual link control, combined with the configured outage windows.
  void set_uplink_up(bool up) { uplink_forced_up_ = up; }
  void set_field_up(bool up) { field_forced_up_ = up; }
  bool uplink_up(double t) const;
  bool field_up(double t) const;

  void set_history_sink(std::function<void(const HistoryEntry&)> sink);
  void set_actuation_sink(std::function<void(const fieldctl::ActuationLogEntry&)> sink) {
    actuation_sink_ = std::move(sink);
  }

  // Issues a command as the scenario operator (no session needed).
  ctrlserver::CommandEnvelope issue(std::string_view device, std::string_view command,
                                    std::optional<double> duration_s, std::string_view target = {});

  ctrlserver::ControlServer& server() { return *server_; }
  gateway::Gateway& gateway() { return *gateway_; }
  fieldctl::FieldController& controller() { return *controller_; }
  fieldnet::Channel& channel() { return *channel_; }
  fieldnet::SensorNode& node(SensorKind kind);
  const envsim::EnvState& env() const { return env_; }
  const ScenarioConfig& config() const { return config_; }

  // Scripted commands the server refused, "t=...: reason".
  const std::vector<std::string>& warnings() const { return warnings_; }

private:
  class Up;
  class Down;

  ScenarioConfig config_;
  std::uint64_t seed_;
  double t_;
  std::uint64_t ticks_ = 0;

  std::unique_ptr<envsim::Environment> environment_;
  envsim::EnvState env_;
  std::vector<fieldnet::SensorNode> nodes_;
  std::vector<double> next_test_;
  double next_sample_;
  std::unique_ptr<fieldnet::Channel> channel_;
  std::unique_ptr<gateway::Gateway> gateway_;
  std::unique_ptr<ctrlserver::ControlServer> server_;
  std::unique_ptr<fieldctl::FieldController> controller_;
  std::unique_ptr<Up> up_;
  std::unique_ptr<Down> down_;
  fieldctl::SensorSnapshot readings_;

  std::vector<FaultInjection> faults_;        // sorted by time, consumed
  std::vector<ScriptedCommand> scripted_;     // sorted by time, consumed
  std::size_t next_fault_ = 0;
  std::size_t next_command_ = 0;
  bool uplink_forced_up_ = true;
  bool field_forced_up_ = true;
  std::function<void(const fieldctl::ActuationLogEntry&)> actuation_sink_;
  std::vector<std::string> warnings_;
};

// Tick-aligned start time that follows the server's recovered clock.
double resume_time(double server_time, double dt);

// Actuation log CSV: t,actuator,bit,cause
std::string actuation_csv_header();
void append_actuation_row(std::string& out, const fieldctl::ActuationLogEntry& e);

}  // namespace digirr::runtime
