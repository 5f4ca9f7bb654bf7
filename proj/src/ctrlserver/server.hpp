#pragma once

#include <array>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common/messages.hpp"
#include "ctrlserver/auth.hpp"
#include "gateway/gateway.hpp"

namespace digirr::ctrlserver {

class EventLog;

enum class CommandState { pending, dispatched, acked, completed, expired };
const char* to_string(CommandState s);
std::optional<CommandState> parse_command_state(std::string_view s);

// Rows of the control window, in display order.
enum class Device { deep_well_pump, lake_pump, fwgs_water_feed, fwgs_drug_feed, standby_selector, feed_tap };
inline constexpr std::array<Device, 5> kControlRows = {
    Device::deep_well_pump, Device::lake_pump, Device::fwgs_water_feed, Device::fwgs_drug_feed,
    Device::standby_selector,
};
std::string_view key(Device d);
std::string_view label(Device d);
std::optional<Device> parse_device(std::string_view s);
std::optional<Actuator> actuator_for(Device d);

enum class Verb { on, off, connect_standby, no_change, set_schedule };
std::string_view to_string(Verb v);
std::optional<Verb> parse_verb(std::string_view s);

struct CommandEnvelope {
  std::uint64_t id = 0;
  std::string issued_by;
  double issued_at = 0.0;  // sim s
  Device device = Device::deep_well_pump;
  Verb verb = Verb::off;
  std::optional<double> duration_s;
  std::string target;                  // standby sensor key
  std::optional<double> schedule_start;  // set_schedule, time of day in s
  CommandState state = CommandState::pending;
  std::string reason;  // why it expired / was rejected
  double updated_at = 0.0;

  bool terminal() const { return state == CommandState::completed || state == CommandState::expired; }
};

struct StatusRow {
  SensorKind kind = SensorKind::temperature;
  std::string sensor_name;
  bool has_data = false;
  double present_data = 0.0;
  std::string unit;
  std::optional<double> test_done_before;  // s
  std::string test_status;
};

struct ControlRow {
  Device device = Device::deep_well_pump;
  std::string label;
  std::string present_status;
  std::string control_command;
  std::optional<double> duration_s;
  bool pending = false;  // a command for this row awaits its field ack
};

struct ServerEvent {
  std::uint64_t seq = 0;
  std::string type;     // status | control | command
  std::string payload;  // JSON
  bool alarm = false;   // an Error/NeedsReplacement row is present
};

struct ServerParams {
  std::vector<gateway::SensorRegistration> sensors;
  std::size_t history_capacity = gateway::kDefaultHistoryCapacity;
  AuthParams auth;
  double default_ack_timeout = 600.0;  // s sim time, ON/OFF/schedule commands
  std::optional<std::filesystem::path> state_dir;  // enables persistence
  std::size_t compact_every = 1000;  // log records between snapshots
  std::size_t event_backlog = 1024;
  bool publish_events = true;  // batch runs switch the event stream off
};

// The control plane: sessions, the status and control windows, the command
// ledger, history retention and optional durable state. All public methods
// are thread-safe.
class ControlServer {
public:
  ControlServer(ServerParams params, UserStore users, SessionManager::Clock session_clock = {});
  ~ControlServer();
  ControlServer(const ControlServer&) = delete;
  ControlServer& operator=(const ControlServer&) = delete;

  // -- manager side (token-checked) --
  Session login(std::string_view user, std::string_view password);
  void logout(std::string_view token);
  Session authenticate(std::string_view token);
  std::vector<StatusRow> status_table(std::string_view token);
  std::vector<ControlRow> control_table(std::string_view token);
  CommandEnvelope issue_command(std::string_view token, std::string_view device, std::string_view command,
                                std::optional<double> duration_s, std::string_view target = {});
  CommandEnvelope set_schedule(std::string_view token, std::string_view actuator, double start_time_of_day,
                               double duration_s);
  std::vector<CommandEnvelope> commands(std::string_view token);
  std::string export_history(std::string_view token, std::string_view sensor, double from, double to);

  // Scripted commands from the scenario runner; no session involved.
  CommandEnvelope issue_as(std::string_view user, std::string_view device, std::string_view command,
                           std::optional<double> duration_s, std::string_view target = {});
  std::uint64_t last_sync_id() const;

  // -- gateway side --
  bool apply_snapshot(const Snapshot& snapshot);  // false: duplicate/old
  std::vector<FieldCommand> take_dispatch();
  void apply_report(const FieldReport& report);

  // -- unauthenticated internals for the runner, tests and the C API --
  std::vector<StatusRow> status_rows() const;
  std::vector<ControlRow> control_rows() const;
  std::vector<CommandEnvelope> ledger() const;
  std::optional<CommandEnvelope> command(std::uint64_t id) const;
  std::vector<HistoryEntry> history(SensorKind kind, double from, double to) const;
  double sim_time() const;
  std::uint64_t next_command_id() const;
  ActuatorState present_actuators() const;

  // Events with seq > after; blocks up to timeout_s when none are ready.
  std::vector<ServerEvent> events_since(std::uint64_t after, double timeout_s = 0.0);
  std::uint64_t last_event_seq() const;
  void shutdown();  // wakes event waiters; flushes the log
  bool stopping() const;

  // Persistence warnings raised during recovery.
  const std::vector<std::string>& recovery_warnings() const { return warnings_; }
  void compact();

  SessionManager& sessions() { return sessions_; }

private:
  const Session& require(std::string_view token);
  CommandEnvelope issue_checked(const Session& s, std::string_view device, std::string_view command,
                                std::optional<double> duration, std::string_view target);
  CommandEnvelope& issue_locked(const Session& s, CommandEnvelope env);
  void transition(CommandEnvelope& env, CommandState to, std::string reason = {});
  void sweep_timeouts();
  void publish(std::string type, std::string payload);
  bool logging() const { return log_ && !replaying_; }
  void persist(const std::string& line);
  void record_command(const CommandEnvelope& env);
  std::string state_json() const;
  void load_state_json(const std::string& text);
  void replay(const std::string& line);
  void apply_snapshot_locked(const Snapshot& snapshot);
  void apply_report_locked(const FieldReport& report);
  std::vector<StatusRow> status_rows_locked() const;
  std::vector<ControlRow> control_rows_locked() const;
  bool alarm_locked() const;

  ServerParams params_;
  SessionManager sessions_;
  mutable std::mutex mu_;
  std::condition_variable cv_;

  std::vector<LiveRow> rows_;
  std::vector<gateway::Fifo<HistoryEntry>> history_;
  std::uint64_t last_sync_id_ = 0;
  double sim_time_ = 0.0;
  ActuatorState actuators_;
  bool have_report_ = false;
  std::string standby_selection_;  // sensor key, empty = none

  std::map<std::uint64_t, CommandEnvelope> commands_;
  std::uint64_t next_id_ = 1;

  std::deque<ServerEvent> events_;
  std::uint64_t event_seq_ = 0;
  bool stopping_ = false;

  std::unique_ptr<EventLog> log_;
  std::uint64_t rev_ = 0;  // revision of the last logged record
  bool replaying_ = false;
  std::vector<std::string> warnings_;
};

std::string history_csv_header();
void append_history_row(std::string& out, const HistoryEntry& e);

}  // namespace digirr::ctrlserver
