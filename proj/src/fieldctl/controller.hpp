#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "common/actuators.hpp"
#include "common/kinds.hpp"

namespace digirr::fieldctl {

// Daily window [start_time_of_day, start_time_of_day + duration), may wrap
// past midnight.
struct ScheduleEntry {
  double start_time_of_day = 0.0;  // s
  double duration = 0.0;           // s
  Actuator target = Actuator::feed_tap;

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

// Throws Error(config) for non-positive durations or overlapping windows on
// the same actuator.
void validate_schedule(std::span<const ScheduleEntry> schedule, double day_length = 86400.0);
bool schedule_bit(std::span<const ScheduleEntry> schedule, Actuator a, double t,
                  double day_length = 86400.0);

// Periodic pest spraying: both FWGS valves open for `duration` every
// `period_days`, starting at `first_start`.
struct SprayCycle {
  double period_days = 7.0;
  double duration = 600.0;       // s
  double first_start = 9 * 3600.0;  // s since epoch
};

SprayCycle pest_spray_cycle(double period_days, double duration_s, double first_start = 9 * 3600.0);
bool spray_active(const SprayCycle& cycle, double t);
// Number of spray windows that start within [0, horizon).
std::size_t spray_windows(const SprayCycle& cycle, double horizon);

struct PumpPolicy {
  double moisture_low = 0.25;
  double tank_low = 1.5;     // m
  double tank_high = 4.5;    // m, pumping stops here
  double lake_min = 10.0;    // m
  double balance_margin_h = 5.0;
};

enum class PumpChoice { none, lake_pump, deep_well_pump };

// No demand while soil is moist and the tank is above its low mark;
// otherwise prefer the lake while it is above lake_min, unless the lake
// pump's runtime already leads the deep well's by more than the margin.
PumpChoice select_pump(double moisture, double lake_level, double tank_level,
                       double lake_runtime_h, double deep_runtime_h, const PumpPolicy& policy);

struct Ack {
  std::uint64_t command_id = 0;
  bool ok = false;
  std::string reason;
};

// Relay bank emulating the PIC outputs: one latched bit per actuator.
class RelayBank {
public:
  Ack set_relay(std::string_view actuator, bool bit, std::uint64_t command_id);
  void set(Actuator a, bool bit) { state_.set(a, bit); }
  const ActuatorState& state() const { return state_; }

private:
  ActuatorState state_;
};

struct OverrideRecord {
  std::uint64_t command_id = 0;
  Actuator actuator = Actuator::feed_tap;
  bool bit = false;
  double expires_at = 0.0;
};

enum class CauseKind { schedule, override_cmd, spray, automatic, repair };

struct Cause {
  CauseKind kind = CauseKind::schedule;
  std::uint64_t command_id = 0;  // override only

  std::string to_string() const;
};

struct ActuationLogEntry {
  double t = 0.0;
  Actuator actuator = Actuator::feed_tap;
  bool bit = false;
  Cause cause;
};

enum class CommandKind { set_actuator, connect_standby, set_schedule };

struct FieldCommand {
  std::uint64_t id = 0;
  CommandKind kind = CommandKind::set_actuator;
  std::string actuator;                  // set_actuator, set_schedule
  bool bit = false;                      // set_actuator
  std::optional<double> duration_s;      // ON overrides
  std::string standby_target;            // connect_standby: sensor key
  ScheduleEntry schedule;                // set_schedule
};

enum class CompletionOutcome { completed, superseded };

struct Completion {
  std::uint64_t command_id = 0;
  CompletionOutcome outcome = CompletionOutcome::completed;
  double t = 0.0;
};

struct SensorSnapshot {
  double moisture = 0.35;
  double lake_level = 40.0;
  double tank_level = 3.0;
};

struct ControllerConfig {
  double dt = 60.0;
  double day_length = 86400.0;
  std::vector<ScheduleEntry> schedule;
  std::optional<SprayCycle> spray;
  PumpPolicy pumps;
  bool auto_pumps = true;
  bool auto_irrigation = true;
  double moisture_hysteresis = 0.05;
  double off_hold_s = 3600.0;  // life of an OFF override (no duration given)
};

// The PIC-emulating control loop. Pure in (t, schedule, overrides, sensor
// snapshot) apart from the auto-control hysteresis latches.
class FieldController {
public:
  explicit FieldController(ControllerConfig config);

  // Standby-connect requests go through this port to the sensor nodes.
  using StandbyPort = std::function<bool(SensorKind)>;
  void set_standby_port(StandbyPort port) { standby_port_ = std::move(port); }

  // Exactly-once by command id: a replayed id is acknowledged again without
  // re-applying it.
  Ack receive(const FieldCommand& cmd, double now);

  const ActuatorState& tick(double t, const SensorSnapshot& sensors);

  const ActuatorState& state() const { return relays_.state(); }
  std::span<const OverrideRecord> overrides() const { return overrides_; }
  std::vector<Completion> take_completions();
  std::vector<ActuationLogEntry> take_log();
  const std::vector<ScheduleEntry>& schedule() const { return config_.schedule; }

  double runtime_hours(Actuator pump) const;
  std::uint64_t conflicts_repaired() const { return conflicts_; }

private:
  const OverrideRecord* override_for(Actuator a) const;
  void expire(double t);
  // Recomputes every output at t and latches it into the relay bank.
  void drive(double t);

  ControllerConfig config_;
  RelayBank relays_;
  std::vector<OverrideRecord> overrides_;
  std::map<std::uint64_t, Ack> acked_;  // replay answers by command id
  std::vector<Completion> completions_;
  std::vector<ActuationLogEntry> log_;
  StandbyPort standby_port_;
  PumpChoice pump_latch_ = PumpChoice::none;
  bool tap_latch_ = false;
  double lake_runtime_s_ = 0.0;
  double deep_runtime_s_ = 0.0;
  bool first_tick_ = true;
  SensorSnapshot sensors_;
  std::uint64_t conflicts_ = 0;
};

// Enforces the ActuatorState invariants, favouring override-driven bits.
// `source[i]` is the override command id driving actuator i (0 = program).
void repair_invariants(ActuatorState& bits, std::array<std::uint64_t, 5>& source,
                       std::array<bool, 5>& repaired);

}  // namespace digirr::fieldctl
