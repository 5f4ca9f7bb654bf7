#include "fieldctl/controller.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "common/error.hpp"

namespace digirr::fieldctl {
namespace {

constexpr std::size_t idx(Actuator a) { return static_cast<std::size_t>(a); }

double wrap(double x, double period) {
  const double r = std::fmod(x, period);
  return r < 0 ? r + period : r;
}

// Splits a daily window into at most two non-wrapping [lo, hi) pieces.
std::vector<std::pair<double, double>> pieces(const ScheduleEntry& e, double day) {
  const double s = wrap(e.start_time_of_day, day);
  if (s + e.duration <= day) return {{s, s + e.duration}};
  return {{s, day}, {0.0, s + e.duration - day}};
}

}  // namespace

void validate_schedule(std::span<const ScheduleEntry> schedule, double day) {
  for (const auto& e : schedule) {
    if (!(e.duration > 0.0)) fail(ErrorKind::config, "schedule entry duration must be > 0");
    if (e.duration > day) fail(ErrorKind::config, "schedule entry longer than a day");
  }
  for (std::size_t i = 0; i < schedule.size(); ++i)
    for (std::size_t j = i + 1; j < schedule.size(); ++j) {
      if (schedule[i].target != schedule[j].target) continue;
      for (auto [a0, a1] : pieces(schedule[i], day))
        for (auto [b0, b1] : pieces(schedule[j], day))
          if (a0 < b1 && b0 < a1)
            fail(ErrorKind::config,
                 "overlapping schedule entries for " + std::string(key(schedule[i].target)));
    }
}

bool schedule_bit(std::span<const ScheduleEntry> schedule, Actuator a, double t, double day) {
  const double tod = wrap(t, day);
  for (const auto& e : schedule)
    if (e.target == a && wrap(tod - e.start_time_of_day, day) < e.duration) return true;
  return false;
}

SprayCycle pest_spray_cycle(double period_days, double duration_s, double first_start) {
  if (!(period_days >= 1.0)) fail(ErrorKind::config, "spray period must be >= 1 day");
  if (!(duration_s > 0.0)) fail(ErrorKind::config, "spray duration must be > 0");
  return {period_days, duration_s, first_start};
}

bool spray_active(const SprayCycle& c, double t) {
  if (t < c.first_start) return false;
  const double period = c.period_days * 86400.0;
  return wrap(t - c.first_start, period) < c.duration;
}

std::size_t spray_windows(const SprayCycle& c, double horizon) {
  if (horizon <= c.first_start) return 0;
  const double period = c.period_days * 86400.0;
  return static_cast<std::size_t>(std::ceil((horizon - c.first_start) / period));
}

PumpChoice select_pump(double moisture, double lake_level, double tank_level,
                       double lake_runtime_h, double deep_runtime_h, const PumpPolicy& p) {
  if (moisture >= p.moisture_low && tank_level >= p.tank_low) return PumpChoice::none;
  if (lake_level > p.lake_min)
    return lake_runtime_h - deep_runtime_h > p.balance_margin_h ? PumpChoice::deep_well_pump
                                                                : PumpChoice::lake_pump;
  return PumpChoice::deep_well_pump;
}

Ack RelayBank::set_relay(std::string_view actuator, bool bit, std::uint64_t command_id) {
  const auto a = parse_actuator(actuator);
  if (!a) return {command_id, false, "unknown actuator '" + std::string(actuator) + "'"};
  state_.set(*a, bit);
  return {command_id, true, {}};
}

std::string Cause::to_string() const {
  switch (kind) {
    case CauseKind::schedule: return "schedule";
    case CauseKind::override_cmd: return "override:" + std::to_string(command_id);
    case CauseKind::spray: return "spray";
    case CauseKind::automatic: return "auto";
    case CauseKind::repair: return "repair";
  }
  return "?";
}

void repair_invariants(ActuatorState& bits, std::array<std::uint64_t, 5>& source,
                       std::array<bool, 5>& repaired) {
  const auto deep = idx(Actuator::deep_well_pump);
  const auto lake = idx(Actuator::lake_pump);
  if (bits.deep_well_pump() && bits.lake_pump()) {
    // The later override keeps its pump; with no override the lake pump stays.
    const auto loser = source[deep] > source[lake] ? Actuator::lake_pump : Actuator::deep_well_pump;
    bits.set(loser, false);
    source[idx(loser)] = 0;
    repaired[idx(loser)] = true;
  }
  const auto water = idx(Actuator::fwgs_water_valve);
  const auto drug = idx(Actuator::fwgs_drug_valve);
  if (bits.fwgs_drug_valve() && !bits.fwgs_water_valve()) {
    // An explicit water-OFF that is newer than whatever wants the drug on
    // closes the drug valve; otherwise the drug demand opens the water.
    if (source[water] != 0 && source[water] > source[drug]) {
      bits.set(Actuator::fwgs_drug_valve, false);
      source[drug] = 0;
      repaired[drug] = true;
    } else {
      bits.set(Actuator::fwgs_water_valve, true);
      source[water] = source[drug];
      repaired[water] = true;
    }
  }
}

FieldController::FieldController(ControllerConfig config) : config_(std::move(config)) {
  if (!(config_.dt > 0.0)) fail(ErrorKind::config, "controller dt must be > 0");
  validate_schedule(config_.schedule, config_.day_length);
}

const OverrideRecord* FieldController::override_for(Actuator a) const {
  for (const auto& o : overrides_)
    if (o.actuator == a) return &o;
  return nullptr;
}

void FieldController::expire(double t) {
  auto it = std::stable_partition(overrides_.begin(), overrides_.end(),
                                  [t](const OverrideRecord& o) { return o.expires_at > t; });
  for (auto e = it; e != overrides_.end(); ++e)
    completions_.push_back({e->command_id, CompletionOutcome::completed, e->expires_at});
  overrides_.erase(it, overrides_.end());
}

Ack FieldController::receive(const FieldCommand& cmd, double now) {
  if (auto it = acked_.find(cmd.id); it != acked_.end()) return it->second;

  Ack ack{cmd.id, true, {}};
  switch (cmd.kind) {
    case CommandKind::set_actuator: {
      const auto a = parse_actuator(cmd.actuator);
      if (!a) {
        ack = {cmd.id, false, "unknown actuator '" + cmd.actuator + "'"};
        break;
      }
      double life = config_.off_hold_s;
      if (cmd.bit) {
        if (!cmd.duration_s || !(*cmd.duration_s > 0.0)) {
          ack = {cmd.id, false, "ON requires a positive duration"};
          break;
        }
        life = *cmd.duration_s;
      } else if (cmd.duration_s && *cmd.duration_s > 0.0) {
        life = *cmd.duration_s;
      }
      expire(now);
      // Latest wins: a newer override on the same actuator ends the old one.
      for (auto it = overrides_.begin(); it != overrides_.end(); ++it)
        if (it->actuator == *a) {
          completions_.push_back({it->command_id, CompletionOutcome::superseded, now});
          overrides_.erase(it);
          break;
        }
      overrides_.push_back({cmd.id, *a, cmd.bit, now + life});
      drive(now);
      break;
    }
    case CommandKind::connect_standby: {
      const auto kind = parse_sensor_kind(cmd.standby_target);
      if (!kind) {
        ack = {cmd.id, false, "unknown sensor '" + cmd.standby_target + "'"};
        break;
      }
      if (!standby_port_ || !standby_port_(*kind)) {
        ack = {cmd.id, false, "standby connect refused"};
        break;
      }
      completions_.push_back({cmd.id, CompletionOutcome::completed, now});
      break;
    }
    case CommandKind::set_schedule: {
      const auto a = parse_actuator(cmd.actuator);
      if (!a) {
        ack = {cmd.id, false, "unknown actuator '" + cmd.actuator + "'"};
        break;
      }
      auto next = config_.schedule;
      std::erase_if(next, [&](const ScheduleEntry& e) { return e.target == *a; });
      ScheduleEntry entry = cmd.schedule;
      entry.target = *a;
      next.push_back(entry);
      try {
        validate_schedule(next, config_.day_length);
      } catch (const Error& e) {
        ack = {cmd.id, false, e.what()};
        break;
      }
      config_.schedule = std::move(next);
      completions_.push_back({cmd.id, CompletionOutcome::completed, now});
      drive(now);
      break;
    }
  }
  acked_.emplace(cmd.id, ack);
  return ack;
}

void FieldController::drive(double t) {
  const auto& s = sensors_;
  ActuatorState program;
  std::array<Cause, 5> cause{};

  for (auto a : kAllActuators)
    if (schedule_bit(config_.schedule, a, t, config_.day_length)) program.set(a, true);

  if (config_.spray && spray_active(*config_.spray, t)) {
    for (auto a : {Actuator::fwgs_water_valve, Actuator::fwgs_drug_valve})
      if (!program.get(a)) {
        program.set(a, true);
        cause[idx(a)] = {CauseKind::spray, 0};
      }
  }

  if (config_.auto_pumps) {
    const auto& p = config_.pumps;
    if (pump_latch_ == PumpChoice::none) {
      if (s.tank_level < p.tank_high) {
        pump_latch_ = select_pump(s.moisture, s.lake_level, s.tank_level, lake_runtime_s_ / 3600.0,
                                  deep_runtime_s_ / 3600.0, p);
      }
    } else if (s.tank_level >= p.tank_high) {
      pump_latch_ = PumpChoice::none;
    } else if (pump_latch_ == PumpChoice::lake_pump && s.lake_level <= p.lake_min) {
      pump_latch_ = PumpChoice::deep_well_pump;
    }
    const auto pump = pump_latch_ == PumpChoice::lake_pump        ? Actuator::lake_pump
                      : pump_latch_ == PumpChoice::deep_well_pump ? Actuator::deep_well_pump
                                                                  : Actuator::feed_tap;
    if (pump_latch_ != PumpChoice::none && !program.get(pump)) {
      program.set(pump, true);
      cause[idx(pump)] = {CauseKind::automatic, 0};
    }
  }

  if (config_.auto_irrigation) {
    if (s.moisture < config_.pumps.moisture_low)
      tap_latch_ = true;
    else if (s.moisture >= config_.pumps.moisture_low + config_.moisture_hysteresis)
      tap_latch_ = false;
    if (tap_latch_ && !program.feed_tap()) {
      program.set(Actuator::feed_tap, true);
      cause[idx(Actuator::feed_tap)] = {CauseKind::automatic, 0};
    }
  }

  ActuatorState out = program;
  std::array<std::uint64_t, 5> source{};
  for (const auto& o : overrides_) {
    if (o.expires_at <= t) continue;
    out.set(o.actuator, o.bit);
    source[idx(o.actuator)] = o.command_id;
    cause[idx(o.actuator)] = {CauseKind::override_cmd, o.command_id};
  }

  std::array<bool, 5> repaired{};
  repair_invariants(out, source, repaired);
  for (auto a : kAllActuators)
    if (repaired[idx(a)]) {
      cause[idx(a)] = {CauseKind::repair, 0};
      ++conflicts_;
    }

  const ActuatorState before = relays_.state();
  for (auto a : kAllActuators) {
    const bool bit = out.get(a);
    if (bit != before.get(a) || (first_tick_ && bit)) log_.push_back({t, a, bit, cause[idx(a)]});
    relays_.set(a, bit);
  }
  first_tick_ = false;
}

const ActuatorState& FieldController::tick(double t, const SensorSnapshot& sensors) {
  sensors_ = sensors;
  expire(t);
  drive(t);
  if (relays_.state().lake_pump()) lake_runtime_s_ += config_.dt;
  if (relays_.state().deep_well_pump()) deep_runtime_s_ += config_.dt;
  return relays_.state();
}

std::vector<Completion> FieldController::take_completions() { return std::exchange(completions_, {}); }

std::vector<ActuationLogEntry> FieldController::take_log() { return std::exchange(log_, {}); }

double FieldController::runtime_hours(Actuator pump) const {
  if (pump == Actuator::lake_pump) return lake_runtime_s_ / 3600.0;
  if (pump == Actuator::deep_well_pump) return deep_runtime_s_ / 3600.0;
  return 0.0;
}

}  // namespace digirr::fieldctl
