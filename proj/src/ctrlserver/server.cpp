#include "ctrlserver/server.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "ctrlserver/messages.hpp"
#include "ctrlserver/persist.hpp"

namespace digirr::ctrlserver {

const char* to_string(CommandState s) {
  switch (s) {
    case CommandState::pending: return "Pending";
    case CommandState::dispatched: return "Dispatched";
    case CommandState::acked: return "Acked";
    case CommandState::completed: return "Completed";
    case CommandState::expired: return "Expired";
  }
  return "?";
}

std::optional<CommandState> parse_command_state(std::string_view s) {
  for (auto st : {CommandState::pending, CommandState::dispatched, CommandState::acked,
                  CommandState::completed, CommandState::expired})
    if (s == to_string(st)) return st;
  return std::nullopt;
}

std::string_view key(Device d) {
  switch (d) {
    case Device::deep_well_pump: return "deep_well_pump";
    case Device::lake_pump: return "lake_pump";
    case Device::fwgs_water_feed: return "fwgs_water_feed";
    case Device::fwgs_drug_feed: return "fwgs_drug_feed";
    case Device::standby_selector: return "standby_selector";
    case Device::feed_tap: return "feed_tap";
  }
  return "?";
}

std::string_view label(Device d) {
  switch (d) {
    case Device::deep_well_pump: return "Deep well pump";
    case Device::lake_pump: return "Pump from lake";
    case Device::fwgs_water_feed: return "FWGS from pump or lake";
    case Device::fwgs_drug_feed: return "FWGS from Drug Solution";
    case Device::standby_selector: return "Standby Transducer/ Select";
    case Device::feed_tap: return "Irrigation feed tap";
  }
  return "?";
}

std::optional<Device> parse_device(std::string_view s) {
  for (auto d : {Device::deep_well_pump, Device::lake_pump, Device::fwgs_water_feed, Device::fwgs_drug_feed,
                 Device::standby_selector, Device::feed_tap})
    if (s == key(d) || s == label(d)) return d;
  // Actuator names are accepted too.
  if (s == "fwgs_water_valve") return Device::fwgs_water_feed;
  if (s == "fwgs_drug_valve") return Device::fwgs_drug_feed;
  return std::nullopt;
}

std::optional<Actuator> actuator_for(Device d) {
  switch (d) {
    case Device::deep_well_pump: return Actuator::deep_well_pump;
    case Device::lake_pump: return Actuator::lake_pump;
    case Device::fwgs_water_feed: return Actuator::fwgs_water_valve;
    case Device::fwgs_drug_feed: return Actuator::fwgs_drug_valve;
    case Device::feed_tap: return Actuator::feed_tap;
    case Device::standby_selector: return std::nullopt;
  }
  return std::nullopt;
}

namespace {

Device device_for(Actuator a) {
  switch (a) {
    case Actuator::deep_well_pump: return Device::deep_well_pump;
    case Actuator::lake_pump: return Device::lake_pump;
    case Actuator::fwgs_water_valve: return Device::fwgs_water_feed;
    case Actuator::fwgs_drug_valve: return Device::fwgs_drug_feed;
    case Actuator::feed_tap: return Device::feed_tap;
  }
  return Device::feed_tap;
}

bool allowed(CommandState from, CommandState to) {
  using S = CommandState;
  switch (from) {
    case S::pending: return to == S::dispatched || to == S::expired;
    case S::dispatched: return to == S::acked || to == S::expired;
    case S::acked: return to == S::completed || to == S::expired;
    default: return false;
  }
}

}  // namespace

std::string_view to_string(Verb v) {
  switch (v) {
    case Verb::on: return "ON";
    case Verb::off: return "OFF";
    case Verb::connect_standby: return "ConnectStandby";
    case Verb::no_change: return "NoChange";
    case Verb::set_schedule: return "SetSchedule";
  }
  return "?";
}

std::optional<Verb> parse_verb(std::string_view s) {
  for (auto v : {Verb::on, Verb::off, Verb::connect_standby, Verb::no_change, Verb::set_schedule})
    if (s == to_string(v)) return v;
  if (s == "Connect Standby") return Verb::connect_standby;
  return std::nullopt;
}

std::string history_csv_header() { return "time,kind,value,flags\n"; }

void append_history_row(std::string& out, const HistoryEntry& e) {
  csv::append_double(out, e.time);
  out += ',';
  out += key(e.kind);
  out += ',';
  csv::append_double(out, e.value);
  out += ',';
  csv::append_int(out, e.flags);
  out += '\n';
}

ControlServer::ControlServer(ServerParams params, UserStore users, SessionManager::Clock clock)
    : params_(std::move(params)), sessions_(std::move(users), params_.auth, std::move(clock)) {
  for (const auto& s : params_.sensors) {
    LiveRow r;
    r.kind = s.kind;
    r.node_id = s.node_id;
    rows_.push_back(r);
    history_.emplace_back(params_.history_capacity);
  }
  if (params_.state_dir) {
    log_ = std::make_unique<EventLog>(*params_.state_dir);
    auto rec = log_->recover();
    warnings_ = rec.warnings;
    replaying_ = true;
    if (rec.state) load_state_json(*rec.state);
    for (const auto& line : rec.records) replay(line);
    replaying_ = false;
    // Sessions are never persisted: a restart logs everybody out.
    sessions_.invalidate_all();
  }
}

ControlServer::~ControlServer() {
  std::lock_guard lk(mu_);
  if (log_) log_->flush();
}

const Session& ControlServer::require(std::string_view token) { return sessions_.validate(token); }

Session ControlServer::login(std::string_view user, std::string_view password) {
  std::lock_guard lk(mu_);
  return sessions_.login(user, password);
}

void ControlServer::logout(std::string_view token) {
  std::lock_guard lk(mu_);
  require(token);
  sessions_.logout(token);
}

Session ControlServer::authenticate(std::string_view token) {
  std::lock_guard lk(mu_);
  return require(token);
}

std::vector<StatusRow> ControlServer::status_table(std::string_view token) {
  std::lock_guard lk(mu_);
  require(token);
  return status_rows_locked();
}

std::vector<ControlRow> ControlServer::control_table(std::string_view token) {
  std::lock_guard lk(mu_);
  require(token);
  return control_rows_locked();
}

std::vector<StatusRow> ControlServer::status_rows() const {
  std::lock_guard lk(mu_);
  return status_rows_locked();
}

std::vector<ControlRow> ControlServer::control_rows() const {
  std::lock_guard lk(mu_);
  return control_rows_locked();
}

std::vector<StatusRow> ControlServer::status_rows_locked() const {
  std::vector<StatusRow> out;
  for (const auto& r : rows_) {
    StatusRow s;
    s.kind = r.kind;
    s.sensor_name = display_name(r.kind);
    s.unit = unit(r.kind);
    s.has_data = r.has_data;
    s.present_data = r.last_value;
    if (r.last_test_time >= 0.0) s.test_done_before = std::max(0.0, sim_time_ - r.last_test_time);
    s.test_status = r.has_data ? fieldnet::to_string(r.test_status) : "no data";
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ControlRow> ControlServer::control_rows_locked() const {
  std::vector<ControlRow> out;
  for (auto d : kControlRows) {
    ControlRow row;
    row.device = d;
    row.label = label(d);
    if (d == Device::standby_selector) {
      row.present_status = standby_selection_.empty()
                               ? "Select"
                               : std::string(display_name(*parse_sensor_kind(standby_selection_)));
    } else if (!have_report_) {
      row.present_status = "no data";
    } else {
      row.present_status = actuators_.get(*actuator_for(d)) ? "ON" : "OFF";
    }
    row.control_command = std::string(to_string(Verb::no_change));
    for (auto it = commands_.rbegin(); it != commands_.rend(); ++it) {
      const auto& c = it->second;
      if (c.device != d || c.verb == Verb::set_schedule) continue;
      row.control_command = std::string(to_string(c.verb));
      row.duration_s = c.duration_s;
      row.pending = c.state == CommandState::pending || c.state == CommandState::dispatched;
      break;
    }
    out.push_back(std::move(row));
  }
  return out;
}

bool ControlServer::alarm_locked() const {
  return std::any_of(rows_.begin(), rows_.end(), [](const LiveRow& r) {
    return r.has_data && r.test_status != fieldnet::TestStatus::ok;
  });
}

CommandEnvelope ControlServer::issue_command(std::string_view token, std::string_view device,
                                             std::string_view command, std::optional<double> duration,
                                             std::string_view target) {
  std::lock_guard lk(mu_);
  const Session s = require(token);
  return issue_checked(s, device, command, duration, target);
}

CommandEnvelope ControlServer::issue_as(std::string_view user, std::string_view device, std::string_view command,
                                        std::optional<double> duration, std::string_view target) {
  std::lock_guard lk(mu_);
  Session s;
  s.user = std::string(user);
  s.role = Role::admin;
  return issue_checked(s, device, command, duration, target);
}

CommandEnvelope ControlServer::issue_checked(const Session& s, std::string_view device, std::string_view command,
                                             std::optional<double> duration, std::string_view target) {
  const auto d = parse_device(device);
  if (!d) fail(ErrorKind::validation, "unknown device '" + std::string(device) + "'");
  const auto v = parse_verb(command);
  if (!v) fail(ErrorKind::validation, "unknown command '" + std::string(command) + "'");
  if (duration && !(std::isfinite(*duration) && *duration > 0.0))
    fail(ErrorKind::validation, "duration_s must be a positive number of seconds");

  CommandEnvelope env;
  env.device = *d;
  env.verb = *v;
  env.duration_s = duration;
  switch (*v) {
    case Verb::no_change: fail(ErrorKind::validation, "NoChange issues no command");
    case Verb::set_schedule: fail(ErrorKind::validation, "use the schedule endpoint for SetSchedule");
    case Verb::on:
    case Verb::off:
      if (*d == Device::standby_selector)
        fail(ErrorKind::validation, "the standby selector only takes ConnectStandby");
      if (*v == Verb::on && !duration) fail(ErrorKind::validation, "ON requires duration_s");
      if (*v == Verb::off && duration) fail(ErrorKind::validation, "OFF takes no duration_s");
      break;
    case Verb::connect_standby: {
      if (*d != Device::standby_selector)
        fail(ErrorKind::validation, "ConnectStandby applies to the standby selector only");
      if (!duration) fail(ErrorKind::validation, "ConnectStandby requires duration_s");
      const auto k = parse_sensor_kind(target);
      if (!k) fail(ErrorKind::validation, "unknown standby target '" + std::string(target) + "'");
      env.target = key(*k);
      break;
    }
  }
  return issue_locked(s, std::move(env));
}

CommandEnvelope ControlServer::set_schedule(std::string_view token, std::string_view actuator,
                                            double start, double duration) {
  std::lock_guard lk(mu_);
  const Session& s = require(token);
  if (s.role != Role::admin) fail(ErrorKind::auth, "schedule changes need an admin session");
  const auto a = parse_actuator(actuator);
  if (!a) fail(ErrorKind::validation, "unknown actuator '" + std::string(actuator) + "'");
  if (!(std::isfinite(start) && start >= 0.0 && start < 86400.0))
    fail(ErrorKind::validation, "start_time_of_day must be in [0, 86400)");
  if (!(std::isfinite(duration) && duration > 0.0 && duration <= 86400.0))
    fail(ErrorKind::validation, "duration_s must be in (0, 86400]");
  CommandEnvelope env;
  env.device = device_for(*a);
  env.verb = Verb::set_schedule;
  env.duration_s = duration;
  env.schedule_start = start;
  env.target = key(*a);
  return issue_locked(s, std::move(env));
}

CommandEnvelope& ControlServer::issue_locked(const Session& s, CommandEnvelope env) {
  env.id = next_id_++;
  env.issued_by = s.user;
  env.issued_at = sim_time_;
  env.updated_at = sim_time_;
  env.state = CommandState::pending;

  // Latest wins among commands not yet handed to the gateway.
  const bool sched = env.verb == Verb::set_schedule;
  for (auto& [id, c] : commands_)
    if (c.state == CommandState::pending && c.device == env.device && (c.verb == Verb::set_schedule) == sched)
      transition(c, CommandState::expired, "superseded by #" + std::to_string(env.id));

  auto& stored = commands_[env.id] = std::move(env);
  record_command(stored);
  publish("command", encode(stored).dump());
  publish("control", encode_control_table(control_rows_locked()).dump());
  return stored;
}

void ControlServer::transition(CommandEnvelope& env, CommandState to, std::string reason) {
  if (!allowed(env.state, to)) return;
  env.state = to;
  env.updated_at = sim_time_;
  if (!reason.empty()) env.reason = std::move(reason);
  record_command(env);
  if (params_.publish_events) publish("command", encode(env).dump());
}

std::vector<CommandEnvelope> ControlServer::commands(std::string_view token) {
  std::lock_guard lk(mu_);
  require(token);
  std::vector<CommandEnvelope> out;
  for (const auto& [id, c] : commands_) out.push_back(c);
  return out;
}

std::vector<CommandEnvelope> ControlServer::ledger() const {
  std::lock_guard lk(mu_);
  std::vector<CommandEnvelope> out;
  for (const auto& [id, c] : commands_) out.push_back(c);
  return out;
}

std::optional<CommandEnvelope> ControlServer::command(std::uint64_t id) const {
  std::lock_guard lk(mu_);
  auto it = commands_.find(id);
  if (it == commands_.end()) return std::nullopt;
  return it->second;
}

std::string ControlServer::export_history(std::string_view token, std::string_view sensor, double from,
                                          double to) {
  std::lock_guard lk(mu_);
  require(token);
  const auto k = parse_sensor_kind(sensor);
  if (!k) fail(ErrorKind::validation, "unknown sensor '" + std::string(sensor) + "'");
  std::string out = history_csv_header();
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].kind != *k) continue;
    for (const auto& e : history_[i].items())
      if (e.time >= from && e.time <= to) append_history_row(out, e);
  }
  return out;
}

std::vector<HistoryEntry> ControlServer::history(SensorKind kind, double from, double to) const {
  std::lock_guard lk(mu_);
  std::vector<HistoryEntry> out;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].kind != kind) continue;
    for (const auto& e : history_[i].items())
      if (e.time >= from && e.time <= to) out.push_back(e);
  }
  return out;
}

std::uint64_t ControlServer::last_sync_id() const {
  std::lock_guard lk(mu_);
  return last_sync_id_;
}

double ControlServer::sim_time() const {
  std::lock_guard lk(mu_);
  return sim_time_;
}

std::uint64_t ControlServer::next_command_id() const {
  std::lock_guard lk(mu_);
  return next_id_;
}

ActuatorState ControlServer::present_actuators() const {
  std::lock_guard lk(mu_);
  return actuators_;
}

bool ControlServer::apply_snapshot(const Snapshot& snap) {
  std::lock_guard lk(mu_);
  if (snap.sync_id <= last_sync_id_) return false;
  apply_snapshot_locked(snap);
  sweep_timeouts();
  if (logging()) persist(json{{"op", "snapshot"}, {"snapshot", encode(snap)}}.dump());
  if (params_.publish_events) publish("status", encode_status_table(status_rows_locked()).dump());
  return true;
}

void ControlServer::apply_snapshot_locked(const Snapshot& snap) {
  for (const auto& incoming : snap.rows)
    for (auto& r : rows_)
      if (r.kind == incoming.kind) r = incoming;
  for (const auto& e : snap.history)
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (rows_[i].kind == e.kind) history_[i].push(e);
  sim_time_ = std::max(sim_time_, snap.time);
  last_sync_id_ = snap.sync_id;
}

std::vector<FieldCommand> ControlServer::take_dispatch() {
  std::lock_guard lk(mu_);
  sweep_timeouts();
  std::vector<FieldCommand> out;
  for (auto& [id, c] : commands_) {
    if (c.state != CommandState::pending) continue;
    FieldCommand f;
    f.id = id;
    switch (c.verb) {
      case Verb::on:
      case Verb::off:
        f.kind = fieldctl::CommandKind::set_actuator;
        f.actuator = key(*actuator_for(c.device));
        f.bit = c.verb == Verb::on;
        f.duration_s = c.duration_s;
        break;
      case Verb::connect_standby:
        f.kind = fieldctl::CommandKind::connect_standby;
        f.standby_target = c.target;
        break;
      case Verb::set_schedule:
        f.kind = fieldctl::CommandKind::set_schedule;
        f.actuator = c.target;
        f.schedule.start_time_of_day = c.schedule_start.value_or(0.0);
        f.schedule.duration = c.duration_s.value_or(0.0);
        break;
      case Verb::no_change: continue;
    }
    transition(c, CommandState::dispatched);
    out.push_back(std::move(f));
  }
  if (!out.empty() && params_.publish_events) publish("control", encode_control_table(control_rows_locked()).dump());
  return out;
}

void ControlServer::apply_report(const FieldReport& report) {
  std::lock_guard lk(mu_);
  apply_report_locked(report);
}

void ControlServer::apply_report_locked(const FieldReport& report) {
  sim_time_ = std::max(sim_time_, report.time);
  const auto before = params_.publish_events ? control_rows_locked() : std::vector<ControlRow>{};

  for (const auto& a : report.acks) {
    auto it = commands_.find(a.command_id);
    if (it == commands_.end()) continue;
    if (a.ok)
      transition(it->second, CommandState::acked);
    else
      transition(it->second, CommandState::expired, "rejected by field: " + a.reason);
  }
  bool standby_changed = false;
  for (const auto& c : report.completions) {
    auto it = commands_.find(c.command_id);
    if (it == commands_.end()) continue;
    auto& env = it->second;
    if (c.superseded) {
      transition(env, CommandState::expired, "superseded in the field");
    } else {
      if (env.state == CommandState::acked && env.verb == Verb::connect_standby) {
        standby_selection_ = env.target;
        standby_changed = true;
      }
      transition(env, CommandState::completed);
    }
  }

  const bool changed = !have_report_ || !(actuators_ == report.actuators) || standby_changed;
  actuators_ = report.actuators;
  have_report_ = true;
  if (changed && logging())
    persist(json{{"op", "report"},
                 {"time", report.time},
                 {"actuators", encode(actuators_)},
                 {"standby", standby_selection_}}
                .dump());
  sweep_timeouts();

  if (!params_.publish_events) return;
  const auto after = control_rows_locked();
  bool differs = before.size() != after.size();
  for (std::size_t i = 0; !differs && i < after.size(); ++i)
    differs = before[i].present_status != after[i].present_status ||
              before[i].control_command != after[i].control_command || before[i].pending != after[i].pending;
  if (differs) publish("control", encode_control_table(after).dump());
}

void ControlServer::sweep_timeouts() {
  for (auto& [id, c] : commands_) {
    if (c.state != CommandState::pending && c.state != CommandState::dispatched) continue;
    const double timeout =
        c.verb == Verb::connect_standby ? c.duration_s.value_or(params_.default_ack_timeout) : params_.default_ack_timeout;
    if (sim_time_ > c.issued_at + timeout) transition(c, CommandState::expired, "no field ack within timeout");
  }
}

void ControlServer::publish(std::string type, std::string payload) {
  if (replaying_ || !params_.publish_events) return;
  ServerEvent e{++event_seq_, std::move(type), std::move(payload), alarm_locked()};
  events_.push_back(std::move(e));
  while (events_.size() > params_.event_backlog) events_.pop_front();
  cv_.notify_all();
}

std::vector<ServerEvent> ControlServer::events_since(std::uint64_t after, double timeout_s) {
  std::unique_lock lk(mu_);
  auto ready = [&] { return stopping_ || event_seq_ > after; };
  if (timeout_s > 0.0)
    cv_.wait_for(lk, std::chrono::duration<double>(timeout_s), ready);
  std::vector<ServerEvent> out;
  for (const auto& e : events_)
    if (e.seq > after) out.push_back(e);
  return out;
}

std::uint64_t ControlServer::last_event_seq() const {
  std::lock_guard lk(mu_);
  return event_seq_;
}

void ControlServer::shutdown() {
  std::lock_guard lk(mu_);
  stopping_ = true;
  if (log_) log_->flush();
  cv_.notify_all();
}

bool ControlServer::stopping() const {
  std::lock_guard lk(mu_);
  return stopping_;
}

void ControlServer::record_command(const CommandEnvelope& env) {
  if (logging()) persist(json{{"op", "command"}, {"command", encode(env)}}.dump());
}

void ControlServer::persist(const std::string& body) {
  if (!log_ || replaying_) return;
  // Records are written as {"rev":N,...}: splice the revision in front.
  std::string line = "{\"rev\":" + std::to_string(++rev_) + "," + body.substr(1);
  log_->append(line);
  if (log_->records_since_compaction() >= params_.compact_every) {
    log_->compact(state_json());
  } else {
    log_->flush();
  }
}

void ControlServer::compact() {
  std::lock_guard lk(mu_);
  if (log_) log_->compact(state_json());
}

std::string ControlServer::state_json() const {
  json rows = json::array();
  for (const auto& r : rows_) rows.push_back(encode(r));
  json cmds = json::array();
  for (const auto& [id, c] : commands_) cmds.push_back(encode(c));
  json hist = json::object();
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    json a = json::array();
    for (const auto& e : history_[i].items()) a.push_back(encode(e));
    hist[std::string(key(rows_[i].kind))] = std::move(a);
  }
  return json{{"rev", rev_},
              {"next_command_id", next_id_},
              {"last_sync_id", last_sync_id_},
              {"sim_time", sim_time_},
              {"have_report", have_report_},
              {"actuators", encode(actuators_)},
              {"standby", standby_selection_},
              {"rows", rows},
              {"commands", cmds},
              {"history", hist}}
      .dump();
}

void ControlServer::load_state_json(const std::string& text) {
  const json j = json::parse(text);
  rev_ = j.at("rev").get<std::uint64_t>();
  next_id_ = j.at("next_command_id").get<std::uint64_t>();
  last_sync_id_ = j.at("last_sync_id").get<std::uint64_t>();
  sim_time_ = j.at("sim_time").get<double>();
  have_report_ = j.at("have_report").get<bool>();
  actuators_ = decode_actuators(j.at("actuators"));
  standby_selection_ = j.at("standby").get<std::string>();
  for (const auto& r : j.at("rows")) {
    const auto row = decode_live_row(r);
    for (auto& mine : rows_)
      if (mine.kind == row.kind) mine = row;
  }
  for (const auto& c : j.at("commands")) {
    auto env = decode_envelope(c);
    commands_[env.id] = env;
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto k = std::string(key(rows_[i].kind));
    if (!j.at("history").contains(k)) continue;
    for (const auto& e : j["history"][k]) history_[i].push(decode_history_entry(e));
  }
}

void ControlServer::replay(const std::string& line) {
  const json j = json::parse(line);
  const auto rev = j.at("rev").get<std::uint64_t>();
  if (rev <= rev_) return;
  rev_ = rev;
  const auto op = j.at("op").get<std::string>();
  if (op == "snapshot") {
    const auto snap = decode_snapshot(j.at("snapshot"));
    if (snap.sync_id > last_sync_id_) apply_snapshot_locked(snap);
  } else if (op == "command") {
    auto env = decode_envelope(j.at("command"));
    next_id_ = std::max(next_id_, env.id + 1);
    commands_[env.id] = std::move(env);
  } else if (op == "report") {
    actuators_ = decode_actuators(j.at("actuators"));
    standby_selection_ = j.at("standby").get<std::string>();
    sim_time_ = std::max(sim_time_, j.at("time").get<double>());
    have_report_ = true;
  } else {
    warnings_.push_back("event log: unknown record op '" + op + "' skipped");
  }
}

}  // namespace digirr::ctrlserver
