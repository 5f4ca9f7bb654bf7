#include "ctrlserver/messages.hpp"

#include "common/error.hpp"

namespace digirr::ctrlserver {
namespace {

SensorKind kind_of(const json& j) {
  auto k = parse_sensor_kind(j.get<std::string>());
  if (!k) fail(ErrorKind::parse, "unknown sensor kind " + j.dump());
  return *k;
}

fieldnet::TestStatus status_of(std::string_view s) {
  if (s == "OK") return fieldnet::TestStatus::ok;
  if (s == "Error") return fieldnet::TestStatus::error;
  if (s == "NeedsReplacement") return fieldnet::TestStatus::needs_replacement;
  fail(ErrorKind::parse, "unknown test status " + std::string(s));
}

}  // namespace

json encode(const HistoryEntry& e) {
  return {{"t", e.time}, {"kind", key(e.kind)}, {"value", e.value}, {"flags", e.flags}};
}

HistoryEntry decode_history_entry(const json& j) {
  return {j.at("t").get<double>(), kind_of(j.at("kind")), j.at("value").get<double>(),
          j.at("flags").get<std::uint8_t>()};
}

json encode(const LiveRow& r) {
  json j{{"kind", key(r.kind)},
         {"node_id", r.node_id},
         {"has_data", r.has_data},
         {"last_value", r.last_value},
         {"last_frame_time", r.last_frame_time},
         {"last_test_time", r.last_test_time},
         {"test_status", fieldnet::to_string(r.test_status)},
         {"flags", r.flags}};
  return j;
}

LiveRow decode_live_row(const json& j) {
  LiveRow r;
  r.kind = kind_of(j.at("kind"));
  r.node_id = j.at("node_id").get<std::uint8_t>();
  r.has_data = j.at("has_data").get<bool>();
  r.last_value = j.at("last_value").get<double>();
  r.last_frame_time = j.at("last_frame_time").get<double>();
  r.last_test_time = j.at("last_test_time").get<double>();
  r.test_status = status_of(j.at("test_status").get<std::string>());
  r.flags = j.at("flags").get<std::uint8_t>();
  return r;
}

json encode(const Snapshot& s) {
  json rows = json::array();
  for (const auto& r : s.rows) rows.push_back(encode(r));
  json hist = json::array();
  for (const auto& e : s.history) hist.push_back(encode(e));
  return {{"sync_id", s.sync_id}, {"time", s.time}, {"rows", rows}, {"history", hist}};
}

Snapshot decode_snapshot(const json& j) {
  Snapshot s;
  s.sync_id = j.at("sync_id").get<std::uint64_t>();
  s.time = j.at("time").get<double>();
  for (const auto& r : j.at("rows")) s.rows.push_back(decode_live_row(r));
  for (const auto& e : j.at("history")) s.history.push_back(decode_history_entry(e));
  return s;
}

json encode(const ActuatorState& a) {
  json j = json::object();
  for (auto act : kAllActuators) j[std::string(key(act))] = a.get(act);
  return j;
}

ActuatorState decode_actuators(const json& j) {
  ActuatorState a;
  for (auto act : kAllActuators) a.set(act, j.value(std::string(key(act)), false));
  return a;
}

json encode(const FieldReport& r) {
  json acks = json::array();
  for (const auto& a : r.acks)
    acks.push_back({{"id", a.command_id}, {"ok", a.ok}, {"reason", a.reason}, {"t", a.time}});
  json done = json::array();
  for (const auto& c : r.completions)
    done.push_back({{"id", c.command_id}, {"superseded", c.superseded}, {"t", c.time}});
  return {{"time", r.time}, {"acks", acks}, {"completions", done}, {"actuators", encode(r.actuators)}};
}

FieldReport decode_field_report(const json& j) {
  FieldReport r;
  r.time = j.at("time").get<double>();
  for (const auto& a : j.at("acks"))
    r.acks.push_back({a.at("id").get<std::uint64_t>(), a.at("ok").get<bool>(),
                      a.value("reason", std::string{}), a.at("t").get<double>()});
  for (const auto& c : j.at("completions"))
    r.completions.push_back(
        {c.at("id").get<std::uint64_t>(), c.at("superseded").get<bool>(), c.at("t").get<double>()});
  r.actuators = decode_actuators(j.at("actuators"));
  return r;
}

json encode(const CommandEnvelope& c) {
  json j{{"id", c.id},
         {"issued_by", c.issued_by},
         {"issued_at", c.issued_at},
         {"device", key(c.device)},
         {"command", to_string(c.verb)},
         {"state", to_string(c.state)},
         {"updated_at", c.updated_at}};
  if (c.duration_s) j["duration_s"] = *c.duration_s;
  if (!c.target.empty()) j["target"] = c.target;
  if (c.schedule_start) j["start_time_of_day"] = *c.schedule_start;
  if (!c.reason.empty()) j["reason"] = c.reason;
  return j;
}

CommandEnvelope decode_envelope(const json& j) {
  CommandEnvelope c;
  c.id = j.at("id").get<std::uint64_t>();
  c.issued_by = j.at("issued_by").get<std::string>();
  c.issued_at = j.at("issued_at").get<double>();
  auto d = parse_device(j.at("device").get<std::string>());
  auto v = parse_verb(j.at("command").get<std::string>());
  auto s = parse_command_state(j.at("state").get<std::string>());
  if (!d || !v || !s) fail(ErrorKind::parse, "bad command record " + j.dump());
  c.device = *d;
  c.verb = *v;
  c.state = *s;
  c.updated_at = j.value("updated_at", c.issued_at);
  if (j.contains("duration_s")) c.duration_s = j["duration_s"].get<double>();
  c.target = j.value("target", std::string{});
  if (j.contains("start_time_of_day")) c.schedule_start = j["start_time_of_day"].get<double>();
  c.reason = j.value("reason", std::string{});
  return c;
}

json encode(const StatusRow& r) {
  json j{{"sensor", key(r.kind)},
         {"sensor_name", r.sensor_name},
         {"unit", r.unit},
         {"test_status", r.test_status}};
  if (r.has_data)
    j["present_data"] = r.present_data;
  else
    j["present_data"] = "no data";
  if (r.test_done_before)
    j["test_done_before"] = *r.test_done_before;
  else
    j["test_done_before"] = nullptr;
  return j;
}

json encode(const ControlRow& r) {
  json j{{"device", key(r.device)},
         {"label", r.label},
         {"present_status", r.present_status},
         {"control_command", r.control_command},
         {"pending", r.pending}};
  if (r.duration_s) j["duration_s"] = *r.duration_s;
  return j;
}

json encode_status_table(const std::vector<StatusRow>& rows) {
  json a = json::array();
  for (const auto& r : rows) a.push_back(encode(r));
  return a;
}

json encode_control_table(const std::vector<ControlRow>& rows) {
  json a = json::array();
  for (const auto& r : rows) a.push_back(encode(r));
  return a;
}

}  // namespace digirr::ctrlserver
