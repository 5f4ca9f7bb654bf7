#pragma once

#include "json.hpp"

#include "common/messages.hpp"
#include "ctrlserver/server.hpp"

// JSON wire form of the control-plane messages. Optional fields are omitted
// when empty (an absent "duration_s" is the NA of the control window).
namespace digirr::ctrlserver {

using json = nlohmann::json;

json encode(const HistoryEntry& e);
HistoryEntry decode_history_entry(const json& j);

json encode(const LiveRow& r);
LiveRow decode_live_row(const json& j);

json encode(const Snapshot& s);
Snapshot decode_snapshot(const json& j);

json encode(const FieldReport& r);
FieldReport decode_field_report(const json& j);

json encode(const ActuatorState& a);
ActuatorState decode_actuators(const json& j);

json encode(const CommandEnvelope& c);
CommandEnvelope decode_envelope(const json& j);

json encode(const StatusRow& r);
json encode(const ControlRow& r);

json encode_status_table(const std::vector<StatusRow>& rows);
json encode_control_table(const std::vector<ControlRow>& rows);

}  // namespace digirr::ctrlserver
