#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "common/actuators.hpp"
#include "common/kinds.hpp"
#include "fieldctl/controller.hpp"
#include "fieldnet/node.hpp"

// Message shapes exchanged between gateway, control server and field
// controller. All of them are plain values so the in-process wiring and the
// JSON wire form carry exactly the same information.
namespace digirr {

struct HistoryEntry {
  double time = 0.0;
  SensorKind kind = SensorKind::temperature;
  double value = 0.0;
  std::uint8_t flags = 0;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct LiveRow {
  SensorKind kind = SensorKind::temperature;
  std::uint8_t node_id = 0;
  bool has_data = false;  // false until the first frame: the "no data" marker
  double last_value = 0.0;
  double last_frame_time = -1.0;
  double last_test_time = -1.0;  // < 0 until a test report arrives
  fieldnet::TestStatus test_status = fieldnet::TestStatus::ok;
  std::uint8_t flags = 0;

  friend bool operator==(const LiveRow&, const LiveRow&) = default;
};

struct Snapshot {
  std::uint64_t sync_id = 0;
  double time = 0.0;
  std::vector<LiveRow> rows;
  // Entries accepted since the previous snapshot was cut.
  std::vector<HistoryEntry> history;
};

// One command as relayed down to the field.
using FieldCommand = fieldctl::FieldCommand;

struct CommandAck {
  std::uint64_t command_id = 0;
  bool ok = false;
  std::string reason;
  double time = 0.0;
};

struct CommandCompletion {
  std::uint64_t command_id = 0;
  bool superseded = false;
  double time = 0.0;
};

// What the field side reports back after each relay round.
struct FieldReport {
  double time = 0.0;
  std::vector<CommandAck> acks;
  std::vector<CommandCompletion> completions;
  ActuatorState actuators;
};

}  // namespace digirr
