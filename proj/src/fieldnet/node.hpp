#pragma once

#include <cstdint>

#include "common/kinds.hpp"
#include "envsim/env.hpp"
#include "envsim/rng.hpp"
#include "fieldnet/frame.hpp"
#include "xducer/sensor.hpp"

namespace digirr::fieldnet {

enum class ActiveUnit : std::uint8_t { primary, standby };
enum class TestStatus : std::uint8_t { ok, error, needs_replacement };

const char* to_string(TestStatus s);

struct NodeState {
  std::uint8_t node_id = 0;
  SensorKind kind = SensorKind::temperature;
  ActiveUnit active_unit = ActiveUnit::primary;
  TestStatus test_status = TestStatus::ok;
  double last_test_time = -1.0;  // < 0 until the first test
  std::uint16_t seq = 0;         // seq of the next frame

  // Sticky per-unit failure memory; units are only replaced by a site visit.
  bool primary_failed = false;
  bool standby_failed = false;
  // Manager connected the standby: the primary is out of the loop and its
  // test results no longer count.
  bool primary_retired = false;

  std::uint8_t flags() const;

  friend bool operator==(const NodeState&, const NodeState&) = default;
};

struct TestOutcome {
  bool primary_ok = true;
  bool standby_ok = true;
};

// The failover state machine. Failover happens on the same test that sees
// the active primary fail; the standby never hands back to the primary.
NodeState apply_test_outcome(NodeState s, TestOutcome outcome, double t);

// Manager-issued standby connect. No-op once replacement is needed.
NodeState connect_standby(NodeState s);

struct NodeConfig {
  std::uint8_t node_id = 0;
  xducer::TransducerSpec transducer;
  double eps_test_fraction = 0.02;  // of sensor span
};

// One field sensor node: a primary and a standby transducer unit, periodic
// self-test, and frame emission for whichever unit is active.
class SensorNode {
public:
  SensorNode(NodeConfig config, envsim::Engine rng);

  const NodeState& state() const { return state_; }
  SensorKind kind() const { return state_.kind; }
  double eps_test() const { return eps_test_; }

  xducer::TransducerUnit& unit(ActiveUnit which) {
    return which == ActiveUnit::primary ? primary_ : standby_;
  }

  // Reads the active unit, returns the frame and advances seq (wraps at 2^16).
  Frame sample_and_emit(const envsim::EnvState& env, double t);

  // Samples both units against the same ground truth and steps the state
  // machine; the next emitted frame carries kFlagTestReport.
  const NodeState& self_test(const envsim::EnvState& env, double t);

  void connect_standby();

  // Test hook: force the counter (e.g. to exercise wrap-around).
  void set_seq(std::uint16_t seq) { state_.seq = seq; }

private:
  NodeState state_;
  xducer::TransducerUnit primary_;
  xducer::TransducerUnit standby_;
  double eps_test_;
  envsim::Engine rng_;
  bool report_pending_ = false;
};

}  // namespace digirr::fieldnet
