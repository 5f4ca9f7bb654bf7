#include "fieldnet/node.hpp"

#include <algorithm>
#include <cmath>

namespace digirr::fieldnet {

const char* to_string(TestStatus s) {
  switch (s) {
    case TestStatus::ok: return "OK";
    case TestStatus::error: return "Error";
    case TestStatus::needs_replacement: return "NeedsReplacement";
  }
  return "?";
}

std::uint8_t NodeState::flags() const {
  std::uint8_t f = 0;
  if (active_unit == ActiveUnit::standby) f |= kFlagStandbyActive;
  if (test_status == TestStatus::error) f |= kFlagTestError;
  if (test_status == TestStatus::needs_replacement) f |= kFlagNeedsReplacement;
  return f;
}

NodeState apply_test_outcome(NodeState s, TestOutcome o, double t) {
  s.last_test_time = t;
  if (s.test_status == TestStatus::needs_replacement) return s;

  if (!s.primary_retired && !o.primary_ok) s.primary_failed = true;
  if (!o.standby_ok) s.standby_failed = true;
  if (s.active_unit == ActiveUnit::primary && s.primary_failed) s.active_unit = ActiveUnit::standby;

  if (s.primary_failed && s.standby_failed)
    s.test_status = TestStatus::needs_replacement;
  else if ((s.primary_failed && !s.primary_retired) || s.standby_failed)
    s.test_status = TestStatus::error;
  else
    s.test_status = TestStatus::ok;
  return s;
}

NodeState connect_standby(NodeState s) {
  if (s.test_status == TestStatus::needs_replacement) return s;
  s.active_unit = ActiveUnit::standby;
  s.primary_retired = true;
  // Operator-declared: a retired primary counts as failed.
  s.primary_failed = true;
  return s;
}

SensorNode::SensorNode(NodeConfig config, envsim::Engine rng)
    : primary_(config.transducer),
      standby_(config.transducer),
      eps_test_(config.eps_test_fraction * config.transducer.span()),
      rng_(std::move(rng)) {
  state_.node_id = config.node_id;
  state_.kind = config.transducer.kind;
}

Frame SensorNode::sample_and_emit(const envsim::EnvState& env, double /*t*/) {
  const double truth = xducer::physical_value(state_.kind, env);
  const auto m = unit(state_.active_unit).measure(truth, rng_);
  Frame f;
  f.node_id = state_.node_id;
  f.sensor_kind = static_cast<std::uint8_t>(state_.kind);
  f.seq = state_.seq;
  f.value = static_cast<float>(m.value);
  f.flags = state_.flags();
  if (report_pending_) {
    f.flags |= kFlagTestReport;
    report_pending_ = false;
  }
  state_.seq = static_cast<std::uint16_t>(state_.seq + 1);
  return f;
}

const NodeState& SensorNode::self_test(const envsim::EnvState& env, double t) {
  const auto& spec = primary_.spec();
  const double truth = std::clamp(xducer::physical_value(state_.kind, env), spec.range_lo, spec.range_hi);
  const double p = primary_.measure(truth, rng_).value;
  const double s = standby_.measure(truth, rng_).value;
  const TestOutcome outcome{std::abs(p - truth) <= eps_test_, std::abs(s - truth) <= eps_test_};
  state_ = apply_test_outcome(state_, outcome, t);
  report_pending_ = true;
  return state_;
}

void SensorNode::connect_standby() { state_ = fieldnet::connect_standby(state_); }

}  // namespace digirr::fieldnet
