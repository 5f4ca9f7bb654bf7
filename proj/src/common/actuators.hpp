#pragma once

#include <array>

#include "common/kinds.hpp"

namespace digirr {

// Relay/valve bits driven by the field controller.
struct ActuatorState {
  std::array<bool, kAllActuators.size()> bits{};

  bool get(Actuator a) const { return bits[static_cast<std::size_t>(a)]; }
  void set(Actuator a, bool on) { bits[static_cast<std::size_t>(a)] = on; }

  bool deep_well_pump() const { return get(Actuator::deep_well_pump); }
  bool lake_pump() const { return get(Actuator::lake_pump); }
  bool fwgs_water_valve() const { return get(Actuator::fwgs_water_valve); }
  bool fwgs_drug_valve() const { return get(Actuator::fwgs_drug_valve); }
  bool feed_tap() const { return get(Actuator::feed_tap); }

  // Single feed head; drug is only ever mixed into flowing water.
  bool valid() const {
    return !(deep_well_pump() && lake_pump()) && (!fwgs_drug_valve() || fwgs_water_valve());
  }

  friend bool operator==(const ActuatorState&, const ActuatorState&) = default;
};

}  // namespace digirr
