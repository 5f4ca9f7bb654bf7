#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace digirr {

// Wire codes are part of the frame format; do not renumber.
enum class SensorKind : std::uint8_t {
  temperature = 1,
  lake_level = 2,
  tank_level = 3,
  wind = 4,
  moisture = 5,
  ph = 6,
  humidity = 7,
  fire_smoke = 8,
  stream_flow = 9,
  light = 10,
};

// Status-window order.
inline constexpr std::array<SensorKind, 10> kAllSensorKinds = {
    SensorKind::temperature, SensorKind::lake_level, SensorKind::tank_level,
    SensorKind::wind,        SensorKind::moisture,   SensorKind::ph,
    SensorKind::humidity,    SensorKind::fire_smoke, SensorKind::stream_flow,
    SensorKind::light,
};

constexpr std::string_view key(SensorKind k) {
  switch (k) {
    case SensorKind::temperature: return "temperature";
    case SensorKind::lake_level: return "lake_level";
    case SensorKind::tank_level: return "tank_level";
    case SensorKind::wind: return "wind";
    case SensorKind::moisture: return "moisture";
    case SensorKind::ph: return "ph";
    case SensorKind::humidity: return "humidity";
    case SensorKind::fire_smoke: return "fire_smoke";
    case SensorKind::stream_flow: return "stream_flow";
    case SensorKind::light: return "light";
  }
  return "unknown";
}

// Row labels shown in the status window.
constexpr std::string_view display_name(SensorKind k) {
  switch (k) {
    case SensorKind::temperature: return "Temperature";
    case SensorKind::lake_level: return "Water level in lake";
    case SensorKind::tank_level: return "Water level in overhead tank";
    case SensorKind::wind: return "Wind flow";
    case SensorKind::moisture: return "Moisture contents of the soil";
    case SensorKind::ph: return "pH value of the soil";
    case SensorKind::humidity: return "Humidity";
    case SensorKind::fire_smoke: return "Fire and smoke";
    case SensorKind::stream_flow: return "Water flow in stream";
    case SensorKind::light: return "Light sensor";
  }
  return "unknown";
}

constexpr std::string_view unit(SensorKind k) {
  switch (k) {
    case SensorKind::temperature: return "degC";
    case SensorKind::lake_level: return "m";
    case SensorKind::tank_level: return "m";
    case SensorKind::wind: return "m/s";
    case SensorKind::moisture: return "fraction";
    case SensorKind::ph: return "pH";
    case SensorKind::humidity: return "fraction";
    case SensorKind::fire_smoke: return "fraction";
    case SensorKind::stream_flow: return "m3/s";
    case SensorKind::light: return "fraction";
  }
  return "";
}

inline std::optional<SensorKind> sensor_kind_from_code(std::uint8_t code) {
  if (code >= 1 && code <= 10) return static_cast<SensorKind>(code);
  return std::nullopt;
}

// Accepts the snake_case key or the display name.
inline std::optional<SensorKind> parse_sensor_kind(std::string_view s) {
  for (auto k : kAllSensorKinds)
    if (s == key(k) || s == display_name(k)) return k;
  if (s == "overhead_tank" || s == "Over head water sensor") return SensorKind::tank_level;
  return std::nullopt;
}

enum class Actuator : std::uint8_t {
  deep_well_pump = 0,
  lake_pump = 1,
  fwgs_water_valve = 2,
  fwgs_drug_valve = 3,
  feed_tap = 4,
};

inline constexpr std::array<Actuator, 5> kAllActuators = {
    Actuator::deep_well_pump, Actuator::lake_pump, Actuator::fwgs_water_valve,
    Actuator::fwgs_drug_valve, Actuator::feed_tap,
};

constexpr std::string_view key(Actuator a) {
  switch (a) {
    case Actuator::deep_well_pump: return "deep_well_pump";
    case Actuator::lake_pump: return "lake_pump";
    case Actuator::fwgs_water_valve: return "fwgs_water_valve";
    case Actuator::fwgs_drug_valve: return "fwgs_drug_valve";
    case Actuator::feed_tap: return "feed_tap";
  }
  return "unknown";
}

inline std::optional<Actuator> parse_actuator(std::string_view s) {
  for (auto a : kAllActuators)
    if (s == key(a)) return a;
  return std::nullopt;
}

}  // namespace digirr
