#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "common/actuators.hpp"
#include "envsim/rng.hpp"

namespace digirr::envsim {

inline constexpr double kSecondsPerDay = 86400.0;

// Ground-truth snapshot of the whole site at one instant.
struct EnvState {
  double sim_time = 0.0;        // s since scenario epoch (Jan 1, 00:00)
  double temperature = 20.0;    // degC
  double soil_moisture = 0.35;  // volumetric fraction
  double lake_level = 40.0;     // m
  double tank_level = 3.0;      // m
  double wind_speed = 4.0;      // m/s
  double ambient_light = 0.0;   // normalized irradiance
  double humidity = 0.6;        // relative fraction
  double soil_ph = 6.0;
  double stream_flow = 0.5;     // m3/s
  double fire_intensity = 0.0;  // normalized

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

enum class EnvMode { dynamic, constant };

struct EnvParams {
  double dt = 60.0;
  EnvMode mode = EnvMode::dynamic;
  std::uint64_t rng_seed = 1;

  // temperature = t_mean + a_season*sin(2pi(t - season_zero)/Y)
  //                      + a_diurnal*sin(2pi(t - diurnal_zero)/D) + noise
  double t_mean = 20.0;
  double a_season = 10.0;
  double a_diurnal = 5.0;
  double year_length = 365.0 * kSecondsPerDay;
  double day_length = kSecondsPerDay;
  double season_peak = 172.5 * kSecondsPerDay;  // summer solstice, noon
  double diurnal_peak = 12.0 * 3600.0;          // local noon
  double temp_noise_sigma = 0.3;

  bool evaporation = true;
  double evap_coeff = 0.008;          // soil, fraction of moisture per degC per day
  double lake_evap_coeff = 0.0002;    // m per degC per day
  double tank_evap_coeff = 0.0001;    // m per degC per day

  double rain_rate = 0.15;            // events/day
  double rain_moisture = 0.04;        // fraction per event
  double rain_lake = 0.01;            // m per event
  double rain_stream_pulse = 0.8;     // m3/s per event
  double rain_humidity = 0.15;

  double snowmelt_coeff = 0.002;      // m/day per degC above 0
  double snowmelt_start_day = 60.0;
  double snowmelt_end_day = 150.0;

  double wind_mean = 4.0;             // m/s
  double wind_reversion = 1.0 / 3600.0;  // 1/s
  double wind_sigma = 0.05;           // m/s per sqrt(s)

  double humidity_mean = 0.6;
  double humidity_temp_coeff = 0.015;  // per degC
  double humidity_tau = 6.0 * 3600.0;  // s
  double humidity_sigma = 0.005;

  double ph_sigma = 0.02;             // pH per sqrt(day)
  double ph_min = 4.0;
  double ph_max = 8.0;

  double light_noise_sigma = 0.02;

  double stream_base = 0.5;           // m3/s
  double stream_season_amp = 0.2;     // peaks in spring
  double stream_tau = 2.0 * kSecondsPerDay;
  double stream_to_lake = 0.01;       // fraction of stream diverted into the lake

  double fire_rate_dry = 0.02;        // events/day, dry season
  double fire_rate_wet = 0.002;       // events/day, rest of year
  double dry_season_start_day = 152.0;
  double dry_season_end_day = 274.0;
  double fire_boost = 0.5;
  double fire_halflife = 3600.0;      // s

  double lake_depth_max = 80.0;       // m
  double lake_area = 1.0e5;           // m2
  double tank_height = 5.0;           // m
  double tank_area = 4.0;             // m2
  double lake_pump_flow = 0.004;      // m3/s
  double deep_well_pump_flow = 0.003; // m3/s
  double sprayer_flow = 0.003;        // m3/s, fwgs water valve
  double feed_tap_flow = 0.002;       // m3/s
  double tap_moisture_gain = 0.06;    // fraction per hour of feed tap
  double spray_moisture_gain = 0.02;  // fraction per hour of spraying
  double saturation = 0.5;            // soil moisture ceiling

  EnvState initial{};

  // Throws Error(config) on dt <= 0, negative rates, empty ranges.
  void validate() const;
};

struct FireEvent {
  double time = 0.0;
  double intensity = 0.0;
};

// Noise-free closed-form temperature.
double temperature_at(double t, const EnvParams& params);

// Dry-season-aware ignition rate before humidity scaling, events/day.
double fire_base_rate(double t, const EnvParams& params);

// Ignitions during [state.sim_time, state.sim_time + dt): Poisson with rate
// fire_base_rate * (1 - humidity).
std::vector<FireEvent> fire_events(const EnvState& state, const EnvParams& params, Engine& rng);

// Clamps every field into its declared range.
EnvState clamp(EnvState s, const EnvParams& params);
bool in_range(const EnvState& s, const EnvParams& params);

class Environment {
public:
  explicit Environment(EnvParams params);

  const EnvParams& params() const { return params_; }

  // A valid start state: params.initial with time-derived fields filled in.
  EnvState initial_state() const;

  EnvState step(const EnvState& state, const ActuatorState& actuation);

private:
  EnvParams params_;
  RngStreams streams_;
  Engine* temp_rng_;
  Engine* rain_rng_;
  Engine* fire_rng_;
  Engine* wind_rng_;
  Engine* humidity_rng_;
  Engine* ph_rng_;
  Engine* light_rng_;
};

std::string trajectory_csv_header();
void append_trajectory_row(std::string& out, const EnvState& s);
void write_trajectory_csv(std::ostream& out, std::span<const EnvState> states);

}  // namespace digirr::envsim
