#include "envsim/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace digirr::envsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double day_of_year(double t, const EnvParams& p) {
  const double in_year = std::fmod(t, p.year_length);
  return (in_year < 0 ? in_year + p.year_length : in_year) / p.day_length;
}

double seasonal_phase(double t, const EnvParams& p) {
  // Zero crossing a quarter year before the peak.
  return kTwoPi * (t - (p.season_peak - p.year_length / 4.0)) / p.year_length;
}

double diurnal_phase(double t, const EnvParams& p) {
  return kTwoPi * (t - (p.diurnal_peak - p.day_length / 4.0)) / p.day_length;
}

double daylight(double t, const EnvParams& p) {
  const double sun = std::cos(kTwoPi * (t - p.diurnal_peak) / p.day_length);
  const double season = 0.8 + 0.2 * std::sin(seasonal_phase(t, p));
  return std::max(0.0, sun) * season;
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::config, what);
}

}  // namespace

void EnvParams::validate() const {
  require(dt > 0.0, "env.dt must be > 0");
  require(year_length > 0.0 && day_length > 0.0, "env year/day length must be > 0");
  require(rain_rate >= 0 && fire_rate_dry >= 0 && fire_rate_wet >= 0, "env rates must be >= 0");
  require(evap_coeff >= 0 && lake_evap_coeff >= 0 && tank_evap_coeff >= 0,
          "env evaporation coefficients must be >= 0");
  require(snowmelt_coeff >= 0, "env.snowmelt_coeff must be >= 0");
  require(wind_reversion >= 0 && wind_sigma >= 0, "env wind parameters must be >= 0");
  require(temp_noise_sigma >= 0 && humidity_sigma >= 0 && ph_sigma >= 0 && light_noise_sigma >= 0,
          "env noise sigmas must be >= 0");
  require(humidity_tau > 0 && stream_tau > 0 && fire_halflife > 0, "env time constants must be > 0");
  require(lake_depth_max > 0 && lake_area > 0, "env lake geometry must be > 0");
  require(tank_height > 0 && tank_area > 0, "env tank geometry must be > 0");
  require(lake_pump_flow >= 0 && deep_well_pump_flow >= 0 && sprayer_flow >= 0 && feed_tap_flow >= 0,
          "env flows must be >= 0");
  require(saturation > 0 && saturation <= 1, "env.saturation must be in (0, 1]");
  require(ph_min >= 0 && ph_max <= 14 && ph_min < ph_max, "env pH bounds must lie in [0, 14]");
}

double temperature_at(double t, const EnvParams& p) {
  return p.t_mean + p.a_season * std::sin(seasonal_phase(t, p)) +
         p.a_diurnal * std::sin(diurnal_phase(t, p));
}

double fire_base_rate(double t, const EnvParams& p) {
  const double day = day_of_year(t, p);
  const bool dry = day >= p.dry_season_start_day && day < p.dry_season_end_day;
  return dry ? p.fire_rate_dry : p.fire_rate_wet;
}

std::vector<FireEvent> fire_events(const EnvState& state, const EnvParams& p, Engine& rng) {
  std::vector<FireEvent> events;
  const double rate = fire_base_rate(state.sim_time, p) * (1.0 - state.humidity);
  if (rate <= 0.0) return events;
  std::poisson_distribution<int> count(rate * p.dt / kSecondsPerDay);
  const int n = count(rng);
  std::uniform_real_distribution<double> when(0.0, p.dt);
  for (int i = 0; i < n; ++i) events.push_back({state.sim_time + when(rng), p.fire_boost});
  return events;
}

EnvState clamp(EnvState s, const EnvParams& p) {
  s.soil_moisture = std::clamp(s.soil_moisture, 0.0, std::min(1.0, p.saturation));
  s.ambient_light = std::clamp(s.ambient_light, 0.0, 1.0);
  s.humidity = std::clamp(s.humidity, 0.0, 1.0);
  s.fire_intensity = std::clamp(s.fire_intensity, 0.0, 1.0);
  s.lake_level = std::clamp(s.lake_level, 0.0, p.lake_depth_max);
  s.tank_level = std::clamp(s.tank_level, 0.0, p.tank_height);
  s.soil_ph = std::clamp(s.soil_ph, 0.0, 14.0);
  s.wind_speed = std::max(0.0, s.wind_speed);
  s.stream_flow = std::max(0.0, s.stream_flow);
  return s;
}

bool in_range(const EnvState& s, const EnvParams& p) {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  return unit(s.soil_moisture) && unit(s.ambient_light) && unit(s.humidity) &&
         unit(s.fire_intensity) && s.lake_level >= 0 && s.lake_level <= p.lake_depth_max &&
         s.tank_level >= 0 && s.tank_level <= p.tank_height && s.soil_ph >= 0 &&
         s.soil_ph <= 14 && s.wind_speed >= 0 && s.stream_flow >= 0;
}

Environment::Environment(EnvParams params) : params_(std::move(params)), streams_(params_.rng_seed) {
  params_.validate();
  temp_rng_ = &streams_.stream("temperature");
  rain_rng_ = &streams_.stream("rain");
  fire_rng_ = &streams_.stream("fire");
  wind_rng_ = &streams_.stream("wind");
  humidity_rng_ = &streams_.stream("humidity");
  ph_rng_ = &streams_.stream("ph");
  light_rng_ = &streams_.stream("light");
}

EnvState Environment::initial_state() const {
  EnvState s = params_.initial;
  if (params_.mode == EnvMode::dynamic) {
    s.temperature = temperature_at(s.sim_time, params_);
    s.ambient_light = daylight(s.sim_time, params_);
  }
  return clamp(s, params_);
}

EnvState Environment::step(const EnvState& state, const ActuatorState& act) {
  const EnvParams& p = params_;
  EnvState next = state;
  next.sim_time = state.sim_time + p.dt;
  if (p.mode == EnvMode::constant) return next;

  std::normal_distribution<double> gauss(0.0, 1.0);
  const double dt = p.dt;
  const double days = dt / kSecondsPerDay;
  const double hours = dt / 3600.0;
  const double t1 = next.sim_time;

  next.temperature = temperature_at(t1, p) + p.temp_noise_sigma * gauss(*temp_rng_);
  const double warm = std::max(0.0, next.temperature);

  std::poisson_distribution<int> rain_count(p.rain_rate * days);
  const int rain = p.rain_rate > 0 ? rain_count(*rain_rng_) : 0;

  // Soil moisture.
  double m = state.soil_moisture;
  if (act.feed_tap()) m += p.tap_moisture_gain * hours;
  if (act.fwgs_water_valve()) m += p.spray_moisture_gain * hours;
  m += rain * p.rain_moisture;
  if (p.evaporation) m -= p.evap_coeff * warm * state.soil_moisture * days;
  next.soil_moisture = m;

  // Overhead tank: pumps fill it, sprayer and feed tap draw from it.
  double inflow = 0.0;
  if (act.deep_well_pump()) inflow += p.deep_well_pump_flow;
  if (act.lake_pump()) inflow += p.lake_pump_flow;
  double outflow = 0.0;
  if (act.fwgs_water_valve()) outflow += p.sprayer_flow;
  if (act.feed_tap()) outflow += p.feed_tap_flow;
  next.tank_level = state.tank_level + (inflow - outflow) * dt / p.tank_area;
  if (p.evaporation) next.tank_level -= p.tank_evap_coeff * warm * days;

  // Lake.
  const double day = day_of_year(t1, p);
  double lake = state.lake_level;
  lake += (state.stream_flow * p.stream_to_lake - (act.lake_pump() ? p.lake_pump_flow : 0.0)) * dt /
          p.lake_area;
  lake += rain * p.rain_lake;
  if (day >= p.snowmelt_start_day && day < p.snowmelt_end_day)
    lake += p.snowmelt_coeff * warm * days;
  if (p.evaporation) lake -= p.lake_evap_coeff * warm * days;
  next.lake_level = lake;

  // Stream: seasonal base plus rain pulses relaxing back to it.
  auto stream_base = [&](double t) {
    return p.stream_base + p.stream_season_amp * std::cos(seasonal_phase(t, p));
  };
  const double excess = state.stream_flow - stream_base(state.sim_time);
  next.stream_flow =
      stream_base(t1) + excess * std::exp(-dt / p.stream_tau) + rain * p.rain_stream_pulse;

  // Wind: exact Ornstein-Uhlenbeck transition.
  const double decay = std::exp(-p.wind_reversion * dt);
  const double sd = p.wind_reversion > 0
                        ? p.wind_sigma * std::sqrt((1.0 - decay * decay) / (2.0 * p.wind_reversion))
                        : p.wind_sigma * std::sqrt(dt);
  next.wind_speed = p.wind_mean + (state.wind_speed - p.wind_mean) * decay + sd * gauss(*wind_rng_);

  // Humidity relaxes toward a temperature-dependent target.
  const double target = p.humidity_mean - p.humidity_temp_coeff * (next.temperature - p.t_mean);
  next.humidity = target + (state.humidity - target) * std::exp(-dt / p.humidity_tau) +
                  p.humidity_sigma * gauss(*humidity_rng_) + rain * p.rain_humidity;

  // pH: bounded slow walk.
  next.soil_ph = std::clamp(state.soil_ph + p.ph_sigma * std::sqrt(days) * gauss(*ph_rng_),
                            p.ph_min, p.ph_max);

  const double sun = daylight(t1, p);
  next.ambient_light = sun > 0 ? sun + p.light_noise_sigma * gauss(*light_rng_) : 0.0;

  double fire = state.fire_intensity * std::pow(0.5, dt / p.fire_halflife);
  for (const auto& e : fire_events(state, p, *fire_rng_)) fire += e.intensity;
  next.fire_intensity = fire;

  return clamp(next, p);
}

std::string trajectory_csv_header() {
  return "sim_time,temperature,soil_moisture,lake_level,tank_level,wind_speed,ambient_light,"
         "humidity,soil_ph,stream_flow,fire_intensity\n";
}

void append_trajectory_row(std::string& out, const EnvState& s) {
  const double fields[] = {s.sim_time,  s.temperature,   s.soil_moisture, s.lake_level,
                           s.tank_level, s.wind_speed,   s.ambient_light, s.humidity,
                           s.soil_ph,   s.stream_flow,   s.fire_intensity};
  bool first = true;
  for (double v : fields) {
    if (!first) out += ',';
    csv::append_double(out, v);
    first = false;
  }
  out += '\n';
}

void write_trajectory_csv(std::ostream& out, std::span<const EnvState> states) {
  std::string buf = trajectory_csv_header();
  for (const auto& s : states) append_trajectory_row(buf, s);
  out << buf;
}

}  // namespace digirr::envsim
