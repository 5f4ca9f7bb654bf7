#include "xducer/sensor.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace digirr::xducer {
namespace {

// Conditioning places the engineering band on [2%, 98%] of full scale.
constexpr double kLowRail = 0.02;
constexpr double kHighRail = 0.98;

AffineChain affine_for(double lo, double hi, double vfs) {
  const double gain = (kHighRail - kLowRail) * vfs / (hi - lo);
  return {gain, kLowRail * vfs - gain * lo};
}

TransducerSpec affine_spec(SensorKind kind, double lo, double hi, AdcSpec adc) {
  TransducerSpec s;
  s.kind = kind;
  s.range_lo = lo;
  s.range_hi = hi;
  s.adc = adc;
  s.chain = affine_for(lo, hi, adc.vfs);
  return s;
}

TransducerSpec level_spec(SensorKind kind, double height, AdcSpec adc) {
  TransducerSpec s;
  s.kind = kind;
  s.range_lo = 0.0;
  s.range_hi = height;
  s.adc = adc;
  CapacitiveChain c;
  c.geometry.height = height;
  c.discriminator = fit_discriminator(c.geometry, c.oscillator, adc.vfs);
  s.chain = c;
  return s;
}

TransducerSpec temperature_spec(AdcSpec adc) {
  TransducerSpec s;
  s.kind = SensorKind::temperature;
  s.range_lo = -20.0;
  s.range_hi = 60.0;
  s.adc = adc;
  ThermistorChain t;
  t.bridge.r_lin = inflection_resistor(25.0, t.bridge);
  t.shaper = BridgeShaper::design(t.bridge, 0.0, 50.0);
  const AffineChain a = affine_for(s.range_lo, s.range_hi, adc.vfs);
  t.gain = a.gain;
  t.offset = a.offset;
  s.chain = t;
  return s;
}

// Smallest x in [lo, hi] with f(x) >= target, f non-decreasing.
template <class F>
double bisect(F f, double target, double lo, double hi) {
  if (f(lo) >= target) return lo;
  if (f(hi) <= target) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TransducerSpec default_spec(SensorKind kind, const envsim::EnvParams& env, AdcSpec adc) {
  adc.validate();
  switch (kind) {
    case SensorKind::temperature: return temperature_spec(adc);
    case SensorKind::lake_level: return level_spec(kind, env.lake_depth_max, adc);
    case SensorKind::tank_level: return level_spec(kind, env.tank_height, adc);
    case SensorKind::wind: {
      TransducerSpec s;
      s.kind = kind;
      s.range_lo = 0.0;
      s.range_hi = 40.0;
      s.adc = adc;
      s.chain = WindmillChain{0.1, 40.0};
      return s;
    }
    case SensorKind::moisture: return affine_spec(kind, 0.0, 1.0, adc);
    case SensorKind::ph: return affine_spec(kind, 0.0, 14.0, adc);
    case SensorKind::humidity: return affine_spec(kind, 0.0, 1.0, adc);
    case SensorKind::fire_smoke: return affine_spec(kind, 0.0, 1.0, adc);
    case SensorKind::stream_flow: return affine_spec(kind, 0.0, 5.0, adc);
    case SensorKind::light: return affine_spec(kind, 0.0, 1.0, adc);
  }
  fail(ErrorKind::config, "unknown sensor kind");
}

double physical_value(SensorKind kind, const envsim::EnvState& e) {
  switch (kind) {
    case SensorKind::temperature: return e.temperature;
    case SensorKind::lake_level: return e.lake_level;
    case SensorKind::tank_level: return e.tank_level;
    case SensorKind::wind: return e.wind_speed;
    case SensorKind::moisture: return e.soil_moisture;
    case SensorKind::ph: return e.soil_ph;
    case SensorKind::humidity: return e.humidity;
    case SensorKind::fire_smoke: return e.fire_intensity;
    case SensorKind::stream_flow: return e.stream_flow;
    case SensorKind::light: return e.ambient_light;
  }
  return 0.0;
}

double chain_volts(const TransducerSpec& spec, double value) {
  const double x = std::clamp(value, spec.range_lo, spec.range_hi);
  return std::visit(
      [&](const auto& c) -> double {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, AffineChain>) {
          return c.gain * x + c.offset;
        } else if constexpr (std::is_same_v<C, CapacitiveChain>) {
          return capacitive_chain(x, c.geometry, c.oscillator, c.discriminator);
        } else if constexpr (std::is_same_v<C, ThermistorChain>) {
          return c.gain * c.shaper(thermistor_bridge(x, c.bridge)) + c.offset;
        } else {
          return windmill(x, c.kw, c.cutout);
        }
      },
      spec.chain);
}

double calibrate(const TransducerSpec& spec, double volts) {
  const double x = std::visit(
      [&](const auto& c) -> double {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, AffineChain>) {
          return (volts - c.offset) / c.gain;
        } else if constexpr (std::is_same_v<C, CapacitiveChain>) {
          return capacitive_level(volts, c.geometry, c.oscillator, c.discriminator);
        } else if constexpr (std::is_same_v<C, ThermistorChain>) {
          return bisect([&](double t) { return chain_volts(spec, t); }, volts, spec.range_lo,
                        spec.range_hi);
        } else {
          return volts / c.kw;
        }
      },
      spec.chain);
  return std::clamp(x, spec.range_lo, spec.range_hi);
}

double engineering_lsb(const TransducerSpec& spec, double value) {
  std::uint32_t code = adc_quantize(chain_volts(spec, value), spec.adc);
  if (code == spec.adc.max_code()) --code;
  return std::abs(calibrate(spec, adc_decode(code + 1, spec.adc)) -
                  calibrate(spec, adc_decode(code, spec.adc)));
}

double round_trip_tolerance(SensorKind kind) {
  // Published worst-case |calibrate(decode(quantize(chain(x)))) - x| for the
  // default 12-bit, 5 V chains, rounded up. The nonlinear chains peak at
  // the compressed end of their range, about half an engineering LSB there.
  switch (kind) {
    case SensorKind::temperature: return 0.025;
    case SensorKind::lake_level: return 0.8;
    case SensorKind::tank_level: return 0.05;
    case SensorKind::wind: return 0.0065;
    case SensorKind::moisture: return 1.5e-4;
    case SensorKind::ph: return 0.002;
    case SensorKind::humidity: return 1.5e-4;
    case SensorKind::fire_smoke: return 1.5e-4;
    case SensorKind::stream_flow: return 7e-4;
    case SensorKind::light: return 1.5e-4;
  }
  return 0.0;
}

double FaultModel::apply(double true_volts, double noise_sigma, double vfs, envsim::Engine& rng) {
  switch (state_) {
    case FaultState::healthy: {
      double v = true_volts;
      if (noise_sigma > 0.0) v += std::normal_distribution<double>(0.0, noise_sigma)(rng);
      last_healthy_ = v;
      return v;
    }
    case FaultState::stuck:
      if (!last_healthy_) last_healthy_ = true_volts;
      return *last_healthy_;
    case FaultState::open_circuit:
      return vfs;
  }
  return true_volts;
}

Measurement TransducerUnit::measure(double physical, envsim::Engine& rng) {
  Measurement m;
  m.volts = fault_.apply(chain_volts(spec_, physical), spec_.noise_sigma, spec_.vfs(), rng);
  m.code = adc_quantize(m.volts, spec_.adc);
  m.value = calibrate(spec_, adc_decode(m.code, spec_.adc));
  return m;
}

}  // namespace digirr::xducer
