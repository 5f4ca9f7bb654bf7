#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "common/kinds.hpp"
#include "envsim/env.hpp"
#include "envsim/rng.hpp"
#include "xducer/chains.hpp"

namespace digirr::xducer {

enum class FaultState : std::uint8_t { healthy, stuck, open_circuit };

struct AffineChain {
  double gain = 1.0;    // V per engineering unit
  double offset = 0.0;  // V
};

struct CapacitiveChain {
  CapacitiveGeometry geometry;
  AstableOscillator oscillator;
  Discriminator discriminator;
};

struct ThermistorChain {
  ThermistorSpec bridge;
  BridgeShaper shaper;
  double gain = 1.0;    // V per shaped unit
  double offset = 0.0;  // V
};

struct WindmillChain {
  double kw = 0.1;       // V per m/s
  double cutout = 40.0;  // m/s
};

using Chain = std::variant<AffineChain, CapacitiveChain, ThermistorChain, WindmillChain>;

// One sensor kind's full signal chain plus the calibration that maps ADC
// volts back to engineering units.
struct TransducerSpec {
  SensorKind kind = SensorKind::temperature;
  Chain chain;
  double range_lo = 0.0;  // engineering units
  double range_hi = 1.0;
  AdcSpec adc;
  double noise_sigma = 0.0;  // V, healthy-unit additive noise

  double span() const { return range_hi - range_lo; }
  double vfs() const { return adc.vfs; }
};

// Default chain for each kind; level probe heights come from env params.
TransducerSpec default_spec(SensorKind kind, const envsim::EnvParams& env, AdcSpec adc = {});

// Ground-truth quantity the kind observes.
double physical_value(SensorKind kind, const envsim::EnvState& env);

// Noise-free analog output in volts for an engineering-unit input.
double chain_volts(const TransducerSpec& spec, double value);

// Inverse of chain_volts, result clamped to [range_lo, range_hi].
double calibrate(const TransducerSpec& spec, double volts);

// Engineering-unit size of one ADC step around `value`.
double engineering_lsb(const TransducerSpec& spec, double value);

// Worst-case calibrated round-trip error over the band (quantization only).
double round_trip_tolerance(SensorKind kind);

// Fault model at the analog output.
//   healthy      -> value + N(0, sigma)
//   stuck        -> last healthy value, frozen
//   open_circuit -> Vfs rail
class FaultModel {
public:
  FaultState state() const { return state_; }
  void set_state(FaultState s) { state_ = s; }
  std::optional<double> last_healthy() const { return last_healthy_; }

  double apply(double true_volts, double noise_sigma, double vfs, envsim::Engine& rng);

private:
  FaultState state_ = FaultState::healthy;
  std::optional<double> last_healthy_;
};

struct Measurement {
  double volts = 0.0;     // after fault/noise, before ADC
  std::uint32_t code = 0;
  double value = 0.0;     // engineering units
};

// One physical transducer unit (primary or standby).
class TransducerUnit {
public:
  explicit TransducerUnit(TransducerSpec spec) : spec_(std::move(spec)) {}

  const TransducerSpec& spec() const { return spec_; }
  FaultState fault() const { return fault_.state(); }
  void set_fault(FaultState s) { fault_.set_state(s); }

  Measurement measure(double physical, envsim::Engine& rng);

private:
  TransducerSpec spec_;
  FaultModel fault_;
};

}  // namespace digirr::xducer
