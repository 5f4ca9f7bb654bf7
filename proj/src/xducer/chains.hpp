#pragma once

#include <array>
#include <cstdint>

// Analog signal chains from physical quantity to volts, plus the flash ADC.
// All functions are pure.
namespace digirr::xducer {

struct CapacitiveGeometry {
  double height = 1.0;         // m, probe length H
  double dry_capacitance = 100e-12;  // F, C0
  double eps_r = 80.0;         // relative permittivity of water
};

struct AstableOscillator {
  double r1 = 10e3;  // ohm
  double r2 = 10e3;  // ohm
};

struct Discriminator {
  double f0 = 480e3;  // Hz, zero-output frequency
  double kd = 1e-5;   // V/Hz
  double vfs = 5.0;   // V, output rail
};

double probe_capacitance(double level, const CapacitiveGeometry& geom);
// 555-astable convention f = 1.44 / ((R1 + 2 R2) C).
double astable_frequency(double capacitance, const AstableOscillator& osc);
// Level -> C -> f -> V. Throws Error(range) outside [0, H].
double capacitive_chain(double level, const CapacitiveGeometry& geom, const AstableOscillator& osc,
                        const Discriminator& disc);
// Inverse of capacitive_chain on its unclamped region.
double capacitive_level(double volts, const CapacitiveGeometry& geom, const AstableOscillator& osc,
                        const Discriminator& disc);
// Discriminator spanning [0, H] onto [0, fill * vfs].
Discriminator fit_discriminator(const CapacitiveGeometry& geom, const AstableOscillator& osc,
                                double vfs, double fill = 0.98);

struct ThermistorSpec {
  double r0 = 10e3;      // ohm at t0
  double t0 = 298.15;    // K
  double beta = 3950.0;  // K
  double r_fixed = 10e3; // ohm, bridge completion arm
  double vex = 1.0;      // V, bridge excitation
  double r_lin = 0.0;    // ohm, parallel linearizing resistor (0 = absent)
};

// Beta model, temp in degC.
double thermistor_resistance(double temp_c, const ThermistorSpec& spec);
double bridge_effective_resistance(double temp_c, const ThermistorSpec& spec);
// V = Vex * (R_eff / (R_eff + R_fixed) - 1/2), R_eff = R_t || R_lin.
double thermistor_bridge(double temp_c, const ThermistorSpec& spec);
// Parallel resistor that puts the inflection of R_t || R_lin at mid_c.
double inflection_resistor(double mid_c, const ThermistorSpec& spec);

// Cubic shaping stage after the bridge; maps bridge volts to a signal that
// is affine in temperature (nominally degC) to within the residual budget.
class BridgeShaper {
public:
  // Least-squares design over [lo_c, hi_c].
  static BridgeShaper design(const ThermistorSpec& spec, double lo_c, double hi_c);

  double operator()(double bridge_volts) const;
  const std::array<double, 4>& coefficients() const { return coeff_; }

private:
  std::array<double, 4> coeff_{};  // c0 + c1 u + c2 u^2 + c3 u^3
};

// V = kw * min(wind, cutout). Direction independent.
double windmill(double wind_speed, double kw, double cutout);

struct AdcSpec {
  int bits = 12;
  double vfs = 5.0;

  double lsb() const;
  std::uint32_t max_code() const { return (1u << bits) - 1u; }
  void validate() const;  // 4 <= bits <= 16, vfs > 0
};

// floor(clamp(v, 0, Vfs^-) * 2^bits / Vfs).
std::uint32_t adc_quantize(double volts, const AdcSpec& adc);
// Mid-tread reconstruction (code + 0.5) * LSB.
double adc_decode(std::uint32_t code, const AdcSpec& adc);

}  // namespace digirr::xducer
