#include "xducer/chains.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "common/error.hpp"

namespace digirr::xducer {

namespace {
constexpr double kKelvin = 273.15;
}

double probe_capacitance(double level, const CapacitiveGeometry& g) {
  return g.dry_capacitance * (1.0 + (g.eps_r - 1.0) * level / g.height);
}

double astable_frequency(double capacitance, const AstableOscillator& osc) {
  return 1.44 / ((osc.r1 + 2.0 * osc.r2) * capacitance);
}

double capacitive_chain(double level, const CapacitiveGeometry& g, const AstableOscillator& osc,
                        const Discriminator& disc) {
  if (!(level >= 0.0 && level <= g.height))
    fail(ErrorKind::range, "level " + std::to_string(level) + " outside [0, " +
                               std::to_string(g.height) + "]");
  const double f = astable_frequency(probe_capacitance(level, g), osc);
  return std::clamp(disc.kd * (disc.f0 - f), 0.0, disc.vfs);
}

double capacitive_level(double volts, const CapacitiveGeometry& g, const AstableOscillator& osc,
                        const Discriminator& disc) {
  const double f = disc.f0 - volts / disc.kd;
  if (f <= 0.0) return g.height;
  const double c = 1.44 / ((osc.r1 + 2.0 * osc.r2) * f);
  return (c / g.dry_capacitance - 1.0) * g.height / (g.eps_r - 1.0);
}

Discriminator fit_discriminator(const CapacitiveGeometry& g, const AstableOscillator& osc,
                                double vfs, double fill) {
  const double f_empty = astable_frequency(probe_capacitance(0.0, g), osc);
  const double f_full = astable_frequency(probe_capacitance(g.height, g), osc);
  return {f_empty, fill * vfs / (f_empty - f_full), vfs};
}

double thermistor_resistance(double temp_c, const ThermistorSpec& s) {
  const double t = temp_c + kKelvin;
  return s.r0 * std::exp(s.beta * (1.0 / t - 1.0 / s.t0));
}

double bridge_effective_resistance(double temp_c, const ThermistorSpec& s) {
  const double rt = thermistor_resistance(temp_c, s);
  return s.r_lin > 0.0 ? rt * s.r_lin / (rt + s.r_lin) : rt;
}

double thermistor_bridge(double temp_c, const ThermistorSpec& s) {
  const double r = bridge_effective_resistance(temp_c, s);
  return s.vex * (r / (r + s.r_fixed) - 0.5);
}

double inflection_resistor(double mid_c, const ThermistorSpec& s) {
  const double tm = mid_c + kKelvin;
  return thermistor_resistance(mid_c, s) * (s.beta - 2.0 * tm) / (s.beta + 2.0 * tm);
}

BridgeShaper BridgeShaper::design(const ThermistorSpec& spec, double lo_c, double hi_c) {
  constexpr int n = 501;
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const double t = lo_c + (hi_c - lo_c) * i / (n - 1);
    const double u = thermistor_bridge(t, spec);
    a(i, 0) = 1.0;
    a(i, 1) = u;
    a(i, 2) = u * u;
    a(i, 3) = u * u * u;
    b(i) = t;
  }
  const Eigen::Vector4d c = a.colPivHouseholderQr().solve(b);
  BridgeShaper shaper;
  for (int k = 0; k < 4; ++k) shaper.coeff_[k] = c(k);
  return shaper;
}

double BridgeShaper::operator()(double u) const {
  return coeff_[0] + u * (coeff_[1] + u * (coeff_[2] + u * coeff_[3]));
}

double windmill(double wind_speed, double kw, double cutout) {
  return kw * std::min(std::max(wind_speed, 0.0), cutout);
}

double AdcSpec::lsb() const { return vfs / static_cast<double>(1u << bits); }

void AdcSpec::validate() const {
  if (bits < 4 || bits > 16) fail(ErrorKind::config, "adc bits must be in [4, 16]");
  if (!(vfs > 0.0)) fail(ErrorKind::config, "adc vfs must be > 0");
}

std::uint32_t adc_quantize(double volts, const AdcSpec& adc) {
  if (!(volts > 0.0)) return 0;  // also catches NaN
  const double scaled = std::floor(volts * static_cast<double>(1u << adc.bits) / adc.vfs);
  return static_cast<std::uint32_t>(std::min(scaled, static_cast<double>(adc.max_code())));
}

double adc_decode(std::uint32_t code, const AdcSpec& adc) {
  return (static_cast<double>(code) + 0.5) * adc.lsb();
}

}  // namespace digirr::xducer
