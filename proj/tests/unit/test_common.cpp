#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "common/csv.hpp"
#include "common/digest.hpp"
#include "common/error.hpp"
#include "common/yaml_util.hpp"
#include "envsim/env.hpp"
#include "envsim/rng.hpp"

using namespace digirr;
using namespace digirr::envsim;

TEST_CASE("csv doubles round-trip in shortest form") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1e-300, 123456.789, 71622.89745753449}) {
    const auto s = csv::format_double(v);
    CHECK(csv::parse_double(s) == v);
  }
  CHECK(csv::format_double(0.5) == "0.5");
  CHECK(csv::format_double(30.0) == "30");
  CHECK_THROWS_AS(csv::parse_double("1.5x"), Error);
  CHECK_THROWS_AS(csv::parse_int("7.0"), Error);
  const auto parts = csv::split("a,,b");
  REQUIRE(parts.size() == 3);
  CHECK(parts[1].empty());
}

TEST_CASE("sha256 matches the FIPS 180-2 vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("random_hex gives fresh tokens of the requested size") {
  std::set<std::string> seen;
  for (int i = 0; i < 100; ++i) {
    const auto t = random_hex(24);
    CHECK(t.size() == 48);
    seen.insert(t);
  }
  CHECK(seen.size() == 100);
}

TEST_CASE("named rng streams depend only on seed and name") {
  auto a = RngStreams::make(7, "wind");
  auto b = RngStreams::make(7, "wind");
  auto c = RngStreams::make(7, "rain");
  auto d = RngStreams::make(8, "wind");
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());

  RngStreams s1(3), s2(3);
  s2.stream("extra")();  // touching another stream leaves this one alone
  CHECK(s1.stream("temperature")() == s2.stream("temperature")());
}

TEST_CASE("yaml errors carry file, line and column") {
  try {
    yaml::load_string("a: 1\nb: [1, 2\n", "cfg.yaml");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    CHECK(std::string(e.what()).rfind("cfg.yaml:", 0) == 0);
  }
  const auto doc = yaml::load_string("x: 1\ny: oops\n", "f.yaml");
  try {
    yaml::req<double>(doc.source, doc.root, "y");
    FAIL("expected a type error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("f.yaml:2:") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(yaml::check_keys(doc.source, doc.root, {"x"}), doctest::Contains("unknown key 'y'"), Error);
}

TEST_CASE("temperature peaks at summer-solstice noon") {
  EnvParams p;
  const double t = 172.0 * kSecondsPerDay + 12 * 3600.0;
  CHECK(temperature_at(t, p) == doctest::Approx(35.0).epsilon(1e-9));
  double lo = 1e9, hi = -1e9;
  for (double s = 0; s < p.year_length; s += 600) {
    lo = std::min(lo, temperature_at(s, p));
    hi = std::max(hi, temperature_at(s, p));
  }
  CHECK(lo >= 5.0 - 1e-9);
  CHECK(hi <= 35.0 + 1e-9);
  CHECK(lo < 5.5);
}

TEST_CASE("constant mode holds every quantity") {
  EnvParams p;
  p.mode = EnvMode::constant;
  p.dt = 30;
  p.initial.temperature = 25.5;
  p.initial.tank_level = 2.5;
  Environment env(p);
  auto s = env.initial_state();
  ActuatorState act;
  act.set(Actuator::lake_pump, true);
  for (int i = 0; i < 100; ++i) s = env.step(s, act);
  CHECK(s.sim_time == doctest::Approx(3000.0));
  CHECK(s.temperature == 25.5);
  CHECK(s.tank_level == 2.5);
}

TEST_CASE("dynamic steps stay in range and are reproducible") {
  EnvParams p;
  p.rng_seed = 11;
  Environment e1(p), e2(p);
  auto a = e1.initial_state();
  auto b = e2.initial_state();
  ActuatorState act;
  for (int i = 0; i < 20000; ++i) {
    act.set(Actuator::lake_pump, (i / 500) % 2 == 0);
    act.set(Actuator::feed_tap, (i / 300) % 3 == 0);
    a = e1.step(a, act);
    b = e2.step(b, act);
    REQUIRE(in_range(a, p));
  }
  CHECK(a == b);
}

TEST_CASE("pumping raises the tank") {
  EnvParams p;
  p.evaporation = false;
  p.rain_rate = 0.0;
  p.initial.tank_level = 1.0;
  Environment env(p);
  auto s = env.initial_state();
  ActuatorState pump;
  pump.set(Actuator::deep_well_pump, true);
  const double before = s.tank_level;
  for (int i = 0; i < 60; ++i) s = env.step(s, pump);
  // 0.003 m3/s over an hour into 4 m2 = 2.7 m.
  CHECK(s.tank_level - before == doctest::Approx(2.7).epsilon(0.01));
}

TEST_CASE("ignitions are more likely in the dry season") {
  EnvParams p;
  CHECK(fire_base_rate(200 * kSecondsPerDay, p) == p.fire_rate_dry);
  CHECK(fire_base_rate(20 * kSecondsPerDay, p) == p.fire_rate_wet);
}

TEST_CASE("invalid parameters are refused") {
  EnvParams p;
  p.dt = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  EnvParams q;
  q.rain_rate = -1;
  CHECK_THROWS_AS(q.validate(), Error);
}
