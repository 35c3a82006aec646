#include <catch_amalgamated.hpp>

#include "chf/errors.hpp"
#include "chf/water_props.hpp"
#include "support.hpp"

using namespace chf;
using chf::testing::rel_err;

TEST_CASE("saturation values at 1 and 10 MPa match the reference fixture") {
  const auto& w = WaterProperties::bundled();
  const auto s1 = w.saturation_state(1.0e6);
  CHECK(s1.t_sat == Catch::Approx(179.9).margin(0.1));
  CHECK(s1.h_f == Catch::Approx(762.7e3).epsilon(2e-3));
  CHECK(s1.h_fg == Catch::Approx(2014.9e3).epsilon(2e-3));
  const auto s10 = w.saturation_state(10.0e6);
  CHECK(s10.t_sat == Catch::Approx(311.0).margin(0.1));
  CHECK(s10.h_fg == Catch::Approx(1317.6e3).epsilon(2e-3));
}

TEST_CASE("saturation table stays within 0.2% of the independent reference") {
  const auto rows = chf::testing::read_csv(chf::testing::data_path("fixtures/water_saturation_reference.csv"));
  REQUIRE(rows.size() >= 30);
  const auto& w = WaterProperties::bundled();
  for (const auto& r : rows) {
    const auto s = w.saturation_state(r.values[0]);
    INFO("P = " << r.values[0]);
    CHECK(rel_err(s.t_sat, r.values[1]) <= 2e-3);
    CHECK(rel_err(s.h_f, r.values[2]) <= 2e-3);
    CHECK(rel_err(s.h_fg, r.values[3]) <= 2e-3);
  }
}

TEST_CASE("out-of-band pressures are rejected") {
  const auto& w = WaterProperties::bundled();
  CHECK_THROWS_AS(w.saturation_state(22.5e6), OutOfRange);
  CHECK_THROWS_AS(w.saturation_state(0.05e6), OutOfRange);
  CHECK_NOTHROW(w.saturation_state(0.1e6));
  CHECK_NOTHROW(w.saturation_state(20e6));
  CHECK_THROWS_AS(w.equilibrium_quality(1e6, 25e6), OutOfRange);
}

TEST_CASE("saturation invariants hold across the band") {
  const auto& w = WaterProperties::bundled();
  SaturationState prev = w.saturation_state(0.1e6);
  for (int i = 1; i <= 400; ++i) {
    const double p = 0.1e6 + i * (19.9e6 / 400.0);
    const auto s = w.saturation_state(p);
    INFO("P = " << p);
    CHECK(s.h_g == s.h_f + s.h_fg);
    CHECK(s.h_fg > 0.0);
    CHECK(s.t_sat > prev.t_sat);
    CHECK(s.h_f > prev.h_f);
    CHECK(s.h_fg < prev.h_fg);
    CHECK(w.equilibrium_quality(s.h_f, p) == 0.0);
    CHECK(w.equilibrium_quality(s.h_g, p) == 1.0);
    prev = s;
  }
}

TEST_CASE("equilibrium quality is affine and increasing in enthalpy") {
  const auto& w = WaterProperties::bundled();
  const double p = 7e6;
  const auto s = w.saturation_state(p);
  CHECK(w.equilibrium_quality(s.h_f - 200e3, p) == Catch::Approx(-200e3 / s.h_fg).epsilon(1e-12));
  double last = -1e9;
  for (int i = 0; i < 50; ++i) {
    const double h = 200e3 + i * 60e3;
    const double x = w.equilibrium_quality(h, p);
    CHECK(x > last);
    CHECK(x == Catch::Approx((h - s.h_f) / s.h_fg).epsilon(1e-12));
    last = x;
  }
  const auto s10 = w.saturation_state(10e6);
  CHECK(w.equilibrium_quality(s10.h_f - 200e3, 10e6) == Catch::Approx(-0.1518).margin(5e-4));
}

TEST_CASE("subcooled liquid enthalpy") {
  const auto& w = WaterProperties::bundled();
  SECTION("reference points within 0.5%") {
    const auto rows = chf::testing::read_csv(chf::testing::data_path("fixtures/water_subcooled_reference.csv"));
    REQUIRE(rows.size() >= 10);
    for (const auto& r : rows) {
      INFO("P = " << r.values[0] << " T = " << r.values[1]);
      CHECK(rel_err(w.subcooled_liquid_enthalpy(r.values[0], r.values[1]), r.values[2]) <= 5e-3);
    }
    CHECK(w.subcooled_liquid_enthalpy(10e6, 250.0) == Catch::Approx(1085.8e3).epsilon(5e-3));
  }
  SECTION("saturation consistency") {
    for (double p : {0.5e6, 1e6, 5e6, 10e6, 15e6, 18e6}) {
      const auto s = w.saturation_state(p);
      CHECK(rel_err(w.subcooled_liquid_enthalpy(p, s.t_sat), s.h_f) <= 5e-3);
    }
  }
  SECTION("monotone in temperature on a 50-point grid") {
    for (double p : {0.43e6, 3e6, 10e6, 18e6}) {
      const double t_sat = w.saturation_state(p).t_sat;
      double last = -1.0;
      for (int i = 0; i < 50; ++i) {
        const double t = 1.0 + (t_sat - 1.0) * i / 49.0;
        const double h = w.subcooled_liquid_enthalpy(p, t);
        CHECK(h > last);
        last = h;
      }
    }
  }
  SECTION("above saturation is an error") {
    CHECK_THROWS_AS(w.subcooled_liquid_enthalpy(1e6, 200.0), OutOfRange);
    CHECK_THROWS_AS(w.subcooled_liquid_enthalpy(1e6, 0.0), OutOfRange);
  }
  SECTION("temperature inverse") {
    for (double t : {20.0, 100.0, 250.0, 300.0}) {
      const double h = w.subcooled_liquid_enthalpy(10e6, t);
      CHECK(w.liquid_temperature(10e6, h) == Catch::Approx(t).margin(1e-6));
    }
    CHECK(w.liquid_temperature(10e6, 5e6) == w.saturation_state(10e6).t_sat);
  }
}
