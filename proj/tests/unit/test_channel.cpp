#include <catch_amalgamated.hpp>
#include <cmath>

#include "chf/channel.hpp"
#include "chf/digitizer.hpp"
#include "chf/errors.hpp"
#include "support.hpp"

using namespace chf;

namespace {

const WaterProperties& water() { return WaterProperties::bundled(); }

TestCase worked_case() {
  const double h_f = water().saturation_state(10e6).h_f;
  return chf::testing::tube_case(0.01, 2.0, 10e6, 2000.0, h_f - 200e3, 1e6);
}

}  // namespace

TEST_CASE("worked uniform case: 400 kJ/kg rise, outlet quality and boiling length") {
  const TestCase c = worked_case();
  const QualityProfile qp = quality_profile(c);
  REQUIRE(qp.z.size() == 2);
  CHECK(qp.h.front() == *c.inlet_enthalpy);
  CHECK(qp.h.back() - qp.h.front() == Catch::Approx(400e3).epsilon(1e-12));
  CHECK(qp.x.back() == Catch::Approx(0.152).margin(0.002));
  REQUIRE(qp.boiling_length_start);
  CHECK(*qp.boiling_length_start == Catch::Approx(1.0).margin(0.01));
  const double h_fg = water().saturation_state(10e6).h_fg;
  CHECK(qp.x.back() == Catch::Approx(200e3 / h_fg).epsilon(1e-9));
}

TEST_CASE("zero flux keeps the inlet enthalpy") {
  TestCase c = worked_case();
  c.heat_flux_avg = 0.0;
  const QualityProfile qp = quality_profile(c);
  for (double h : qp.h) CHECK(h == *c.inlet_enthalpy);
  CHECK_FALSE(boiling_length(qp));

  c.inlet_enthalpy = water().saturation_state(10e6).h_f;
  const QualityProfile sat = quality_profile(c);
  for (double x : sat.x) CHECK(x == 0.0);
  CHECK(boiling_length(sat) == 0.0);
}

TEST_CASE("doubling the mass flux halves the rise at every node") {
  TestCase c = chf::testing::with_profile(worked_case(), std::vector<double>(40, 1.0), true, ProfileShape::inlet, 1.0);
  for (std::size_t i = 0; i < 40; ++i) c.profile.wall_power[i] = 2.0 - static_cast<double>(i) / 39.0;
  const auto a = enthalpy_profile(c);
  c.mass_flux *= 2.0;
  const auto b = enthalpy_profile(c);
  for (std::size_t i = 0; i < a.h.size(); ++i) {
    CHECK(b.h[i] - b.h[0] == Catch::Approx(0.5 * (a.h[i] - a.h[0])).epsilon(1e-12).margin(1e-9));
  }
}

TEST_CASE("profile invariants on random non-uniform cases") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const TestCase c = chf::testing::random_valid_case(rng, k + 1, true);
    const QualityProfile qp = quality_profile(c);
    const auto sat = water().saturation_state(c.pressure);
    CHECK(qp.z.front() == 0.0);
    CHECK(std::abs(qp.z.back() - c.length) <= 1e-3 * c.length);
    for (std::size_t i = 1; i < qp.z.size(); ++i) {
      CHECK(qp.z[i] > qp.z[i - 1]);
      CHECK(qp.h[i] >= qp.h[i - 1]);
      CHECK(qp.x[i] >= qp.x[i - 1]);
    }
    for (std::size_t i = 0; i < qp.x.size(); ++i) CHECK(qp.x[i] == (qp.h[i] - sat.h_f) / sat.h_fg);
    // Energy conservation against the bookkept power.
    CHECK(std::abs((qp.h.back() - qp.h.front()) * c.mass_flow - c.power) <= 0.02 * c.power);
  }
}

TEST_CASE("boiling length interpolates the zero crossing") {
  QualityProfile qp;
  qp.z = {0.0, 1.0, 2.0};
  qp.x = {-0.2, -0.1, 0.3};
  CHECK(*boiling_length(qp) == Catch::Approx(1.25));
  qp.x = {-0.3, -0.2, -0.1};
  CHECK_FALSE(boiling_length(qp));
  qp.x = {0.0, 0.1, 0.2};
  CHECK(*boiling_length(qp) == 0.0);
}

TEST_CASE("degenerate meshes are rejected") {
  TestCase c = worked_case();
  c.profile.wall_mesh = {0.0, 0.0};
  CHECK_THROWS_AS(enthalpy_profile(c), MeshError);
  c.profile.wall_power = {1.0};
  c.profile.wall_mesh = {2.0};
  CHECK_THROWS_AS(enthalpy_profile(c), MeshError);
}

TEST_CASE("refining a continuous profile from 40 to 80 nodes barely moves the outlet quality") {
  const double length = 2.0;
  RawCurve curve;
  curve.length = length;
  for (int i = 0; i <= 100; ++i) {
    const double z = length * i / 100.0;
    curve.points.push_back({z, 1.0 + 0.8 * std::sin(std::numbers::pi * z / length)});
  }
  TestCase c = worked_case();
  auto outlet_x = [&](std::size_t n) {
    ResamplePolicy policy;
    policy.n_nodes = n;
    TestCase t = c;
    t.profile = resample_profile(curve, policy);
    t.heating = Heating::non_uniform;
    return quality_profile(t).x.back();
  };
  const double x40 = outlet_x(40);
  const double x80 = outlet_x(80);
  CHECK(std::abs(x80 - x40) <= 0.005 * std::abs(x40));
}
