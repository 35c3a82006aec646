#include "chf/channel.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "chf/errors.hpp"

namespace chf {

double resolve_inlet_enthalpy(const TestCase& c, const WaterProperties& water) {
  if (c.inlet_enthalpy) return *c.inlet_enthalpy;
  if (c.inlet_temperature) {
    const double t_sat = water.saturation_state(c.pressure).t_sat;
    return water.subcooled_liquid_enthalpy(c.pressure, std::min(*c.inlet_temperature, t_sat));
  }
  throw Error(fmt::format("test {}: no inlet enthalpy or temperature", c.test_id));
}

QualityProfile enthalpy_profile(const TestCase& c, const WaterProperties& water, double power_scale) {
  const auto& p = c.profile;
  if (p.wall_power.size() < 2 || p.wall_mesh.size() != p.wall_power.size()) {
    throw MeshError(fmt::format("test {}: profile needs >= 2 nodes and one spacing per node", c.test_id));
  }
  for (std::size_t i = 0; i + 1 < p.wall_mesh.size(); ++i) {
    if (!(p.wall_mesh[i] > 0.0)) throw MeshError(fmt::format("test {}: degenerate mesh spacing at node {}", c.test_id, i));
  }
  if (!(c.mass_flux > 0.0) || !(c.area > 0.0)) {
    throw MeshError(fmt::format("test {}: mass flux and area must be positive", c.test_id));
  }

  QualityProfile out;
  out.z = p.node_positions();
  const double h_in = resolve_inlet_enthalpy(c, water);
  const double rise_per_integral = power_scale * c.heat_flux_avg * c.perimeter / (c.mass_flux * c.area);
  out.h.resize(out.z.size());
  if (p.wall_power.size() == 2) {
    // Two-node (uniform) cases: closed-form linear rise.
    const double slope = 0.5 * (p.wall_power[0] + p.wall_power[1]) * rise_per_integral;
    out.h[0] = h_in;
    out.h[1] = h_in + slope * out.z[1];
    return out;
  }
  // Node-centered trapezoid; identical to integrating the piecewise-constant
  // reading of a discontinuous profile, so no interpolation crosses a jump.
  const auto acc = p.cumulative_integral();
  for (std::size_t i = 0; i < acc.size(); ++i) out.h[i] = h_in + rise_per_integral * acc[i];
  out.h[0] = h_in;
  return out;
}

QualityProfile quality_profile(const TestCase& c, const WaterProperties& water, double power_scale) {
  QualityProfile out = enthalpy_profile(c, water, power_scale);
  const SaturationState sat = water.saturation_state(c.pressure);
  out.x.resize(out.h.size());
  for (std::size_t i = 0; i < out.h.size(); ++i) out.x[i] = (out.h[i] - sat.h_f) / sat.h_fg;
  out.boiling_length_start = boiling_length(out);
  return out;
}

std::optional<double> boiling_length(const QualityProfile& profile) {
  const auto& x = profile.x;
  const auto& z = profile.z;
  if (x.empty()) return std::nullopt;
  if (x.front() >= 0.0) return z.front();
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] >= 0.0) {
      const double t = -x[i - 1] / (x[i] - x[i - 1]);
      return z[i - 1] + t * (z[i] - z[i - 1]);
    }
  }
  return std::nullopt;
}

double interpolate_nodal(const std::vector<double>& z, const std::vector<double>& values, double at) {
  if (z.empty()) throw MeshError("interpolate_nodal: no nodes");
  if (at <= z.front()) return values.front();
  if (at >= z.back()) return values.back();
  auto it = std::upper_bound(z.begin(), z.end(), at);
  const std::size_t k = static_cast<std::size_t>(it - z.begin()) - 1;
  const double t = (at - z[k]) / (z[k + 1] - z[k]);
  return (1.0 - t) * values[k] + t * values[k + 1];
}

}  // namespace chf
