#include "chf/correlations.hpp"

#include <cmath>
#include <fmt/format.h>

#include "chf/errors.hpp"
#include "text.hpp"

namespace chf {
namespace embedded {
extern const std::string_view correlation_coefficients;
}

namespace {

// Legacy-unit conversions, used only at the Biasi boundary.
constexpr double kPaPerBar = 1.0e5;
constexpr double kCmPerM = 100.0;
constexpr double kCgsMassFluxPerSi = 0.1;  // g/cm2/s per kg/m2/s
constexpr double kSiFluxPerCgs = 1.0e4;    // W/m2 per W/cm2
constexpr double kPaPerMPa = 1.0e6;

ChfPrediction finish(double raw, ChfFlags flags) {
  ChfPrediction p;
  p.raw_chf = raw;
  p.flags = flags;
  if (!(raw > 0.0)) {
    p.flags.negative_raw_output = true;
  } else {
    p.chf = raw;
  }
  return p;
}

bool outside(const std::optional<double>& v, double lo, double hi) { return v && (*v < lo || *v > hi); }

}  // namespace

CorrelationCoefficients CorrelationCoefficients::parse(std::string_view text) {
  CorrelationCoefficients out;
  text::for_each_line(text, [&](long line_no, std::string_view line) {
    auto fields = text::split(line, true);
    if (fields.size() < 3) throw FormatError(fmt::format("coefficients line {}: expected correlation,name,value", line_no));
    auto value = text::to_double(fields[2]);
    if (!value) throw FormatError(fmt::format("coefficients line {}: bad value '{}'", line_no, fields[2]));
    out.values_[fmt::format("{}.{}", fields[0], fields[1])] = *value;
  });
  return out;
}

const CorrelationCoefficients& CorrelationCoefficients::bundled() {
  static const CorrelationCoefficients instance = parse(embedded::correlation_coefficients);
  return instance;
}

double CorrelationCoefficients::get(std::string_view correlation, std::string_view name) const {
  auto it = values_.find(fmt::format("{}.{}", correlation, name));
  if (it == values_.end()) throw FormatError(fmt::format("missing coefficient {}.{}", correlation, name));
  return it->second;
}

ChfFlags applicability_check(std::string_view correlation, const CorrelationInputs& in) {
  const auto& k = CorrelationCoefficients::bundled();
  ChfFlags flags;
  if (correlation == "bowring") {
    auto c = [&](std::string_view n) { return k.get("bowring", n); };
    const std::optional<double> p_mpa = in.pressure ? std::optional(*in.pressure / kPaPerMPa) : std::nullopt;
    flags.out_of_envelope = outside(p_mpa, c("p_min"), c("p_max")) || outside(in.mass_flux, c("g_min"), c("g_max")) ||
                            outside(in.diameter, c("d_min"), c("d_max")) || outside(in.length, c("l_min"), c("l_max"));
  } else if (correlation == "biasi") {
    auto c = [&](std::string_view n) { return k.get("biasi", n); };
    auto scaled = [](const std::optional<double>& v, double f) { return v ? std::optional(*v * f) : std::nullopt; };
    flags.out_of_envelope = outside(scaled(in.pressure, 1.0 / kPaPerBar), c("p_min"), c("p_max")) ||
                            outside(scaled(in.mass_flux, kCgsMassFluxPerSi), c("g_min"), c("g_max")) ||
                            outside(scaled(in.diameter, kCmPerM), c("d_min"), c("d_max")) ||
                            (in.quality && *in.quality >= c("x_max"));
  } else {
    throw UnknownCorrelation(fmt::format("unknown correlation '{}'", correlation));
  }
  return flags;
}

ChfPrediction bowring_chf_with_latent_heat(double pressure, double mass_flux, double diameter, double length,
                                           double inlet_subcooling, double h_fg) {
  const auto& k = CorrelationCoefficients::bundled();
  auto c = [&](std::string_view n) { return k.get("bowring", n); };

  const double pr = c("pr_scale") * pressure / kPaPerMPa;
  const double n = c("n0") - c("n_slope") * pr;
  double f1, f1_over_f2, f3;
  if (pr <= 1.0) {
    auto shape = [&](std::string_view e, std::string_view kk, std::string_view cc) {
      return (std::pow(pr, c(e)) * std::exp(c(kk) * (1.0 - pr)) + c(cc)) / (1.0 + c(cc));
    };
    f1 = shape("f1_lo_e", "f1_lo_k", "f1_lo_c");
    f1_over_f2 = shape("f12_lo_e", "f12_lo_k", "f12_lo_c");
    f3 = shape("f3_lo_e", "f3_lo_k", "f3_lo_c");
  } else {
    f1 = std::pow(pr, c("f1_hi_e")) * std::exp(c("f1_hi_k") * (1.0 - pr));
    f1_over_f2 = std::pow(pr, c("f12_hi_e")) * std::exp(c("f12_hi_k") * (1.0 - pr));
    f3 = std::pow(pr, c("f3_hi_e"));
  }
  const double f2 = f1 / f1_over_f2;
  const double f4 = f3 * std::pow(pr, c("f4_exp"));

  const double a = c("a_coef") * (h_fg * diameter * mass_flux / 4.0) * f1 /
                   (1.0 + c("a_den") * f2 * std::sqrt(diameter) * mass_flux);
  const double b = diameter * mass_flux / 4.0;
  const double cc = c("c_coef") * f3 * diameter * mass_flux /
                    (1.0 + c("c_den") * f4 * std::pow(mass_flux / c("g_ref"), n));
  const double raw = (a + b * inlet_subcooling) / (cc + length);

  return finish(raw, applicability_check("bowring", {pressure, mass_flux, diameter, length, std::nullopt}));
}

ChfPrediction bowring_chf(double pressure, double mass_flux, double diameter, double length, double inlet_subcooling,
                          const WaterProperties& water) {
  const double h_fg = water.saturation_state(pressure).h_fg;
  return bowring_chf_with_latent_heat(pressure, mass_flux, diameter, length, inlet_subcooling, h_fg);
}

BiasiBranches biasi_branches(double diameter, double mass_flux, double pressure, double quality) {
  const auto& k = CorrelationCoefficients::bundled();
  auto c = [&](std::string_view n) { return k.get("biasi", n); };

  const double d = diameter * kCmPerM;
  const double g = mass_flux * kCgsMassFluxPerSi;
  const double p = pressure / kPaPerBar;
  const double n = d >= c("d_switch") ? c("n_large") : c("n_small");
  const double fp = c("f_a") + c("f_b") * p * std::exp(-c("f_c") * p);
  const double hp = c("h_a") + c("h_b") * p * std::exp(-c("h_c") * p) + c("h_d") * p / (c("h_e") + p * p);
  const double g_lo = std::pow(g, c("lo_g"));

  BiasiBranches out;
  out.low_quality = c("lo_coef") / (std::pow(d, n) * g_lo) * (fp / g_lo - quality) * kSiFluxPerCgs;
  out.high_quality = c("hi_coef") * hp / (std::pow(d, n) * std::pow(g, c("hi_g"))) * (1.0 - quality) * kSiFluxPerCgs;
  if (g < c("g_switch")) {
    out.governing = BiasiBranch::high_quality;
  } else {
    out.governing = out.low_quality >= out.high_quality ? BiasiBranch::low_quality : BiasiBranch::high_quality;
  }
  return out;
}

ChfPrediction biasi_chf(double diameter, double mass_flux, double pressure, double quality) {
  const BiasiBranches b = biasi_branches(diameter, mass_flux, pressure, quality);
  const double raw = b.governing == BiasiBranch::low_quality ? b.low_quality : b.high_quality;
  return finish(raw, applicability_check("biasi", {pressure, mass_flux, diameter, std::nullopt, quality}));
}

}  // namespace chf
