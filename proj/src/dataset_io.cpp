#include "chf/dataset_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <expat.h>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>

#include "text.hpp"

namespace chf {
namespace {

// ---------------------------------------------------------------------------
// Minimal element tree built from expat events.

struct Element {
  std::string name;
  std::string text;
  long line = 0;
  std::vector<std::unique_ptr<Element>> children;
  Element* parent = nullptr;
};

struct TreeBuilder {
  XML_Parser parser = nullptr;
  std::unique_ptr<Element> root;
  Element* current = nullptr;

  static void start(void* user, const XML_Char* name, const XML_Char**) {
    auto* self = static_cast<TreeBuilder*>(user);
    auto node = std::make_unique<Element>();
    node->name = name;
    node->line = static_cast<long>(XML_GetCurrentLineNumber(self->parser));
    node->parent = self->current;
    Element* raw = node.get();
    if (self->current) {
      self->current->children.push_back(std::move(node));
    } else {
      self->root = std::move(node);
    }
    self->current = raw;
  }

  static void end(void* user, const XML_Char*) {
    auto* self = static_cast<TreeBuilder*>(user);
    self->current = self->current->parent;
  }

  static void chars(void* user, const XML_Char* s, int len) {
    auto* self = static_cast<TreeBuilder*>(user);
    if (self->current) self->current->text.append(s, static_cast<std::size_t>(len));
  }
};

std::unique_ptr<Element> parse_tree(std::string_view xml) {
  TreeBuilder builder;
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw Error("cannot allocate XML parser");
  builder.parser = parser.get();
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &TreeBuilder::start, &TreeBuilder::end);
  XML_SetCharacterDataHandler(parser.get(), &TreeBuilder::chars);
  if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
    const long line = static_cast<long>(XML_GetCurrentLineNumber(parser.get()));
    throw SyntaxError(fmt::format("XML syntax error at line {}: {}", line, XML_ErrorString(XML_GetErrorCode(parser.get()))),
                      line);
  }
  if (!builder.root) throw SyntaxError("XML document has no root element", 1);
  return std::move(builder.root);
}

// ---------------------------------------------------------------------------
// Leaf decoding.

constexpr std::array kKnownLeaves = {
    "TestID",    "Diameter",        "Perimeter",          "Area",       "Length",    "Pressure",
    "Power",     "MassFlux",        "MassFlow",           "InletTemperature", "InletEnthalpy", "HeatFlux",
    "Fluid",     "Source",          "WallPower",          "WallMesh",   "EquilibriumQuality", "QualityPosition",
    "CHFLocation", "Shape",         "Continuous"};

constexpr std::array kMandatoryLeaves = {"TestID",   "Diameter",  "Perimeter", "Area",      "Length",
                                         "Pressure", "Power",     "MassFlux",  "MassFlow",  "HeatFlux",
                                         "Fluid",    "Source",    "WallPower", "WallMesh",  "EquilibriumQuality",
                                         "QualityPosition"};

constexpr std::array kNonUniformLeaves = {"CHFLocation", "Shape", "Continuous"};

class CaseReader {
 public:
  CaseReader(const Element& element, const ParseOptions& options) : element_(element), options_(options) {
    for (const auto& child : element.children) {
      const bool known = std::find(kKnownLeaves.begin(), kKnownLeaves.end(), std::string_view(child->name)) !=
                         kKnownLeaves.end();
      if (!known) {
        if (options.permissive) continue;
        throw SchemaError(fmt::format("line {}: unknown element <{}> in test case", child->line, child->name));
      }
      if (!leaves_.emplace(child->name, child.get()).second) {
        throw SchemaError(fmt::format("line {}: duplicate element <{}> in test case", child->line, child->name));
      }
    }
    const Element* id = find("TestID");
    if (!id) throw SchemaError(fmt::format("line {}: test case without <TestID>", element.line));
    auto value = text::to_integer(text::trim(id->text));
    if (!value || *value <= 0) {
      throw UnitError(fmt::format("line {}: <TestID> must be a positive integer, got '{}'", id->line,
                                  text::trim(id->text)));
    }
    test_id_ = *value;
  }

  long long test_id() const { return test_id_; }
  bool has(std::string_view name) const { return find(name) != nullptr; }

  const Element& require(std::string_view name) const {
    const Element* e = find(name);
    if (!e) {
      throw SchemaError(
          fmt::format("test {} (line {}): missing mandatory element <{}>", test_id_, element_.line, name));
    }
    return *e;
  }

  double number(std::string_view name) const {
    const Element& e = require(name);
    auto v = text::to_double(text::trim(e.text));
    if (!v || !std::isfinite(*v)) {
      throw UnitError(fmt::format("test {} (line {}): <{}> is not a finite number: '{}'", test_id_, e.line, name,
                                  text::trim(e.text)));
    }
    return *v;
  }

  std::optional<double> optional_number(std::string_view name) const {
    if (!has(name)) return std::nullopt;
    return number(name);
  }

  std::vector<double> numbers(std::string_view name, std::size_t expected) const {
    const Element& e = require(name);
    std::vector<double> out;
    for (auto token : text::split(e.text, options_.permissive)) {
      auto v = text::to_double(token);
      if (!v || !std::isfinite(*v)) {
        throw UnitError(fmt::format("test {} (line {}): <{}> holds a non-numeric value '{}'", test_id_, e.line, name,
                                    token));
      }
      out.push_back(*v);
    }
    if (out.size() != expected) {
      throw SchemaError(fmt::format("test {} (line {}): <{}> holds {} values, expected {}", test_id_, e.line, name,
                                    out.size(), expected));
    }
    return out;
  }

  std::string string(std::string_view name) const { return std::string(text::trim(require(name).text)); }

 private:
  const Element* find(std::string_view name) const {
    auto it = leaves_.find(std::string(name));
    return it == leaves_.end() ? nullptr : it->second;
  }

  const Element& element_;
  const ParseOptions& options_;
  std::map<std::string, const Element*> leaves_;
  long long test_id_ = 0;
};

void derive_inlet_state(TestCase& c, const WaterProperties& water) {
  if (c.inlet_enthalpy && c.inlet_temperature) return;
  if (!c.inlet_enthalpy && !c.inlet_temperature) {
    throw SchemaError(fmt::format("test {}: neither <InletTemperature> nor <InletEnthalpy> present", c.test_id));
  }
  try {
    if (!c.inlet_enthalpy) {
      const double t_sat = water.saturation_state(c.pressure).t_sat;
      if (*c.inlet_temperature > t_sat + 0.05) {
        throw SchemaError(fmt::format("test {}: inlet temperature {} degC above saturation; <InletEnthalpy> required",
                                      c.test_id, *c.inlet_temperature));
      }
      c.inlet_enthalpy = water.subcooled_liquid_enthalpy(c.pressure, std::min(*c.inlet_temperature, t_sat));
      c.derived_inlet_enthalpy = true;
    } else {
      c.inlet_temperature = water.liquid_temperature(c.pressure, *c.inlet_enthalpy);
      c.derived_inlet_temperature = true;
    }
  } catch (const PropertyError& e) {
    throw SchemaError(fmt::format("test {}: cannot derive missing inlet state: {}", c.test_id, e.what()));
  }
}

TestCase read_case(const Element& element, const ParseOptions& options, const WaterProperties& water) {
  CaseReader r(element, options);
  TestCase c;
  c.test_id = r.test_id();
  for (auto name : kMandatoryLeaves) r.require(name);

  const bool non_uniform = std::any_of(kNonUniformLeaves.begin(), kNonUniformLeaves.end(),
                                       [&](const char* n) { return r.has(n); });
  c.heating = non_uniform ? Heating::non_uniform : Heating::uniform;
  if (non_uniform) {
    for (auto name : kNonUniformLeaves) r.require(name);
  }

  c.diameter = r.number("Diameter");
  c.perimeter = r.number("Perimeter");
  c.area = r.number("Area");
  c.length = r.number("Length");
  c.pressure = r.number("Pressure");
  c.power = r.number("Power");
  c.mass_flux = r.number("MassFlux");
  c.mass_flow = r.number("MassFlow");
  c.inlet_temperature = r.optional_number("InletTemperature");
  c.inlet_enthalpy = r.optional_number("InletEnthalpy");
  c.heat_flux_avg = r.number("HeatFlux");

  const std::string fluid = r.string("Fluid");
  std::string fluid_lower = fluid;
  std::transform(fluid_lower.begin(), fluid_lower.end(), fluid_lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  if (fluid_lower != "water") {
    throw SchemaError(fmt::format("test {}: unsupported <Fluid> '{}' (water only)", c.test_id, fluid));
  }
  c.source = r.string("Source");

  const std::size_t profile_nodes = non_uniform ? kNonUniformNodes : kUniformProfileNodes;
  const std::size_t quality_nodes = non_uniform ? kNonUniformNodes : 1;
  c.profile.wall_power = r.numbers("WallPower", profile_nodes);
  c.profile.wall_mesh = r.numbers("WallMesh", profile_nodes);
  const auto x = r.numbers("EquilibriumQuality", quality_nodes);
  const auto z = r.numbers("QualityPosition", quality_nodes);
  for (std::size_t i = 0; i < x.size(); ++i) c.quality_samples.push_back({z[i], x[i]});

  if (non_uniform) {
    c.chf_location = r.number("CHFLocation");
    c.profile.shape_label = r.string("Shape");
    auto shape = parse_shape(c.profile.shape_label);
    if (!shape) {
      if (!options.permissive) {
        throw SchemaError(fmt::format("test {}: unknown <Shape> '{}'", c.test_id, c.profile.shape_label));
      }
      shape = ProfileShape::other;
    }
    c.profile.shape = *shape;
    std::string cont = r.string("Continuous");
    std::transform(cont.begin(), cont.end(), cont.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (cont == "yes" || (options.permissive && cont == "true")) {
      c.profile.continuous = true;
    } else if (cont == "no" || (options.permissive && cont == "false")) {
      c.profile.continuous = false;
    } else {
      throw SchemaError(fmt::format("test {}: <Continuous> must be 'yes' or 'no', got '{}'", c.test_id, cont));
    }
  } else {
    c.profile.shape = ProfileShape::uniform;
    c.profile.continuous = true;
  }

  if (options.derive_missing) derive_inlet_state(c, water);
  return c;
}

void collect_cases(const Element& e, std::vector<const Element*>& out) {
  const bool is_case = std::any_of(e.children.begin(), e.children.end(),
                                   [](const auto& child) { return child->name == "TestID"; });
  if (is_case) {
    out.push_back(&e);
    return;
  }
  for (const auto& child : e.children) collect_cases(*child, out);
}

// ---------------------------------------------------------------------------
// Writing.

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += fmt::format("{}", values[i]);
  }
  return out;
}

void leaf(std::string& out, std::string_view name, std::string_view value) {
  out += fmt::format("    <{0}>{1}</{0}>\n", name, value);
}

void leaf(std::string& out, std::string_view name, double value) { leaf(out, name, fmt::format("{}", value)); }

// ---------------------------------------------------------------------------
// Validation.

constexpr std::array<std::string_view, 30> kRules = {
    "positive.diameter",       "positive.perimeter",        "positive.area",
    "positive.length",         "positive.power",            "positive.mass_flux",
    "positive.mass_flow",      "positive.heat_flux",        "consistency.area",
    "consistency.mass_flow",   "consistency.power",         "cardinality.profile",
    "cardinality.quality",     "profile.negative_power",    "profile.mesh",
    "profile.length",          "profile.normalization",     "location.chf",
    "inlet.missing",           "range.pressure",            "range.mass_flux",
    "range.inlet_quality",     "range.diameter",            "range.length",
    "derived.inlet_enthalpy",  "derived.inlet_temperature", "consistency.inlet_state",
    "consistency.quality_position", "property.out_of_band", "profile.shape"};

class Findings {
 public:
  explicit Findings(long long id) : id_(id) {}
  void error(std::string_view rule, std::string message) { add(Severity::error, rule, std::move(message)); }
  void warning(std::string_view rule, std::string message) { add(Severity::warning, rule, std::move(message)); }
  std::vector<ValidationFinding> take() { return std::move(list_); }

 private:
  void add(Severity s, std::string_view rule, std::string message) {
    list_.push_back({id_, s, std::string(rule), std::move(message)});
  }
  long long id_;
  std::vector<ValidationFinding> list_;
};

double rel_diff(double a, double reference) { return std::abs(a - reference) / std::abs(reference); }

bool within(double v, double lo, double hi) {
  const double slack = 1e-9 * std::max(std::abs(lo), std::abs(hi));
  return v >= lo - slack && v <= hi + slack;
}

}  // namespace

std::vector<TestCase> parse_dataset(std::string_view xml_document, const ParseOptions& options) {
  const WaterProperties& water = options.water ? *options.water : WaterProperties::bundled();
  auto root = parse_tree(xml_document);
  std::vector<const Element*> elements;
  if (options.permissive) {
    collect_cases(*root, elements);
  } else {
    if (root->name != "Database") {
      throw SchemaError(fmt::format("line {}: root element must be <Database>, found <{}>", root->line, root->name));
    }
    for (const auto& child : root->children) {
      if (child->name != "TestCase") {
        throw SchemaError(fmt::format("line {}: unexpected <{}> under <Database>", child->line, child->name));
      }
      elements.push_back(child.get());
    }
  }
  std::vector<TestCase> cases;
  cases.reserve(elements.size());
  for (const Element* e : elements) cases.push_back(read_case(*e, options, water));
  return cases;
}

std::vector<TestCase> read_dataset_file(const std::filesystem::path& path, const ParseOptions& options) {
  return parse_dataset(text::read_file(path), options);
}

std::string write_dataset(std::span<const TestCase> cases) {
  const Envelope wide{0, 1e300, 0, 1e300, -1e300, 1e300, 0, 1e300, 0, 1e300};
  for (const auto& c : cases) {
    for (const auto& f : validate_case(c, wide)) {
      if (f.severity == Severity::error) {
        throw InvariantError(fmt::format("test {} violates {}: {}", c.test_id, f.rule, f.message));
      }
    }
  }

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<Database>\n";
  for (const auto& c : cases) {
    out += "  <TestCase>\n";
    leaf(out, "TestID", fmt::format("{}", c.test_id));
    leaf(out, "Diameter", c.diameter);
    leaf(out, "Perimeter", c.perimeter);
    leaf(out, "Area", c.area);
    leaf(out, "Length", c.length);
    leaf(out, "Pressure", c.pressure);
    leaf(out, "Power", c.power);
    leaf(out, "MassFlux", c.mass_flux);
    leaf(out, "MassFlow", c.mass_flow);
    if (c.inlet_temperature) leaf(out, "InletTemperature", *c.inlet_temperature);
    if (c.inlet_enthalpy) leaf(out, "InletEnthalpy", *c.inlet_enthalpy);
    leaf(out, "HeatFlux", c.heat_flux_avg);
    leaf(out, "Fluid", "Water");
    leaf(out, "Source", xml_escape(c.source));
    leaf(out, "WallPower", join(c.profile.wall_power));
    leaf(out, "WallMesh", join(c.profile.wall_mesh));
    std::vector<double> x, z;
    for (const auto& s : c.quality_samples) {
      x.push_back(s.x);
      z.push_back(s.z);
    }
    leaf(out, "EquilibriumQuality", join(x));
    leaf(out, "QualityPosition", join(z));
    if (c.heating == Heating::non_uniform) {
      leaf(out, "CHFLocation", *c.chf_location);
      const std::string label =
          c.profile.shape_label.empty() ? std::string(to_string(c.profile.shape)) : c.profile.shape_label;
      leaf(out, "Shape", xml_escape(label));
      leaf(out, "Continuous", c.profile.continuous ? "yes" : "no");
    }
    out += "  </TestCase>\n";
  }
  out += "</Database>\n";
  return out;
}

void write_dataset_file(const std::filesystem::path& path, std::span<const TestCase> cases) {
  const std::string doc = write_dataset(cases);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc;
}

Envelope Envelope::collected(Heating heating) {
  Envelope e{};
  e.pressure_min = 0.43e6;
  e.pressure_max = 18.0e6;
  e.diameter_min = 5.44e-3;
  e.diameter_max = 28.3e-3;
  e.length_min = 0.061;
  e.length_max = 7.0;
  if (heating == Heating::uniform) {
    e.mass_flux_min = 335.0;
    e.mass_flux_max = 9561.9;
    e.inlet_quality_min = -1.461;
    e.inlet_quality_max = 0.890;
  } else {
    e.mass_flux_min = 328.2;
    e.mass_flux_max = 8916.0;
    e.inlet_quality_min = -1.352;
    e.inlet_quality_max = 0.804;
  }
  return e;
}

std::span<const std::string_view> validation_rules() { return kRules; }

std::vector<ValidationFinding> validate_case(const TestCase& c) {
  return validate_case(c, Envelope::collected(c.heating), WaterProperties::bundled());
}

std::vector<ValidationFinding> validate_case(const TestCase& c, const Envelope& env, const WaterProperties& water) {
  Findings out(c.test_id);

  const std::pair<const char*, double> positives[] = {
      {"positive.diameter", c.diameter},   {"positive.perimeter", c.perimeter}, {"positive.area", c.area},
      {"positive.length", c.length},       {"positive.power", c.power},         {"positive.mass_flux", c.mass_flux},
      {"positive.mass_flow", c.mass_flow}, {"positive.heat_flux", c.heat_flux_avg}};
  bool all_positive = true;
  for (const auto& [rule, v] : positives) {
    if (!(v > 0.0)) {
      out.error(rule, fmt::format("value {} must be > 0", v));
      all_positive = false;
    }
  }

  if (all_positive) {
    const double circle = std::numbers::pi * c.diameter * c.diameter / 4.0;
    if (rel_diff(circle, c.area) > kAreaTolerance) {
      out.error("consistency.area", fmt::format("area {} m2 vs pi*D^2/4 = {} m2", c.area, circle));
    }
    const double flow = c.mass_flux * c.area;
    if (rel_diff(flow, c.mass_flow) > kMassFlowTolerance) {
      out.error("consistency.mass_flow", fmt::format("mass flow {} kg/s vs G*A = {} kg/s", c.mass_flow, flow));
    }
    const double bookkept = c.heat_flux_avg * c.perimeter * c.length;
    if (rel_diff(bookkept, c.power) > kPowerTolerance) {
      out.error("consistency.power", fmt::format("power {} W vs q_av*P_h*L = {} W", c.power, bookkept));
    }
  }

  const std::size_t want_profile = c.heating == Heating::uniform ? kUniformProfileNodes : kNonUniformNodes;
  const std::size_t want_quality = c.heating == Heating::uniform ? 1 : kNonUniformNodes;
  const auto& p = c.profile;
  bool profile_ok = true;
  if (p.wall_power.size() != want_profile || p.wall_mesh.size() != want_profile) {
    out.error("cardinality.profile", fmt::format("{} power / {} mesh values, expected {}", p.wall_power.size(),
                                                 p.wall_mesh.size(), want_profile));
    profile_ok = false;
  }
  if (c.quality_samples.size() != want_quality) {
    out.error("cardinality.quality",
              fmt::format("{} quality samples, expected {}", c.quality_samples.size(), want_quality));
  }
  if (std::any_of(p.wall_power.begin(), p.wall_power.end(), [](double v) { return !(v >= 0.0); })) {
    out.error("profile.negative_power", "wall power values must be >= 0");
    profile_ok = false;
  }
  if (std::any_of(p.wall_mesh.begin(), p.wall_mesh.end(), [](double v) { return !(v > 0.0); })) {
    out.error("profile.mesh", "mesh spacings must be > 0");
    profile_ok = false;
  }
  if (profile_ok && c.length > 0.0) {
    const double mesh_length = p.mesh_length();
    if (rel_diff(mesh_length, c.length) > kMeshLengthTolerance) {
      out.error("profile.length", fmt::format("mesh spans {} m, heated length {} m", mesh_length, c.length));
    } else {
      const double mean = p.weighted_mean();
      if (std::abs(mean - 1.0) > kNormalizationTolerance) {
        out.error("profile.normalization", fmt::format("mesh-weighted mean wall power {} (expected 1)", mean));
      }
    }
  }
  if (c.heating == Heating::uniform && p.shape != ProfileShape::uniform) {
    out.error("profile.shape", "uniform case with a non-uniform shape label");
  }

  if (c.heating == Heating::non_uniform) {
    if (!c.chf_location) {
      out.error("location.chf", "non-uniform case without CHF location");
    } else if (!(*c.chf_location >= 0.0 && *c.chf_location <= c.length * (1.0 + 1e-9))) {
      out.error("location.chf", fmt::format("CHF location {} m outside [0, {}] m", *c.chf_location, c.length));
    }
  } else if (c.chf_location) {
    out.error("location.chf", "uniform case carries a CHF location");
  }

  if (!c.inlet_enthalpy && !c.inlet_temperature) {
    out.error("inlet.missing", "neither inlet temperature nor inlet enthalpy present");
  }

  if (!within(c.pressure, env.pressure_min, env.pressure_max)) {
    out.warning("range.pressure", fmt::format("pressure {} MPa outside [{}, {}] MPa", c.pressure / 1e6,
                                              env.pressure_min / 1e6, env.pressure_max / 1e6));
  }
  if (!within(c.mass_flux, env.mass_flux_min, env.mass_flux_max)) {
    out.warning("range.mass_flux", fmt::format("mass flux {} kg/m2/s outside [{}, {}]", c.mass_flux,
                                               env.mass_flux_min, env.mass_flux_max));
  }
  if (!within(c.diameter, env.diameter_min, env.diameter_max)) {
    out.warning("range.diameter", fmt::format("diameter {} mm outside [{}, {}] mm", c.diameter * 1e3,
                                              env.diameter_min * 1e3, env.diameter_max * 1e3));
  }
  if (!within(c.length, env.length_min, env.length_max)) {
    out.warning("range.length",
                fmt::format("heated length {} m outside [{}, {}] m", c.length, env.length_min, env.length_max));
  }

  if (c.derived_inlet_enthalpy) out.warning("derived.inlet_enthalpy", "inlet enthalpy computed from inlet temperature");
  if (c.derived_inlet_temperature) {
    out.warning("derived.inlet_temperature", "inlet temperature computed from inlet enthalpy");
  }

  try {
    if (c.inlet_enthalpy) {
      const double x_in = water.equilibrium_quality(*c.inlet_enthalpy, c.pressure);
      if (!within(x_in, env.inlet_quality_min, env.inlet_quality_max)) {
        out.warning("range.inlet_quality", fmt::format("inlet quality {} outside [{}, {}]", x_in,
                                                       env.inlet_quality_min, env.inlet_quality_max));
      }
    }
    if (c.inlet_enthalpy && c.inlet_temperature && !c.derived_inlet_enthalpy && !c.derived_inlet_temperature) {
      const auto sat = water.saturation_state(c.pressure);
      if (*c.inlet_temperature < sat.t_sat - 0.05 && *c.inlet_temperature > 0.0) {
        const double h = water.subcooled_liquid_enthalpy(c.pressure, *c.inlet_temperature);
        if (rel_diff(h, *c.inlet_enthalpy) > 0.01) {
          out.warning("consistency.inlet_state",
                      fmt::format("inlet enthalpy {} J/kg vs h(P, T_in) = {} J/kg", *c.inlet_enthalpy, h));
        }
      } else if (*c.inlet_enthalpy < sat.h_f * (1.0 - 0.01)) {
        out.warning("consistency.inlet_state", "inlet at saturation temperature but enthalpy below h_f");
      }
    }
  } catch (const PropertyError& e) {
    out.warning("property.out_of_band", e.what());
  }

  if (profile_ok && c.length > 0.0 && !c.quality_samples.empty()) {
    const auto nodes = p.node_positions();
    bool matches = true;
    if (c.heating == Heating::uniform) {
      matches = std::abs(c.quality_samples.front().z - c.length) <= kMeshLengthTolerance * c.length;
    } else if (c.quality_samples.size() == nodes.size()) {
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (std::abs(c.quality_samples[i].z - nodes[i]) > kMeshLengthTolerance * c.length) matches = false;
      }
    }
    if (!matches) {
      out.warning("consistency.quality_position", "quality positions do not coincide with the wall mesh nodes");
    }
  }

  return out.take();
}

}  // namespace chf
