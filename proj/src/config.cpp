#include "mg/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mg {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config error: " + msg); }

// Translate nlohmann's byte offset into line/column for the error.
[[noreturn]] void fail_syntax(const std::string& text,
                              const nlohmann::detail::parse_error& e) {
  std::size_t line = 1, col = 1;
  const std::size_t stop = e.byte > 0 ? e.byte - 1 : 0;
  for (std::size_t i = 0; i < stop && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::ostringstream os;
  os << "config error: syntax error at line " << line << ", column " << col
     << ": " << e.what();
  throw ConfigError(os.str());
}

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + path);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path + " must be a number");
  return j.get<double>();
}

std::vector<double> get_number_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail(path + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::pair<double, double> get_range(const json& j, const std::string& path) {
  const auto v = get_number_list(j, path);
  if (v.size() != 2 || !(v[0] < v[1]))
    fail(path + " must be a [low, high] pair with low < high");
  return {v[0], v[1]};
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path + " must be a string");
  return j.get<std::string>();
}

// Overrides actually present in the file, echoed back verbatim.
struct DesignSection {
  std::string model = "model1";
  DesignOverrides o;
};

DesignSection parse_design(const json& j) {
  check_keys(j, "design",
             {"model", "free_arm_length", "tip_gap_open", "metal_thickness",
              "polymer_thickness", "polymer_split_fraction", "metal_offset",
              "trace_width", "oxide_thickness"});
  DesignSection d;
  if (j.contains("model")) {
    d.model = get_string(j["model"], "design.model");
    if (d.model != "model1" && d.model != "model2" && d.model != "offset")
      fail("design.model must be one of model1, model2, offset");
  }
  auto num = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key)) return std::nullopt;
    return get_number(j[key], std::string("design.") + key);
  };
  d.o.free_arm_length = num("free_arm_length");
  d.o.tip_gap_open = num("tip_gap_open");
  d.o.metal_thickness = num("metal_thickness");
  d.o.polymer_thickness = num("polymer_thickness");
  d.o.polymer_split_fraction = num("polymer_split_fraction");
  d.o.metal_offset = num("metal_offset");
  d.o.trace_width = num("trace_width");
  d.o.oxide_thickness = num("oxide_thickness");
  return d;
}

GripperDesign build_design(const DesignSection& d) {
  if (d.model == "model1") return build_model1(d.o);
  if (d.model == "model2") return build_model2(d.o);
  return build_offset_design(d.o);
}

void parse_materials(const json& j, MaterialDb& db) {
  if (!j.is_object()) fail("materials must be an object");
  for (const auto& [name, fields] : j.items()) {
    check_keys(fields, "materials." + name,
               {"density", "youngs_modulus", "poisson_ratio", "tce",
                "thermal_conductivity", "specific_heat",
                "electrical_conductivity"});
    MaterialProps p =
        db.has(name) ? db.get(name) : MaterialProps{.name = name};
    p.name = name;
    auto set = [&](const char* key, double& field) {
      if (fields.contains(key))
        field = get_number(fields[key], "materials." + name + "." + key);
    };
    set("density", p.density);
    set("youngs_modulus", p.youngs_modulus);
    set("poisson_ratio", p.poisson_ratio);
    set("tce", p.tce);
    set("thermal_conductivity", p.thermal_conductivity);
    set("specific_heat", p.specific_heat);
    if (fields.contains("electrical_conductivity"))
      p.electrical_conductivity = get_number(
          fields["electrical_conductivity"],
          "materials." + name + ".electrical_conductivity");
    try {
      db.set(p);
    } catch (const Error& e) {
      fail(e.what());
    }
  }
}

const std::set<std::string> kStudyTypes = {
    "simulate", "sweep",   "env-sweep", "grip",      "optimize",
    "compare",  "verify",  "mesh-info", "dump-design"};

json range_json(const std::optional<std::pair<double, double>>& r) {
  if (!r) return nullptr;
  return json::array({r->first, r->second});
}

}  // namespace

StudyConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const nlohmann::detail::parse_error& e) {
    fail_syntax(text, e);
  }
  check_keys(root, "the top level",
             {"design", "materials", "mesh", "environment", "study", "output",
              "threads", "seed"});

  StudyConfig cfg;
  cfg.materials = calibrated_material_db();
  cfg.voltages = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  cfg.h_values = {20.0, 100.0, 250.0, 500.0, 1000.0};

  DesignSection design_section;
  if (root.contains("design")) design_section = parse_design(root["design"]);
  cfg.design = build_design(design_section);

  if (root.contains("materials")) parse_materials(root["materials"], cfg.materials);

  if (root.contains("mesh")) {
    const auto& m = root["mesh"];
    check_keys(m, "mesh", {"resolution", "order"});
    if (m.contains("resolution"))
      cfg.mesh.resolution = get_number(m["resolution"], "mesh.resolution");
    if (m.contains("order")) {
      if (!m["order"].is_number_integer()) fail("mesh.order must be an integer");
      cfg.mesh.order = m["order"].get<int>();
    }
    if (!(cfg.mesh.resolution > 0)) fail("mesh.resolution must be > 0");
    if (cfg.mesh.order != 1 && cfg.mesh.order != 2)
      fail("mesh.order must be 1 or 2");
  }

  if (root.contains("environment")) {
    const auto& e = root["environment"];
    check_keys(e, "environment",
               {"ambient_temperature", "convection_coefficient"});
    if (e.contains("ambient_temperature"))
      cfg.env.ambient_temperature =
          get_number(e["ambient_temperature"], "environment.ambient_temperature");
    if (e.contains("convection_coefficient"))
      cfg.env.convection_coefficient = get_number(
          e["convection_coefficient"], "environment.convection_coefficient");
    for (const auto& problem : validate_environment(cfg.env))
      fail("environment: " + problem);
  }

  if (root.contains("study")) {
    const auto& s = root["study"];
    check_keys(s, "study",
               {"type", "voltage", "voltages", "h_values", "object_diameter",
                "method", "budget", "candidates", "polymer_split_fraction",
                "metal_thickness", "metal_offset", "operating_voltage",
                "v_max", "required_closure"});
    if (s.contains("type")) {
      cfg.study_type = get_string(s["type"], "study.type");
      if (!kStudyTypes.count(cfg.study_type))
        fail("study.type '" + cfg.study_type + "' is not a known study");
    }
    if (s.contains("voltage"))
      cfg.voltage = get_number(s["voltage"], "study.voltage");
    if (s.contains("voltages"))
      cfg.voltages = get_number_list(s["voltages"], "study.voltages");
    if (s.contains("h_values"))
      cfg.h_values = get_number_list(s["h_values"], "study.h_values");
    if (s.contains("object_diameter") && !s["object_diameter"].is_null())
      cfg.object_diameter =
          get_number(s["object_diameter"], "study.object_diameter");
    if (s.contains("method")) {
      cfg.method = get_string(s["method"], "study.method");
      if (cfg.method != "grid" && cfg.method != "golden-section" &&
          cfg.method != "nelder-mead")
        fail("study.method must be grid, golden-section or nelder-mead");
    }
    if (s.contains("budget")) {
      if (!s["budget"].is_number_integer())
        fail("study.budget must be an integer");
      cfg.budget = s["budget"].get<int>();
      if (cfg.budget < 3) fail("study.budget must be >= 3");
    }
    if (s.contains("candidates")) {
      if (!s["candidates"].is_array())
        fail("study.candidates must be an array of design labels");
      for (const auto& c : s["candidates"]) {
        const auto label = get_string(c, "study.candidates");
        if (label != "model1" && label != "model2")
          fail("study.candidates entries must be model1 or model2");
        cfg.candidates.push_back(label);
      }
    }
    auto range = [&](const char* key) -> std::optional<std::pair<double, double>> {
      if (!s.contains(key) || s[key].is_null()) return std::nullopt;
      return get_range(s[key], std::string("study.") + key);
    };
    cfg.polymer_split_fraction = range("polymer_split_fraction");
    cfg.metal_thickness = range("metal_thickness");
    cfg.metal_offset = range("metal_offset");
    if (cfg.polymer_split_fraction && cfg.metal_offset)
      fail("study.polymer_split_fraction and study.metal_offset both move "
           "the metal plane; give only one");
    if (s.contains("operating_voltage"))
      cfg.operating_voltage =
          get_number(s["operating_voltage"], "study.operating_voltage");
    if (s.contains("v_max")) cfg.v_max = get_number(s["v_max"], "study.v_max");
    if (s.contains("required_closure"))
      cfg.required_closure =
          get_number(s["required_closure"], "study.required_closure");
  }

  if (cfg.study_type == "grip" && !cfg.object_diameter)
    cfg.object_diameter = 5.0;
  if (cfg.study_type == "optimize" && cfg.candidates.empty() &&
      !cfg.polymer_split_fraction && !cfg.metal_thickness && !cfg.metal_offset)
    cfg.candidates = {"model1", "model2"};

  if (root.contains("output")) {
    const auto& o = root["output"];
    check_keys(o, "output", {"directory", "formats"});
    if (o.contains("directory"))
      cfg.output_directory = get_string(o["directory"], "output.directory");
    if (o.contains("formats")) {
      if (!o["formats"].is_array()) fail("output.formats must be an array");
      cfg.write_csv = cfg.write_vtk = false;
      for (const auto& f : o["formats"]) {
        const auto fmt = get_string(f, "output.formats");
        if (fmt == "csv")
          cfg.write_csv = true;
        else if (fmt == "vtk")
          cfg.write_vtk = true;
        else
          fail("output.formats entries must be csv or vtk");
      }
    }
  }

  if (root.contains("threads")) {
    if (!root["threads"].is_number_integer()) fail("threads must be an integer");
    cfg.threads = root["threads"].get<int>();
    if (cfg.threads < 1) fail("threads must be >= 1");
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) fail("seed must be a non-negative integer");
    cfg.seed = root["seed"].get<unsigned>();
  }

  for (const auto& problem : validate_design(cfg.design, cfg.materials))
    fail("design: " + problem);

  // Echo every resolved value back in a fixed key order; re-parsing the
  // echo reproduces it byte for byte.
  json echo;
  json dj;
  dj["model"] = design_section.model;
  auto put = [&dj](const char* key, const std::optional<double>& v) {
    if (v) dj[key] = *v;
  };
  put("free_arm_length", design_section.o.free_arm_length);
  put("tip_gap_open", design_section.o.tip_gap_open);
  put("metal_thickness", design_section.o.metal_thickness);
  put("polymer_thickness", design_section.o.polymer_thickness);
  put("polymer_split_fraction", design_section.o.polymer_split_fraction);
  put("metal_offset", design_section.o.metal_offset);
  put("trace_width", design_section.o.trace_width);
  put("oxide_thickness", design_section.o.oxide_thickness);
  echo["design"] = dj;

  json mats;
  for (const auto& [name, p] : cfg.materials.all()) {
    json mj;
    mj["density"] = p.density;
    mj["youngs_modulus"] = p.youngs_modulus;
    mj["poisson_ratio"] = p.poisson_ratio;
    mj["tce"] = p.tce;
    mj["thermal_conductivity"] = p.thermal_conductivity;
    mj["specific_heat"] = p.specific_heat;
    if (p.electrical_conductivity)
      mj["electrical_conductivity"] = *p.electrical_conductivity;
    mats[name] = mj;
  }
  echo["materials"] = mats;

  echo["mesh"] = {{"resolution", cfg.mesh.resolution}, {"order", cfg.mesh.order}};
  echo["environment"] = {
      {"ambient_temperature", cfg.env.ambient_temperature},
      {"convection_coefficient", cfg.env.convection_coefficient}};

  json sj;
  sj["type"] = cfg.study_type;
  sj["voltage"] = cfg.voltage;
  sj["voltages"] = cfg.voltages;
  sj["h_values"] = cfg.h_values;
  sj["object_diameter"] =
      cfg.object_diameter ? json(*cfg.object_diameter) : json(nullptr);
  sj["method"] = cfg.method;
  sj["budget"] = cfg.budget;
  sj["candidates"] = cfg.candidates;
  sj["polymer_split_fraction"] = range_json(cfg.polymer_split_fraction);
  sj["metal_thickness"] = range_json(cfg.metal_thickness);
  sj["metal_offset"] = range_json(cfg.metal_offset);
  sj["operating_voltage"] = cfg.operating_voltage;
  sj["v_max"] = cfg.v_max;
  sj["required_closure"] = cfg.required_closure;
  echo["study"] = sj;

  json formats = json::array();
  if (cfg.write_csv) formats.push_back("csv");
  if (cfg.write_vtk) formats.push_back("vtk");
  echo["output"] = {{"directory", cfg.output_directory}, {"formats", formats}};
  echo["threads"] = cfg.threads;
  echo["seed"] = cfg.seed;

  cfg.resolved_text = echo.dump(2) + "\n";
  return cfg;
}

StudyConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config error: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace mg
