#include "mg/materials.hpp"

#include <cmath>

namespace mg {

MaterialProps builtin_material(const std::string& name) {
  if (name == "SU-8") {
    return MaterialProps{
        .name = "SU-8",
        .density = 1.2e-15,
        .youngs_modulus = 4.95e3,
        .poisson_ratio = 0.22,
        .tce = 5.2e-5,
        .thermal_conductivity = 2e5,
        .specific_heat = 1.675e15,
    };
  }
  if (name == "SiO2") {
    return MaterialProps{
        .name = "SiO2",
        .density = 2.15e-15,
        .youngs_modulus = 70e3,
        .poisson_ratio = 0.17,
        .tce = 0.05e-5,
        .thermal_conductivity = 14e5,
        .specific_heat = 1e15,
    };
  }
  if (name == "Gold") {
    MaterialProps p{
        .name = "Gold",
        .density = 19.3e-15,
        .youngs_modulus = 57e3,
        .poisson_ratio = 0.35,
        .tce = 1.41e-5,
        .thermal_conductivity = 2970e5,
        .specific_heat = 0.129e15,
    };
    // Bulk gold, 4.10e7 S/m. The Cr adhesion layer is folded into one
    // equivalent conductor. Overridable in the study config.
    p.electrical_conductivity = 4.10e1;  // S/um
    return p;
  }
  throw Error("unknown builtin material: '" + name + "'");
}

std::vector<std::string> validate_material(const MaterialProps& p) {
  std::vector<std::string> out;
  auto positive = [&](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v))
      out.push_back(std::string(field) + " must be > 0");
  };
  positive(p.density, "density");
  positive(p.youngs_modulus, "youngs_modulus");
  positive(p.thermal_conductivity, "thermal_conductivity");
  positive(p.specific_heat, "specific_heat");
  if (!(p.poisson_ratio >= 0.0))
    out.push_back("poisson_ratio must be >= 0");
  if (!(p.poisson_ratio < 0.5))
    out.push_back("poisson_ratio must be < 0.5");
  if (!(p.tce >= 0.0)) out.push_back("tce must be >= 0");
  if (p.electrical_conductivity && !(*p.electrical_conductivity > 0.0))
    out.push_back("electrical_conductivity must be > 0 when present");
  return out;
}

std::vector<std::string> validate_environment(const Environment& env) {
  std::vector<std::string> out;
  if (!(env.convection_coefficient >= 0.0))
    out.push_back("convection_coefficient must be >= 0");
  if (!(env.ambient_temperature > 0.0))
    out.push_back("ambient_temperature must be > 0 K");
  return out;
}

MaterialDb::MaterialDb() {
  for (const char* n : {"SU-8", "SiO2", "Gold"}) set(builtin_material(n));
}

const MaterialProps& MaterialDb::get(const std::string& name) const {
  auto it = mats_.find(name);
  if (it == mats_.end()) throw Error("unknown material: '" + name + "'");
  return it->second;
}

bool MaterialDb::has(const std::string& name) const {
  return mats_.count(name) != 0;
}

void MaterialDb::set(const MaterialProps& props) {
  auto report = validate_material(props);
  if (!report.empty()) {
    std::string msg = "invalid material '" + props.name + "':";
    for (const auto& r : report) msg += " " + r + ";";
    throw Error(msg);
  }
  mats_[props.name] = props;
}

double calibrated_heater_conductivity() { return 13.43; }

MaterialDb calibrated_material_db() {
  MaterialDb db;
  MaterialProps gold = db.get("Gold");
  gold.electrical_conductivity = calibrated_heater_conductivity();
  db.set(gold);
  return db;
}

}  // namespace mg
