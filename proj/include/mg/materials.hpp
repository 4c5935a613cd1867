#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Unit system: micrometer / kilogram / second / kelvin / volt (uMKSV).
// Derived units: pressure MPa, force uN, power pW, energy pJ, current pA.
// Convection coefficients in pW/(um^2 K), numerically equal to W/(m^2 K).
// Electrical conductivity is stored in S/um; solvers scale to pS/um
// internally so Joule power comes out in pW.

namespace mg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MaterialProps {
  std::string name;
  double density = 0.0;               // kg/um^3
  double youngs_modulus = 0.0;        // MPa
  double poisson_ratio = 0.0;
  double tce = 0.0;                   // 1/K, linear expansion coefficient
  double thermal_conductivity = 0.0;  // pW/(um K)
  double specific_heat = 0.0;         // pJ/(kg K)
  std::optional<double> electrical_conductivity;  // S/um, conductors only
};

struct Environment {
  double ambient_temperature = 300.15;  // K (27 C)
  double convection_coefficient = 20.0;  // pW/(um^2 K) == W/(m^2 K)
};

// Table-seeded constants for {SU-8, SiO2, Gold}. Throws Error for
// unknown names.
MaterialProps builtin_material(const std::string& name);

// One entry per violated invariant; empty means valid.
std::vector<std::string> validate_material(const MaterialProps& props);

std::vector<std::string> validate_environment(const Environment& env);

// Material lookup used by the solvers. Starts from the builtins and
// accepts per-field overrides from the config layer.
class MaterialDb {
 public:
  MaterialDb();

  const MaterialProps& get(const std::string& name) const;
  bool has(const std::string& name) const;
  void set(const MaterialProps& props);

  const std::map<std::string, MaterialProps>& all() const { return mats_; }

 private:
  std::map<std::string, MaterialProps> mats_;
};

// Effective electrical conductivity of the deposited heater film in
// S/um (bulk gold is 41). A single calibrated scalar: chosen so that
// the model-1 gripper closes onto a 5 um object at 0.25 V on the
// default mesh (resolution 12, order 2). Thin evaporated films differ
// from bulk anyway; this is the one free parameter of the toolkit.
double calibrated_heater_conductivity();

// MaterialDb with the Gold conductivity replaced by the calibrated
// film value; the plain MaterialDb keeps the bulk constant.
MaterialDb calibrated_material_db();

}  // namespace mg
