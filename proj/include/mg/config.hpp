#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mg/design.hpp"
#include "mg/materials.hpp"
#include "mg/mesh.hpp"

namespace mg {

// Raised for anything wrong with a config file: syntax, unknown keys,
// invariant violations. The CLI maps this to its config exit code.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Fully-resolved study specification. `resolved_text` is the config
// echoed back with every default applied; re-parsing it reproduces the
// same resolved state byte for byte.
struct StudyConfig {
  std::string study_type = "simulate";

  GripperDesign design;
  MaterialDb materials;
  MeshSettings mesh{12.0, 2};
  Environment env;

  double voltage = 0.25;                  // simulate / grip
  std::vector<double> voltages;           // sweep / env-sweep / compare
  std::vector<double> h_values;           // env-sweep
  std::optional<double> object_diameter;  // grip; also enables sweep grip columns

  // optimize
  std::string method = "grid";
  int budget = 15;
  std::vector<std::string> candidates;  // design labels, discrete mode
  std::optional<std::pair<double, double>> polymer_split_fraction;
  std::optional<std::pair<double, double>> metal_thickness;
  std::optional<std::pair<double, double>> metal_offset;
  double operating_voltage = 0.25;
  double v_max = 0.3;
  double required_closure = 10.0;

  std::string output_directory = "out";
  bool write_csv = true;
  bool write_vtk = true;
  int threads = 1;
  unsigned seed = 0;

  std::string resolved_text;
};

// Parses the JSON study config, applies defaults and validates
// everything it references. Errors carry line/column for syntax
// problems and the offending key path otherwise.
StudyConfig parse_config(const std::string& text);

StudyConfig load_config_file(const std::string& path);

}  // namespace mg
