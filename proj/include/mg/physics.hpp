#pragma once

#include <map>
#include <string>
#include <vector>

#include "mg/fem.hpp"
#include "mg/materials.hpp"
#include "mg/mesh.hpp"

namespace mg {

using ScalarField = std::vector<double>;   // one value per node
using VectorField = std::vector<double>;   // 3 values per node, interleaved

struct ElectricResult {
  ScalarField voltage;                // V; zero outside the conductor
  std::vector<double> joule_density;  // pW/um^3 per element
  double total_power = 0.0;           // pW
  double total_current = 0.0;         // pA, summed over drive pads
  std::map<std::string, double> terminal_current;  // pA per pad, + = in
};

struct ThermalResult {
  ScalarField temperature;        // K
  double convective_loss = 0.0;   // pW
  double base_conduction = 0.0;   // pW through the fixed base
};

struct Solution {
  double applied_voltage = 0.0;
  Environment environment;
  ScalarField voltage;
  ScalarField temperature;
  VectorField displacement;
  std::vector<double> joule_density;
  double joule_power_total = 0.0;
  double total_current = 0.0;
  std::map<std::string, double> terminal_current;
  double convective_loss = 0.0;
  double base_conduction = 0.0;
  double tip_gap = 0.0;
  double max_temperature = 0.0;
  std::string max_temperature_location;
  double tip_temperature = 0.0;
  double out_of_plane_max = 0.0;
};

// Laplace solve on the conductor region with pad terminals at
// applied_voltage / 0 per arm; Joule density sigma*|grad V|^2.
ElectricResult solve_electric(const Mesh& m, const MaterialDb& db,
                              double applied_voltage);

// Steady conduction with the Joule source, convection on tagged facets
// and ambient temperature clamped at the fixed base.
ThermalResult solve_thermal(const Mesh& m, const MaterialDb& db,
                            const std::vector<double>& joule_density,
                            const Environment& env);

// Small-strain thermoelasticity, clamped at the fixed base. Optional
// point springs implement penalty contact.
VectorField solve_mechanical(const Mesh& m, const MaterialDb& db,
                             const ScalarField& temperature,
                             double reference_temperature,
                             const std::vector<PointSpring>& springs = {});

// One-way electric -> thermal -> mechanical chain plus derived scalars.
Solution run_coupled(const GripperDesign& d, double applied_voltage,
                     const Environment& env, const MeshSettings& settings,
                     const MaterialDb& db = MaterialDb());

// Same, on a pre-generated mesh (sweeps reuse the mesh).
Solution run_coupled_on_mesh(const Mesh& m, const GripperDesign& d,
                             double applied_voltage, const Environment& env,
                             const MaterialDb& db,
                             const std::vector<PointSpring>& springs = {});

}  // namespace mg
