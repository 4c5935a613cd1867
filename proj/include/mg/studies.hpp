#pragma once

#include <optional>

#include "mg/grip.hpp"

namespace mg {

// One row of the study CSV; grip fields only when an object is set.
struct SweepRecord {
  std::string design_id;
  double applied_voltage = 0.0;        // V
  double convection_coefficient = 0.0; // pW/(um^2 K)
  double tip_gap = 0.0;                // um
  double max_temperature = 0.0;        // K
  double tip_temperature = 0.0;        // K
  double out_of_plane_max = 0.0;       // um
  double joule_power_total = 0.0;      // pW
  std::optional<double> grip_force;    // uN, both tips summed
  std::optional<double> grip_pressure; // MPa, max over engaged facets
};

// Shared knobs for all campaigns.
struct StudyContext {
  MeshSettings mesh;
  MaterialDb db = calibrated_material_db();
  int threads = 1;
  // When set, each sweep point also resolves the contact problem.
  std::optional<double> object_diameter;
};

std::vector<SweepRecord> voltage_sweep(const GripperDesign& d,
                                       const std::vector<double>& voltages,
                                       const Environment& env,
                                       const StudyContext& ctx);

// Cross product of voltages x h values at a fixed ambient temperature,
// grouped by h, voltages in input order within each group.
std::vector<SweepRecord> environment_sweep(
    const GripperDesign& d, const std::vector<double>& voltages,
    const std::vector<double>& h_values, double ambient_temperature,
    const StudyContext& ctx);

struct CompareResult {
  std::vector<SweepRecord> model1;
  std::vector<SweepRecord> model2;
  bool model2_closes_slower = false;          // gap2 >= gap1 everywhere
  bool model2_out_of_plane_smaller = false;   // oop2 <= oop1 everywhere
};

CompareResult compare_models(const std::vector<double>& voltages,
                             const Environment& env, const StudyContext& ctx);

// Optimization over the layer stack. Either an explicit candidate set
// or a box over the continuous stack variables (all optional; absent
// variables stay at the model defaults).
struct DesignSpace {
  std::vector<GripperDesign> candidates;  // non-empty: discrete mode
  std::optional<std::pair<double, double>> polymer_split_fraction;
  std::optional<std::pair<double, double>> metal_thickness;   // um
  std::optional<std::pair<double, double>> metal_offset;      // um
  double operating_voltage = 0.25;  // objective evaluated here
  double v_max = 0.3;               // closure constraint: at V <= v_max
  double required_closure = 10.0;   // um
  Environment env;
};

struct EvalPoint {
  GripperDesign design;
  double objective = 0.0;          // out_of_plane_max at operating V
  double closure_at_vmax = 0.0;    // um (exact V^2 extrapolation)
  bool feasible = false;
};

struct OptimizeResult {
  bool feasible_found = false;
  EvalPoint best;       // best feasible, or closest-to-feasible if none
  std::vector<EvalPoint> trace;
};

// method: "grid" | "golden-section" | "nelder-mead". budget bounds the
// number of objective evaluations; seed only perturbs the nelder-mead
// restart simplex.
OptimizeResult optimize_design(const DesignSpace& space,
                               const std::string& method, int budget,
                               const StudyContext& ctx, unsigned seed = 0);

}  // namespace mg
