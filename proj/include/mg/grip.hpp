#pragma once

#include "mg/physics.hpp"

namespace mg {

// Contact between the closing tips and a rigid, frictionless cylinder
// (axis vertical, centered on the gripper midline between the tips).
// All compliance is on the gripper side.
struct GripResult {
  double object_diameter = 0.0;  // um
  double applied_voltage = 0.0;  // V
  bool contact = false;
  double total_normal_force = 0.0;    // uN, both tips summed
  double force_left = 0.0;            // uN
  double force_right = 0.0;           // uN
  double mean_contact_pressure = 0.0; // MPa
  double max_contact_pressure = 0.0;  // MPa
  double contact_area = 0.0;          // um^2, engaged tributary area
  double unconstrained_closure = 0.0; // um, without the object
  double penalty_stiffness = 0.0;     // uN/um per node at convergence
  int penalty_levels = 0;             // continuation steps used
  Solution solution;                  // constrained fields
};

// Runs the coupled chain, then (if the unconstrained closure reaches
// the object) resolves the contact with gap-dependent normal penalty
// springs on the tip-facet nodes. The penalty stiffness is raised
// until the total force changes by less than 0.5%.
GripResult estimate_grip(const GripperDesign& d, double applied_voltage,
                         const Environment& env, double object_diameter,
                         const MeshSettings& settings,
                         const MaterialDb& db = MaterialDb());

// Same on a pre-generated mesh (used by sweeps).
GripResult estimate_grip_on_mesh(const Mesh& m, const GripperDesign& d,
                                 double applied_voltage,
                                 const Environment& env,
                                 double object_diameter,
                                 const MaterialDb& db = MaterialDb());

}  // namespace mg
