#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mg/materials.hpp"

namespace mg {

enum class LayerRole { substrate_oxide, structural_polymer, conductor };

struct LayerSpec {
  std::string material;
  double thickness = 0.0;  // um
  LayerRole role = LayerRole::structural_polymer;
};

// Axis-aligned plan-view rectangle. All plan geometry is rectilinear.
struct PlanRect {
  std::string name;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  double area() const { return (x1 - x0) * (y1 - y0); }
};

enum class MetalPlacement { both_faces, midplane, parametric_offset };

struct TerminalPad {
  std::string id;   // e.g. "left+"
  int arm = 0;      // 0 left, 1 right
  int polarity = 0;  // +1 drive terminal, -1 ground
  PlanRect rect;    // pad footprint; pads sit on the y=0 edge
};

// Lateral tip face, a plane x = const facing the opposite arm.
struct TipFace {
  double x = 0;
  double y0 = 0, y1 = 0;
  int normal_sign = 0;  // +1 left arm (faces +x), -1 right arm
};

struct GripperDesign {
  std::string id;  // "model1", "model2", or custom label

  double footprint_width = 200.0;   // x extent, um
  double footprint_length = 460.0;  // y extent, um
  double free_arm_length = 400.0;
  double tip_gap_open = 20.0;
  double anchor_length = 60.0;
  double trace_width = 10.0;

  std::vector<PlanRect> structural_plan;  // polymer body, both arms + fixed part
  std::vector<PlanRect> anchor_plan;      // oxide footprint (fixed part only)
  std::vector<PlanRect> heater_plan;      // conductor trace, both arms
  std::vector<TerminalPad> pads;          // two per arm
  std::vector<LayerSpec> stack;           // bottom -> top, incl. oxide
  MetalPlacement metal_placement = MetalPlacement::both_faces;
  double metal_offset = 0.0;  // um from polymer midplane (parametric_offset)

  TipFace tip_left, tip_right;

  // Free-arm stack thickness (stack minus the oxide anchor layer).
  double arm_stack_thickness() const;
  double total_stack_thickness() const;
  std::string polymer_material() const;
  std::string conductor_material() const;
};

// All overrides optional; absent fields keep the model defaults.
struct DesignOverrides {
  std::optional<double> free_arm_length;
  std::optional<double> tip_gap_open;
  std::optional<double> metal_thickness;
  std::optional<double> polymer_thickness;       // total polymer, um
  std::optional<double> polymer_split_fraction;  // bottom layer share (0,1)
  std::optional<double> metal_offset;            // um from midplane
  std::optional<double> trace_width;
  std::optional<double> oxide_thickness;
};

// Model 1: 0.3 um Cr/Au on both faces of a 20 um SU-8 core.
GripperDesign build_model1(const DesignOverrides& o = {});

// Model 2: one 0.3 um Cr/Au layer between two 10 um SU-8 layers.
GripperDesign build_model2(const DesignOverrides& o = {});

// Single-metal-layer stack with the metal centered at
// polymer_midplane + offset; used by the placement studies.
GripperDesign build_offset_design(const DesignOverrides& o);

std::vector<std::string> validate_design(const GripperDesign& d,
                                         const MaterialDb& db = MaterialDb());

}  // namespace mg
