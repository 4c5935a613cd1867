#pragma once

#include "mg/design.hpp"

// Minimal rectilinear designs for solver tests; these bypass the
// gripper plan and exercise the mesher/solvers directly.

inline mg::GripperDesign make_box_design(double lx, double ly,
                                         std::vector<mg::LayerSpec> layers,
                                         bool anchored = true) {
  mg::GripperDesign d;
  d.id = "box";
  d.footprint_width = lx;
  d.footprint_length = ly;
  d.free_arm_length = ly / 2;
  d.tip_gap_open = 1.0;
  d.anchor_length = 0.0;
  d.structural_plan = {{"body", 0, 0, lx, ly}};
  if (anchored) d.anchor_plan = {{"anchor", 0, 0, lx, ly}};
  d.stack = std::move(layers);
  d.tip_left = {};
  d.tip_right = {};
  return d;
}

// Conductor bar along x with terminals on the two end faces.
inline mg::GripperDesign make_bar_design(double length, double width,
                                         double thickness,
                                         const std::string& metal = "Gold") {
  mg::GripperDesign d = make_box_design(
      length, width, {{metal, thickness, mg::LayerRole::conductor}}, false);
  d.id = "bar";
  d.heater_plan = {{"bar", 0, 0, length, width}};
  d.pads = {
      {"A", 0, +1, {"padA", 0, 0, 0, width}},
      {"B", 0, -1, {"padB", length, 0, length, width}},
  };
  return d;
}
