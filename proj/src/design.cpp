#include "mg/design.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mg {

namespace {

constexpr double kTol = 1e-9;

struct PlanParams {
  double width, length, arm_len, gap, anchor_len, trace_w;
  double edge_margin = 10.0;
  double hot_width = 30.0;
  double hot_cold_gap = 15.0;
  double cold_width = 30.0;
  double underarm_length = 200.0;
  double head_length = 40.0;
  double arm_width = 30.0;
  double tip_length = 20.0;
};

PlanRect mirror(const PlanRect& r, double width, const std::string& name) {
  return PlanRect{name, width - r.x1, r.y0, width - r.x0, r.y1};
}

void build_plan(GripperDesign& d, const PlanParams& p) {
  d.footprint_width = p.width;
  d.footprint_length = p.length;
  d.free_arm_length = p.arm_len;
  d.tip_gap_open = p.gap;
  d.anchor_length = p.anchor_len;
  d.trace_width = p.trace_w;

  const double W = p.width;
  const double y_arm0 = p.anchor_len;
  const double y_under1 = y_arm0 + p.underarm_length;
  const double y_head1 = y_under1 + p.head_length;
  const double y_tip1 = p.length;
  const double x_tip_inner = (W - p.gap) / 2.0;  // left arm inner face
  const double x_arm_outer = x_tip_inner - p.arm_width;
  const double x_hot0 = p.edge_margin;
  const double x_hot1 = x_hot0 + p.hot_width;
  const double x_cold0 = x_hot1 + p.hot_cold_gap;
  const double x_cold1 = x_cold0 + p.cold_width;

  d.structural_plan.clear();
  d.structural_plan.push_back({"fixed_part", 0, 0, W, y_arm0});
  std::vector<PlanRect> left = {
      {"hot_underarm_left", x_hot0, y_arm0, x_hot1, y_under1},
      {"cold_underarm_left", x_cold0, y_arm0, x_cold1, y_under1},
      {"head_left", x_hot0, y_under1, x_tip_inner, y_head1},
      {"arm_left", x_arm_outer, y_head1, x_tip_inner, y_tip1},
  };
  for (const auto& r : left) d.structural_plan.push_back(r);
  for (const auto& r : left) {
    std::string name = r.name;
    name.replace(name.find("left"), 4, "right");
    d.structural_plan.push_back(mirror(r, W, name));
  }

  d.anchor_plan = {{"anchor", 0, 0, W, y_arm0}};

  // Heater trace per arm, the classic hot/cold-arm loop: a narrow leg
  // out along the hot underarm, a bridge across the head, and a wide
  // return leg down the cold underarm. The wide leg carries the same
  // current at a fraction of the current density, so it barely heats,
  // and its metal ties the cold underarm thermally to the anchor. Both
  // pads sit on the fixed-part edge at y=0.
  const double l1x0 = x_hot0 + 0.5 * (p.hot_width - p.trace_w);
  const double l1x1 = l1x0 + p.trace_w;
  const double y_turn0 = y_under1 + 5.0;
  const double y_turn1 = y_turn0 + p.trace_w;

  d.heater_plan.clear();
  std::vector<PlanRect> trace_left = {
      {"trace_hot_left", l1x0, 0, l1x1, y_turn1},
      {"trace_cold_left", x_cold0, 0, x_cold1, y_turn1},
      {"trace_bridge_left", l1x0, y_turn0, x_cold0, y_turn1},
  };
  for (const auto& r : trace_left) d.heater_plan.push_back(r);
  for (const auto& r : trace_left) {
    std::string name = r.name;
    name.replace(name.find("left"), 4, "right");
    d.heater_plan.push_back(mirror(r, W, name));
  }

  // Zero-height pad rects select exactly the leg end faces at y=0.
  d.pads = {
      {"left+", 0, +1, {"pad_left+", l1x0, 0, l1x1, 0}},
      {"left-", 0, -1, {"pad_left-", x_cold0, 0, x_cold1, 0}},
      {"right+", 1, +1, {"pad_right+", W - l1x1, 0, W - l1x0, 0}},
      {"right-", 1, -1, {"pad_right-", W - x_cold1, 0, W - x_cold0, 0}},
  };

  d.tip_left = {x_tip_inner, y_tip1 - p.tip_length, y_tip1, +1};
  d.tip_right = {W - x_tip_inner, y_tip1 - p.tip_length, y_tip1, -1};
}

PlanParams plan_params(const DesignOverrides& o) {
  PlanParams p{200.0, 460.0, 400.0, 20.0, 60.0, 10.0};
  if (o.free_arm_length) {
    p.arm_len = *o.free_arm_length;
    p.length = p.anchor_len + p.arm_len;
    const double scale = p.arm_len / 400.0;
    p.underarm_length *= scale;
    p.head_length *= scale;
  }
  if (o.tip_gap_open) p.gap = *o.tip_gap_open;
  if (o.trace_width) p.trace_w = *o.trace_width;
  return p;
}

void throw_if_invalid(const GripperDesign& d) {
  auto report = validate_design(d);
  if (report.empty()) return;
  std::string msg = "invalid design '" + d.id + "':";
  for (const auto& r : report) msg += " " + r + ";";
  throw Error(msg);
}

}  // namespace

double GripperDesign::arm_stack_thickness() const {
  double t = 0;
  for (const auto& l : stack)
    if (l.role != LayerRole::substrate_oxide) t += l.thickness;
  return t;
}

double GripperDesign::total_stack_thickness() const {
  double t = 0;
  for (const auto& l : stack) t += l.thickness;
  return t;
}

std::string GripperDesign::polymer_material() const {
  for (const auto& l : stack)
    if (l.role == LayerRole::structural_polymer) return l.material;
  return "";
}

std::string GripperDesign::conductor_material() const {
  for (const auto& l : stack)
    if (l.role == LayerRole::conductor) return l.material;
  return "";
}

GripperDesign build_model1(const DesignOverrides& o) {
  GripperDesign d;
  d.id = "model1";
  build_plan(d, plan_params(o));
  const double t_ox = o.oxide_thickness.value_or(2.0);
  const double t_metal = o.metal_thickness.value_or(0.3);
  const double t_poly = o.polymer_thickness.value_or(20.0);
  d.stack = {
      {"SiO2", t_ox, LayerRole::substrate_oxide},
      {"Gold", t_metal, LayerRole::conductor},
      {"SU-8", t_poly, LayerRole::structural_polymer},
      {"Gold", t_metal, LayerRole::conductor},
  };
  d.metal_placement = MetalPlacement::both_faces;
  throw_if_invalid(d);
  return d;
}

GripperDesign build_model2(const DesignOverrides& o) {
  GripperDesign d;
  d.id = "model2";
  build_plan(d, plan_params(o));
  const double t_ox = o.oxide_thickness.value_or(2.0);
  const double t_metal = o.metal_thickness.value_or(0.3);
  const double t_poly = o.polymer_thickness.value_or(20.0);
  const double split = o.polymer_split_fraction.value_or(0.5);
  d.stack = {
      {"SiO2", t_ox, LayerRole::substrate_oxide},
      {"SU-8", t_poly * split, LayerRole::structural_polymer},
      {"Gold", t_metal, LayerRole::conductor},
      {"SU-8", t_poly * (1.0 - split), LayerRole::structural_polymer},
  };
  d.metal_placement = MetalPlacement::midplane;
  throw_if_invalid(d);
  return d;
}

GripperDesign build_offset_design(const DesignOverrides& o) {
  const double t_poly = o.polymer_thickness.value_or(20.0);
  const double offset = o.metal_offset.value_or(0.0);
  const double bottom = t_poly / 2.0 + offset;
  if (bottom <= 0.0 || bottom >= t_poly)
    throw Error("metal_offset places the metal outside the polymer stack");
  DesignOverrides oo = o;
  oo.polymer_split_fraction = bottom / t_poly;
  GripperDesign d = build_model2(oo);
  d.id = "offset_" + std::to_string(offset);
  d.metal_placement = offset == 0.0 ? MetalPlacement::midplane
                                    : MetalPlacement::parametric_offset;
  d.metal_offset = offset;
  return d;
}

namespace {

bool rects_touch(const PlanRect& a, const PlanRect& b) {
  const double ox = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double oy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  // shared edge of positive length (or area overlap)
  return ox >= -kTol && oy >= -kTol && (ox > kTol || oy > kTol);
}

}  // namespace

std::vector<std::string> validate_design(const GripperDesign& d,
                                         const MaterialDb& db) {
  std::vector<std::string> out;

  for (const auto& l : d.stack) {
    if (!(l.thickness > 0))
      out.push_back("layer '" + l.material + "' thickness must be > 0");
    if (!db.has(l.material)) {
      out.push_back("layer references unknown material '" + l.material + "'");
      continue;
    }
    if (l.role == LayerRole::conductor &&
        !db.get(l.material).electrical_conductivity)
      out.push_back("conductor layer material '" + l.material +
                    "' has no electrical_conductivity");
  }
  if (!(d.tip_gap_open > 0)) out.push_back("tip_gap_open must be > 0");
  if (!(d.free_arm_length < d.footprint_length))
    out.push_back("free_arm_length must be < footprint_length");
  if (!(d.free_arm_length > 0)) out.push_back("free_arm_length must be > 0");

  auto check_rects = [&](const std::vector<PlanRect>& rects,
                         const char* what) {
    for (const auto& r : rects) {
      if (!(r.x1 > r.x0 + kTol) || !(r.y1 > r.y0 + kTol))
        out.push_back(std::string(what) + " rect '" + r.name +
                      "' is degenerate");
      if (r.x0 < -kTol || r.x1 > d.footprint_width + kTol || r.y0 < -kTol ||
          r.y1 > d.footprint_length + kTol)
        out.push_back(std::string(what) + " rect '" + r.name +
                      "' exceeds the footprint");
    }
  };
  check_rects(d.structural_plan, "structural");
  check_rects(d.heater_plan, "heater");

  // Heater connectivity: per arm, one connected trace touching exactly
  // the arm's two pads.
  for (int arm = 0; arm < 2; ++arm) {
    std::vector<const PlanRect*> trace;
    const double mid = d.footprint_width / 2.0;
    for (const auto& r : d.heater_plan) {
      const double cx = (r.x0 + r.x1) / 2.0;
      if ((arm == 0 && cx < mid) || (arm == 1 && cx > mid))
        trace.push_back(&r);
    }
    if (trace.empty()) {
      out.push_back("arm " + std::to_string(arm) + " has no heater trace");
      continue;
    }
    std::vector<int> comp(trace.size(), -1);
    std::vector<size_t> stack_{0};
    comp[0] = 0;
    while (!stack_.empty()) {
      size_t i = stack_.back();
      stack_.pop_back();
      for (size_t j = 0; j < trace.size(); ++j)
        if (comp[j] < 0 && rects_touch(*trace[i], *trace[j])) {
          comp[j] = 0;
          stack_.push_back(j);
        }
    }
    if (std::count(comp.begin(), comp.end(), 0) != (long)trace.size())
      out.push_back("heater trace not connected (arm " + std::to_string(arm) +
                    ")");
    int pads_touched = 0;
    for (const auto& pad : d.pads) {
      if (pad.arm != arm) continue;
      bool touched = false;
      for (const auto* r : trace)
        if (rects_touch(*r, pad.rect)) touched = true;
      if (touched) ++pads_touched;
    }
    if (pads_touched != 2)
      out.push_back("heater trace must touch exactly two pads per arm (arm " +
                    std::to_string(arm) + " touches " +
                    std::to_string(pads_touched) + ")");
  }

  // Mirror symmetry of both plan sets across the midline.
  auto mirrored_in = [&](const PlanRect& r, const std::vector<PlanRect>& set) {
    const double W = d.footprint_width;
    for (const auto& s : set)
      if (std::abs(s.x0 - (W - r.x1)) < kTol &&
          std::abs(s.x1 - (W - r.x0)) < kTol && std::abs(s.y0 - r.y0) < kTol &&
          std::abs(s.y1 - r.y1) < kTol)
        return true;
    return false;
  };
  for (const auto& r : d.structural_plan)
    if (!mirrored_in(r, d.structural_plan)) {
      out.push_back("arms not mirror-symmetric (structural rect '" + r.name +
                    "')");
      break;
    }
  for (const auto& r : d.heater_plan)
    if (!mirrored_in(r, d.heater_plan)) {
      out.push_back("arms not mirror-symmetric (heater rect '" + r.name +
                    "')");
      break;
    }

  return out;
}

}  // namespace mg
