#include <algorithm>

#include "doctest.h"
#include "mg/design.hpp"

using namespace mg;

TEST_CASE("model1 stack: metal on both faces of the polymer core") {
  const auto d = build_model1();
  REQUIRE(d.stack.size() == 4);
  CHECK(d.stack[0].thickness == doctest::Approx(2.0));
  CHECK(d.stack[1].thickness == doctest::Approx(0.3));
  CHECK(d.stack[2].thickness == doctest::Approx(20.0));
  CHECK(d.stack[3].thickness == doctest::Approx(0.3));
  CHECK(d.total_stack_thickness() == doctest::Approx(22.6));
  CHECK(d.arm_stack_thickness() == doctest::Approx(20.6));
  CHECK(d.metal_placement == MetalPlacement::both_faces);
  CHECK(d.tip_gap_open == doctest::Approx(20.0));
  CHECK(d.free_arm_length == doctest::Approx(400.0));
}

TEST_CASE("model2 stack: one metal layer between two 10 um polymer layers") {
  const auto d = build_model2();
  int conductors = 0;
  for (const auto& l : d.stack)
    if (l.role == LayerRole::conductor) ++conductors;
  CHECK(conductors == 1);
  REQUIRE(d.stack.size() == 4);
  CHECK(d.stack[1].thickness == doctest::Approx(10.0));
  CHECK(d.stack[2].role == LayerRole::conductor);
  CHECK(d.stack[2].thickness == doctest::Approx(0.3));
  CHECK(d.stack[3].thickness == doctest::Approx(10.0));
  CHECK(d.metal_placement == MetalPlacement::midplane);
}

TEST_CASE("models share the same plan-view polygons") {
  const auto d1 = build_model1();
  const auto d2 = build_model2();
  REQUIRE(d1.structural_plan.size() == d2.structural_plan.size());
  for (std::size_t i = 0; i < d1.structural_plan.size(); ++i) {
    CHECK(d1.structural_plan[i].x0 == d2.structural_plan[i].x0);
    CHECK(d1.structural_plan[i].x1 == d2.structural_plan[i].x1);
    CHECK(d1.structural_plan[i].y0 == d2.structural_plan[i].y0);
    CHECK(d1.structural_plan[i].y1 == d2.structural_plan[i].y1);
  }
  REQUIRE(d1.heater_plan.size() == d2.heater_plan.size());
}

TEST_CASE("metal thickness override grows the stack additively") {
  DesignOverrides o;
  o.metal_thickness = 0.6;
  const auto d = build_model2(o);
  CHECK(d.total_stack_thickness() ==
        doctest::Approx(build_model2().total_stack_thickness() + 0.3));
}

TEST_CASE("zero arm length is a design error") {
  DesignOverrides o;
  o.free_arm_length = 0.0;
  CHECK_THROWS_AS(build_model1(o), Error);
}

TEST_CASE("built designs validate clean") {
  CHECK(validate_design(build_model1()).empty());
  CHECK(validate_design(build_model2()).empty());
}

TEST_CASE("disconnected heater trace is reported") {
  auto d = build_model1();
  // Pull the bridge rects away from the legs on both arms.
  for (auto& r : d.heater_plan)
    if (r.name.find("bridge") != std::string::npos) {
      r.y0 += 50;
      r.y1 += 50;
    }
  const auto report = validate_design(d);
  CHECK(std::any_of(report.begin(), report.end(), [](const std::string& s) {
    return s.find("not connected") != std::string::npos;
  }));
}

TEST_CASE("asymmetric arms are reported") {
  auto d = build_model1();
  d.structural_plan.back().x1 += 3.0;  // break the mirror
  const auto report = validate_design(d);
  CHECK(std::any_of(report.begin(), report.end(), [](const std::string& s) {
    return s.find("mirror") != std::string::npos;
  }));
}

TEST_CASE("mirror symmetry is exact for built-in designs") {
  const auto d = build_model1();
  const double W = d.footprint_width;
  for (const auto& r : d.structural_plan) {
    bool found = false;
    for (const auto& s : d.structural_plan)
      if (s.x0 == W - r.x1 && s.x1 == W - r.x0 && s.y0 == r.y0 &&
          s.y1 == r.y1)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("offset design places the metal off midplane") {
  DesignOverrides o;
  o.metal_offset = 3.0;
  const auto d = build_offset_design(o);
  CHECK(d.metal_placement == MetalPlacement::parametric_offset);
  CHECK(d.stack[1].thickness == doctest::Approx(13.0));
  CHECK(d.stack[3].thickness == doctest::Approx(7.0));
  DesignOverrides bad;
  bad.metal_offset = 11.0;
  CHECK_THROWS_AS(build_offset_design(bad), Error);
}

TEST_CASE("heater trace touches exactly two pads per arm") {
  const auto d = build_model1();
  CHECK(d.pads.size() == 4);
  int left = 0, right = 0;
  for (const auto& p : d.pads) (p.arm == 0 ? left : right)++;
  CHECK(left == 2);
  CHECK(right == 2);
}
