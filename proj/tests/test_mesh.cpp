#include <set>

#include "doctest.h"
#include "mg/mesh.hpp"
#include "test_util.hpp"

using namespace mg;

namespace {
GripperDesign unit_cube() {
  return make_box_design(1.0, 1.0,
                         {{"SU-8", 1.0, LayerRole::structural_polymer}});
}
}  // namespace

TEST_CASE("unit cube, resolution 0.5, order 1: 8 elements, 27 nodes") {
  const Mesh m = generate_mesh(unit_cube(), 0.5, 1);
  CHECK(m.element_count() == 8);
  CHECK(m.node_count() == 27);
  for (const auto& e : m.elements) CHECK(e.size() == 8);
}

TEST_CASE("unit cube quality: convection area is all faces but the base") {
  const Mesh m = generate_mesh(unit_cube(), 0.5, 1);
  const auto q = mesh_quality(m);
  CHECK(q.facet_area_by_tag.at("convection") == doctest::Approx(5.0));
  CHECK(q.facet_area_by_tag.at("fixed_base") == doctest::Approx(1.0));
  CHECK(q.min_jacobian > 0.0);
}

TEST_CASE("model1 mesh: 27-node elements, conductor one element thick") {
  const auto d = build_model1();
  const Mesh m = generate_mesh(d, 10.0, 2);
  for (const auto& e : m.elements) CHECK(e.size() == 27);
  bool any_conductor = false;
  for (std::size_t e = 0; e < m.element_count(); ++e)
    if (m.element_is_conductor[e]) {
      any_conductor = true;
      const auto& b = m.element_box[e];
      CHECK(b[5] - b[4] == doctest::Approx(0.3));
    }
  CHECK(any_conductor);
  CHECK(mesh_quality(m).min_jacobian > 0.0);
}

TEST_CASE("model1 fixed_base area equals the anchor footprint") {
  const auto d = build_model1();
  const Mesh m = generate_mesh(d, 12.0, 1);
  const auto q = mesh_quality(m);
  double anchor_area = 0;
  for (const auto& r : d.anchor_plan) anchor_area += r.area();
  CHECK(q.facet_area_by_tag.at("fixed_base") == doctest::Approx(anchor_area));
}

TEST_CASE("halving resolution multiplies elements by 8 on a brick") {
  const auto d = make_box_design(
      4.0, 4.0, {{"SU-8", 2.0, LayerRole::structural_polymer}});
  const Mesh coarse = generate_mesh(d, 2.0, 1);
  const Mesh fine = generate_mesh(d, 1.0, 1);
  CHECK(fine.element_count() == 8 * coarse.element_count());
}

TEST_CASE("refinement nesting: fine node set contains the coarse nodes") {
  const auto d = make_box_design(
      4.0, 4.0, {{"SU-8", 2.0, LayerRole::structural_polymer}});
  const Mesh coarse = generate_mesh(d, 2.0, 2);
  const Mesh fine = generate_mesh(d, 1.0, 2);
  std::set<std::array<double, 3>> fine_nodes(fine.nodes.begin(),
                                             fine.nodes.end());
  for (const auto& n : coarse.nodes) CHECK(fine_nodes.count(n) == 1);
}

TEST_CASE("tag areas are invariant under refinement") {
  const auto d = build_model1();
  const auto qa = mesh_quality(generate_mesh(d, 15.0, 1));
  const auto qb = mesh_quality(generate_mesh(d, 7.5, 1));
  REQUIRE(qa.facet_area_by_tag.size() == qb.facet_area_by_tag.size());
  for (const auto& [tag, area] : qa.facet_area_by_tag)
    CHECK(qb.facet_area_by_tag.at(tag) ==
          doctest::Approx(area).epsilon(1e-9));
}

TEST_CASE("meshing is deterministic") {
  const auto d = build_model2();
  const Mesh a = generate_mesh(d, 10.0, 2);
  const Mesh b = generate_mesh(d, 10.0, 2);
  REQUIRE(a.node_count() == b.node_count());
  CHECK(a.nodes == b.nodes);
  CHECK(a.elements == b.elements);
  CHECK(a.element_region == b.element_region);
}

TEST_CASE("every boundary facet belongs to exactly one element and tag") {
  const Mesh m = generate_mesh(build_model1(), 15.0, 1);
  // Facets are emitted per element face, so uniqueness of the
  // (element, local_face) pair is the partition property.
  std::set<std::pair<int, int>> seen;
  for (const auto& f : m.facets) {
    CHECK(seen.insert({f.element, f.local_face}).second);
    CHECK(f.element >= 0);
    CHECK(f.element < (int)m.element_count());
  }
}

TEST_CASE("terminal facets exist for all four pads") {
  const Mesh m = generate_mesh(build_model1(), 10.0, 2);
  std::set<int> pads;
  for (const auto& f : m.facets)
    if (f.tag == FacetTag::terminal) pads.insert(f.pad);
  CHECK(pads == std::set<int>{0, 1, 2, 3});
}

TEST_CASE("tip facets are tagged on both arms") {
  const Mesh m = generate_mesh(build_model1(), 10.0, 2);
  const auto q = mesh_quality(m);
  // Model 1 arms carry no metal at the tip; the face is the 20 um
  // polymer core over the 20 um tip length.
  const double tip_area = 20.0 * 20.0;
  CHECK(q.facet_area_by_tag.at("tip:left") == doctest::Approx(tip_area));
  CHECK(q.facet_area_by_tag.at("tip:right") == doctest::Approx(tip_area));
}

TEST_CASE("bad inputs are rejected") {
  CHECK_THROWS_AS(generate_mesh(unit_cube(), -1.0, 1), Error);
  CHECK_THROWS_AS(generate_mesh(unit_cube(), 0.5, 3), Error);
  auto d = unit_cube();
  d.structural_plan[0].x1 = 0.0;  // degenerate
  CHECK_THROWS_AS(generate_mesh(d, 0.5, 1), Error);
}
