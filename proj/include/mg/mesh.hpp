#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mg/design.hpp"

namespace mg {

enum class FacetTag { fixed_base, convection, terminal, tip_left, tip_right };

std::string facet_tag_name(FacetTag tag, const std::string& pad_id = "");

// Boundary quad of one element. Nodes are the (order+1)^2 lattice points
// of the face, lexicographic in the face's two axes.
struct Facet {
  int element = -1;
  int local_face = -1;  // 0:-x 1:+x 2:-y 3:+y 4:-z 5:+z
  FacetTag tag = FacetTag::convection;
  int pad = -1;  // index into design pads for terminal facets
  double area = 0.0;
  std::array<double, 3> center{};
  std::vector<int> nodes;
};

struct Mesh {
  int order = 2;  // 1: 8-node trilinear, 2: 27-node triquadratic
  std::vector<std::array<double, 3>> nodes;
  std::vector<std::vector<int>> elements;  // lexicographic local ordering
  std::vector<int> element_region;         // index into region_names
  std::vector<std::string> region_names;   // material label per region id
  std::vector<std::int8_t> element_is_conductor;
  std::vector<std::array<double, 6>> element_box;  // x0,x1,y0,y1,z0,z1
  std::vector<Facet> facets;
  std::vector<TerminalPad> pads;  // copied from the design

  int nodes_per_element() const { return order == 1 ? 8 : 27; }
  std::size_t node_count() const { return nodes.size(); }
  std::size_t element_count() const { return elements.size(); }
  double element_volume(int e) const {
    const auto& b = element_box[e];
    return (b[1] - b[0]) * (b[3] - b[2]) * (b[5] - b[4]);
  }
  const std::string& region_of(int e) const {
    return region_names[element_region[e]];
  }
};

struct MeshSettings {
  double resolution = 12.0;  // target in-plane element size, um
  int order = 2;
};

Mesh generate_mesh(const GripperDesign& d, double resolution, int order);

struct QualityReport {
  double min_jacobian = 0.0;
  std::size_t element_count = 0;
  std::size_t node_count = 0;
  std::map<std::string, double> facet_area_by_tag;  // um^2
};

QualityReport mesh_quality(const Mesh& m);

}  // namespace mg
