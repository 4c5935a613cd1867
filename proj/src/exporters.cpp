#include "mg/exporters.hpp"

#include <cstdio>
#include <fstream>

namespace mg {
namespace {

// Local node order is lexicographic (x fastest); VTK wants corners,
// edge midpoints, face centers, volume center.
const int kVtkHex8[8] = {0, 1, 3, 2, 4, 5, 7, 6};
const int kVtkHex27[27] = {
    0,  2,  8,  6,  18, 20, 26, 24,  // corners
    1,  5,  7,  3,  19, 23, 25, 21,  // bottom + top edge midpoints
    9,  11, 17, 15,                  // vertical edge midpoints
    12, 14, 10, 16,                  // -x +x -y +y face centers
    4,  22,                          // -z +z face centers
    13,                              // volume center
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace

const char* const kCsvHeader =
    "design_id,voltage_V,h_W_per_m2K,tip_gap_um,max_T_K,tip_T_K,"
    "out_of_plane_um,power_pW,grip_force_uN,grip_pressure_MPa";

void export_vtk(const Mesh& m, const Solution& s, const std::string& path) {
  const std::size_t n = m.node_count();
  const std::size_t ne = m.element_count();
  if (s.voltage.size() != n || s.temperature.size() != n ||
      s.displacement.size() != 3 * n || s.joule_density.size() != ne)
    throw Error("solution does not match the mesh for '" + path + "'");

  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "microgripper coupled solution, uMKSV units\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";

  out << "POINTS " << n << " double\n";
  for (const auto& p : m.nodes)
    out << fmt(p[0]) << " " << fmt(p[1]) << " " << fmt(p[2]) << "\n";

  const int npe = m.nodes_per_element();
  const int* perm = m.order == 1 ? kVtkHex8 : kVtkHex27;
  out << "CELLS " << ne << " " << ne * (npe + 1) << "\n";
  for (const auto& elem : m.elements) {
    out << npe;
    for (int i = 0; i < npe; ++i) out << " " << elem[perm[i]];
    out << "\n";
  }
  out << "CELL_TYPES " << ne << "\n";
  const int cell_type = m.order == 1 ? 12 : 29;  // hex / triquadratic hex
  for (std::size_t e = 0; e < ne; ++e) out << cell_type << "\n";

  out << "POINT_DATA " << n << "\n";
  out << "SCALARS voltage double 1\nLOOKUP_TABLE default\n";
  for (double v : s.voltage) out << fmt(v) << "\n";
  out << "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
  for (double t : s.temperature) out << fmt(t) << "\n";
  out << "VECTORS displacement double\n";
  for (std::size_t i = 0; i < n; ++i)
    out << fmt(s.displacement[3 * i]) << " " << fmt(s.displacement[3 * i + 1])
        << " " << fmt(s.displacement[3 * i + 2]) << "\n";

  out << "CELL_DATA " << ne << "\n";
  out << "SCALARS material_id int 1\nLOOKUP_TABLE default\n";
  for (std::size_t e = 0; e < ne; ++e) out << m.element_region[e] << "\n";
  out << "SCALARS joule_density double 1\nLOOKUP_TABLE default\n";
  for (double q : s.joule_density) out << fmt(q) << "\n";
  finish(out, path);
}

void export_csv(const std::vector<SweepRecord>& records,
                const std::string& path) {
  auto out = open_out(path);
  out << kCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.design_id << "," << fmt(r.applied_voltage) << ","
        << fmt(r.convection_coefficient) << "," << fmt(r.tip_gap) << ","
        << fmt(r.max_temperature) << "," << fmt(r.tip_temperature) << ","
        << fmt(r.out_of_plane_max) << "," << fmt(r.joule_power_total) << ",";
    if (r.grip_force) out << fmt(*r.grip_force);
    out << ",";
    if (r.grip_pressure) out << fmt(*r.grip_pressure);
    out << "\n";
  }
  finish(out, path);
}

}  // namespace mg
