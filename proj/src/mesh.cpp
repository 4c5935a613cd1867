#include "mg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace mg {

std::string facet_tag_name(FacetTag tag, const std::string& pad_id) {
  switch (tag) {
    case FacetTag::fixed_base:
      return "fixed_base";
    case FacetTag::convection:
      return "convection";
    case FacetTag::terminal:
      return "terminal:" + pad_id;
    case FacetTag::tip_left:
      return "tip:left";
    case FacetTag::tip_right:
      return "tip:right";
  }
  return "?";
}

namespace {

constexpr double kGeomTol = 1e-9;

// Breakpoint list -> subdivided cell boundaries, every breakpoint kept.
std::vector<double> subdivide(std::vector<double> breaks, double res) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) {
                             return std::abs(a - b) < kGeomTol;
                           }),
               breaks.end());
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const int n = std::max(1, (int)std::ceil((b - a) / res - 1e-9));
    for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / n);
  }
  out.push_back(breaks.back());
  return out;
}

bool in_any(const std::vector<PlanRect>& rects, double x, double y) {
  for (const auto& r : rects)
    if (r.contains(x, y)) return true;
  return false;
}

}  // namespace

Mesh generate_mesh(const GripperDesign& d, double resolution, int order) {
  if (!(resolution > 0)) throw Error("mesh resolution must be > 0");
  if (order != 1 && order != 2) throw Error("element order must be 1 or 2");
  for (const auto& l : d.stack)
    if (!(l.thickness > 0))
      throw Error("layer '" + l.material + "' has non-positive thickness");
  auto check = [](const std::vector<PlanRect>& rects) {
    for (const auto& r : rects)
      if (!(r.x1 > r.x0 + kGeomTol) || !(r.y1 > r.y0 + kGeomTol))
        throw Error("degenerate plan rect '" + r.name + "'");
  };
  check(d.structural_plan);
  check(d.heater_plan);
  // Anchor rects may have zero height: like the pad rects, a line at
  // y = const selects the y faces there as clamped (end clamp).
  for (const auto& r : d.anchor_plan) {
    if (!(r.x1 > r.x0 + kGeomTol) || r.y1 < r.y0 - kGeomTol)
      throw Error("degenerate plan rect '" + r.name + "'");
  }

  // Grid breakpoints: every plan edge, pad edge and tip-face bound.
  std::vector<double> bx{0.0, d.footprint_width};
  std::vector<double> by{0.0, d.footprint_length};
  auto add_rects = [&](const std::vector<PlanRect>& rects) {
    for (const auto& r : rects) {
      bx.push_back(r.x0);
      bx.push_back(r.x1);
      by.push_back(r.y0);
      by.push_back(r.y1);
    }
  };
  add_rects(d.structural_plan);
  add_rects(d.anchor_plan);
  add_rects(d.heater_plan);
  for (const auto& p : d.pads) {
    bx.push_back(p.rect.x0);
    bx.push_back(p.rect.x1);
    by.push_back(p.rect.y0);
    by.push_back(p.rect.y1);
  }
  for (const auto& t : {d.tip_left, d.tip_right}) {
    if (t.normal_sign != 0) {
      bx.push_back(t.x);
      by.push_back(t.y0);
      by.push_back(t.y1);
    }
  }
  const std::vector<double> xs = subdivide(bx, resolution);
  const std::vector<double> ys = subdivide(by, resolution);

  // z: one breakpoint per layer interface, each layer >= 1 cell thick.
  std::vector<double> zs{0.0};
  std::vector<int> layer_of_zcell;
  {
    double z = 0.0;
    int li = 0;
    for (const auto& l : d.stack) {
      const int n = std::max(1, (int)std::ceil(l.thickness / resolution - 1e-9));
      for (int k = 1; k <= n; ++k) {
        zs.push_back(z + l.thickness * k / n);
        layer_of_zcell.push_back(li);
      }
      z += l.thickness;
      ++li;
    }
  }

  const int ncx = (int)xs.size() - 1;
  const int ncy = (int)ys.size() - 1;
  const int ncz = (int)zs.size() - 1;

  Mesh m;
  m.order = order;
  m.pads = d.pads;

  auto region_id = [&](const std::string& name) {
    for (std::size_t i = 0; i < m.region_names.size(); ++i)
      if (m.region_names[i] == name) return (int)i;
    m.region_names.push_back(name);
    return (int)m.region_names.size() - 1;
  };

  // Classify each candidate cell; -1 == void.
  const bool metal_embedded = d.metal_placement != MetalPlacement::both_faces;
  std::vector<int> cell_region((std::size_t)ncx * ncy * ncz, -1);
  std::vector<std::int8_t> cell_conductor(cell_region.size(), 0);
  auto cell_index = [&](int i, int j, int k) {
    return ((std::size_t)k * ncy + j) * ncx + i;
  };
  for (int k = 0; k < ncz; ++k) {
    const LayerSpec& layer = d.stack[layer_of_zcell[k]];
    for (int j = 0; j < ncy; ++j) {
      const double cy = 0.5 * (ys[j] + ys[j + 1]);
      for (int i = 0; i < ncx; ++i) {
        const double cx = 0.5 * (xs[i] + xs[i + 1]);
        int reg = -1;
        bool conductor = false;
        switch (layer.role) {
          case LayerRole::substrate_oxide:
            if (in_any(d.anchor_plan, cx, cy)) reg = region_id(layer.material);
            break;
          case LayerRole::structural_polymer:
            if (in_any(d.structural_plan, cx, cy))
              reg = region_id(layer.material);
            break;
          case LayerRole::conductor:
            if (in_any(d.heater_plan, cx, cy)) {
              reg = region_id(layer.material);
              conductor = true;
            } else if (metal_embedded &&
                       in_any(d.structural_plan, cx, cy)) {
              reg = region_id(d.polymer_material());
            }
            break;
        }
        cell_region[cell_index(i, j, k)] = reg;
        cell_conductor[cell_index(i, j, k)] = conductor ? 1 : 0;
      }
    }
  }

  // Node lattice: cell boundaries plus midpoints for order 2.
  auto lattice_coords = [&](const std::vector<double>& cs) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
      out.push_back(cs[i]);
      if (order == 2) out.push_back(0.5 * (cs[i] + cs[i + 1]));
    }
    out.push_back(cs.back());
    return out;
  };
  const std::vector<double> lx = lattice_coords(xs);
  const std::vector<double> ly = lattice_coords(ys);
  const std::vector<double> lz = lattice_coords(zs);
  const std::size_t Nx = lx.size(), Ny = ly.size();
  auto lattice_index = [&](int li, int lj, int lk) {
    return ((std::size_t)lk * Ny + lj) * Nx + li;
  };

  std::vector<std::int64_t> node_of;  // lattice index -> node id
  node_of.assign(Nx * Ny * lz.size(), -1);
  std::size_t n_nodes = 0;
  // Mark lattice points of kept cells, then number in lattice order.
  for (int k = 0; k < ncz; ++k)
    for (int j = 0; j < ncy; ++j)
      for (int i = 0; i < ncx; ++i) {
        if (cell_region[cell_index(i, j, k)] < 0) continue;
        for (int dk = 0; dk <= order; ++dk)
          for (int dj = 0; dj <= order; ++dj)
            for (int di = 0; di <= order; ++di)
              node_of[lattice_index(order * i + di, order * j + dj,
                                    order * k + dk)] = 0;
      }
  for (auto& v : node_of)
    if (v == 0) v = (std::int64_t)n_nodes++;

  m.nodes.resize(n_nodes);
  for (std::size_t lk = 0; lk < lz.size(); ++lk)
    for (std::size_t lj = 0; lj < Ny; ++lj)
      for (std::size_t li = 0; li < Nx; ++li) {
        const auto id = node_of[lattice_index((int)li, (int)lj, (int)lk)];
        if (id >= 0) m.nodes[id] = {lx[li], ly[lj], lz[lk]};
      }

  // Elements, lexicographic (k,j,i) cell order; local nodes (dk,dj,di)
  // with di fastest.
  std::vector<std::int64_t> elem_of(cell_region.size(), -1);
  for (int k = 0; k < ncz; ++k)
    for (int j = 0; j < ncy; ++j)
      for (int i = 0; i < ncx; ++i) {
        const auto ci = cell_index(i, j, k);
        if (cell_region[ci] < 0) continue;
        std::vector<int> conn;
        conn.reserve(order == 1 ? 8 : 27);
        for (int dk = 0; dk <= order; ++dk)
          for (int dj = 0; dj <= order; ++dj)
            for (int di = 0; di <= order; ++di)
              conn.push_back((int)node_of[lattice_index(
                  order * i + di, order * j + dj, order * k + dk)]);
        elem_of[ci] = (std::int64_t)m.elements.size();
        m.elements.push_back(std::move(conn));
        m.element_region.push_back(cell_region[ci]);
        m.element_is_conductor.push_back(cell_conductor[ci]);
        m.element_box.push_back(
            {xs[i], xs[i + 1], ys[j], ys[j + 1], zs[k], zs[k + 1]});
      }

  // Boundary facets with tags.
  const double z_bottom = 0.0;
  const int face_axis[6] = {0, 0, 1, 1, 2, 2};
  const int face_side[6] = {0, 1, 0, 1, 0, 1};
  for (int k = 0; k < ncz; ++k)
    for (int j = 0; j < ncy; ++j)
      for (int i = 0; i < ncx; ++i) {
        const auto ci = cell_index(i, j, k);
        if (cell_region[ci] < 0) continue;
        for (int f = 0; f < 6; ++f) {
          int ni = i + (face_axis[f] == 0 ? (face_side[f] ? 1 : -1) : 0);
          int nj = j + (face_axis[f] == 1 ? (face_side[f] ? 1 : -1) : 0);
          int nk = k + (face_axis[f] == 2 ? (face_side[f] ? 1 : -1) : 0);
          bool neighbor = ni >= 0 && ni < ncx && nj >= 0 && nj < ncy &&
                          nk >= 0 && nk < ncz &&
                          cell_region[cell_index(ni, nj, nk)] >= 0;
          if (neighbor) continue;

          Facet facet;
          facet.element = (int)elem_of[ci];
          facet.local_face = f;
          const double fx0 = xs[i], fx1 = xs[i + 1];
          const double fy0 = ys[j], fy1 = ys[j + 1];
          const double fz0 = zs[k], fz1 = zs[k + 1];
          double cx = 0.5 * (fx0 + fx1), cy = 0.5 * (fy0 + fy1),
                 cz = 0.5 * (fz0 + fz1);
          switch (f) {
            case 0:
              cx = fx0;
              facet.area = (fy1 - fy0) * (fz1 - fz0);
              break;
            case 1:
              cx = fx1;
              facet.area = (fy1 - fy0) * (fz1 - fz0);
              break;
            case 2:
              cy = fy0;
              facet.area = (fx1 - fx0) * (fz1 - fz0);
              break;
            case 3:
              cy = fy1;
              facet.area = (fx1 - fx0) * (fz1 - fz0);
              break;
            case 4:
              cz = fz0;
              facet.area = (fx1 - fx0) * (fy1 - fy0);
              break;
            case 5:
              cz = fz1;
              facet.area = (fx1 - fx0) * (fy1 - fy0);
              break;
          }
          facet.center = {cx, cy, cz};

          // Face lattice nodes, lexicographic in the face plane.
          for (int db = 0; db <= order; ++db)
            for (int da = 0; da <= order; ++da) {
              int li, lj, lk2;
              if (face_axis[f] == 0) {
                li = order * i + (face_side[f] ? order : 0);
                lj = order * j + da;
                lk2 = order * k + db;
              } else if (face_axis[f] == 1) {
                li = order * i + da;
                lj = order * j + (face_side[f] ? order : 0);
                lk2 = order * k + db;
              } else {
                li = order * i + da;
                lj = order * j + db;
                lk2 = order * k + (face_side[f] ? order : 0);
              }
              facet.nodes.push_back((int)node_of[lattice_index(li, lj, lk2)]);
            }

          // Tagging
          facet.tag = FacetTag::convection;
          if (f == 4 && std::abs(fz0 - z_bottom) < kGeomTol &&
              in_any(d.anchor_plan, cx, cy)) {
            facet.tag = FacetTag::fixed_base;
          } else if (face_axis[f] == 1 && [&] {
                       for (const auto& r : d.anchor_plan)
                         if (std::abs(r.y1 - r.y0) < kGeomTol &&
                             std::abs(cy - r.y0) < kGeomTol && cx >= r.x0 &&
                             cx <= r.x1)
                           return true;
                       return false;
                     }()) {
            facet.tag = FacetTag::fixed_base;
          } else if (cell_conductor[ci] &&
                     [&] {
                       for (std::size_t p = 0; p < d.pads.size(); ++p)
                         if (d.pads[p].rect.contains(cx, cy)) {
                           facet.pad = (int)p;
                           return true;
                         }
                       return false;
                     }()) {
            facet.tag = FacetTag::terminal;
          } else if (f == 1 && d.tip_left.normal_sign == +1 &&
                     std::abs(fx1 - d.tip_left.x) < kGeomTol &&
                     cy >= d.tip_left.y0 && cy <= d.tip_left.y1) {
            facet.tag = FacetTag::tip_left;
          } else if (f == 0 && d.tip_right.normal_sign == -1 &&
                     std::abs(fx0 - d.tip_right.x) < kGeomTol &&
                     cy >= d.tip_right.y0 && cy <= d.tip_right.y1) {
            facet.tag = FacetTag::tip_right;
          }
          m.facets.push_back(std::move(facet));
        }
      }

  return m;
}

QualityReport mesh_quality(const Mesh& m) {
  QualityReport q;
  q.element_count = m.element_count();
  q.node_count = m.node_count();
  q.min_jacobian = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < m.element_count(); ++e) {
    const auto& b = m.element_box[e];
    // Axis-aligned affine map: det J constant over the element.
    const double detj =
        (b[1] - b[0]) * (b[3] - b[2]) * (b[5] - b[4]) / 8.0;
    q.min_jacobian = std::min(q.min_jacobian, detj);
  }
  if (m.element_count() == 0) q.min_jacobian = 0.0;
  for (const auto& f : m.facets) {
    std::string pad = f.pad >= 0 ? m.pads[f.pad].id : "";
    q.facet_area_by_tag[facet_tag_name(f.tag, pad)] += f.area;
  }
  return q;
}

}  // namespace mg
