#include "mg/grip.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace mg {

namespace {

struct TipNode {
  int node = -1;
  int side = +1;          // +1 left tip (closes toward +x), -1 right
  double tributary = 0.0; // um^2
  double allowed = 0.0;   // ux at which the node touches the cylinder
};

// Nodal tributary areas on the tip facets from row-sum lumping of the
// face mass matrix (1D integrals of the Lagrange basis).
std::vector<TipNode> collect_tip_nodes(const Mesh& m) {
  const int n1 = m.order + 1;
  const double w1[2] = {1.0, 1.0};
  const double w2[3] = {1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0};
  const double* w = m.order == 1 ? w1 : w2;

  std::map<int, std::pair<int, double>> acc;  // node -> (side, area)
  for (const auto& f : m.facets) {
    int side;
    if (f.tag == FacetTag::tip_left)
      side = +1;
    else if (f.tag == FacetTag::tip_right)
      side = -1;
    else
      continue;
    const double ja = f.area / 4.0;
    for (int b = 0; b < n1; ++b)
      for (int a = 0; a < n1; ++a) {
        auto& slot = acc[f.nodes[a + n1 * b]];
        slot.first = side;
        slot.second += w[a] * w[b] * ja;
      }
  }
  std::vector<TipNode> out;
  out.reserve(acc.size());
  for (const auto& [node, sa] : acc)
    out.push_back({node, sa.first, sa.second, 0.0});
  return out;
}

}  // namespace

GripResult estimate_grip_on_mesh(const Mesh& m, const GripperDesign& d,
                                 double applied_voltage,
                                 const Environment& env,
                                 double object_diameter,
                                 const MaterialDb& db) {
  if (!(object_diameter > 0) || object_diameter >= d.tip_gap_open)
    throw Error("object_diameter must lie in (0, tip_gap_open)");

  GripResult r;
  r.object_diameter = object_diameter;
  r.applied_voltage = applied_voltage;

  const Solution sol0 = run_coupled_on_mesh(m, d, applied_voltage, env, db);
  r.unconstrained_closure = d.tip_gap_open - sol0.tip_gap;
  r.contact = r.unconstrained_closure >= d.tip_gap_open - object_diameter;
  if (!r.contact) {
    r.solution = sol0;
    return r;
  }

  // Cylinder on the midline, centered between the tip faces.
  const double xc = 0.5 * d.footprint_width;
  const double yc = 0.5 * (d.tip_left.y0 + d.tip_left.y1);
  const double radius = 0.5 * object_diameter;

  std::vector<TipNode> tips = collect_tip_nodes(m);
  double mean_area = 0.0;
  for (auto& t : tips) mean_area += t.tributary;
  if (tips.empty()) throw Error("design has no tip facets for contact");
  mean_area /= (double)tips.size();

  // Keep only nodes the cylinder can reach (inside its y-shadow) and
  // compute the x-displacement at which each touches the surface.
  std::vector<TipNode> cand;
  for (const auto& t : tips) {
    const auto& X = m.nodes[t.node];
    const double dy = X[1] - yc;
    if (std::abs(dy) >= radius) continue;
    const double bulge = std::sqrt(radius * radius - dy * dy);
    const double surface = xc - t.side * bulge;
    TipNode c = t;
    c.allowed = surface - X[0];
    cand.push_back(c);
  }
  if (cand.empty()) throw Error("object does not overlap any tip node");

  // Reassemble-free penalty loop: base elastic system once, then add
  // the active springs to a copy at each iteration.
  const std::size_t ne = m.element_count();
  ElasticProblem p;
  p.youngs.resize(ne);
  p.poisson.resize(ne);
  p.tce.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& mat = db.get(m.region_of(e));
    p.youngs[e] = mat.youngs_modulus;
    p.poisson[e] = mat.poisson_ratio;
    p.tce[e] = mat.tce;
  }
  p.temperature = &sol0.temperature;
  p.reference_temperature = env.ambient_temperature;
  for (const auto& f : m.facets)
    if (f.tag == FacetTag::fixed_base)
      for (int n : f.nodes) p.fixed_nodes.push_back(n);
  std::sort(p.fixed_nodes.begin(), p.fixed_nodes.end());
  p.fixed_nodes.erase(
      std::unique(p.fixed_nodes.begin(), p.fixed_nodes.end()),
      p.fixed_nodes.end());
  if (p.fixed_nodes.empty())
    throw Error("no fixed_base facets: mechanical system has rigid motions");
  const SparseSystem base = assemble_elastic(m, p);

  auto solve_with = [&](const std::vector<char>& active, double k,
                        Eigen::VectorXd* u_full) {
    SparseSystem s = base;
    for (std::size_t c = 0; c < cand.size(); ++c) {
      if (!active[c]) continue;
      const int fi = s.dofs.dof(cand[c].node, 0);
      if (fi < 0) continue;
      s.A.coeffRef(fi, fi) += k;
      s.b[fi] += k * cand[c].allowed;
    }
    // repeated solves with a shifting diagonal: the factorization is
    // cheap to redo and immune to the penalty-induced conditioning
    SolveOptions opts;
    opts.direct_threshold = 0;
    *u_full = s.expand(solve_spd(s, opts));
  };

  auto penetration = [&](const Eigen::VectorXd& u, std::size_t c) {
    const double ux = u[3 * (Eigen::Index)cand[c].node];
    return (double)cand[c].side * (ux - cand[c].allowed);
  };

  // Start the penalty at roughly the axial stiffness of one element
  // of polymer under a tributary patch; continuation raises it until
  // the contact force is stiffness-independent.
  const double e_poly = db.get(d.polymer_material()).youngs_modulus;
  double k = e_poly * mean_area / std::max(d.arm_stack_thickness(), 1.0);

  Eigen::VectorXd u;
  std::vector<char> active(cand.size(), 0);
  {
    // seed the active set from the unconstrained solution
    Eigen::VectorXd u0((Eigen::Index)sol0.displacement.size());
    for (Eigen::Index i = 0; i < u0.size(); ++i)
      u0[i] = sol0.displacement[(std::size_t)i];
    for (std::size_t c = 0; c < cand.size(); ++c)
      active[c] = penetration(u0, c) > 0 ? 1 : 0;
  }

  const int max_levels = 14;
  double prev_force = -1.0;
  std::vector<double> history;
  bool converged = false;
  for (int level = 0; level < max_levels; ++level, k *= 10.0) {
    for (int it = 0;; ++it) {
      if (it > 40)
        throw Error("penalty contact: active set did not settle");
      solve_with(active, k, &u);
      std::vector<char> next(cand.size());
      for (std::size_t c = 0; c < cand.size(); ++c)
        next[c] = penetration(u, c) > 0 ? 1 : 0;
      if (next == active) break;
      active = next;
    }
    double force = 0.0;
    for (std::size_t c = 0; c < cand.size(); ++c)
      if (active[c]) force += k * std::max(penetration(u, c), 0.0);
    history.push_back(force);
    r.penalty_levels = level + 1;
    r.penalty_stiffness = k;
    if (force == 0.0 && std::none_of(active.begin(), active.end(),
                                     [](char a) { return a != 0; })) {
      // contact by the gap criterion but no nodal overclosure: the
      // grip is marginal and the force is genuinely zero
      converged = true;
      break;
    }
    if (prev_force >= 0.0 &&
        std::abs(force - prev_force) <= 0.005 * std::max(force, 1e-12)) {
      converged = true;
      break;
    }
    prev_force = force;
  }
  if (!converged) {
    std::ostringstream os;
    os << "penalty contact did not converge; force history:";
    for (double f : history) os << ' ' << f;
    throw Error(os.str());
  }

  std::map<int, std::size_t> cand_of;  // node -> candidate index
  for (std::size_t c = 0; c < cand.size(); ++c) cand_of[cand[c].node] = c;
  double force[2] = {0, 0};
  for (std::size_t c = 0; c < cand.size(); ++c) {
    if (!active[c]) continue;
    force[cand[c].side > 0 ? 0 : 1] +=
        k * std::max(penetration(u, c), 0.0);
  }
  r.force_left = force[0];
  r.force_right = force[1];
  r.total_normal_force = force[0] + force[1];

  // Pressure over the engaged tip facets: each active node's force is
  // split back onto its facets by tributary share, a facet counts as
  // engaged when it carries any contact force.
  const int n1 = m.order + 1;
  const double w1[2] = {1.0, 1.0};
  const double w2[3] = {1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0};
  const double* w = m.order == 1 ? w1 : w2;
  for (const auto& f : m.facets) {
    if (f.tag != FacetTag::tip_left && f.tag != FacetTag::tip_right)
      continue;
    double facet_force = 0.0;
    for (int b = 0; b < n1; ++b)
      for (int a = 0; a < n1; ++a) {
        const auto it = cand_of.find(f.nodes[a + n1 * b]);
        if (it == cand_of.end() || !active[it->second]) continue;
        const TipNode& c = cand[it->second];
        const double share = w[a] * w[b] * (f.area / 4.0) / c.tributary;
        facet_force +=
            share * k *
            std::max(penetration(u, it->second), 0.0);
      }
    if (facet_force <= 0.0) continue;
    r.contact_area += f.area;
    r.max_contact_pressure =
        std::max(r.max_contact_pressure, facet_force / f.area);
  }
  r.mean_contact_pressure =
      r.contact_area > 0 ? r.total_normal_force / r.contact_area : 0.0;

  // Final consistent field set with the converged springs in place.
  std::vector<PointSpring> springs;
  for (std::size_t c = 0; c < cand.size(); ++c)
    if (active[c]) springs.push_back({cand[c].node, 0, k, cand[c].allowed});
  r.solution =
      run_coupled_on_mesh(m, d, applied_voltage, env, db, springs);
  return r;
}

GripResult estimate_grip(const GripperDesign& d, double applied_voltage,
                         const Environment& env, double object_diameter,
                         const MeshSettings& settings, const MaterialDb& db) {
  const Mesh m = generate_mesh(d, settings.resolution, settings.order);
  return estimate_grip_on_mesh(m, d, applied_voltage, env, object_diameter,
                               db);
}

}  // namespace mg
