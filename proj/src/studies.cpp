#include "mg/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>

namespace mg {

namespace {

constexpr double kVoltageLimit = 2.0;

// Bounded worker pool; job i writes slot i, so result ordering is by
// input index regardless of completion order.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const int workers =
      std::max(1, std::min<int>(threads, (int)n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  for (auto& t : pool) t.join();
}

SweepRecord record_from(const Solution& s, const std::string& id) {
  SweepRecord r;
  r.design_id = id;
  r.applied_voltage = s.applied_voltage;
  r.convection_coefficient = s.environment.convection_coefficient;
  r.tip_gap = s.tip_gap;
  r.max_temperature = s.max_temperature;
  r.tip_temperature = s.tip_temperature;
  r.out_of_plane_max = s.out_of_plane_max;
  r.joule_power_total = s.joule_power_total;
  const double fields[] = {r.tip_gap, r.max_temperature, r.tip_temperature,
                           r.out_of_plane_max, r.joule_power_total};
  for (double v : fields)
    if (!std::isfinite(v)) throw Error("non-finite field in sweep record");
  return r;
}

void check_voltages(const std::vector<double>& voltages) {
  if (voltages.empty()) throw Error("empty voltage list");
  for (std::size_t i = 0; i < voltages.size(); ++i) {
    if (voltages[i] < 0 || voltages[i] > kVoltageLimit)
      throw Error("voltage outside [0, 2] V");
    if (i > 0 && voltages[i] < voltages[i - 1])
      throw Error("voltages must be sorted ascending");
  }
}

SweepRecord run_point(const Mesh& m, const GripperDesign& d, double v,
                      const Environment& env, const StudyContext& ctx) {
  if (ctx.object_diameter) {
    const GripResult g =
        estimate_grip_on_mesh(m, d, v, env, *ctx.object_diameter, ctx.db);
    SweepRecord r = record_from(g.solution, d.id);
    r.grip_force = g.total_normal_force;
    r.grip_pressure = g.max_contact_pressure;
    return r;
  }
  return record_from(run_coupled_on_mesh(m, d, v, env, ctx.db), d.id);
}

// Runs all (voltage, env) jobs against one shared mesh, aborting with
// the first failing input identified.
std::vector<SweepRecord> run_jobs(
    const GripperDesign& d, const Mesh& m,
    const std::vector<std::pair<double, Environment>>& jobs,
    const StudyContext& ctx) {
  std::vector<SweepRecord> out(jobs.size());
  std::vector<std::string> errors(jobs.size());
  parallel_for(jobs.size(), ctx.threads, [&](std::size_t i) {
    try {
      out[i] = run_point(m, d, jobs[i].first, jobs[i].second, ctx);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "sweep point V=" << jobs[i].first
         << " h=" << jobs[i].second.convection_coefficient
         << " failed: " << e.what();
      errors[i] = os.str();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);
  return out;
}

}  // namespace

std::vector<SweepRecord> voltage_sweep(const GripperDesign& d,
                                       const std::vector<double>& voltages,
                                       const Environment& env,
                                       const StudyContext& ctx) {
  check_voltages(voltages);
  const Mesh m = generate_mesh(d, ctx.mesh.resolution, ctx.mesh.order);
  std::vector<std::pair<double, Environment>> jobs;
  jobs.reserve(voltages.size());
  for (double v : voltages) jobs.emplace_back(v, env);
  return run_jobs(d, m, jobs, ctx);
}

std::vector<SweepRecord> environment_sweep(
    const GripperDesign& d, const std::vector<double>& voltages,
    const std::vector<double>& h_values, double ambient_temperature,
    const StudyContext& ctx) {
  check_voltages(voltages);
  if (h_values.empty()) throw Error("empty convection coefficient list");
  for (double h : h_values)
    if (h < 20.0)
      throw Error("convection coefficients must be >= 20 (air)");
  const Mesh m = generate_mesh(d, ctx.mesh.resolution, ctx.mesh.order);
  std::vector<std::pair<double, Environment>> jobs;
  jobs.reserve(voltages.size() * h_values.size());
  for (double h : h_values)
    for (double v : voltages)
      jobs.emplace_back(v, Environment{ambient_temperature, h});
  return run_jobs(d, m, jobs, ctx);
}

CompareResult compare_models(const std::vector<double>& voltages,
                             const Environment& env,
                             const StudyContext& ctx) {
  CompareResult r;
  r.model1 = voltage_sweep(build_model1(), voltages, env, ctx);
  r.model2 = voltage_sweep(build_model2(), voltages, env, ctx);
  r.model2_closes_slower = true;
  r.model2_out_of_plane_smaller = true;
  for (std::size_t i = 0; i < voltages.size(); ++i) {
    if (r.model2[i].tip_gap < r.model1[i].tip_gap - 1e-9)
      r.model2_closes_slower = false;
    if (r.model2[i].out_of_plane_max > r.model1[i].out_of_plane_max + 1e-9)
      r.model2_out_of_plane_smaller = false;
  }
  return r;
}

// ---- optimization ------------------------------------------------------

namespace {

struct VarBox {
  std::vector<std::pair<double, double>> bounds;
  bool has_split = false, has_thickness = false, has_offset = false;
};

VarBox variable_box(const DesignSpace& s) {
  VarBox box;
  if (s.polymer_split_fraction && s.metal_offset)
    throw Error(
        "polymer_split_fraction and metal_offset both describe the metal "
        "position; use one");
  if (s.polymer_split_fraction) {
    box.has_split = true;
    box.bounds.push_back(*s.polymer_split_fraction);
  }
  if (s.metal_thickness) {
    box.has_thickness = true;
    box.bounds.push_back(*s.metal_thickness);
  }
  if (s.metal_offset) {
    box.has_offset = true;
    box.bounds.push_back(*s.metal_offset);
  }
  for (const auto& [lo, hi] : box.bounds)
    if (!(lo < hi)) throw Error("empty variable range in design space");
  return box;
}

GripperDesign design_at(const VarBox& box, const std::vector<double>& x) {
  DesignOverrides o;
  std::size_t i = 0;
  char label[96];
  std::string id = "opt";
  if (box.has_split) {
    o.polymer_split_fraction = x[i];
    std::snprintf(label, sizeof label, "_split%.4f", x[i]);
    id += label;
    ++i;
  }
  if (box.has_thickness) {
    o.metal_thickness = x[i];
    std::snprintf(label, sizeof label, "_tm%.4f", x[i]);
    id += label;
    ++i;
  }
  if (box.has_offset) {
    o.metal_offset = x[i];
    std::snprintf(label, sizeof label, "_off%.4f", x[i]);
    id += label;
    ++i;
  }
  GripperDesign d =
      box.has_offset ? build_offset_design(o) : build_model2(o);
  d.id = id;
  return d;
}

EvalPoint evaluate(const GripperDesign& d, const DesignSpace& s,
                   const StudyContext& ctx) {
  if (!(s.operating_voltage > 0) || s.v_max > kVoltageLimit ||
      s.v_max < s.operating_voltage)
    throw Error("design space voltages must satisfy 0 < V_op <= V_max <= 2");
  EvalPoint p;
  p.design = d;
  const Solution sol =
      run_coupled(d, s.operating_voltage, s.env, ctx.mesh, ctx.db);
  p.objective = sol.out_of_plane_max;
  // closure scales exactly with V^2, so the constraint at V_max needs
  // no extra solve
  const double closure = d.tip_gap_open - sol.tip_gap;
  const double ratio = s.v_max / s.operating_voltage;
  p.closure_at_vmax = closure * ratio * ratio;
  p.feasible = p.closure_at_vmax >= s.required_closure - 1e-9;
  return p;
}

OptimizeResult finish(std::vector<EvalPoint> trace) {
  OptimizeResult r;
  r.trace = std::move(trace);
  if (r.trace.empty()) throw Error("optimizer evaluated no points");
  const EvalPoint* best = nullptr;
  const EvalPoint* closest = nullptr;
  for (const auto& p : r.trace) {
    if (p.feasible && (!best || p.objective < best->objective)) best = &p;
    if (!closest || p.closure_at_vmax > closest->closure_at_vmax)
      closest = &p;
  }
  if (best) {
    r.feasible_found = true;
    r.best = *best;
  } else {
    r.best = *closest;  // infeasibility report: closest to feasible
  }
  return r;
}

std::vector<EvalPoint> evaluate_many(const std::vector<GripperDesign>& ds,
                                     const DesignSpace& s,
                                     const StudyContext& ctx) {
  std::vector<EvalPoint> out(ds.size());
  std::vector<std::string> errors(ds.size());
  parallel_for(ds.size(), ctx.threads, [&](std::size_t i) {
    try {
      out[i] = evaluate(ds[i], s, ctx);
    } catch (const std::exception& e) {
      errors[i] = "design '" + ds[i].id + "' failed: " + e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);
  return out;
}

OptimizeResult optimize_grid(const DesignSpace& s, const VarBox& box,
                             int budget, const StudyContext& ctx) {
  const int dims = (int)box.bounds.size();
  int per_dim = budget;
  if (dims == 2) per_dim = (int)std::floor(std::sqrt((double)budget));
  if (dims == 3) per_dim = (int)std::floor(std::cbrt((double)budget));
  per_dim = std::max(per_dim, 2);
  std::vector<GripperDesign> ds;
  std::vector<int> idx(dims, 0);
  for (;;) {
    std::vector<double> x(dims);
    for (int d = 0; d < dims; ++d) {
      const auto& [lo, hi] = box.bounds[d];
      x[d] = lo + (hi - lo) * idx[d] / (per_dim - 1);
    }
    ds.push_back(design_at(box, x));
    int d = 0;
    while (d < dims && ++idx[d] == per_dim) idx[d++] = 0;
    if (d == dims) break;
  }
  return finish(evaluate_many(ds, s, ctx));
}

OptimizeResult optimize_golden(const DesignSpace& s, const VarBox& box,
                               int budget, const StudyContext& ctx) {
  if (box.bounds.size() != 1)
    throw Error("golden-section needs exactly one variable");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = box.bounds[0].first, b = box.bounds[0].second;
  std::vector<EvalPoint> trace;
  auto eval1 = [&](double x) {
    trace.push_back(evaluate(design_at(box, {x}), s, ctx));
    return trace.back().objective;
  };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval1(c), fd = eval1(d);
  while ((int)trace.size() < budget) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval1(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval1(d);
    }
  }
  return finish(std::move(trace));
}

OptimizeResult optimize_nelder_mead(const DesignSpace& s, const VarBox& box,
                                    int budget, const StudyContext& ctx,
                                    unsigned seed) {
  const int dims = (int)box.bounds.size();
  std::vector<EvalPoint> trace;
  auto clamp = [&](std::vector<double> x) {
    for (int d = 0; d < dims; ++d)
      x[d] = std::clamp(x[d], box.bounds[d].first, box.bounds[d].second);
    return x;
  };
  // infeasible points pay their constraint violation on top of a large
  // offset so the simplex walks back into the feasible set
  auto eval_pen = [&](const std::vector<double>& x) {
    trace.push_back(evaluate(design_at(box, clamp(x)), s, ctx));
    const EvalPoint& p = trace.back();
    if (p.feasible) return p.objective;
    return 1e3 + (s.required_closure - p.closure_at_vmax);
  };

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  std::vector<std::vector<double>> simplex;
  std::vector<double> center(dims);
  for (int d = 0; d < dims; ++d)
    center[d] = 0.5 * (box.bounds[d].first + box.bounds[d].second);
  simplex.push_back(center);
  for (int v = 0; v < dims; ++v) {
    auto x = center;
    for (int d = 0; d < dims; ++d) {
      const double range = box.bounds[d].second - box.bounds[d].first;
      x[d] += (d == v ? 0.25 : 0.0) * range + jitter(rng) * range;
    }
    simplex.push_back(clamp(x));
  }
  std::vector<double> f;
  for (auto& v : simplex) f.push_back(eval_pen(v));

  while ((int)trace.size() < budget) {
    // sort vertices by value
    std::vector<int> ord(simplex.size());
    for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = (int)i;
    std::sort(ord.begin(), ord.end(),
              [&](int a, int b) { return f[a] < f[b]; });
    const int worst = ord.back(), best = ord.front();
    std::vector<double> centroid(dims, 0.0);
    for (int i : ord)
      if (i != worst)
        for (int d = 0; d < dims; ++d)
          centroid[d] += simplex[i][d] / (double)dims;
    auto blend = [&](double t) {
      std::vector<double> x(dims);
      for (int d = 0; d < dims; ++d)
        x[d] = centroid[d] + t * (centroid[d] - simplex[worst][d]);
      return x;
    };
    const auto xr = blend(1.0);
    const double fr = eval_pen(xr);
    if (fr < f[best]) {
      const auto xe = blend(2.0);
      double fe = fr + 1.0;
      if ((int)trace.size() < budget) fe = eval_pen(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        f[worst] = fe;
      } else {
        simplex[worst] = xr;
        f[worst] = fr;
      }
    } else if (fr < f[ord[ord.size() - 2]]) {
      simplex[worst] = xr;
      f[worst] = fr;
    } else {
      const auto xc = blend(-0.5);
      if ((int)trace.size() >= budget) break;
      const double fcv = eval_pen(xc);
      if (fcv < f[worst]) {
        simplex[worst] = xc;
        f[worst] = fcv;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 0; i < simplex.size(); ++i) {
          if ((int)i == best) continue;
          for (int d = 0; d < dims; ++d)
            simplex[i][d] =
                0.5 * (simplex[i][d] + simplex[best][d]);
          if ((int)trace.size() >= budget) break;
          f[i] = eval_pen(simplex[i]);
        }
      }
    }
  }
  return finish(std::move(trace));
}

}  // namespace

OptimizeResult optimize_design(const DesignSpace& space,
                               const std::string& method, int budget,
                               const StudyContext& ctx, unsigned seed) {
  if (budget < 3) throw Error("optimization budget must be >= 3");
  if (!space.candidates.empty()) {
    // explicit candidate set: evaluate them all, any method
    std::vector<GripperDesign> ds(
        space.candidates.begin(),
        space.candidates.begin() +
            std::min<std::size_t>(space.candidates.size(), (std::size_t)budget));
    return finish(evaluate_many(ds, space, ctx));
  }
  const VarBox box = variable_box(space);
  if (box.bounds.empty())
    throw Error("design space has no variables and no candidates");
  if (method == "grid") return optimize_grid(space, box, budget, ctx);
  if (method == "golden-section")
    return optimize_golden(space, box, budget, ctx);
  if (method == "nelder-mead")
    return optimize_nelder_mead(space, box, budget, ctx, seed);
  throw Error("unknown optimization method '" + method + "'");
}

}  // namespace mg
