// gripsim: batch front door for the microgripper toolkit. One JSON
// config describes design, materials, mesh, environment and study; each
// subcommand runs one study and writes its artifacts plus the echoed
// resolved config into the output directory.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mg/config.hpp"
#include "mg/exporters.hpp"
#include "mg/grip.hpp"
#include "mg/oracles.hpp"
#include "mg/studies.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mg;

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  int threads = 0;     // 0 = keep config value
  long long seed = -1; // -1 = keep config value
  bool quiet = false;
};

// Load the config, force the study type to the subcommand and apply the
// command-line overrides by patching the resolved echo and re-parsing,
// so the echoed file always matches what actually ran.
StudyConfig resolve(const CliArgs& args, const std::string& subcommand) {
  std::string text = "{}";
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path, std::ios::binary);
    if (!in)
      throw ConfigError("config error: cannot open '" + args.config_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  StudyConfig cfg = parse_config(text);
  json j = json::parse(cfg.resolved_text);
  j["study"]["type"] = subcommand;
  if (!args.out_dir.empty()) j["output"]["directory"] = args.out_dir;
  if (args.threads > 0) j["threads"] = args.threads;
  if (args.seed >= 0) j["seed"] = (unsigned)args.seed;
  return parse_config(j.dump());
}

fs::path prepare_output(const StudyConfig& cfg) {
  fs::path dir(cfg.output_directory);
  fs::create_directories(dir);
  std::ofstream out(dir / "resolved_config.json", std::ios::binary);
  out << cfg.resolved_text;
  if (!out) throw Error("cannot write resolved config in '" + dir.string() + "'");
  return dir;
}

StudyContext context_of(const StudyConfig& cfg) {
  StudyContext ctx;
  ctx.mesh = cfg.mesh;
  ctx.db = cfg.materials;
  ctx.threads = cfg.threads;
  ctx.object_diameter = cfg.object_diameter;
  return ctx;
}

SweepRecord to_record(const std::string& id, const Solution& s) {
  SweepRecord r;
  r.design_id = id;
  r.applied_voltage = s.applied_voltage;
  r.convection_coefficient = s.environment.convection_coefficient;
  r.tip_gap = s.tip_gap;
  r.max_temperature = s.max_temperature;
  r.tip_temperature = s.tip_temperature;
  r.out_of_plane_max = s.out_of_plane_max;
  r.joule_power_total = s.joule_power_total;
  return r;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << "\n";
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

void say(const CliArgs& args, const std::string& line) {
  if (!args.quiet) std::cout << line << "\n";
}

int run_simulate(const CliArgs& args) {
  const auto cfg = resolve(args, "simulate");
  const auto dir = prepare_output(cfg);
  const auto sol = run_coupled(cfg.design, cfg.voltage, cfg.env, cfg.mesh,
                               cfg.materials);
  if (cfg.write_csv)
    export_csv({to_record(cfg.design.id, sol)}, (dir / "simulate.csv").string());
  if (cfg.write_vtk) {
    const Mesh m = generate_mesh(cfg.design, cfg.mesh.resolution, cfg.mesh.order);
    export_vtk(m, sol, (dir / "solution.vtk").string());
  }
  std::ostringstream os;
  os << cfg.design.id << " at " << cfg.voltage << " V: tip gap " << sol.tip_gap
     << " um, max T " << sol.max_temperature << " K ("
     << sol.max_temperature_location << "), tip T " << sol.tip_temperature
     << " K, out-of-plane " << sol.out_of_plane_max << " um, power "
     << sol.joule_power_total << " pW";
  say(args, os.str());
  return 0;
}

int run_sweep(const CliArgs& args) {
  const auto cfg = resolve(args, "sweep");
  const auto dir = prepare_output(cfg);
  const auto recs =
      voltage_sweep(cfg.design, cfg.voltages, cfg.env, context_of(cfg));
  if (cfg.write_csv) export_csv(recs, (dir / "sweep.csv").string());
  say(args, "wrote " + std::to_string(recs.size()) + " sweep records to " +
                (dir / "sweep.csv").string());
  return 0;
}

int run_env_sweep(const CliArgs& args) {
  const auto cfg = resolve(args, "env-sweep");
  const auto dir = prepare_output(cfg);
  const auto recs =
      environment_sweep(cfg.design, cfg.voltages, cfg.h_values,
                        cfg.env.ambient_temperature, context_of(cfg));
  if (cfg.write_csv) export_csv(recs, (dir / "env_sweep.csv").string());
  say(args, "wrote " + std::to_string(recs.size()) + " records to " +
                (dir / "env_sweep.csv").string());
  return 0;
}

int run_grip(const CliArgs& args) {
  const auto cfg = resolve(args, "grip");
  const auto dir = prepare_output(cfg);
  const auto g = estimate_grip(cfg.design, cfg.voltage, cfg.env,
                               *cfg.object_diameter, cfg.mesh, cfg.materials);
  SweepRecord rec = to_record(cfg.design.id, g.solution);
  rec.grip_force = g.total_normal_force;
  rec.grip_pressure = g.max_contact_pressure;
  if (cfg.write_csv) export_csv({rec}, (dir / "grip.csv").string());
  if (cfg.write_vtk) {
    const Mesh m = generate_mesh(cfg.design, cfg.mesh.resolution, cfg.mesh.order);
    export_vtk(m, g.solution, (dir / "grip.vtk").string());
  }
  json j;
  j["object_diameter_um"] = g.object_diameter;
  j["applied_voltage_V"] = g.applied_voltage;
  j["contact"] = g.contact;
  j["total_normal_force_uN"] = g.total_normal_force;
  j["force_left_uN"] = g.force_left;
  j["force_right_uN"] = g.force_right;
  j["mean_contact_pressure_MPa"] = g.mean_contact_pressure;
  j["max_contact_pressure_MPa"] = g.max_contact_pressure;
  j["contact_area_um2"] = g.contact_area;
  j["unconstrained_closure_um"] = g.unconstrained_closure;
  j["penalty_stiffness_uN_per_um"] = g.penalty_stiffness;
  j["penalty_levels"] = g.penalty_levels;
  write_json(j, dir / "grip.json");
  std::ostringstream os;
  if (g.contact)
    os << "grip of " << g.object_diameter << " um object at " << g.applied_voltage
       << " V: force " << g.total_normal_force << " uN, max pressure "
       << g.max_contact_pressure << " MPa";
  else
    os << "no contact: closure " << g.unconstrained_closure
       << " um does not reach the " << g.object_diameter << " um object";
  say(args, os.str());
  return 0;
}

int run_compare(const CliArgs& args) {
  const auto cfg = resolve(args, "compare");
  const auto dir = prepare_output(cfg);
  const auto r = compare_models(cfg.voltages, cfg.env, context_of(cfg));
  std::vector<SweepRecord> all = r.model1;
  all.insert(all.end(), r.model2.begin(), r.model2.end());
  if (cfg.write_csv) export_csv(all, (dir / "compare.csv").string());
  json j;
  j["model2_closes_slower"] = r.model2_closes_slower;
  j["model2_out_of_plane_smaller"] = r.model2_out_of_plane_smaller;
  write_json(j, dir / "compare.json");
  say(args, std::string("model2 closes slower: ") +
                (r.model2_closes_slower ? "true" : "false"));
  say(args, std::string("model2 out-of-plane smaller: ") +
                (r.model2_out_of_plane_smaller ? "true" : "false"));
  return 0;
}

int run_optimize(const CliArgs& args) {
  const auto cfg = resolve(args, "optimize");
  const auto dir = prepare_output(cfg);
  DesignSpace space;
  for (const auto& label : cfg.candidates)
    space.candidates.push_back(label == "model1" ? build_model1()
                                                 : build_model2());
  space.polymer_split_fraction = cfg.polymer_split_fraction;
  space.metal_thickness = cfg.metal_thickness;
  space.metal_offset = cfg.metal_offset;
  space.operating_voltage = cfg.operating_voltage;
  space.v_max = cfg.v_max;
  space.required_closure = cfg.required_closure;
  space.env = cfg.env;
  const auto r =
      optimize_design(space, cfg.method, cfg.budget, context_of(cfg), cfg.seed);
  auto point_json = [](const EvalPoint& p) {
    json j;
    j["design_id"] = p.design.id;
    j["metal_offset_um"] = p.design.metal_offset;
    j["objective_out_of_plane_um"] = p.objective;
    j["closure_at_vmax_um"] = p.closure_at_vmax;
    j["feasible"] = p.feasible;
    return j;
  };
  json j;
  j["method"] = cfg.method;
  j["budget"] = cfg.budget;
  j["feasible_found"] = r.feasible_found;
  j["best"] = point_json(r.best);
  j["trace"] = json::array();
  for (const auto& p : r.trace) j["trace"].push_back(point_json(p));
  write_json(j, dir / "optimize.json");
  std::ostringstream os;
  os << (r.feasible_found ? "best design " : "no feasible design; closest is ")
     << r.best.design.id << " with out-of-plane " << r.best.objective
     << " um (closure at v_max " << r.best.closure_at_vmax << " um)";
  say(args, os.str());
  return 0;
}

int run_mesh_info(const CliArgs& args) {
  const auto cfg = resolve(args, "mesh-info");
  const auto dir = prepare_output(cfg);
  const Mesh m = generate_mesh(cfg.design, cfg.mesh.resolution, cfg.mesh.order);
  const auto q = mesh_quality(m);
  json j;
  j["design_id"] = cfg.design.id;
  j["resolution_um"] = cfg.mesh.resolution;
  j["order"] = cfg.mesh.order;
  j["element_count"] = q.element_count;
  j["node_count"] = q.node_count;
  j["min_jacobian"] = q.min_jacobian;
  json areas;
  for (const auto& [tag, area] : q.facet_area_by_tag) areas[tag] = area;
  j["facet_area_by_tag_um2"] = areas;
  write_json(j, dir / "mesh_info.json");
  if (cfg.write_vtk) {
    Solution zero;
    zero.voltage.assign(m.node_count(), 0.0);
    zero.temperature.assign(m.node_count(), cfg.env.ambient_temperature);
    zero.displacement.assign(3 * m.node_count(), 0.0);
    zero.joule_density.assign(m.element_count(), 0.0);
    export_vtk(m, zero, (dir / "mesh.vtk").string());
  }
  say(args, cfg.design.id + ": " + std::to_string(q.element_count) +
                " elements, " + std::to_string(q.node_count) + " nodes");
  return 0;
}

int run_dump_design(const CliArgs& args) {
  const auto cfg = resolve(args, "dump-design");
  const auto dir = prepare_output(cfg);
  const auto& d = cfg.design;
  json j;
  j["id"] = d.id;
  j["footprint_width_um"] = d.footprint_width;
  j["footprint_length_um"] = d.footprint_length;
  j["free_arm_length_um"] = d.free_arm_length;
  j["tip_gap_open_um"] = d.tip_gap_open;
  j["anchor_length_um"] = d.anchor_length;
  j["trace_width_um"] = d.trace_width;
  auto rects_json = [](const std::vector<PlanRect>& rects) {
    json a = json::array();
    for (const auto& r : rects)
      a.push_back({{"name", r.name},
                   {"x0", r.x0},
                   {"y0", r.y0},
                   {"x1", r.x1},
                   {"y1", r.y1}});
    return a;
  };
  j["structural_plan"] = rects_json(d.structural_plan);
  j["anchor_plan"] = rects_json(d.anchor_plan);
  j["heater_plan"] = rects_json(d.heater_plan);
  json pads = json::array();
  for (const auto& p : d.pads)
    pads.push_back({{"id", p.id},
                    {"arm", p.arm},
                    {"polarity", p.polarity},
                    {"x0", p.rect.x0},
                    {"x1", p.rect.x1},
                    {"y", p.rect.y0}});
  j["pads"] = pads;
  json stack = json::array();
  for (const auto& l : d.stack) {
    const char* role = l.role == LayerRole::substrate_oxide ? "substrate_oxide"
                       : l.role == LayerRole::conductor     ? "conductor"
                                                            : "structural_polymer";
    stack.push_back(
        {{"material", l.material}, {"thickness_um", l.thickness}, {"role", role}});
  }
  j["stack"] = stack;
  write_json(j, dir / "design.json");
  say(args, "wrote " + (dir / "design.json").string());
  return 0;
}

// One row of the verification table.
struct Check {
  std::string name;
  double value, reference, tolerance;  // tolerance on |value - reference|
  bool pass;
};

Check make_check(const std::string& name, double value, double reference,
                 double tol_abs) {
  return {name, value, reference, tol_abs,
          std::abs(value - reference) <= tol_abs};
}

GripperDesign cantilever_design(double width, double length,
                                std::vector<LayerSpec> layers) {
  GripperDesign d;
  d.id = "cantilever";
  d.footprint_width = width;
  d.footprint_length = length;
  d.free_arm_length = length;
  d.tip_gap_open = 1.0;
  d.anchor_length = 0.0;
  d.structural_plan = {{"body", 0, 0, width, length}};
  d.anchor_plan = {{"clamp", 0, 0, width, 0}};  // end clamp at y = 0
  d.stack = std::move(layers);
  return d;
}

GripperDesign bar_design(double length, double width, double thickness) {
  GripperDesign d;
  d.id = "bar";
  d.footprint_width = length;  // bar runs along x
  d.footprint_length = width;
  d.free_arm_length = width / 2;
  d.tip_gap_open = 1.0;
  d.anchor_length = 0.0;
  d.structural_plan = {{"body", 0, 0, length, width}};
  d.heater_plan = {{"bar", 0, 0, length, width}};
  d.stack = {{"Gold", thickness, LayerRole::conductor}};
  d.pads = {{"A", 0, +1, {"padA", 0, 0, 0, width}},
            {"B", 0, -1, {"padB", length, 0, length, width}}};
  return d;
}

int run_verify(const CliArgs& args) {
  const auto cfg = resolve(args, "verify");
  const auto dir = prepare_output(cfg);
  std::vector<Check> checks;
  const MaterialDb db;  // bulk constants; the oracles use them directly

  {  // bar current against R = L/(sigma A)
    const auto d = bar_design(100, 3, 1);
    const Mesh m = generate_mesh(d, 10.0, 2);
    const auto r = solve_electric(m, db, 0.1);
    const double sigma = *db.get("Gold").electrical_conductivity;
    const double expect = 0.1 / rod_resistance(100, 3, sigma) * 1e12;
    checks.push_back(
        make_check("bar current vs resistance formula [pA]", r.total_current,
                   expect, 1e-8 * expect));
  }
  {  // slender rod with uniform heating against the 1D fin solution
    // 5x5 um footprint extruded 200 um up; the fin axis is z.
    GripperDesign d = cantilever_design(
        5, 5, {{"Gold", 200, LayerRole::structural_polymer}});
    d.anchor_plan = {{"anchor", 0, 0, 5, 5}};  // base clamped to ambient
    const Mesh m = generate_mesh(d, 10.0, 2);
    Environment env;
    const double q = 1e4;
    const auto t = solve_thermal(
        m, db, std::vector<double>(m.element_count(), q), env);
    double fem_max = 0;
    for (double T : t.temperature) fem_max = std::max(fem_max, T);
    FinParams fin;
    fin.length = 200;
    fin.cross_section_area = 25;
    fin.perimeter = 20;
    fin.conductivity = db.get("Gold").thermal_conductivity;
    fin.convection = env.convection_coefficient;
    fin.ambient = env.ambient_temperature;
    fin.heat_density = q;
    const double oracle = fin_max_temperature(fin);
    checks.push_back(make_check("rod max temperature vs 1D fin [K]", fem_max,
                                oracle, 0.01 * (oracle - fin.ambient)));
  }
  {  // bi-material cantilever against the bimetallic-strip formula
    const auto gold = db.get("Gold");
    const auto su8 = db.get("SU-8");
    // Narrow strip so the beam formula applies; residual deviation is
    // the genuine Poisson (plate) effect.
    const auto d = cantilever_design(
        5, 400, {{"Gold", 0.3, LayerRole::structural_polymer},
                 {"SU-8", 20, LayerRole::structural_polymer}});
    const Mesh m = generate_mesh(d, 5.0, 2);
    const double dT = 100;
    const std::vector<double> T(m.node_count(), 300.15 + dT);
    const auto u = solve_mechanical(m, db, T, 300.15);
    double tip_uz = 0, count = 0;
    for (std::size_t n = 0; n < m.node_count(); ++n)
      if (std::abs(m.nodes[n][1] - 400.0) < 1e-9) {
        tip_uz += u[3 * n + 2];
        count += 1;
      }
    tip_uz /= count;
    BimorphParams p;
    p.bottom = {gold.youngs_modulus, gold.tce, 0.3};
    p.top = {su8.youngs_modulus, su8.tce, 20.0};
    p.width = 5;
    p.length = 400;
    p.delta_T = dT;
    const auto oracle = bimorph_tip_deflection(p);
    checks.push_back(make_check("cantilever tip vs bimorph formula [um]",
                                tip_uz, oracle.tip_deflection,
                                0.05 * std::abs(oracle.tip_deflection)));
  }
  {  // conservation and V^2 scaling on the coupled gripper
    const auto d = build_model1();
    const auto sol = run_coupled(d, 0.25, Environment{}, {25.0, 1}, cfg.materials);
    const double out = sol.convective_loss + sol.base_conduction;
    checks.push_back(make_check("energy balance, relative residual",
                                std::abs(sol.joule_power_total - out) /
                                    sol.joule_power_total,
                                0.0, 1e-6));
    double net = 0;
    for (const auto& [pad, cur] : sol.terminal_current) net += cur;
    checks.push_back(make_check("terminal current balance, relative",
                                std::abs(net) / sol.total_current, 0.0, 1e-10));
    const auto a = run_coupled(d, 0.1, Environment{}, {25.0, 1}, cfg.materials);
    const auto b = run_coupled(d, 0.2, Environment{}, {25.0, 1}, cfg.materials);
    const double gap_a = d.tip_gap_open - a.tip_gap;
    const double gap_b = d.tip_gap_open - b.tip_gap;
    checks.push_back(make_check("closure ratio at 2x voltage",
                                gap_b / gap_a, 4.0, 4e-6));
  }

  std::ostringstream table;
  table << "check                                      value          reference"
           "      tolerance  status\n";
  bool all_pass = true;
  for (const auto& c : checks) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-42s %#14.8g %#14.8g %#10.3g  %s\n",
                  c.name.c_str(), c.value, c.reference, c.tolerance,
                  c.pass ? "pass" : "FAIL");
    table << line;
    all_pass = all_pass && c.pass;
  }
  std::ofstream out(dir / "verify.txt", std::ios::binary);
  out << table.str();
  if (!args.quiet) std::cout << table.str();
  say(args, all_pass ? "all checks passed" : "verification FAILED");
  return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"electro-thermo-mechanical microgripper simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  CliArgs args;
  app.add_option("--config", args.config_path, "path to the JSON study config");
  app.add_option("--out", args.out_dir, "output directory (overrides config)");
  app.add_option("--threads", args.threads, "worker threads (overrides config)");
  app.add_option("--seed", args.seed,
                 "optimizer restart seed (overrides config)");
  app.add_flag("--quiet", args.quiet, "suppress progress output");

  int (*handler)(const CliArgs&) = nullptr;
  auto sub = [&](const char* name, const char* desc, int (*fn)(const CliArgs&)) {
    app.add_subcommand(name, desc)->callback([&handler, fn] { handler = fn; });
  };
  sub("simulate", "one coupled run at a single voltage", run_simulate);
  sub("sweep", "voltage sweep of one design", run_sweep);
  sub("env-sweep", "voltage x convection-coefficient sweep", run_env_sweep);
  sub("grip", "contact force on a cylindrical object", run_grip);
  sub("optimize", "layer-stack design optimization", run_optimize);
  sub("compare", "model 1 vs model 2 verdicts", run_compare);
  sub("verify", "run the analytic-oracle checks", run_verify);
  sub("mesh-info", "mesh statistics without solving", run_mesh_info);
  sub("dump-design", "resolved design geometry as JSON", run_dump_design);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    return handler(args);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
