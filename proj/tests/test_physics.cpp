#include <cmath>
#include <map>

#include "doctest.h"
#include "mg/oracles.hpp"
#include "mg/physics.hpp"
#include "test_util.hpp"

using namespace mg;

namespace {
const MeshSettings kCoarse{25.0, 1};
}

TEST_CASE("electric solve on a straight bar matches the resistance formula") {
  // L=100 um, 3x1 um cross section, sigma = 41 S/um, V = 0.1
  const auto d = make_bar_design(100, 3, 1);
  const Mesh m = generate_mesh(d, 10.0, 2);
  MaterialDb db;
  auto gold = db.get("Gold");
  gold.electrical_conductivity = 41.0;
  db.set(gold);

  const auto r = solve_electric(m, db, 0.1);
  const double R_ohm = rod_resistance(100, 3, 41);
  const double I_pA = 0.1 / R_ohm * 1e12;
  CHECK(r.total_current == doctest::Approx(I_pA).epsilon(1e-8));
  CHECK(r.total_power == doctest::Approx(0.1 * I_pA).epsilon(1e-8));
  // uniform joule density sigma*(V/L)^2
  const double q_expect = 41.0e12 * std::pow(0.1 / 100.0, 2);
  for (std::size_t e = 0; e < m.element_count(); ++e)
    CHECK(r.joule_density[e] == doctest::Approx(q_expect).epsilon(1e-8));
}

TEST_CASE("zero applied voltage gives a null electric solution") {
  const auto d = make_bar_design(100, 3, 1);
  const Mesh m = generate_mesh(d, 20.0, 1);
  const auto r = solve_electric(m, MaterialDb(), 0.0);
  CHECK(r.total_power == doctest::Approx(0.0));
  CHECK(r.total_current == doctest::Approx(0.0));
  for (double v : r.voltage) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("doubling the voltage doubles current and quadruples power") {
  const auto d = make_bar_design(100, 3, 1);
  const Mesh m = generate_mesh(d, 10.0, 2);
  const MaterialDb db;
  const auto a = solve_electric(m, db, 0.1);
  const auto b = solve_electric(m, db, 0.2);
  CHECK(b.total_current == doctest::Approx(2 * a.total_current).epsilon(1e-10));
  CHECK(b.total_power == doctest::Approx(4 * a.total_power).epsilon(1e-10));
}

TEST_CASE("negative applied voltage is rejected") {
  const auto d = make_bar_design(10, 1, 1);
  const Mesh m = generate_mesh(d, 5.0, 1);
  CHECK_THROWS_AS(solve_electric(m, MaterialDb(), -0.1), Error);
}

TEST_CASE("thermal solve with no source stays at ambient") {
  const auto d = make_box_design(
      10, 10, {{"SU-8", 5, LayerRole::structural_polymer}});
  const Mesh m = generate_mesh(d, 5.0, 2);
  Environment env;
  const auto t =
      solve_thermal(m, MaterialDb(), std::vector<double>(m.element_count(), 0.0), env);
  for (double T : t.temperature)
    CHECK(T == doctest::Approx(env.ambient_temperature).epsilon(1e-12));
}

TEST_CASE("slender rod with uniform heating matches the fin oracle") {
  // 5x5x200 gold rod clamped to ambient at the base, convecting
  // laterally; length/width = 40.
  const auto d = make_box_design(
      5, 5, {{"Gold", 200, LayerRole::structural_polymer}});
  const Mesh m = generate_mesh(d, 10.0, 2);
  Environment env;
  const double q = 1e4;
  const auto t = solve_thermal(
      m, MaterialDb(), std::vector<double>(m.element_count(), q), env);

  FinParams fin;
  fin.length = 200;
  fin.cross_section_area = 25;
  fin.perimeter = 20;
  fin.conductivity = 2970e5;
  fin.convection = env.convection_coefficient;
  fin.ambient = env.ambient_temperature;
  fin.heat_density = q;

  double fem_max = 0;
  for (double T : t.temperature) fem_max = std::max(fem_max, T);
  const double oracle_max = fin_max_temperature(fin);
  CHECK(std::abs(fem_max - oracle_max) /
            (oracle_max - env.ambient_temperature) <
        0.01);
}

TEST_CASE("steady-state energy balance on the rod") {
  const auto d = make_box_design(
      5, 5, {{"Gold", 200, LayerRole::structural_polymer}});
  const Mesh m = generate_mesh(d, 10.0, 2);
  Environment env;
  const double q = 1e4;
  const auto t = solve_thermal(
      m, MaterialDb(), std::vector<double>(m.element_count(), q), env);
  const double power_in = q * 5 * 5 * 200;
  const double power_out = t.convective_loss + t.base_conduction;
  CHECK(std::abs(power_in - power_out) / power_in < 1e-6);
}

TEST_CASE("mechanical solve at reference temperature is zero") {
  const auto d = make_box_design(
      10, 10, {{"SU-8", 5, LayerRole::structural_polymer}});
  const Mesh m = generate_mesh(d, 5.0, 1);
  const std::vector<double> T(m.node_count(), 300.15);
  const auto u = solve_mechanical(m, MaterialDb(), T, 300.15);
  for (double v : u) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("mechanical solve requires a fixed base") {
  auto d = make_box_design(10, 10,
                           {{"SU-8", 5, LayerRole::structural_polymer}},
                           /*anchored=*/false);
  const Mesh m = generate_mesh(d, 5.0, 1);
  const std::vector<double> T(m.node_count(), 400.0);
  CHECK_THROWS_AS(solve_mechanical(m, MaterialDb(), T, 300.15), Error);
}

TEST_CASE("coupled run at 0 V is the null actuation state") {
  const auto d = build_model1();
  const auto sol = run_coupled(d, 0.0, Environment{}, kCoarse);
  CHECK(sol.tip_gap == doctest::Approx(20.0));
  CHECK(sol.max_temperature == doctest::Approx(300.15));
  for (double v : sol.displacement) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("temperature rise and displacement scale with V^2") {
  const auto d = build_model1();
  const Mesh m = generate_mesh(d, kCoarse.resolution, kCoarse.order);
  const MaterialDb db;
  Environment env;
  const auto a = run_coupled_on_mesh(m, d, 0.1, env, db);
  const auto b = run_coupled_on_mesh(m, d, 0.2, env, db);
  double max_dT = 0;
  for (double T : a.temperature)
    max_dT = std::max(max_dT, T - env.ambient_temperature);
  for (std::size_t n = 0; n < a.temperature.size(); ++n) {
    const double ta = a.temperature[n] - env.ambient_temperature;
    const double tb = b.temperature[n] - env.ambient_temperature;
    CHECK(std::abs(tb - 4 * ta) <= 1e-6 * 4 * max_dT);
  }
  double max_u = 0;
  for (double v : a.displacement) max_u = std::max(max_u, std::abs(v));
  for (std::size_t i = 0; i < a.displacement.size(); ++i)
    CHECK(std::abs(b.displacement[i] - 4 * a.displacement[i]) <=
          1e-6 * 4 * max_u);
}

TEST_CASE("coupled run conserves energy and current") {
  const auto d = build_model1();
  const auto sol = run_coupled(d, 0.25, Environment{}, kCoarse);
  CHECK(sol.joule_power_total > 0);
  const double out = sol.convective_loss + sol.base_conduction;
  CHECK(std::abs(sol.joule_power_total - out) / sol.joule_power_total < 1e-6);
  double net = 0;
  for (const auto& [pad, cur] : sol.terminal_current) net += cur;
  CHECK(std::abs(net) / sol.total_current < 1e-10);
}

TEST_CASE("symmetric actuation gives mirror-antisymmetric lateral motion") {
  const auto d = build_model1();
  const Mesh m = generate_mesh(d, kCoarse.resolution, kCoarse.order);
  const auto sol = run_coupled_on_mesh(m, d, 0.2, Environment{}, MaterialDb());
  const double W = d.footprint_width;
  std::map<std::array<long long, 3>, std::size_t> lookup;
  auto key = [](const std::array<double, 3>& p) {
    return std::array<long long, 3>{(long long)std::llround(p[0] * 1e6),
                                    (long long)std::llround(p[1] * 1e6),
                                    (long long)std::llround(p[2] * 1e6)};
  };
  for (std::size_t n = 0; n < m.node_count(); ++n) lookup[key(m.nodes[n])] = n;
  double max_u = 0;
  for (double v : sol.displacement) max_u = std::max(max_u, std::abs(v));
  REQUIRE(max_u > 0);
  for (std::size_t n = 0; n < m.node_count(); ++n) {
    auto mirrored = m.nodes[n];
    mirrored[0] = W - mirrored[0];
    const auto it = lookup.find(key(mirrored));
    REQUIRE(it != lookup.end());
    const std::size_t nm = it->second;
    CHECK(std::abs(sol.displacement[3 * n + 0] +
                   sol.displacement[3 * nm + 0]) < 1e-8 * max_u);
    CHECK(std::abs(sol.displacement[3 * n + 1] -
                   sol.displacement[3 * nm + 1]) < 1e-8 * max_u);
    CHECK(std::abs(sol.displacement[3 * n + 2] -
                   sol.displacement[3 * nm + 2]) < 1e-8 * max_u);
  }
}

TEST_CASE("actuation closes the tips and heats the hot underarms") {
  const auto d = build_model1();
  const auto sol = run_coupled(d, 0.25, Environment{}, kCoarse);
  CHECK(sol.tip_gap < d.tip_gap_open);
  CHECK(sol.max_temperature > sol.tip_temperature);
  CHECK(sol.tip_temperature >= 300.15);
  // The hottest node sits on the heater run, which ends in the head
  // region; either label is acceptable, the tip arm is not.
  const bool on_heater_path =
      sol.max_temperature_location.find("hot_underarm") != std::string::npos ||
      sol.max_temperature_location.find("head") != std::string::npos;
  CHECK(on_heater_path);
}

TEST_CASE("stage errors are labeled") {
  auto d = build_model1();
  // strip the conductor plan but keep pads -> electric stage failure
  d.heater_plan.clear();
  const Mesh m = generate_mesh(d, 30.0, 1);
  try {
    run_coupled_on_mesh(m, d, 0.1, Environment{}, MaterialDb());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("electric stage") != std::string::npos);
  }
}
