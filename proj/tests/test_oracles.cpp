#include <cmath>

#include "doctest.h"
#include "mg/materials.hpp"
#include "mg/oracles.hpp"

using namespace mg;

namespace {

// Independent route for the bimorph: minimize the layered
// Euler-Bernoulli thermal energy over (axial strain, curvature) with
// numerical quadrature through the thickness.
double layered_beam_curvature(const BimorphParams& p) {
  const double h = p.bottom.thickness + p.top.thickness;
  const int N = 20000;
  double a00 = 0, a01 = 0, a11 = 0, r0 = 0, r1 = 0;
  for (int i = 0; i < N; ++i) {
    const double z = -h / 2 + (i + 0.5) * h / N;
    const bool bottom = z < -h / 2 + p.bottom.thickness;
    const double E =
        bottom ? p.bottom.youngs_modulus : p.top.youngs_modulus;
    const double alpha = bottom ? p.bottom.tce : p.top.tce;
    const double dz = h / N;
    a00 += E * dz;
    a01 += E * z * dz;
    a11 += E * z * z * dz;
    r0 += E * alpha * p.delta_T * dz;
    r1 += E * alpha * p.delta_T * z * dz;
  }
  // [a00 a01; a01 a11] [eps0; kappa] = [r0; r1]
  const double det = a00 * a11 - a01 * a01;
  const double kappa = (a00 * r1 - a01 * r0) / det;
  // sign: positive curvature = tip toward +z when the bottom expands
  // more
  return -kappa;
}

}  // namespace

TEST_CASE("fin with no heating stays at ambient") {
  FinParams p;
  p.length = 100;
  p.cross_section_area = 10;
  p.perimeter = 14;
  p.conductivity = 2e5;
  p.convection = 20;
  p.heat_density = 0;
  for (double x : {0.0, 30.0, 100.0})
    CHECK(fin_temperature(p, x) == doctest::Approx(p.ambient));
}

TEST_CASE("large-h limit plateaus at q*A/(h*P)") {
  FinParams p;
  p.length = 1000;
  p.cross_section_area = 10;
  p.perimeter = 14;
  p.conductivity = 2e5;
  p.convection = 1e6;
  p.heat_density = 5.0;
  const double plateau =
      p.heat_density * p.cross_section_area / (p.convection * p.perimeter);
  CHECK(fin_temperature(p, p.length / 2) ==
        doctest::Approx(p.ambient + plateau).epsilon(1e-6));
}

TEST_CASE("fin solution satisfies its ODE pointwise") {
  FinParams p;
  p.length = 200;
  p.cross_section_area = 3;
  p.perimeter = 20.6;
  p.conductivity = 2970e5;
  p.convection = 20;
  p.heat_density = 1e4;
  const double dx = 1e-3 * p.length;
  for (double x : {20.0, 60.0, 100.0, 150.0, 180.0}) {
    const double Tm = fin_temperature(p, x - dx);
    const double T0 = fin_temperature(p, x);
    const double Tp = fin_temperature(p, x + dx);
    const double d2 = (Tp - 2 * T0 + Tm) / (dx * dx);
    const double residual = p.conductivity * p.cross_section_area * d2 -
                            p.convection * p.perimeter * (T0 - p.ambient) +
                            p.heat_density * p.cross_section_area;
    const double dominant =
        std::abs(p.heat_density * p.cross_section_area);
    CHECK(std::abs(residual) <= 1e-6 * dominant);
  }
}

TEST_CASE("fin domain errors") {
  FinParams p;
  p.length = 10;
  p.cross_section_area = 1;
  p.perimeter = 4;
  p.conductivity = 1;
  CHECK_THROWS_AS(fin_temperature(p, -1), Error);
  CHECK_THROWS_AS(fin_temperature(p, 11), Error);
}

TEST_CASE("bimorph with matched TCE or zero dT does not bend") {
  BimorphParams p;
  p.bottom = {4.95e3, 5.2e-5, 10};
  p.top = {4.95e3, 5.2e-5, 10};
  p.length = 400;
  p.delta_T = 100;
  CHECK(bimorph_tip_deflection(p).curvature == doctest::Approx(0.0));
  p.top.tce = 1.41e-5;
  p.delta_T = 0;
  CHECK(bimorph_tip_deflection(p).tip_deflection == doctest::Approx(0.0));
}

TEST_CASE("swapping layers flips the deflection sign exactly") {
  BimorphParams p;
  p.bottom = {57e3, 1.41e-5, 0.3};
  p.top = {4.95e3, 5.2e-5, 20};
  p.length = 400;
  p.delta_T = 100;
  const auto a = bimorph_tip_deflection(p);
  std::swap(p.bottom, p.top);
  const auto b = bimorph_tip_deflection(p);
  CHECK(a.tip_deflection == doctest::Approx(-b.tip_deflection));
}

TEST_CASE("bimorph formula agrees with layered-beam integration") {
  // SU-8 / Gold with the table constants, 20/0.3 um, dT = 100 K.
  const auto su8 = builtin_material("SU-8");
  const auto gold = builtin_material("Gold");
  BimorphParams p;
  p.bottom = {gold.youngs_modulus, gold.tce, 0.3};
  p.top = {su8.youngs_modulus, su8.tce, 20.0};
  p.width = 30;
  p.length = 400;
  p.delta_T = 100;
  const auto closed = bimorph_tip_deflection(p);
  const double kappa_num = layered_beam_curvature(p);
  CHECK(closed.curvature ==
        doctest::Approx(kappa_num).epsilon(1e-3));
  CHECK(closed.slender);
  // top layer expands more -> tip bends toward the metal (negative)
  CHECK(closed.tip_deflection < 0);
}

TEST_CASE("rod resistance identities") {
  CHECK(rod_resistance(100, 3, 41) == doctest::Approx(100.0 / 123.0));
  CHECK(rod_resistance(200, 3, 41) ==
        doctest::Approx(2 * rod_resistance(100, 3, 41)));
  CHECK(rod_resistance(100, 6, 41) ==
        doctest::Approx(0.5 * rod_resistance(100, 3, 41)));
  CHECK_THROWS_AS(rod_resistance(-1, 1, 1), Error);
}
