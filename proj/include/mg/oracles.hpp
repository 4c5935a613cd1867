#pragma once

#include <string>
#include <vector>

#include "mg/materials.hpp"

// Closed-form references used to check the FEM stack: a 1D convecting
// fin with volumetric heating, the bimetallic-strip bending formula and
// the bar-resistance identity.

namespace mg {

struct FinParams {
  double length = 0;              // um
  double cross_section_area = 0;  // um^2
  double perimeter = 0;           // um
  double conductivity = 0;        // pW/(um K)
  double convection = 0;          // pW/(um^2 K)
  double ambient = 300.15;        // K
  double heat_density = 0;        // pW/um^3, uniform
};

// Base held at ambient, insulated tip. Analytic solution of
// k A T'' - h P (T - T_amb) + q A = 0.
double fin_temperature(const FinParams& p, double x);
double fin_max_temperature(const FinParams& p);

struct BimorphLayer {
  double youngs_modulus = 0;  // MPa
  double tce = 0;             // 1/K
  double thickness = 0;       // um
};

struct BimorphParams {
  BimorphLayer bottom, top;
  double width = 0;   // um
  double length = 0;  // um
  double delta_T = 0;  // K, uniform
};

struct BimorphResult {
  double curvature = 0;       // 1/um
  double tip_deflection = 0;  // um
  bool slender = true;        // length/thickness >= 10
};

// Classical bimetallic-strip curvature; deflection kappa L^2 / 2.
BimorphResult bimorph_tip_deflection(const BimorphParams& p);

double rod_resistance(double length, double area, double conductivity);

}  // namespace mg
