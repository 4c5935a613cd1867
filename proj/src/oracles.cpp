#include "mg/oracles.hpp"

#include <cmath>

namespace mg {

double fin_temperature(const FinParams& p, double x) {
  if (x < 0 || x > p.length) throw Error("fin position outside [0, length]");
  if (!(p.length > 0) || !(p.cross_section_area > 0) || !(p.perimeter > 0) ||
      !(p.conductivity > 0) || p.convection < 0 || p.heat_density < 0)
    throw Error("invalid fin parameters");
  const double L = p.length;
  if (p.convection == 0.0) {
    // Pure conduction: T'' = -q/k, base clamped, insulated tip.
    const double q = p.heat_density;
    return p.ambient + q / p.conductivity * (L * x - 0.5 * x * x);
  }
  const double m =
      std::sqrt(p.convection * p.perimeter /
                (p.conductivity * p.cross_section_area));
  const double theta_p = p.heat_density * p.cross_section_area /
                         (p.convection * p.perimeter);
  // cosh(m(L-x))/cosh(mL) in overflow-safe exponential form
  const double ratio = std::exp(-m * x) *
                       (1.0 + std::exp(-2.0 * m * (L - x))) /
                       (1.0 + std::exp(-2.0 * m * L));
  return p.ambient + theta_p * (1.0 - ratio);
}

double fin_max_temperature(const FinParams& p) {
  // Monotone in x for these boundary conditions; max at the tip.
  return fin_temperature(p, p.length);
}

BimorphResult bimorph_tip_deflection(const BimorphParams& p) {
  if (!(p.bottom.thickness > 0) || !(p.top.thickness > 0))
    throw Error("bimorph layer thicknesses must be > 0");
  BimorphResult r;
  const double h = p.bottom.thickness + p.top.thickness;
  r.slender = p.length >= 10.0 * h;
  const double m = p.bottom.thickness / p.top.thickness;
  const double n = p.bottom.youngs_modulus / p.top.youngs_modulus;
  const double mismatch = (p.bottom.tce - p.top.tce) * p.delta_T;
  const double denom =
      3.0 * (1.0 + m) * (1.0 + m) +
      (1.0 + m * n) * (m * m + 1.0 / (m * n));
  r.curvature = 6.0 * mismatch * (1.0 + m) * (1.0 + m) / (h * denom);
  r.tip_deflection = 0.5 * r.curvature * p.length * p.length;
  return r;
}

double rod_resistance(double length, double area, double conductivity) {
  if (!(length > 0) || !(area > 0) || !(conductivity > 0))
    throw Error("rod_resistance arguments must be > 0");
  return length / (conductivity * area);
}

}  // namespace mg
