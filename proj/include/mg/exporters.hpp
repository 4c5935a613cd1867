#pragma once

#include <string>
#include <vector>

#include "mg/physics.hpp"
#include "mg/studies.hpp"

namespace mg {

// Legacy ASCII VTK unstructured grid. Point data: voltage, temperature,
// displacement; cell data: material id and Joule density. Values are
// written with 9 significant digits.
void export_vtk(const Mesh& m, const Solution& s, const std::string& path);

// Exact study schema; one row per record, grip columns empty when no
// object was configured.
extern const char* const kCsvHeader;
void export_csv(const std::vector<SweepRecord>& records,
                const std::string& path);

}  // namespace mg
