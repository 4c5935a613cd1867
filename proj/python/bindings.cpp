#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mg/config.hpp"
#include "mg/grip.hpp"
#include "mg/oracles.hpp"
#include "mg/studies.hpp"

namespace py = pybind11;
using namespace mg;

namespace {

DesignOverrides overrides_from(const py::kwargs& kw) {
  DesignOverrides o;
  for (auto item : kw) {
    const auto key = item.first.cast<std::string>();
    const double value = item.second.cast<double>();
    if (key == "free_arm_length")
      o.free_arm_length = value;
    else if (key == "tip_gap_open")
      o.tip_gap_open = value;
    else if (key == "metal_thickness")
      o.metal_thickness = value;
    else if (key == "polymer_thickness")
      o.polymer_thickness = value;
    else if (key == "polymer_split_fraction")
      o.polymer_split_fraction = value;
    else if (key == "metal_offset")
      o.metal_offset = value;
    else if (key == "trace_width")
      o.trace_width = value;
    else if (key == "oxide_thickness")
      o.oxide_thickness = value;
    else
      throw py::value_error("unknown design override '" + key + "'");
  }
  return o;
}

StudyContext make_context(double resolution, int order, int threads,
                          bool calibrated,
                          std::optional<double> object_diameter) {
  StudyContext ctx;
  ctx.mesh = {resolution, order};
  ctx.db = calibrated ? calibrated_material_db() : MaterialDb();
  ctx.threads = threads;
  ctx.object_diameter = object_diameter;
  return ctx;
}

}  // namespace

PYBIND11_MODULE(_pygripper, m) {
  m.doc() = "electro-thermo-mechanical SU-8 microgripper toolkit";

  // translators run newest-first: the ConfigError one must be
  // registered after the base Error translator to win for subclasses
  py::register_exception<Error>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Environment>(m, "Environment")
      .def(py::init([](double ambient_temperature,
                       double convection_coefficient) {
             Environment e;
             e.ambient_temperature = ambient_temperature;
             e.convection_coefficient = convection_coefficient;
             return e;
           }),
           py::arg("ambient_temperature") = 300.15,
           py::arg("convection_coefficient") = 20.0)
      .def_readwrite("ambient_temperature", &Environment::ambient_temperature)
      .def_readwrite("convection_coefficient",
                     &Environment::convection_coefficient);

  py::class_<GripperDesign>(m, "GripperDesign")
      .def_readonly("id", &GripperDesign::id)
      .def_readonly("footprint_width", &GripperDesign::footprint_width)
      .def_readonly("footprint_length", &GripperDesign::footprint_length)
      .def_readonly("free_arm_length", &GripperDesign::free_arm_length)
      .def_readonly("tip_gap_open", &GripperDesign::tip_gap_open)
      .def_readonly("metal_offset", &GripperDesign::metal_offset)
      .def("arm_stack_thickness", &GripperDesign::arm_stack_thickness)
      .def("__repr__", [](const GripperDesign& d) {
        return "<GripperDesign '" + d.id + "'>";
      });

  py::class_<Solution>(m, "Solution")
      .def_readonly("applied_voltage", &Solution::applied_voltage)
      .def_readonly("tip_gap", &Solution::tip_gap)
      .def_readonly("max_temperature", &Solution::max_temperature)
      .def_readonly("max_temperature_location",
                    &Solution::max_temperature_location)
      .def_readonly("tip_temperature", &Solution::tip_temperature)
      .def_readonly("out_of_plane_max", &Solution::out_of_plane_max)
      .def_readonly("joule_power_total", &Solution::joule_power_total)
      .def_readonly("total_current", &Solution::total_current)
      .def_readonly("convective_loss", &Solution::convective_loss)
      .def_readonly("base_conduction", &Solution::base_conduction)
      .def_readonly("voltage", &Solution::voltage)
      .def_readonly("temperature", &Solution::temperature)
      .def_readonly("displacement", &Solution::displacement);

  py::class_<GripResult>(m, "GripResult")
      .def_readonly("object_diameter", &GripResult::object_diameter)
      .def_readonly("applied_voltage", &GripResult::applied_voltage)
      .def_readonly("contact", &GripResult::contact)
      .def_readonly("total_normal_force", &GripResult::total_normal_force)
      .def_readonly("force_left", &GripResult::force_left)
      .def_readonly("force_right", &GripResult::force_right)
      .def_readonly("mean_contact_pressure", &GripResult::mean_contact_pressure)
      .def_readonly("max_contact_pressure", &GripResult::max_contact_pressure)
      .def_readonly("contact_area", &GripResult::contact_area)
      .def_readonly("unconstrained_closure", &GripResult::unconstrained_closure)
      .def_readonly("solution", &GripResult::solution);

  py::class_<SweepRecord>(m, "SweepRecord")
      .def_readonly("design_id", &SweepRecord::design_id)
      .def_readonly("applied_voltage", &SweepRecord::applied_voltage)
      .def_readonly("convection_coefficient",
                    &SweepRecord::convection_coefficient)
      .def_readonly("tip_gap", &SweepRecord::tip_gap)
      .def_readonly("max_temperature", &SweepRecord::max_temperature)
      .def_readonly("tip_temperature", &SweepRecord::tip_temperature)
      .def_readonly("out_of_plane_max", &SweepRecord::out_of_plane_max)
      .def_readonly("joule_power_total", &SweepRecord::joule_power_total)
      .def_readonly("grip_force", &SweepRecord::grip_force)
      .def_readonly("grip_pressure", &SweepRecord::grip_pressure);

  m.def("build_model1",
        [](const py::kwargs& kw) { return build_model1(overrides_from(kw)); },
        "Model 1: metal on both faces of the polymer core");
  m.def("build_model2",
        [](const py::kwargs& kw) { return build_model2(overrides_from(kw)); },
        "Model 2: one metal layer at the polymer midplane");
  m.def("build_offset_design",
        [](const py::kwargs& kw) {
          return build_offset_design(overrides_from(kw));
        },
        "single metal layer at midplane + metal_offset");

  m.def("calibrated_heater_conductivity", &calibrated_heater_conductivity);

  m.def(
      "run_coupled",
      [](const GripperDesign& d, double voltage, double resolution, int order,
         const Environment& env, bool calibrated) {
        return run_coupled(d, voltage, env, {resolution, order},
                           calibrated ? calibrated_material_db()
                                      : MaterialDb());
      },
      py::arg("design"), py::arg("voltage"), py::arg("resolution") = 12.0,
      py::arg("order") = 2, py::arg("env") = Environment{},
      py::arg("calibrated") = true,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "estimate_grip",
      [](const GripperDesign& d, double voltage, double object_diameter,
         double resolution, int order, const Environment& env,
         bool calibrated) {
        return estimate_grip(d, voltage, env, object_diameter,
                             {resolution, order},
                             calibrated ? calibrated_material_db()
                                        : MaterialDb());
      },
      py::arg("design"), py::arg("voltage"), py::arg("object_diameter") = 5.0,
      py::arg("resolution") = 12.0, py::arg("order") = 2,
      py::arg("env") = Environment{}, py::arg("calibrated") = true,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "voltage_sweep",
      [](const GripperDesign& d, const std::vector<double>& voltages,
         double resolution, int order, const Environment& env, int threads,
         bool calibrated, std::optional<double> object_diameter) {
        return voltage_sweep(
            d, voltages, env,
            make_context(resolution, order, threads, calibrated,
                         object_diameter));
      },
      py::arg("design"), py::arg("voltages"), py::arg("resolution") = 12.0,
      py::arg("order") = 2, py::arg("env") = Environment{},
      py::arg("threads") = 1, py::arg("calibrated") = true,
      py::arg("object_diameter") = py::none(),
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "environment_sweep",
      [](const GripperDesign& d, const std::vector<double>& voltages,
         const std::vector<double>& h_values, double ambient_temperature,
         double resolution, int order, int threads, bool calibrated) {
        return environment_sweep(d, voltages, h_values, ambient_temperature,
                                 make_context(resolution, order, threads,
                                              calibrated, std::nullopt));
      },
      py::arg("design"), py::arg("voltages"), py::arg("h_values"),
      py::arg("ambient_temperature") = 300.15, py::arg("resolution") = 12.0,
      py::arg("order") = 2, py::arg("threads") = 1,
      py::arg("calibrated") = true,
      py::call_guard<py::gil_scoped_release>());

  m.def("resolve_config",
        [](const std::string& text) { return parse_config(text).resolved_text; },
        py::arg("text"),
        "parse a JSON study config and return the fully-resolved echo");

  m.def("rod_resistance", &rod_resistance, py::arg("length"), py::arg("area"),
        py::arg("conductivity"));
}
