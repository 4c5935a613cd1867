import json

import pytest

import pygripper as pg

COARSE = dict(resolution=25.0, order=1)


def test_models_and_overrides():
    m1 = pg.build_model1()
    m2 = pg.build_model2()
    assert m1.id == "model1" and m2.id == "model2"
    assert m1.tip_gap_open == 20.0
    assert m1.free_arm_length == 400.0
    assert m1.arm_stack_thickness() == pytest.approx(20.6)
    assert m2.arm_stack_thickness() == pytest.approx(20.3)
    off = pg.build_offset_design(metal_offset=2.0)
    assert off.metal_offset == 2.0
    with pytest.raises(ValueError):
        pg.build_model1(colour=1.0)


def test_cold_gripper_is_open():
    sol = pg.run_coupled(pg.build_model1(), 0.0, **COARSE)
    assert sol.tip_gap == pytest.approx(20.0)
    assert sol.max_temperature == pytest.approx(300.15)
    assert sol.joule_power_total == 0.0


def test_actuation_closes_and_scales():
    a = pg.run_coupled(pg.build_model1(), 0.1, **COARSE)
    b = pg.run_coupled(pg.build_model1(), 0.2, **COARSE)
    assert a.tip_gap < 20.0
    assert 20.0 - b.tip_gap == pytest.approx(4 * (20.0 - a.tip_gap), rel=1e-6)
    assert b.max_temperature > a.max_temperature
    assert len(a.temperature) * 3 == len(a.displacement)


def test_sweep_monotone_and_deterministic():
    voltages = [0.0, 0.15, 0.3]
    recs = pg.voltage_sweep(pg.build_model1(), voltages, threads=2, **COARSE)
    assert [r.applied_voltage for r in recs] == voltages
    gaps = [r.tip_gap for r in recs]
    assert gaps == sorted(gaps, reverse=True)
    again = pg.voltage_sweep(pg.build_model1(), voltages, threads=1, **COARSE)
    assert [r.tip_gap for r in again] == gaps


def test_environment_sweep_cools():
    recs = pg.environment_sweep(
        pg.build_model1(), [0.25], [20.0, 500.0], **COARSE
    )
    assert len(recs) == 2
    assert recs[1].max_temperature < recs[0].max_temperature
    assert recs[1].tip_gap > recs[0].tip_gap


def test_grip_interface():
    g = pg.estimate_grip(pg.build_model1(), 0.05, object_diameter=5.0, **COARSE)
    assert not g.contact
    assert g.total_normal_force == 0.0
    with pytest.raises(RuntimeError):
        pg.estimate_grip(pg.build_model1(), 0.2, object_diameter=-1.0, **COARSE)


def test_config_resolution():
    resolved = pg.resolve_config("{}")
    data = json.loads(resolved)
    assert data["study"]["type"] == "simulate"
    assert data["materials"]["Gold"]["electrical_conductivity"] == pytest.approx(
        pg.calibrated_heater_conductivity()
    )
    assert pg.resolve_config(resolved) == resolved
    with pytest.raises(ValueError):
        pg.resolve_config('{"colour": 1}')


def test_rod_resistance():
    assert pg.rod_resistance(100.0, 3.0, 41.0) == pytest.approx(100.0 / 123.0)
