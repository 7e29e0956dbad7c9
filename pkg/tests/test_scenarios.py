import numpy as np
import pytest

from pyadiabaton.envelope import Gaussian
from pyadiabaton.errors import InvalidEnvelope
from pyadiabaton.quantities import check_window
from pyadiabaton.scenarios import (
    EXPECTED_TAGS, Scenario, builtin_scenarios, get_scenario, run_scenario,
    run_scenarios, scenario_names,
)

from .test_helper import short_scenario

BUILTINS = [
    "fig2_gaussians", "fig2_deep", "depletion_short", "adiabaton",
    "sharpen_trailing", "sharpen_leading", "sharpen_strong_trailing",
    "sharpen_strong_leading", "compress_ramp", "flat_top", "two_peak",
    "nonadiabatic_short",
]


def test_scenario_names():
    assert scenario_names() == BUILTINS
    assert [s.name for s in builtin_scenarios()] == BUILTINS


def test_get_scenario():
    s = get_scenario("fig2_gaussians")
    assert s is get_scenario("fig2_gaussians")
    assert s.expected == "depletion"
    assert s.probe == Gaussian(amplitude=20.0, width=1.0)
    assert s.tau_grid.n_tau == 4096
    assert s.zeta_grid.zeta_max == 100.0

    with pytest.raises(KeyError, match=r"unknown scenario: 'fig3'"):
        get_scenario("fig3")


def test_builtin_scenarios_are_well_posed():
    for s in builtin_scenarios():
        assert s.expected in EXPECTED_TAGS, s.name
        assert s.coupling_brackets_probe(), s.name
        check_window(s.input_fields(), 1e-6)


def test_sharpening_constants():
    tests = [
        ("sharpen_trailing", 1.25, "sharpen_trailing"),
        ("sharpen_leading", 0.75, "sharpen_leading"),
        ("sharpen_strong_trailing", 4.0, "sharpen_trailing"),
        ("sharpen_strong_leading", 0.25, "sharpen_leading"),
        ("adiabaton", 1.0, "adiabaton"),
    ]
    for name, kappa_c, expected in tests:
        s = get_scenario(name)
        assert s.medium.kappa_c == kappa_c
        assert s.expected == expected
        assert s.probe == get_scenario("adiabaton").probe


def test_designed_scenarios():
    for name in ("flat_top", "two_peak"):
        s = get_scenario(name)
        assert s.design is not None
        assert s.design.depth == 300.0
        assert s.zeta_grid.zeta_max == 300.0
        d = s.as_dict()
        assert d["design"]["baseline_v"]["kind"] == "supergaussian"
        assert d["probe"]["kind"] == "tabulated"


def test_scenario_checks_expected_tag():
    s = short_scenario()
    with pytest.raises(ValueError, match=r"unknown expected outcome: 'soliton'"):
        Scenario(name="x", probe=s.probe, coupling=s.coupling, medium=s.medium,
                 tau_grid=s.tau_grid, zeta_grid=s.zeta_grid, expected="soliton")
    Scenario(name="x", probe=s.probe, coupling=s.coupling, medium=s.medium,
             tau_grid=s.tau_grid, zeta_grid=s.zeta_grid, expected=None)


def test_with_grids():
    s = get_scenario("fig2_gaussians")
    coarse = s.with_grids(n_tau=513, n_zeta=50)
    assert coarse.tau_grid.n_tau == 513
    assert coarse.tau_grid.tau_min == s.tau_grid.tau_min
    assert coarse.zeta_grid.n_zeta == 50
    assert coarse.zeta_grid.snapshot_stride == 50
    assert coarse.zeta_grid.zeta_max == 100.0
    assert coarse.probe == s.probe
    assert s.tau_grid.n_tau == 4096


def test_coupling_brackets_probe():
    s = short_scenario()
    assert s.coupling_brackets_probe()

    assert short_scenario(probe=0.0).coupling_brackets_probe()

    tests = [
        Gaussian(amplitude=5.0, width=1.0, center=3.0),
        Gaussian(amplitude=5.0, width=1.0, center=-3.0),
        Gaussian(amplitude=5.0, width=0.5),
        Gaussian(amplitude=0.0, width=3.0),
    ]
    for coupling in tests:
        with pytest.raises(InvalidEnvelope, match=r"late: the coupling must switch on before"):
            Scenario(name="late", probe=s.probe, coupling=coupling, medium=s.medium,
                     tau_grid=s.tau_grid, zeta_grid=s.zeta_grid, expected=None)


def test_run_scenario():
    s = short_scenario(zeta_max=1.0, n_zeta=4, snapshot_stride=2)
    runs = run_scenario(s, "both")
    assert set(runs) == {"direct", "adiabatic"}
    assert runs["direct"].zetas == runs["adiabatic"].zetas == [0.0, 0.5, 1.0]

    assert set(run_scenario(s, "adiabatic")) == {"adiabatic"}
    with pytest.raises(ValueError, match=r"solver_mode must be one of"):
        run_scenario(s, "fast")


def test_run_scenarios():
    a = short_scenario(name="a", zeta_max=1.0, n_zeta=2, snapshot_stride=2)
    b = short_scenario(name="b", probe=2.0, zeta_max=1.0, n_zeta=2, snapshot_stride=2)
    runs = run_scenarios([a, b], "direct", max_workers=2)

    assert list(runs) == ["a", "b"]
    assert runs["a"]["direct"].valid
    peak_b = np.max(np.abs(runs["b"]["direct"].input_fields.g_p))
    assert np.isclose(peak_b, 2.0, rtol=1e-3)
