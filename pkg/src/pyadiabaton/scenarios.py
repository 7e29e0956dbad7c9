"""
Built-in scenarios: the depletion/re-emission run, adiabatons, front
sharpening for unequal coupling constants, compression on a rising
coupling, and two designed output shapes.
"""
import dataclasses
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from . import adiabatic, direct
from .constant import DEFAULT_N_TAU, DEFAULT_N_ZETA, DEFAULT_TAU_MAX, DEFAULT_TAU_MIN
from .envelope import (
    Complementary, Gaussian, LinearRamp, Product, SuperGaussian, Sum,
    envelope_as_dict, sample_envelope,
)
from .errors import InvalidEnvelope
from .grid import TauGrid, ZetaGrid
from .medium import MediumSpec
from .shaping import DesignRequest, design_coupling
from .state import FieldState
from .sweep import Sweep
from .utils import logger

EXPECTED_TAGS = (
    "depletion", "adiabaton", "sharpen_trailing", "sharpen_leading",
    "compress", "flat_top", "two_peak", "nonadiabatic",
)

SOLVER_MODES = ("direct", "adiabatic", "both")

# Fraction of its own peak that marks the support of an envelope.
_SUPPORT_LEVEL = 1e-3


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    probe: object
    coupling: object
    medium: MediumSpec
    tau_grid: TauGrid
    zeta_grid: ZetaGrid
    expected: Optional[str]
    description: str = ""
    design: Optional[DesignRequest] = None

    def __post_init__(self):
        if self.expected is not None and self.expected not in EXPECTED_TAGS:
            raise ValueError(f"unknown expected outcome: {self.expected!r}")
        if not self.coupling_brackets_probe():
            raise InvalidEnvelope(
                f"{self.name}: the coupling must switch on before and off after the probe"
            )

    def input_fields(self):
        return FieldState.from_envelopes(self.probe, self.coupling, self.tau_grid)

    def with_grids(self, *, n_tau=None, zeta_max=None, n_zeta=None,
                   snapshot_stride=None):
        """Same inputs on another resolution or depth."""
        tg = self.tau_grid
        zg = self.zeta_grid
        tau_grid = TauGrid(tg.tau_min, tg.tau_max, n_tau or tg.n_tau)
        n_zeta = n_zeta or zg.n_zeta
        zeta_grid = ZetaGrid(
            zeta_max or zg.zeta_max, n_zeta,
            snapshot_stride or min(zg.snapshot_stride, n_zeta),
        )
        return dataclasses.replace(self, tau_grid=tau_grid, zeta_grid=zeta_grid)

    def coupling_brackets_probe(self):
        """True when the coupling is on before and stays on after the probe."""
        probe = sample_envelope(self.probe, self.tau_grid)
        coupling = sample_envelope(self.coupling, self.tau_grid)
        p_on = np.flatnonzero(probe > _SUPPORT_LEVEL * probe.max())
        c_on = np.flatnonzero(coupling > _SUPPORT_LEVEL * coupling.max())
        if len(p_on) == 0:
            return True
        if len(c_on) == 0:
            return False
        return bool(c_on[0] <= p_on[0] and c_on[-1] >= p_on[-1])

    def as_dict(self):
        out = dict(
            name=self.name,
            expected=self.expected,
            description=self.description,
            probe=envelope_as_dict(self.probe),
            coupling=envelope_as_dict(self.coupling),
            medium=self.medium.as_dict(),
            tau_grid=self.tau_grid.as_dict(),
            zeta_grid=self.zeta_grid.as_dict(),
        )
        if self.design is not None:
            out["design"] = dict(target=envelope_as_dict(self.design.target),
                                 baseline_v=envelope_as_dict(self.design.baseline_v),
                                 depth=self.design.depth)
        return out


def _reference_tau():
    return TauGrid(DEFAULT_TAU_MIN, DEFAULT_TAU_MAX, DEFAULT_N_TAU)


def _fig2(name, zeta_max, n_zeta, stride, description):
    return Scenario(
        name=name,
        probe=Gaussian(amplitude=20.0, width=1.0),
        coupling=Gaussian(amplitude=20.0, width=10.0),
        medium=MediumSpec(kappa_c=1.0),
        tau_grid=_reference_tau(),
        zeta_grid=ZetaGrid(zeta_max, n_zeta, stride),
        expected="depletion",
        description=description,
    )


def _adiabaton_inputs():
    probe = Gaussian(amplitude=10.0, width=1.0)
    pedestal = SuperGaussian(amplitude=20.0, width=30.0, order=16)
    return probe, Complementary(pedestal=pedestal, partner=probe)


def _sharpen(name, kappa_c, expected, description):
    probe, coupling = _adiabaton_inputs()
    return Scenario(
        name=name,
        probe=probe,
        coupling=coupling,
        medium=MediumSpec(kappa_c=kappa_c),
        tau_grid=_reference_tau(),
        zeta_grid=ZetaGrid(1000.0, DEFAULT_N_ZETA, 100),
        expected=expected,
        description=description,
    )


def _designed(name, target, expected, description):
    grid = _reference_tau()
    medium = MediumSpec(kappa_c=1.0)
    request = DesignRequest(
        target=target,
        baseline_v=SuperGaussian(amplitude=225.0, width=30.0, order=16),
        depth=300.0,
    )
    result = design_coupling(request.target, request.baseline_v, medium,
                             request.depth, grid)
    return Scenario(
        name=name,
        probe=result.probe,
        coupling=result.coupling,
        medium=medium,
        tau_grid=grid,
        zeta_grid=ZetaGrid(request.depth, 1500, 150),
        expected=expected,
        description=description,
        design=request,
    )


def _fig2_gaussians():
    return _fig2("fig2_gaussians", 100.0, DEFAULT_N_ZETA, 100,
                 "equal gaussians, coupling ten times longer than the probe")


def _fig2_deep():
    return _fig2("fig2_deep", 3000.0, 3000, 300,
                 "fig2_gaussians followed until the probe is re-emitted")


def _depletion_short():
    return Scenario(
        name="depletion_short",
        probe=Gaussian(amplitude=5.0, width=1.0),
        coupling=Gaussian(amplitude=5.0, width=3.0),
        medium=MediumSpec(kappa_c=1.0),
        tau_grid=TauGrid(-12.0, 12.0, 513),
        zeta_grid=ZetaGrid(40.0, 80, 8),
        expected="depletion",
        description="weak short pulses that lose probe within a few units of depth",
    )


def _adiabaton():
    probe, coupling = _adiabaton_inputs()
    return Scenario(
        name="adiabaton",
        probe=probe,
        coupling=coupling,
        medium=MediumSpec(kappa_c=1.0),
        tau_grid=_reference_tau(),
        zeta_grid=ZetaGrid(100.0, DEFAULT_N_ZETA, 100),
        expected="adiabaton",
        description="gaussian probe carved out of a flat coupling pedestal",
    )


def _compress_ramp():
    window = SuperGaussian(amplitude=1.0, width=30.0, order=16)
    ramp = LinearRamp(g_start=20.0, g_end=28.28, t_start=-0.83, t_end=0.83,
                      shoulder=0.2)
    return Scenario(
        name="compress_ramp",
        probe=Gaussian(amplitude=10.0, width=1.0),
        coupling=Product(factors=(window, ramp)),
        medium=MediumSpec(kappa_c=1.0),
        tau_grid=_reference_tau(),
        zeta_grid=ZetaGrid(200.0, DEFAULT_N_ZETA, 200),
        expected="compress",
        description="coupling intensity doubles across the probe FWHM",
    )


def _flat_top():
    return _designed(
        "flat_top",
        SuperGaussian(amplitude=8.0, width=4.0, order=6),
        "flat_top",
        "coupling designed for a flat-top probe at the exit",
    )


def _two_peak():
    target = Sum(parts=(Gaussian(amplitude=6.0, width=1.0, center=-2.5),
                        Gaussian(amplitude=6.0, width=1.0, center=2.5)))
    return _designed("two_peak", target, "two_peak",
                     "coupling designed for a two-peaked probe at the exit")


def _nonadiabatic_short():
    return Scenario(
        name="nonadiabatic_short",
        probe=Gaussian(amplitude=2.0, width=0.1),
        coupling=Gaussian(amplitude=2.0, width=2.0),
        medium=MediumSpec(kappa_c=1.0),
        tau_grid=TauGrid(-10.0, 10.0, 2049),
        zeta_grid=ZetaGrid(2.0, 40, 4),
        expected="nonadiabatic",
        description="probe too short for the dark state to follow",
    )


_BUILDERS = {
    "fig2_gaussians": _fig2_gaussians,
    "fig2_deep": _fig2_deep,
    "depletion_short": _depletion_short,
    "adiabaton": _adiabaton,
    "sharpen_trailing": lambda: _sharpen(
        "sharpen_trailing", 1.25, "sharpen_trailing",
        "kappa_c/kappa_p = 1.25: the back edge steepens"),
    "sharpen_leading": lambda: _sharpen(
        "sharpen_leading", 0.75, "sharpen_leading",
        "kappa_c/kappa_p = 0.75: the front edge steepens"),
    "sharpen_strong_trailing": lambda: _sharpen(
        "sharpen_strong_trailing", 4.0, "sharpen_trailing",
        "kappa_c = 4 kappa_p: early shock on the back edge"),
    "sharpen_strong_leading": lambda: _sharpen(
        "sharpen_strong_leading", 0.25, "sharpen_leading",
        "kappa_p = 4 kappa_c: early shock on the front edge"),
    "compress_ramp": _compress_ramp,
    "flat_top": _flat_top,
    "two_peak": _two_peak,
    "nonadiabatic_short": _nonadiabatic_short,
}


def scenario_names():
    return list(_BUILDERS)


@lru_cache(maxsize=None)
def get_scenario(name):
    builder = _BUILDERS.get(name)
    if builder is None:
        raise KeyError(f"unknown scenario: {name!r}")
    return builder()


def builtin_scenarios():
    return [get_scenario(name) for name in _BUILDERS]


def run_scenario(scenario, solver_mode="direct", config=None):
    """
    :return: dict with a SimulationResult under "direct" and/or "adiabatic".
    """
    if solver_mode not in SOLVER_MODES:
        raise ValueError(f"solver_mode must be one of {SOLVER_MODES}, got {solver_mode!r}")
    config = config or direct.SolverConfig()
    fields = scenario.input_fields()

    out = {}
    if solver_mode in ("direct", "both"):
        logger.info("scenario %s: direct run to zeta=%g", scenario.name,
                    scenario.zeta_grid.zeta_max)
        out["direct"] = direct.propagate(fields, scenario.medium, scenario.zeta_grid,
                                         config)
    if solver_mode in ("adiabatic", "both"):
        out["adiabatic"] = adiabatic.solve(fields, scenario.medium, scenario.zeta_grid,
                                           edge_tol=config.edge_tol)
    return out


def run_scenarios(names, solver_mode="direct", max_workers=None, config=None):
    """Runs several scenarios in parallel; returns {name: run_scenario(...)}."""
    scenarios = [s if isinstance(s, Scenario) else get_scenario(s) for s in names]
    with Sweep(max_workers=max_workers) as sweep:
        results = sweep.run_all(
            (run_scenario, (s, solver_mode, config)) for s in scenarios
        )
    return {s.name: r for s, r in zip(scenarios, results)}
