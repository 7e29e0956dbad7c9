"""
Direct integration of the coupled amplitude/field equations.

Atoms obey da/dtau = i M a with

    M = [[0,   0,   g_p*],
         [0,   0,   g_c*],
         [g_p, g_c, 0   ]]

and the fields obey dg_p/dzeta = i kappa_p a1* a3, dg_c/dzeta = i kappa_c a2* a3.
"""
import math
import time as pytime

import numpy as np

from . import provenance
from .errors import Blowup, LambdaError, NonFinite, NonUnitary
from .quantities import check_window, photon_invariant, snapshot_diagnostics
from .state import AtomState, SimulationResult, Snapshot
from .timing import RunMetric, StepStats, activated_metric, span
from .utils import logger

_GROUND = np.array([1.0, 0.0, 0.0], dtype=complex)


class SolverConfig:
    """
    Numeric knobs of the direct solver.
    :param atom_substeps: Minimum RK4 sub-steps per tau interval, default 4.
    :param max_phase_step: Upper bound on h * max|g| for one RK4 sub-step;
            more sub-steps are taken when needed, default 0.02.
    :param unitarity_tol: Allowed | ||a||^2 - 1 |, default 1e-6.
    :param max_field: Blowup guard on |g|, default 1e6.
    :param edge_tol: Input envelopes must be below edge_tol * peak at the
            window edges, default 1e-6.
    """

    _DEFAULTS = dict(
        atom_substeps=4,
        max_phase_step=0.02,
        unitarity_tol=1e-6,
        max_field=1e6,
        edge_tol=1e-6,
    )

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(self._DEFAULTS)
        if unknown:
            raise TypeError(f"unknown solver options: {sorted(unknown)}")

        self.config = {key: kwargs.get(key, default)
                       for key, default in self._DEFAULTS.items()}
        if int(self.atom_substeps) != self.atom_substeps or self.atom_substeps < 1:
            raise ValueError("atom_substeps must be an integer >= 1")
        self.config["atom_substeps"] = int(self.atom_substeps)
        for key in ("max_phase_step", "unitarity_tol", "max_field", "edge_tol"):
            if not self.config[key] > 0:
                raise ValueError(f"{key} must be > 0")

    def __getattr__(self, name):
        try:
            return self.__dict__["config"][name]
        except KeyError:
            raise AttributeError(name) from None

    def __eq__(self, other):
        return isinstance(other, SolverConfig) and self.config == other.config

    def __repr__(self):
        return f"SolverConfig({self.config})"

    def as_dict(self):
        return dict(self.config)

    def substeps(self, dtau, max_field):
        need = math.ceil(dtau * max_field / self.max_phase_step)
        return max(self.atom_substeps, need)


def _generator(g_p, g_c):
    """i M for a batch of field values; shape (..., 3, 3)."""
    a = np.zeros(g_p.shape + (3, 3), dtype=complex)
    a[..., 0, 2] = 1j * np.conj(g_p)
    a[..., 1, 2] = 1j * np.conj(g_c)
    a[..., 2, 0] = 1j * g_p
    a[..., 2, 1] = 1j * g_c
    return a


def _interval_propagators(g_p, g_c, dtau, substeps):
    """
    RK4 maps of the linear amplitude equation, one per tau interval, with
    the fields linearly interpolated across the interval.
    """
    eye = np.eye(3, dtype=complex)
    h = dtau / substeps

    a_lo = _generator(g_p[:-1], g_c[:-1])
    a_hi = _generator(g_p[1:], g_c[1:])
    slope = a_hi - a_lo

    total = np.broadcast_to(eye, a_lo.shape).copy()
    for s in range(substeps):
        a1 = a_lo + slope * (s / substeps)
        a2 = a_lo + slope * ((s + 0.5) / substeps)
        a3 = a_lo + slope * ((s + 1) / substeps)

        k1 = a1
        k2 = a2 @ (eye + (0.5 * h) * k1)
        k3 = a2 @ (eye + (0.5 * h) * k2)
        k4 = a3 @ (eye + h * k3)
        step = eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        total = step @ total
    return total


def _prefix_products(mats):
    """out[j] = mats[j] @ ... @ mats[0], by a log-depth scan."""
    out = mats.copy()
    n = len(out)
    offset = 1
    while offset < n:
        nxt = out.copy()
        nxt[offset:] = out[offset:] @ out[:-offset]
        out = nxt
        offset *= 2
    return out


def evolve_atoms(fields, config=None, initial=None):
    """
    Integrates the amplitudes across the tau window, starting from the ground
    state (or from `initial`) at tau_min.
    """
    config = config or SolverConfig()
    grid = fields.grid
    start = _GROUND if initial is None else np.asarray(initial, dtype=complex)

    g_max = float(np.max(fields.magnitude))
    substeps = config.substeps(grid.dtau, g_max)

    with span("atoms"):
        props = _interval_propagators(fields.g_p, fields.g_c, grid.dtau, substeps)
        chain = _prefix_products(props)

        amps = np.empty((grid.n_tau, 3), dtype=complex)
        amps[0] = start
        amps[1:] = chain @ start

    if not np.all(np.isfinite(amps)):
        raise NonFinite(f"non-finite amplitudes at zeta={fields.zeta}")

    atoms = AtomState(a1=amps[:, 0], a2=amps[:, 1], a3=amps[:, 2])
    residual = float(np.max(np.abs(atoms.norm - np.vdot(start, start).real)))
    if residual > config.unitarity_tol:
        raise NonUnitary(
            f"norm drifted by {residual:.3g} at zeta={fields.zeta} "
            f"(tolerance {config.unitarity_tol:g}, {substeps} sub-steps); "
            "refine the tau grid",
            residual=residual,
        )
    return atoms


def field_rhs(atoms, medium):
    """(i kappa_p a1* a3, i kappa_c a2* a3)."""
    with span("field_rhs"):
        d_p = 1j * medium.kappa_p * np.conj(atoms.a1) * atoms.a3
        d_c = 1j * medium.kappa_c * np.conj(atoms.a2) * atoms.a3
    return d_p, d_c


def _guard(g_p, g_c, config, zeta):
    if not (np.all(np.isfinite(g_p)) and np.all(np.isfinite(g_c))):
        raise NonFinite(f"non-finite field at zeta={zeta}")
    peak = max(float(np.max(np.abs(g_p))), float(np.max(np.abs(g_c))))
    if peak > config.max_field:
        raise Blowup(f"|g|={peak:.3g} exceeds max_field={config.max_field:g} "
                     f"at zeta={zeta}")


def _heun(fields, atoms, dzeta, medium, config):
    zeta = fields.zeta + dzeta
    with span("heun"):
        d_p0, d_c0 = field_rhs(atoms, medium)

        pred_p = fields.g_p + dzeta * d_p0
        pred_c = fields.g_c + dzeta * d_c0
        _guard(pred_p, pred_c, config, zeta)

        predicted = fields.with_fields(pred_p, pred_c, zeta)
        d_p1, d_c1 = field_rhs(evolve_atoms(predicted, config), medium)

        g_p = fields.g_p + (0.5 * dzeta) * (d_p0 + d_p1)
        g_c = fields.g_c + (0.5 * dzeta) * (d_c0 + d_c1)
        _guard(g_p, g_c, config, zeta)
    return g_p, g_c


def step_zeta(fields, dzeta, medium, config=None):
    """One Heun predictor-corrector step in depth."""
    if not dzeta > 0:
        raise ValueError(f"dzeta must be > 0, got {dzeta!r}")
    config = config or SolverConfig()

    atoms = evolve_atoms(fields, config)
    g_p, g_c = _heun(fields, atoms, dzeta, medium, config)
    return fields.with_fields(g_p, g_c, fields.zeta + dzeta)


def propagate(input_fields, medium, zeta_grid, config=None):
    """
    Marches the input fields from zeta = 0 to zeta_grid.zeta_max.

    Solver failures during the march do not raise: the result keeps the
    snapshots recorded so far and is flagged invalid.
    """
    config = config or SolverConfig()
    check_window(input_fields, config.edge_tol)

    result = SimulationResult(
        tau_grid=input_fields.grid,
        zeta_grid=zeta_grid,
        medium=medium,
        solver="direct",
        manifest=dict(
            solver="direct",
            solver_config=config.as_dict(),
            medium=medium.as_dict(),
            tau_grid=input_fields.grid.as_dict(),
            zeta_grid=zeta_grid.as_dict(),
            context=provenance.run_context(),
        ),
    )

    v_input = photon_invariant(input_fields, medium)
    record = set(zeta_grid.snapshot_steps())
    stats = StepStats()
    started = pytime.perf_counter()

    fields = input_fields.with_fields(input_fields.g_p, input_fields.g_c, 0.0)
    step = 0
    try:
        atoms = evolve_atoms(fields, config)
        if step in record:
            _record(result, fields, atoms, medium, v_input)
        while step < zeta_grid.n_zeta:
            metric = RunMetric()
            with activated_metric(metric):
                g_p, g_c = _heun(fields, atoms, zeta_grid.dzeta, medium, config)
                step += 1
                fields = fields.with_fields(g_p, g_c, zeta_grid.zeta_at(step))
                atoms = evolve_atoms(fields, config)
                if step in record:
                    _record(result, fields, atoms, medium, v_input)
            stats.add_metric(metric)
    except LambdaError as err:
        logger.error("propagate aborted at step %d of %d: %s",
                     step, zeta_grid.n_zeta, err)
        result.valid = False
        result.error = err

    result.timing = dict(wall_time_s=pytime.perf_counter() - started,
                         steps=stats.as_dict())
    return result


def _record(result, fields, atoms, medium, v_input):
    with span("diagnostics"):
        diagnostics = snapshot_diagnostics(fields, atoms, medium, v_input)
    result.append(Snapshot(fields=fields, atoms=atoms, diagnostics=diagnostics))
    logger.info("snapshot zeta=%.6g conservation=%.3g unitarity=%.3g",
                fields.zeta, diagnostics["conservation_residual"],
                diagnostics["unitarity_residual"])
