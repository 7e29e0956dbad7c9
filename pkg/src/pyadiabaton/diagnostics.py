"""
Checks that tie the two solvers and the expected physics together.
"""
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .adiabatic import reconstruct
from .constant import COHERENCE_THRESHOLD
from .errors import DegeneratePulse, MultivaluedError, NonConvergent
from .grid import TauGrid
from .quantities import photon_invariant
from .scenarios import run_scenario
from .sweep import Sweep
from .utils import logger, rel_l2

# Self-convergence errors below this are rounding noise.
_ROUNDING_LEVEL = 1e-12


def conservation_residual(result):
    """max over snapshots and tau of |V(tau, z) - V(tau, 0)| / max V(tau, 0)."""
    if len(result.snapshots) < 2:
        raise ValueError("conservation_residual needs at least 2 snapshots")

    medium = result.medium
    v0 = photon_invariant(result.snapshots[0].fields, medium)
    scale = float(np.max(v0))
    worst = 0.0
    for snap in result.snapshots[1:]:
        v = photon_invariant(snap.fields, medium)
        worst = max(worst, float(np.max(np.abs(v - v0))))
    if scale == 0.0:
        return worst
    return worst / scale


@dataclass(frozen=True)
class CrossValidation:
    zeta: float
    probe_l2: Optional[float]
    coupling_l2: Optional[float]
    shocked: bool = False

    def as_dict(self):
        return asdict(self)


def cross_validate(direct_result, chi):
    """
    Relative L2 distance between direct and reconstructed envelope
    magnitudes at every direct snapshot. Snapshots past a characteristic
    crossing are flagged and not compared.
    """
    if direct_result.tau_grid != chi.grid:
        raise ValueError("direct run and characteristics use different tau grids")

    out = []
    for snap in direct_result.snapshots:
        try:
            fields, _ = reconstruct(chi, snap.zeta)
        except MultivaluedError:
            out.append(CrossValidation(zeta=snap.zeta, probe_l2=None,
                                       coupling_l2=None, shocked=True))
            continue
        out.append(CrossValidation(
            zeta=snap.zeta,
            probe_l2=rel_l2(np.abs(snap.fields.g_p), np.abs(fields.g_p)),
            coupling_l2=rel_l2(np.abs(snap.fields.g_c), np.abs(fields.g_c)),
        ))
    return out


@dataclass(frozen=True)
class EdgeSlopes:
    leading_max_slope: float
    trailing_max_slope: float

    def as_dict(self):
        return asdict(self)


def edge_slopes(fields, grid=None):
    """
    Steepest |d|g_p|/dtau| before and after the probe peak. Meant for a
    single dominant pulse.
    """
    grid = grid or fields.grid
    amp = np.abs(fields.g_p)
    i = int(np.argmax(amp))
    if amp[i] <= 0.0:
        raise DegeneratePulse("probe is identically zero")

    slope = np.abs(np.gradient(amp, grid.dtau))
    return EdgeSlopes(leading_max_slope=float(np.max(slope[: i + 1])),
                      trailing_max_slope=float(np.max(slope[i:])))


@dataclass(frozen=True, eq=False)
class CoherenceMap:
    zetas: np.ndarray
    tau: np.ndarray
    values: np.ndarray
    threshold: float

    @property
    def localized_fraction(self):
        """Fraction of (tau, zeta) cells with |rho21| above threshold."""
        return float(np.mean(self.values > self.threshold))

    @property
    def peak(self):
        return float(np.max(self.values))


def coherence_map(result, threshold=COHERENCE_THRESHOLD):
    """|a2* a1| for every snapshot; rows follow depth, columns tau."""
    values = np.array([np.abs(s.atoms.rho21) for s in result.snapshots])
    return CoherenceMap(zetas=np.array(result.zetas), tau=result.tau_grid.tau,
                        values=values, threshold=threshold)


@dataclass(frozen=True)
class ConvergenceReport:
    resolutions: List[tuple]
    errors: List[float]
    orders: List[float]
    rounding: bool

    def as_dict(self):
        return asdict(self)


def _final_fields(scenario, n_tau, n_zeta, solver, config):
    s = scenario.with_grids(n_tau=n_tau, n_zeta=n_zeta, snapshot_stride=n_zeta)
    result = run_scenario(s, solver, config)[solver]
    if not result.valid:
        raise result.error
    fields = result.final.fields
    if not math.isclose(fields.zeta, s.zeta_grid.zeta_max):
        raise MultivaluedError(
            f"{solver} solution stops at zeta={fields.zeta:g} before "
            f"{s.zeta_grid.zeta_max:g}",
            zeta=fields.zeta,
        )
    return fields


def _check_nesting(tau_grid, resolutions):
    if len(resolutions) < 3:
        raise ValueError("convergence_study needs at least 3 resolutions")
    for (n0, z0), (n1, z1) in zip(resolutions, resolutions[1:]):
        coarse = TauGrid(tau_grid.tau_min, tau_grid.tau_max, n0)
        if coarse.refined().n_tau != n1 or z1 != 2 * z0:
            raise ValueError(
                f"resolution ({n1}, {z1}) does not halve both steps of ({n0}, {z0})"
            )


def convergence_study(scenario, resolutions, *, solver="direct", config=None,
                      max_workers=None):
    """
    Observed order of the final fields under simultaneous halving of the tau
    and zeta steps.

    :param resolutions: (n_tau, n_zeta) pairs, coarse to fine, each halving
            both steps: n_tau' - 1 = 2 (n_tau - 1), n_zeta' = 2 n_zeta.
    :return: ConvergenceReport; errors[k] compares runs k and k + 1 on the
            coarse grid points, orders[k] = log2(errors[k] / errors[k + 1]).
    """
    resolutions = [(int(n), int(z)) for n, z in resolutions]
    _check_nesting(scenario.tau_grid, resolutions)

    with Sweep(max_workers=max_workers) as sweep:
        finals = sweep.run_all(
            (_final_fields, (scenario, n, z, solver, config)) for n, z in resolutions
        )

    errors = []
    for coarse, fine in zip(finals, finals[1:]):
        a = np.concatenate([coarse.g_p, coarse.g_c])
        b = np.concatenate([fine.g_p[::2], fine.g_c[::2]])
        errors.append(rel_l2(b, a))

    if max(errors) <= _ROUNDING_LEVEL:
        logger.info("convergence study: all differences at rounding level")
        return ConvergenceReport(resolutions=resolutions, errors=errors, orders=[],
                                 rounding=True)

    for k, (e0, e1) in enumerate(zip(errors, errors[1:])):
        if not e1 < e0:
            raise NonConvergent(
                f"difference did not shrink from resolution {resolutions[k + 1]} "
                f"to {resolutions[k + 2]}: {e0:.3g} -> {e1:.3g}"
            )

    orders = [math.log2(e0 / e1) for e0, e1 in zip(errors, errors[1:])]
    logger.info("convergence study: orders %s", ", ".join(f"{p:.3f}" for p in orders))
    return ConvergenceReport(resolutions=resolutions, errors=errors, orders=orders,
                             rounding=False)


@dataclass
class DiagnosticsReport:
    conservation_residual_max: float
    unitarity_residual_max: float
    adiabaticity_max: float
    coherence_localized_fraction: float
    coherence_peak: float
    cross_validation_l2: Optional[List[CrossValidation]] = None
    edge_slopes: List[Optional[EdgeSlopes]] = field(default_factory=list)

    def as_dict(self):
        out = dict(
            conservation_residual_max=self.conservation_residual_max,
            unitarity_residual_max=self.unitarity_residual_max,
            adiabaticity_max=self.adiabaticity_max,
            coherence_localized_fraction=self.coherence_localized_fraction,
            coherence_peak=self.coherence_peak,
            edge_slopes=[s.as_dict() if s is not None else None
                         for s in self.edge_slopes],
        )
        if self.cross_validation_l2 is not None:
            out["cross_validation_l2"] = [c.as_dict() for c in self.cross_validation_l2]
        return out


def build_report(result, chi=None):
    """Every scalar diagnostic of a run; cross-validation only when chi is given."""
    snaps = result.snapshots
    if not snaps:
        raise ValueError("result has no snapshots")

    slopes = []
    for snap in snaps:
        try:
            slopes.append(edge_slopes(snap.fields))
        except DegeneratePulse:
            slopes.append(None)

    cmap = coherence_map(result)
    return DiagnosticsReport(
        conservation_residual_max=max(s.diagnostics["conservation_residual"]
                                      for s in snaps),
        unitarity_residual_max=max(s.diagnostics["unitarity_residual"] for s in snaps),
        adiabaticity_max=max(s.diagnostics["adiabaticity_max"] for s in snaps),
        coherence_localized_fraction=cmap.localized_fraction,
        coherence_peak=cmap.peak,
        cross_validation_l2=None if chi is None else cross_validate(result, chi),
        edge_slopes=slopes,
    )
