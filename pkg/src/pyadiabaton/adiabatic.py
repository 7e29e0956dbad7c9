"""
Adiabatic solution by characteristics.

In the dark-state limit the photon flux V(tau) does not change with depth
and the mixing angle is carried unchanged along curves

    W(tau) = W(tau0) + K(theta0(tau0))^2 * zeta / (kappa_p kappa_c),

where W is the running integral of V. Fields and amplitudes at any depth
follow from theta and V alone.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from . import provenance
from .constant import QUIESCENT_FIELD
from .errors import MultivaluedError, NoRoot, WindowExceeded
from .medium import MediumSpec, ThetaEffectiveK
from .quantities import (
    adiabaticity_ratio, check_window, mixing_angle, photon_invariant,
    snapshot_diagnostics,
)
from .state import AtomState, FieldState, SimulationResult, Snapshot
from .utils import frozen, logger

__all__ = [
    "CharacteristicField", "ThetaEffectiveK", "adiabaticity_ratio",
    "build_characteristics", "characteristic_tau", "trace_back",
    "detect_crossing", "crossing_tau0", "reconstruct", "solve",
]

# Arrival values that decrease by less than this fraction of W(tau_max) are
# treated as rounding noise.
_CROSSING_RTOL = 1e-12

# theta0(tau_min) at or below this counts as the quiescent ground state.
_QUIESCENT_THETA = 1e-12

_LADDER_START = 2.0 ** -20


@dataclass(frozen=True, eq=False)
class CharacteristicField:
    grid: object
    medium: MediumSpec
    theta0: np.ndarray
    V: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        for name in ("theta0", "V", "W"):
            object.__setattr__(self, name, frozen(getattr(self, name), dtype=float))

    @property
    def k_eff(self):
        return self.medium.effective_k()

    @property
    def w_max(self):
        return float(self.W[-1])

    @property
    def speed(self):
        """dW/dzeta of the characteristic leaving each input grid point."""
        return self.k_eff.speed(self.theta0)

    def arrival(self, zeta):
        """H(tau0) = W(tau0) + c(tau0) zeta for every input grid point."""
        return self.W + self.speed * zeta

    def tau_of_w(self, w):
        """Monotone inverse of W by linear interpolation; clamps to the window."""
        return _invert(self.W, self.grid.tau, w)


def build_characteristics(input_fields, medium):
    theta0 = mixing_angle(input_fields)
    v = photon_invariant(input_fields, medium)
    w = integrate.cumulative_trapezoid(v, input_fields.grid.tau, initial=0.0)
    return CharacteristicField(grid=input_fields.grid, medium=medium,
                               theta0=theta0, V=v, W=w)


def _invert(w_table, tau, w):
    """
    Smallest tau with W(tau) = w on a non-decreasing table, interpolating
    linearly inside the bracketing interval.
    """
    w = np.asarray(w, dtype=float)
    idx = np.searchsorted(w_table, w, side="left")
    idx = np.clip(idx, 1, len(w_table) - 1)
    w_lo = w_table[idx - 1]
    w_hi = w_table[idx]
    dw = w_hi - w_lo
    frac = np.where(dw > 0, (w - w_lo) / np.where(dw > 0, dw, 1.0), 1.0)
    frac = np.clip(frac, 0.0, 1.0)
    out = tau[idx - 1] + frac * (tau[idx] - tau[idx - 1])
    return out if out.ndim else float(out)


def _check_tau(tau, grid, name):
    if not grid.tau_min <= tau <= grid.tau_max:
        raise ValueError(f"{name}={tau} outside [{grid.tau_min}, {grid.tau_max}]")


def characteristic_tau(tau0, zeta, chi):
    """Where the characteristic leaving tau0 sits at depth zeta."""
    grid = chi.grid
    _check_tau(tau0, grid, "tau0")
    if zeta < 0:
        raise ValueError(f"zeta must be >= 0, got {zeta!r}")
    if zeta == 0:
        return float(tau0)

    theta = np.interp(tau0, grid.tau, chi.theta0)
    target = float(np.interp(tau0, grid.tau, chi.W)) + chi.k_eff.speed(theta) * zeta
    if target > chi.w_max:
        raise WindowExceeded(
            f"characteristic from tau0={tau0:g} leaves the window before "
            f"zeta={zeta:g}"
        )
    return float(_invert(chi.W, grid.tau, target))


def trace_back(tau, zeta, chi):
    """
    Entry time tau0 of the characteristic that reaches tau at depth zeta:
    the root of F(tau0) = W(tau) - W(tau0) - c(theta0(tau0)) zeta on
    [tau_min, tau].
    """
    grid = chi.grid
    _check_tau(tau, grid, "tau")
    if zeta < 0:
        raise ValueError(f"zeta must be >= 0, got {zeta!r}")
    if zeta == 0:
        return float(tau)

    k_eff = chi.k_eff
    w_tau = float(np.interp(tau, grid.tau, chi.W))

    def residual(tau0):
        theta = np.interp(tau0, grid.tau, chi.theta0)
        return w_tau - float(np.interp(tau0, grid.tau, chi.W)) - k_eff.speed(theta) * zeta

    inside = grid.tau[grid.tau < tau]
    nodes = np.append(inside, tau)
    f = w_tau - np.append(chi.W[: len(inside)], w_tau) - k_eff.speed(
        np.append(chi.theta0[: len(inside)], np.interp(tau, grid.tau, chi.theta0))
    ) * zeta

    if f[0] < 0:
        if chi.theta0[0] <= _QUIESCENT_THETA:
            return float(grid.tau_min)
        raise NoRoot(f"tau={tau:g} is ahead of every characteristic at zeta={zeta:g}")

    non_negative = f >= 0
    changes = np.flatnonzero(non_negative[1:] != non_negative[:-1])
    if len(changes) > 1:
        raise MultivaluedError(
            f"characteristics crossed: {len(changes)} roots at tau={tau:g}, "
            f"zeta={zeta:g}",
            tau=tau, zeta=zeta,
        )

    k = changes[0]
    lo, hi = nodes[k], nodes[k + 1]
    if f[k] == 0:
        return float(lo)
    return float(optimize.bisect(residual, lo, hi, xtol=1e-12, rtol=1e-14))


def _pair_crossing_depths(chi):
    """
    Depth at which each neighbouring pair of characteristics meets inside
    the window; inf for pairs that never do.
    """
    speed = chi.speed
    dw = np.diff(chi.W)
    dc = np.diff(speed)
    tol = _CROSSING_RTOL * max(chi.w_max, 1.0)

    closing = dc < 0
    depth = np.full(dw.shape, np.inf)
    depth[closing] = (dw[closing] + tol) / -dc[closing]
    # A meeting point beyond the end of the window is never observed.
    where = chi.W[:-1] + speed[:-1] * depth
    depth[~(where <= chi.w_max)] = np.inf
    return depth


def _first_crossing(chi, zeta):
    """Index of the earliest pair crossed by depth zeta, or None."""
    depth = _pair_crossing_depths(chi)
    i = int(np.argmin(depth))
    if depth[i] > zeta:
        return None
    return i


def crossing_tau0(chi, zeta):
    """
    Entry time of the earliest pair of crossed characteristics by depth zeta,
    or None while the forward map is still monotone.
    """
    i = _first_crossing(chi, zeta)
    if i is None:
        return None
    return float(chi.grid.tau[i])


def detect_crossing(chi, zeta_max, *, rtol=0.01) -> Optional[float]:
    """
    Smallest depth at which the forward map tau0 -> tau stops being monotone,
    or None if that does not happen before zeta_max.

    The map is sampled on the input grid along a geometric ladder of depths
    and the first bracket is bisected to rtol. Only pairs that meet inside
    the window count; such a pair stays crossed once it has crossed.
    """
    observed = np.isfinite(_pair_crossing_depths(chi))
    if not observed.any():
        return None
    tol = _CROSSING_RTOL * max(chi.w_max, 1.0)

    def crossed(zeta):
        step = np.diff(chi.arrival(zeta))
        return bool(np.any(step[observed] <= -tol))

    if not crossed(zeta_max):
        return None

    lo = 0.0
    hi = zeta_max * _LADDER_START
    while not crossed(hi):
        lo, hi = hi, min(2.0 * hi, zeta_max)

    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if not crossed(mid):
            lo = mid
        else:
            hi = mid
    return hi


def reconstruct(chi, zeta, grid=None):
    """
    Fields and amplitudes at depth zeta from the transported mixing angle.
    Points the first characteristic has not reached keep theta0(tau_min).
    """
    grid = grid or chi.grid
    if grid != chi.grid:
        raise ValueError("reconstruct needs the grid the characteristics were built on")
    if zeta < 0:
        raise ValueError(f"zeta must be >= 0, got {zeta!r}")

    if zeta == 0:
        theta = np.array(chi.theta0)
    else:
        i = _first_crossing(chi, zeta)
        if i is not None:
            raise MultivaluedError(
                f"characteristics from tau0={grid.tau[i]:g} have crossed by "
                f"zeta={zeta:g}",
                tau=float(grid.tau[i]), zeta=zeta,
            )
        # Monotone up to rounding here; the running maximum keeps interp sane.
        arrival = np.maximum.accumulate(chi.arrival(zeta))
        theta = np.interp(chi.W, arrival, chi.theta0)

    medium = chi.medium
    k = chi.k_eff(theta)
    amp = np.sqrt(medium.kappa_p * medium.kappa_c * chi.V / k)
    g_p = amp * np.sin(theta)
    g_c = amp * np.cos(theta)

    fields = FieldState(grid=grid, g_p=g_p, g_c=g_c, zeta=zeta)
    atoms = AtomState(a1=np.cos(theta), a2=-np.sin(theta),
                      a3=_bright_estimate(g_p, g_c, grid))
    return fields, atoms


def _bright_estimate(g_p, g_c, grid):
    """
    |a3| to first order: the part of d/dtau (g_c, g_p) / |g|^2 across the
    field direction, |g_c g_p' - g_p g_c'| / |g|^3. The part along the field
    only rescales the dark state and does not populate |3>. 0 where |g| ~ 0.
    """
    mag2 = g_p * g_p + g_c * g_c
    live = np.sqrt(mag2) >= QUIESCENT_FIELD
    safe = np.where(live, mag2, 1.0)
    u_c = np.where(live, g_c / safe, 0.0)
    u_p = np.where(live, g_p / safe, 0.0)
    du_c = np.gradient(u_c, grid.dtau)
    du_p = np.gradient(u_p, grid.dtau)
    across = np.abs(g_c * du_p - g_p * du_c) / np.sqrt(safe)
    return np.where(live, across, 0.0)


def solve(input_fields, medium, zeta_grid, *, edge_tol=1e-6):
    """
    Adiabatic counterpart of direct.propagate: snapshots at the same depths,
    stopping before the first characteristic crossing.
    """
    check_window(input_fields, edge_tol)
    chi = build_characteristics(input_fields, medium)
    shock = detect_crossing(chi, zeta_grid.zeta_max)

    result = SimulationResult(
        tau_grid=input_fields.grid,
        zeta_grid=zeta_grid,
        medium=medium,
        solver="adiabatic",
        shock_depth=shock,
        manifest=dict(
            solver="adiabatic",
            medium=medium.as_dict(),
            tau_grid=input_fields.grid.as_dict(),
            zeta_grid=zeta_grid.as_dict(),
            context=provenance.run_context(),
        ),
    )

    for zeta in zeta_grid.snapshot_zetas():
        try:
            fields, atoms = reconstruct(chi, zeta)
        except MultivaluedError as err:
            logger.info("adiabatic solution stops at zeta=%g: %s", zeta, err)
            break
        diagnostics = snapshot_diagnostics(fields, atoms, medium, chi.V)
        result.append(Snapshot(fields=fields, atoms=atoms, diagnostics=diagnostics))

    if shock is not None and math.isfinite(shock):
        logger.info("characteristics cross at zeta~%.4g", shock)
    return result
