"""Pointwise quantities shared by both solvers."""
import numpy as np

from .constant import QUIESCENT_FIELD
from .errors import WindowTooSmall


def mixing_angle(fields):
    """
    theta = atan2(|g_p|, |g_c|) in [0, pi/2]; 0 where both fields vanish,
    i.e. where |g| is below QUIESCENT_FIELD.
    """
    theta = np.arctan2(np.abs(fields.g_p), np.abs(fields.g_c))
    # Underflowed tails would otherwise pick an arbitrary angle.
    return np.where(fields.magnitude < QUIESCENT_FIELD, 0.0, theta)


def photon_invariant(fields, medium):
    """V = |g_c|^2 / kappa_c + |g_p|^2 / kappa_p."""
    return (np.abs(fields.g_c) ** 2 / medium.kappa_c
            + np.abs(fields.g_p) ** 2 / medium.kappa_p)


def adiabaticity_ratio(fields, grid=None):
    """
    r = |g_c dg_p/dtau - g_p dg_c/dtau| / |g|^3 by centered differences.
    r << 1 marks dark-state following; r is 0 where |g| < 1e-9.
    """
    grid = grid or fields.grid
    dgp = np.gradient(fields.g_p, grid.dtau)
    dgc = np.gradient(fields.g_c, grid.dtau)
    mag = fields.magnitude

    num = np.abs(fields.g_c * dgp - fields.g_p * dgc)
    out = np.zeros(grid.n_tau)
    live = mag >= QUIESCENT_FIELD
    out[live] = num[live] / mag[live] ** 3
    return out


def check_window(fields, edge_tol):
    """
    Raises WindowTooSmall unless both envelopes are below edge_tol * peak at
    the window edges.
    """
    for name, g in (("probe", fields.g_p), ("coupling", fields.g_c)):
        mag = np.abs(g)
        peak = float(np.max(mag))
        if peak == 0.0:
            continue
        edge = max(float(mag[0]), float(mag[-1]))
        if edge > edge_tol * peak:
            raise WindowTooSmall(
                f"{name} is {edge / peak:.3g} of its peak at the window edge "
                f"(limit {edge_tol:g}); widen the tau window"
            )


def snapshot_diagnostics(fields, atoms, medium, v_input):
    """Per-snapshot residuals recorded by both solvers."""
    v = photon_invariant(fields, medium)
    scale = float(np.max(v_input))
    if scale > 0:
        conservation = float(np.max(np.abs(v - v_input))) / scale
    else:
        conservation = float(np.max(np.abs(v)))
    return dict(
        conservation_residual=conservation,
        adiabaticity_max=float(np.max(adiabaticity_ratio(fields))),
        unitarity_residual=atoms.unitarity_residual,
    )
