"""
Inverse design and shape reports.

A target output probe is reached by choosing how the (fixed) photon flux
V(tau) is split between probe and coupling at the entry: the mixing angle
wanted at each output point is carried back along its characteristic to
the point of the entry where it has to be injected.
"""
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import integrate, optimize, signal

from .adiabatic import _invert, build_characteristics, detect_crossing, reconstruct
from .constant import QUIESCENT_FIELD
from .envelope import Tabulated, sample_envelope
from .errors import CrossedCharacteristics, Infeasible, WindowExceeded, WindowTooSmall
from .pulse import pulse_energy, pulse_metrics
from .quantities import photon_invariant
from .state import FieldState
from .utils import logger

_BISECT_XTOL = 1e-12

# w0 may fall by this fraction of W(tau_max) before the design counts as crossed.
_MONOTONE_RTOL = 1e-12


def theta_from_probe(gp_target, V, medium):
    """
    Mixing angle that puts a probe amplitude gp_target on a photon flux V:
    the root of kappa_p kappa_c V sin^2(theta) / K(theta) = gp_target^2.
    """
    gp2 = float(gp_target) ** 2
    limit = medium.kappa_p * float(V)
    if not gp2 < limit:
        raise Infeasible(
            f"probe^2={gp2:.6g} is not below kappa_p*V={limit:.6g} (total conversion)"
        )
    if gp2 == 0.0:
        return 0.0

    k_eff = medium.effective_k()
    scale = medium.kappa_p * medium.kappa_c * float(V)

    def residual(theta):
        s = math.sin(theta)
        return scale * s * s / k_eff(theta) - gp2

    return float(optimize.bisect(residual, 0.0, 0.5 * math.pi, xtol=_BISECT_XTOL))


def _theta_from_probe_array(gp, v, medium):
    """
    Closed form of theta_from_probe for whole arrays:
    sin^2 = q kappa_p / (kappa_c + q (kappa_p - kappa_c)), q = gp^2 / (kappa_p V).
    Points with V = 0 get theta = 0.
    """
    kp, kc = medium.kappa_p, medium.kappa_c
    live = v > 0
    q = np.zeros_like(v)
    q[live] = gp[live] ** 2 / (kp * v[live])
    s = q * kp / (kc + q * (kp - kc))
    return np.arcsin(np.sqrt(np.clip(s, 0.0, 1.0)))


def fields_from_theta(theta, v, medium, grid, zeta=0.0):
    """Probe and coupling carrying flux v split at mixing angle theta."""
    k = medium.effective_k()(theta)
    amp = np.sqrt(medium.kappa_p * medium.kappa_c * v / k)
    return FieldState(grid=grid, g_p=amp * np.sin(theta), g_c=amp * np.cos(theta),
                      zeta=zeta)


@dataclass(frozen=True)
class DesignRequest:
    target: object
    baseline_v: object
    depth: float


@dataclass(frozen=True, eq=False)
class DesignResult:
    probe: Tabulated
    coupling: Tabulated
    input_fields: FieldState
    predicted: Optional[FieldState]
    margin: float
    shock_depth: Optional[float]
    depth: float

    def as_dict(self):
        return dict(margin=self.margin, shock_depth=self.shock_depth,
                    depth=self.depth)


def feasibility_margin(target_amp, v, medium):
    """min over V > 0 of (kappa_p V - target^2) / (kappa_p V)."""
    kp = medium.kappa_p
    live = v > 0
    if np.any(target_amp[~live] > 0):
        raise Infeasible("target probe is nonzero where the photon flux V is zero")
    if not np.any(live):
        raise Infeasible("photon flux V is zero everywhere")
    margin = float(np.min((kp * v[live] - target_amp[live] ** 2) / (kp * v[live])))
    return margin


def design_coupling(target, baseline_v, medium, depth, grid, *, edge_tol=1e-6):
    """
    Entry envelopes whose probe becomes `target` after propagating `depth`.

    :param target: EnvelopeSpec of the wanted output probe.
    :param baseline_v: EnvelopeSpec read as the photon flux V(tau).
    :param depth: medium length L >= 0.
    :return: DesignResult with tabulated entry envelopes and the adiabatic
            prediction at L (None when characteristics cross before L).
    """
    if not depth >= 0:
        raise ValueError(f"depth must be >= 0, got {depth!r}")

    target_amp = sample_envelope(target, grid)
    v = sample_envelope(baseline_v, grid)
    peak = float(np.max(target_amp))
    if peak > 0 and max(target_amp[0], target_amp[-1]) > edge_tol * peak:
        raise WindowTooSmall("target probe is not quiescent at the window edges")

    margin = feasibility_margin(target_amp, v, medium)
    if margin <= 0:
        raise Infeasible(f"target exceeds the total conversion bound (margin {margin:.3g})")

    theta_out = _theta_from_probe_array(target_amp, v, medium)
    k_eff = medium.effective_k()
    w = integrate.cumulative_trapezoid(v, grid.tau, initial=0.0)
    w0 = w - k_eff.speed(theta_out) * depth

    # Output points fed from before the window must carry no probe.
    early = w0 < 0
    stray = early & (target_amp > QUIESCENT_FIELD)
    if np.any(stray):
        first = int(np.flatnonzero(stray)[0])
        raise WindowExceeded(
            f"output at tau={grid.tau[first]:g} is fed from before the window "
            f"start; widen the window or shorten depth={depth:g}"
        )

    kept = ~early
    w0_kept = w0[kept]
    theta_kept = theta_out[kept]
    drop = np.diff(w0_kept)
    tol = _MONOTONE_RTOL * max(float(w[-1]), 1.0)
    if np.any(drop < -tol):
        i = int(np.flatnonzero(drop < -tol)[0])
        tau_kept = grid.tau[kept]
        raise CrossedCharacteristics(
            f"target needs crossed characteristics near tau={tau_kept[i]:g}: "
            "it cannot be reached without a shock"
        )

    # Entry points no output point maps to stay pure coupling.
    theta0 = np.interp(w, np.maximum.accumulate(w0_kept), theta_kept,
                       left=0.0, right=0.0)
    entry_tau = _invert(w, grid.tau, w0_kept)
    logger.debug("design maps output tau [%g, %g] to entry tau [%g, %g]",
                 grid.tau[kept][0], grid.tau[kept][-1], entry_tau[0], entry_tau[-1])

    inputs = fields_from_theta(theta0, v, medium, grid)
    probe = Tabulated.from_arrays(grid.tau, np.abs(inputs.g_p))
    coupling = Tabulated.from_arrays(grid.tau, np.abs(inputs.g_c))

    if depth == 0:
        return DesignResult(probe=probe, coupling=coupling, input_fields=inputs,
                            predicted=inputs, margin=margin, shock_depth=None,
                            depth=0.0)

    chi = build_characteristics(inputs, medium)
    shock = detect_crossing(chi, depth)
    predicted = None
    if shock is None:
        predicted, _ = reconstruct(chi, depth)
    else:
        logger.warning("designed inputs shock at zeta~%.4g before depth %g", shock, depth)

    return DesignResult(probe=probe, coupling=coupling, input_fields=inputs,
                        predicted=predicted, margin=margin, shock_depth=shock,
                        depth=float(depth))


@dataclass(frozen=True)
class CompressionReport:
    fwhm_in: float
    fwhm_out: float
    compression_factor: float
    energy_ratio: float

    def as_dict(self):
        return asdict(self)


def compression_report(result):
    """Probe FWHM and energy at the first recorded depth against the last."""
    if not result.snapshots:
        raise ValueError("result has no snapshots")
    if not result.valid:
        logger.warning("compression report on an invalid run stops at zeta=%g",
                       result.final.zeta)

    grid = result.tau_grid
    first = result.snapshots[0].fields
    last = result.final.fields
    m_in = pulse_metrics(first.g_p, grid)
    m_out = pulse_metrics(last.g_p, grid)
    return CompressionReport(
        fwhm_in=m_in.fwhm,
        fwhm_out=m_out.fwhm,
        compression_factor=m_in.fwhm / m_out.fwhm,
        energy_ratio=pulse_energy(last.g_p, grid) / pulse_energy(first.g_p, grid),
    )


def copropagation_lag(fields, v_input, medium, grid=None):
    """
    Lag, in grid spacings, of the best cross-correlation between the probe
    intensity and the dip it digs into the coupling, kappa_c V(tau, 0) - |g_c|^2.
    Zero when the two perturbations travel together.
    """
    grid = grid or fields.grid
    probe = np.abs(fields.g_p) ** 2
    dip = medium.kappa_c * np.asarray(v_input) - np.abs(fields.g_c) ** 2
    corr = signal.correlate(probe, dip, mode="full", method="direct")
    lags = signal.correlation_lags(len(probe), len(dip), mode="full")
    return int(lags[int(np.argmax(corr))])


def energies(fields, medium, grid=None):
    """Photon numbers of probe, coupling and the total flux at one depth."""
    grid = grid or fields.grid
    return dict(
        probe=pulse_energy(fields.g_p, grid),
        coupling=pulse_energy(fields.g_c, grid),
        total_v=float(integrate.trapezoid(photon_invariant(fields, medium), grid.tau)),
    )
