from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, signal

from .errors import DegeneratePulse

# Maxima are counted above this fraction of the peak.
_MAXIMA_FLOOR = 0.05
# The flat-top region is where the envelope is at least this fraction of the peak.
_TOP_LEVEL = 0.9


@dataclass(frozen=True)
class PulseMetrics:
    peak: float
    fwhm: float
    energy: float
    centroid: float
    n_local_maxima: int
    top_flatness: float

    def as_dict(self):
        return asdict(self)


def pulse_energy(amplitude, grid):
    """Trapezoidal integral of |g|^2 over the window."""
    amp = np.abs(np.asarray(amplitude))
    return float(integrate.trapezoid(amp * amp, grid.tau))


def pulse_metrics(amplitude, grid):
    amp = np.abs(np.asarray(amplitude))
    if amp.shape != (grid.n_tau,):
        raise ValueError(f"amplitude has shape {amp.shape}, want ({grid.n_tau},)")

    peak = float(np.max(amp))
    if peak <= 0.0:
        raise DegeneratePulse("pulse is identically zero")

    tau = grid.tau
    energy = float(integrate.trapezoid(amp * amp, tau))
    centroid = float(integrate.trapezoid(tau * amp * amp, tau)) / energy

    return PulseMetrics(
        peak=peak,
        fwhm=_fwhm(amp, tau, peak),
        energy=energy,
        centroid=centroid,
        n_local_maxima=_count_maxima(amp, peak),
        top_flatness=_top_flatness(amp, peak),
    )


def _fwhm(amp, tau, peak):
    half = 0.5 * peak
    above = np.flatnonzero(amp >= half)
    first, last = above[0], above[-1]

    if first == 0:
        left = tau[0]
    else:
        left = _crossing(tau[first - 1], tau[first], amp[first - 1], amp[first], half)
    if last == len(amp) - 1:
        right = tau[-1]
    else:
        right = _crossing(tau[last], tau[last + 1], amp[last], amp[last + 1], half)
    return float(right - left)


def _crossing(t0, t1, y0, y1, level):
    if y1 == y0:
        return t0
    return t0 + (level - y0) / (y1 - y0) * (t1 - t0)


def _count_maxima(amp, peak):
    # Pad below zero so a maximum on the window edge or a flat top is counted.
    padded = np.concatenate(([-peak], amp, [-peak]))
    floor = _MAXIMA_FLOOR * peak
    peaks, _ = signal.find_peaks(padded, height=floor, prominence=floor)
    return int(len(peaks))


def _top_flatness(amp, peak):
    top = amp[amp >= _TOP_LEVEL * peak]
    return float(np.std(top) / np.mean(top))
