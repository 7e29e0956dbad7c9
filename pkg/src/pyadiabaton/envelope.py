"""
Declarative input pulse envelopes.

Every envelope is an immutable value object exposing ``sample(tau)``; the
public entry point is :func:`sample_envelope`, which also enforces the
"real, finite, non-negative" contract on the sampled values.
"""
import dataclasses
import math
from dataclasses import dataclass, field
from typing import ClassVar, Tuple

import numpy as np

from .errors import InvalidEnvelope


def _check_finite(name, value):
    if not math.isfinite(value):
        raise InvalidEnvelope(f"{name} must be finite, got {value!r}")


def _check_non_negative(name, value):
    _check_finite(name, value)
    if value < 0:
        raise InvalidEnvelope(f"{name} must be >= 0, got {value!r}")


def _check_positive(name, value):
    _check_finite(name, value)
    if value <= 0:
        raise InvalidEnvelope(f"{name} must be > 0, got {value!r}")


class EnvelopeSpec:
    kind: ClassVar[str] = ""

    def sample(self, tau):
        raise NotImplementedError


@dataclass(frozen=True)
class Gaussian(EnvelopeSpec):
    """amplitude * exp(-((tau - center) / width)**2); width is the 1/e half-width."""

    kind: ClassVar[str] = "gaussian"

    amplitude: float
    width: float
    center: float = 0.0

    def __post_init__(self):
        _check_non_negative("amplitude", self.amplitude)
        _check_positive("width", self.width)
        _check_finite("center", self.center)

    def sample(self, tau):
        x = (np.asarray(tau, dtype=float) - self.center) / self.width
        return self.amplitude * np.exp(-x * x)


@dataclass(frozen=True)
class SuperGaussian(EnvelopeSpec):
    kind: ClassVar[str] = "supergaussian"

    amplitude: float
    width: float
    order: int
    center: float = 0.0

    def __post_init__(self):
        _check_non_negative("amplitude", self.amplitude)
        _check_positive("width", self.width)
        _check_finite("center", self.center)
        if int(self.order) != self.order or self.order < 2 or self.order % 2:
            raise InvalidEnvelope(
                f"order must be an even integer >= 2, got {self.order!r}"
            )

    def sample(self, tau):
        x = (np.asarray(tau, dtype=float) - self.center) / self.width
        return self.amplitude * np.exp(-(x ** int(self.order)))


@dataclass(frozen=True)
class LinearRamp(EnvelopeSpec):
    """
    Rises (or falls) linearly from g_start at t_start to g_end at t_end and is
    clamped outside. A positive shoulder rounds the two corners with a
    softplus of that time constant; shoulder = 0 gives the sharp clamp.
    """

    kind: ClassVar[str] = "linear_ramp"

    g_start: float
    g_end: float
    t_start: float
    t_end: float
    shoulder: float = 0.0

    def __post_init__(self):
        _check_non_negative("g_start", self.g_start)
        _check_non_negative("g_end", self.g_end)
        _check_finite("t_start", self.t_start)
        _check_finite("t_end", self.t_end)
        _check_non_negative("shoulder", self.shoulder)
        if self.t_end <= self.t_start:
            raise InvalidEnvelope(
                f"t_end must be > t_start, got {self.t_start!r}..{self.t_end!r}"
            )

    def sample(self, tau):
        tau = np.asarray(tau, dtype=float)
        span = self.t_end - self.t_start
        if self.shoulder == 0:
            s = np.clip((tau - self.t_start) / span, 0.0, 1.0)
        else:
            w = self.shoulder
            s = w * (
                np.logaddexp(0.0, (tau - self.t_start) / w)
                - np.logaddexp(0.0, (tau - self.t_end) / w)
            ) / span
            s = np.clip(s, 0.0, 1.0)
        return self.g_start + (self.g_end - self.g_start) * s


@dataclass(frozen=True)
class TanhStep(EnvelopeSpec):
    kind: ClassVar[str] = "tanh_step"

    g_low: float
    g_high: float
    t_mid: float
    rise_time: float

    def __post_init__(self):
        _check_non_negative("g_low", self.g_low)
        _check_non_negative("g_high", self.g_high)
        _check_finite("t_mid", self.t_mid)
        _check_positive("rise_time", self.rise_time)

    def sample(self, tau):
        x = (np.asarray(tau, dtype=float) - self.t_mid) / self.rise_time
        return self.g_low + (self.g_high - self.g_low) * 0.5 * (1.0 + np.tanh(x))


@dataclass(frozen=True)
class Tabulated(EnvelopeSpec):
    """Samples on an explicit grid, linearly interpolated, zero outside it."""

    kind: ClassVar[str] = "tabulated"

    tau: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        tau = tuple(float(t) for t in self.tau)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "values", values)

        if len(tau) != len(values):
            raise InvalidEnvelope(
                f"tabulated tau and values differ in length: "
                f"{len(tau)} != {len(values)}"
            )
        if len(tau) < 2:
            raise InvalidEnvelope("tabulated envelope needs at least 2 samples")
        t = np.asarray(tau)
        v = np.asarray(values)
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise InvalidEnvelope("tabulated samples must be finite")
        if np.any(np.diff(t) <= 0):
            raise InvalidEnvelope("tabulated tau must be strictly increasing")
        if np.any(v < 0):
            raise InvalidEnvelope("tabulated values must be >= 0")

    @classmethod
    def from_arrays(cls, tau, values):
        return cls(tau=tuple(np.asarray(tau, dtype=float).tolist()),
                   values=tuple(np.asarray(values, dtype=float).tolist()))

    def sample(self, tau):
        return np.interp(np.asarray(tau, dtype=float), self.tau, self.values,
                         left=0.0, right=0.0)


@dataclass(frozen=True)
class Sum(EnvelopeSpec):
    kind: ClassVar[str] = "sum"

    parts: Tuple[EnvelopeSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise InvalidEnvelope("sum needs at least one part")

    def sample(self, tau):
        out = np.zeros(np.shape(tau), dtype=float)
        for part in self.parts:
            out = out + part.sample(tau)
        return out


@dataclass(frozen=True)
class Product(EnvelopeSpec):
    """Pointwise product, e.g. a switching window times a ramp."""

    kind: ClassVar[str] = "product"

    factors: Tuple[EnvelopeSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise InvalidEnvelope("product needs at least one factor")

    def sample(self, tau):
        out = np.ones(np.shape(tau), dtype=float)
        for factor in self.factors:
            out = out * factor.sample(tau)
        return out


@dataclass(frozen=True)
class Complementary(EnvelopeSpec):
    """
    sqrt(max(pedestal**2 - weight * partner**2, 0)): the coupling that keeps
    the photon flux of a pedestal fixed while a partner probe rides on it.
    """

    kind: ClassVar[str] = "complementary"

    pedestal: EnvelopeSpec
    partner: EnvelopeSpec
    weight: float = 1.0

    def __post_init__(self):
        _check_non_negative("weight", self.weight)

    def sample(self, tau):
        ped = self.pedestal.sample(tau)
        partner = self.partner.sample(tau)
        return np.sqrt(np.maximum(ped * ped - self.weight * partner * partner, 0.0))


ENVELOPE_KINDS = {
    cls.kind: cls
    for cls in (Gaussian, SuperGaussian, LinearRamp, TanhStep, Tabulated, Sum,
                Product, Complementary)
}


def sample_envelope(spec, grid):
    """
    Samples spec on every point of grid.
    :param spec: EnvelopeSpec instance.
    :param grid: TauGrid.
    :return: float array of length grid.n_tau.
    """
    if not isinstance(spec, EnvelopeSpec):
        raise InvalidEnvelope(f"not an envelope: {spec!r}")

    values = np.asarray(spec.sample(grid.tau), dtype=float)
    if values.shape != (grid.n_tau,):
        raise InvalidEnvelope(
            f"{spec.kind} sampled to shape {values.shape}, want ({grid.n_tau},)"
        )
    if not np.all(np.isfinite(values)):
        raise InvalidEnvelope(f"{spec.kind} produced non-finite samples")
    if np.any(values < 0):
        raise InvalidEnvelope(f"{spec.kind} produced negative samples")
    return values


def envelope_as_dict(spec):
    """Plain-data form of an envelope, nested envelopes included."""
    out = {"kind": spec.kind}
    for f in dataclasses.fields(spec):
        value = getattr(spec, f.name)
        if isinstance(value, EnvelopeSpec):
            value = envelope_as_dict(value)
        elif isinstance(value, tuple) and value and isinstance(value[0], EnvelopeSpec):
            value = [envelope_as_dict(v) for v in value]
        elif isinstance(value, tuple):
            value = list(value)
        out[f.name] = value
    return out


def envelope_from_dict(data):
    data = dict(data)
    kind = data.pop("kind", None)
    cls = ENVELOPE_KINDS.get(kind)
    if cls is None:
        raise InvalidEnvelope(f"unknown envelope kind: {kind!r}")

    for key in ("pedestal", "partner"):
        if key in data:
            data[key] = envelope_from_dict(data[key])
    for key in ("parts", "factors"):
        if key in data:
            data[key] = tuple(envelope_from_dict(d) for d in data[key])
    for key in ("tau", "values"):
        if key in data:
            data[key] = tuple(data[key])
    try:
        return cls(**data)
    except TypeError as err:
        raise InvalidEnvelope(f"{kind}: {err}") from err
