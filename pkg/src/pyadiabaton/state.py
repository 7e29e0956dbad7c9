from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from .envelope import sample_envelope
from .errors import InvalidGrid, NonFinite
from .grid import TauGrid, ZetaGrid
from .medium import MediumSpec
from .utils import frozen


@dataclass(frozen=True, eq=False)
class FieldState:
    """Probe and coupling Rabi envelopes (times T_p) at one depth."""

    grid: TauGrid
    g_p: np.ndarray
    g_c: np.ndarray
    zeta: float = 0.0

    def __post_init__(self):
        g_p = frozen(self.g_p, dtype=complex)
        g_c = frozen(self.g_c, dtype=complex)
        n = self.grid.n_tau
        if g_p.shape != (n,) or g_c.shape != (n,):
            raise InvalidGrid(
                f"field lengths {g_p.shape}, {g_c.shape} do not match n_tau={n}"
            )
        if not (np.all(np.isfinite(g_p)) and np.all(np.isfinite(g_c))):
            raise NonFinite(f"non-finite field at zeta={self.zeta}")
        object.__setattr__(self, "g_p", g_p)
        object.__setattr__(self, "g_c", g_c)
        object.__setattr__(self, "zeta", float(self.zeta))

    @classmethod
    def from_envelopes(cls, probe, coupling, grid, zeta=0.0):
        return cls(grid=grid, g_p=sample_envelope(probe, grid),
                   g_c=sample_envelope(coupling, grid), zeta=zeta)

    def with_fields(self, g_p, g_c, zeta):
        return FieldState(grid=self.grid, g_p=g_p, g_c=g_c, zeta=zeta)

    def swapped(self):
        return FieldState(grid=self.grid, g_p=self.g_c, g_c=self.g_p,
                          zeta=self.zeta)

    @property
    def magnitude(self):
        return np.sqrt(np.abs(self.g_p) ** 2 + np.abs(self.g_c) ** 2)


@dataclass(frozen=True, eq=False)
class AtomState:
    """Probability amplitudes of |1>, |2>, |3> on the field grid."""

    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray

    def __post_init__(self):
        for name in ("a1", "a2", "a3"):
            object.__setattr__(self, name, frozen(getattr(self, name), dtype=complex))
        if not self.a1.shape == self.a2.shape == self.a3.shape:
            raise InvalidGrid("amplitude arrays differ in shape")

    @classmethod
    def ground(cls, n):
        return cls(a1=np.ones(n), a2=np.zeros(n), a3=np.zeros(n))

    @property
    def norm(self):
        return np.abs(self.a1) ** 2 + np.abs(self.a2) ** 2 + np.abs(self.a3) ** 2

    @property
    def unitarity_residual(self):
        return float(np.max(np.abs(self.norm - 1.0)))

    @property
    def rho21(self):
        """Raman coherence a2* a1."""
        return np.conj(self.a2) * self.a1

    def swapped(self):
        return AtomState(a1=self.a2, a2=self.a1, a3=self.a3)


@dataclass(frozen=True, eq=False)
class Snapshot:
    fields: FieldState
    atoms: AtomState
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def zeta(self):
        return self.fields.zeta


@dataclass(eq=False)
class SimulationResult:
    """
    Ordered depth snapshots of one run. A run that aborts keeps the snapshots
    recorded so far, with valid = False and the exception in error.
    """

    tau_grid: TauGrid
    zeta_grid: ZetaGrid
    medium: MediumSpec
    snapshots: List[Snapshot] = field(default_factory=list)
    manifest: Dict[str, Any] = field(default_factory=dict)
    timing: Dict[str, Any] = field(default_factory=dict)
    solver: str = "direct"
    valid: bool = True
    error: Optional[BaseException] = None
    shock_depth: Optional[float] = None

    def append(self, snapshot):
        if self.snapshots and snapshot.zeta <= self.snapshots[-1].zeta:
            raise ValueError(
                f"snapshot zeta={snapshot.zeta} does not increase past "
                f"{self.snapshots[-1].zeta}"
            )
        self.snapshots.append(snapshot)

    @property
    def input_fields(self):
        return self.snapshots[0].fields

    @property
    def final(self):
        return self.snapshots[-1]

    @property
    def zetas(self):
        return [s.zeta for s in self.snapshots]

    def error_info(self):
        if self.error is None:
            return None
        return dict(type=self.error.__class__.__name__,
                    code=getattr(self.error, "code", None),
                    message=str(self.error))
