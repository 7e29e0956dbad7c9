import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .constant import MIN_N_TAU
from .errors import InvalidGrid


@dataclass(frozen=True)
class TauGrid:
    """Uniform retarded-time grid, in units of the probe duration."""

    tau_min: float
    tau_max: float
    n_tau: int

    def __post_init__(self):
        if not (math.isfinite(self.tau_min) and math.isfinite(self.tau_max)):
            raise InvalidGrid("tau bounds must be finite")
        if self.tau_max <= self.tau_min:
            raise InvalidGrid(
                f"tau_max must be > tau_min, got {self.tau_min}..{self.tau_max}"
            )
        if int(self.n_tau) != self.n_tau or self.n_tau < MIN_N_TAU:
            raise InvalidGrid(f"n_tau must be an integer >= {MIN_N_TAU}, "
                              f"got {self.n_tau!r}")
        object.__setattr__(self, "n_tau", int(self.n_tau))

    @property
    def dtau(self):
        return (self.tau_max - self.tau_min) / (self.n_tau - 1)

    @cached_property
    def tau(self):
        tau = np.linspace(self.tau_min, self.tau_max, self.n_tau)
        tau.setflags(write=False)
        return tau

    def refined(self):
        """The grid with every interval halved; its even points are this grid."""
        return TauGrid(self.tau_min, self.tau_max, 2 * self.n_tau - 1)

    def as_dict(self):
        return dict(tau_min=self.tau_min, tau_max=self.tau_max, n_tau=self.n_tau)


@dataclass(frozen=True)
class ZetaGrid:
    zeta_max: float
    n_zeta: int
    snapshot_stride: int = 1

    def __post_init__(self):
        if not math.isfinite(self.zeta_max) or self.zeta_max <= 0:
            raise InvalidGrid(f"zeta_max must be > 0, got {self.zeta_max!r}")
        if int(self.n_zeta) != self.n_zeta or self.n_zeta < 1:
            raise InvalidGrid(f"n_zeta must be an integer >= 1, got {self.n_zeta!r}")
        if (int(self.snapshot_stride) != self.snapshot_stride
                or not 1 <= self.snapshot_stride <= self.n_zeta):
            raise InvalidGrid(
                f"snapshot_stride must be in 1..{self.n_zeta}, "
                f"got {self.snapshot_stride!r}"
            )
        object.__setattr__(self, "n_zeta", int(self.n_zeta))
        object.__setattr__(self, "snapshot_stride", int(self.snapshot_stride))

    @property
    def dzeta(self):
        return self.zeta_max / self.n_zeta

    def zeta_at(self, step):
        if step == self.n_zeta:
            return float(self.zeta_max)
        return step * self.dzeta

    def snapshot_steps(self):
        """Step indices that get recorded: every stride, plus the last one."""
        steps = list(range(0, self.n_zeta + 1, self.snapshot_stride))
        if steps[-1] != self.n_zeta:
            steps.append(self.n_zeta)
        return steps

    def snapshot_zetas(self):
        return [self.zeta_at(k) for k in self.snapshot_steps()]

    def as_dict(self):
        return dict(zeta_max=self.zeta_max, n_zeta=self.n_zeta,
                    snapshot_stride=self.snapshot_stride)
