import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGrid


@dataclass(frozen=True)
class MediumSpec:
    """
    Dimensionless propagation constants. Depth is measured in units that
    make the probe constant exactly 1, so only kappa_c = K_c/K_p is free.
    """

    kappa_c: float = 1.0
    kappa_p: float = 1.0

    def __post_init__(self):
        if self.kappa_p != 1.0:
            raise InvalidGrid(f"kappa_p is fixed to 1, got {self.kappa_p!r}")
        if not math.isfinite(self.kappa_c) or self.kappa_c <= 0:
            raise InvalidGrid(f"kappa_c must be > 0, got {self.kappa_c!r}")

    def effective_k(self):
        return ThetaEffectiveK(self.kappa_p, self.kappa_c)

    def as_dict(self):
        return dict(kappa_p=self.kappa_p, kappa_c=self.kappa_c)


@dataclass(frozen=True)
class ThetaEffectiveK:
    """K(theta) = kappa_p cos^2(theta) + kappa_c sin^2(theta)."""

    kappa_p: float
    kappa_c: float

    def __call__(self, theta):
        s = np.sin(theta)
        # Written so that kappa_p == kappa_c gives a constant exactly.
        return self.kappa_p + (self.kappa_c - self.kappa_p) * s * s

    def speed(self, theta):
        """Characteristic slope dW/dzeta at a fixed mixing angle."""
        k = self(theta)
        return k * k / (self.kappa_p * self.kappa_c)
