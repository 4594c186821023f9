from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Physical and kernel parameters of the kinetic model.

    c       self-propulsion speed
    d       noise intensity, beta = 1/d
    alpha   precession strength
    kappa   second moment of the alignment kernel (k)
    phi_rep mass of the repulsion kernel (phi)
    k0      mass of the alignment kernel, always 1
    """

    c: float = 1.0
    d: float = 1.0
    alpha: float = 0.0
    kappa: float = 0.0
    phi_rep: float = 0.0
    k0: float = 1.0

    def __post_init__(self):
        for name in ("c", "d", "alpha", "kappa", "phi_rep"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.d <= 0.0:
            raise ValueError(f"noise intensity must satisfy d > 0, got d={self.d}")
        if self.kappa < 0.0:
            raise ValueError(f"kernel moment must satisfy kappa >= 0, got {self.kappa}")
        if self.phi_rep < 0.0:
            raise ValueError(f"repulsion moment must satisfy phi_rep >= 0, got {self.phi_rep}")
        if self.c < 0.0:
            raise ValueError(f"speed must satisfy c >= 0, got {self.c}")
        if self.k0 != 1.0:
            raise ValueError("kernel mass k0 is normalized to 1")

    @property
    def beta(self) -> float:
        return 1.0 / self.d

    def asdict(self) -> dict:
        return asdict(self)
