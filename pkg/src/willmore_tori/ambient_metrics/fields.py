"""Synthetic curvature fields over a periodic chart of base points."""

from dataclasses import dataclass

import numpy as np

from willmore_tori.ambient_metrics.curvature import CurvatureData
from willmore_tori.ambient_metrics.models import NormalExpansionMetric
from willmore_tori.exceptions import DomainError


@dataclass(frozen=True)
class CurvatureField:
    """
    Ricci field over base points P in a periodic box of side ``period``:
    ric(P) = Q diag(base_i + amplitude_i cos(2 pi P_i / period)) Q^T.

    Stands in for a compact manifold: every P has its own normal-coordinate
    chart whose metric is the truncated expansion of ric(P).
    """

    base: np.ndarray
    amplitude: np.ndarray
    period: float = 2.0 * np.pi
    basis_rotation: np.ndarray | None = None
    rho0: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "base", np.asarray(self.base, dtype=float))
        object.__setattr__(self, "amplitude", np.asarray(self.amplitude, dtype=float))
        if self.base.shape != (3,) or self.amplitude.shape != (3,):
            raise DomainError("Curvature field needs 3 base values and 3 amplitudes")
        if self.period <= 0:
            raise DomainError(f"period must be positive, got {self.period}")

    def ricci_diagonal(self, P) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        return self.base + self.amplitude * np.cos(2.0 * np.pi * P / self.period)

    def at(self, P) -> CurvatureData:
        data = CurvatureData.from_ricci(np.diag(self.ricci_diagonal(P)))
        if self.basis_rotation is not None:
            data = data.rotate(self.basis_rotation)
        return data

    def chart(self, P) -> NormalExpansionMetric:
        """Normal-coordinate model centred at P."""
        return NormalExpansionMetric(self.at(P), self.rho0)

    def sample_points(self, per_axis: int) -> np.ndarray:
        ticks = np.arange(per_axis) * self.period / per_axis
        grid = np.stack(np.meshgrid(ticks, ticks, ticks, indexing="ij"), axis=-1)
        return grid.reshape(-1, 3)
