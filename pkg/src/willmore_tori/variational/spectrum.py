"""Near-kernel detection for the Galerkin Jacobi operator."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg

from willmore_tori.exceptions import ThresholdError
from willmore_tori.logging_config import get_logger
from willmore_tori.settings import numerics
from willmore_tori.variational.operator import OperatorMatrix

logger = get_logger(__name__)

MIN_GAP_RATIO = 10.0


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of the symmetrized matrix and the near-kernel split."""

    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)
    near_kernel_count: int
    threshold: float
    gap: float
    gap_ratio: float
    asymmetry: float

    @property
    def valid(self) -> bool:
        return self.gap_ratio >= MIN_GAP_RATIO

    @property
    def kernel_vectors(self) -> np.ndarray:
        order = np.argsort(np.abs(self.eigenvalues))
        return self.eigenvectors[:, order[: self.near_kernel_count]]

    def summary(self) -> dict:
        return {
            "near_kernel_count": self.near_kernel_count,
            "threshold": self.threshold,
            "gap": self.gap,
            "gap_ratio": self.gap_ratio,
            "asymmetry": self.asymmetry,
            "smallest": np.sort(np.abs(self.eigenvalues))[:16].tolist(),
        }


def gap_threshold(magnitudes: np.ndarray, window: int) -> tuple[int, float]:
    """
    Split the sorted |eigenvalues| at their largest ratio gap within the window.

    Returns the number of values below the gap and the geometric mean across it.
    """
    head = np.sort(magnitudes)[: max(2, window)]
    floor = np.finfo(float).tiny
    ratios = head[1:] / np.maximum(head[:-1], floor)
    k = int(np.argmax(ratios))
    return k + 1, float(np.sqrt(max(head[k], floor) * head[k + 1]))


def near_kernel(operator: OperatorMatrix, delta: Optional[float] = None) -> SpectrumReport:
    """
    Count eigenvalues with |lambda| <= delta.

    Without ``delta`` the threshold sits in the largest relative gap among the
    kernel_window smallest magnitudes.

    Raises:
        ThresholdError: if an explicit delta leaves no spectral gap above it.
    """
    values, vectors = linalg.eigh(operator.symmetric)
    magnitudes = np.abs(values)
    window = numerics().spectral.kernel_window

    if delta is None:
        count, delta = gap_threshold(magnitudes, window)
    else:
        count = int(np.sum(magnitudes <= delta))
        if count == magnitudes.size:
            raise ThresholdError(f"No eigenvalue above delta={delta:.3e}", {"delta": delta})

    above = np.sort(magnitudes[magnitudes > delta])
    below = np.sort(magnitudes[magnitudes <= delta])
    gap = float(above[0])
    largest_small = float(below[-1]) if below.size else 0.0
    gap_ratio = gap / max(largest_small, np.finfo(float).tiny)
    if gap <= delta or gap_ratio < 1.0:
        raise ThresholdError(f"No spectral gap at delta={delta:.3e}", {"delta": delta, "gap": gap})

    report = SpectrumReport(
        eigenvalues=values,
        eigenvectors=vectors,
        near_kernel_count=count,
        threshold=delta,
        gap=gap,
        gap_ratio=float(gap_ratio),
        asymmetry=operator.asymmetry,
    )
    if not report.valid:
        logger.warning(
            f"Weak spectral gap (ratio {gap_ratio:.2f}) at omega={operator.param.omega}",
            extra={"event": "weak_gap", "gap_ratio": gap_ratio},
        )
    logger.info(
        f"Near-kernel dimension {count} at omega={operator.param.omega} (delta={delta:.3e})",
        extra={"event": "near_kernel", "count": count, "delta": delta},
    )
    return report


def rayleigh_quotient(operator: OperatorMatrix, coeffs: np.ndarray) -> float:
    c = np.asarray(coeffs, dtype=float)
    return float(c @ operator.symmetric @ c / (c @ c))


def perturbed(operator: OperatorMatrix, size: float, seed: int = 0) -> OperatorMatrix:
    """Copy of ``operator`` plus a random symmetric matrix of spectral norm ``size``."""
    rng = np.random.default_rng(seed)
    noise = rng.normal(size=operator.matrix.shape)
    noise = noise + noise.T
    noise *= size / np.linalg.norm(noise, 2)
    return OperatorMatrix(
        operator.symmetric + noise,
        operator.param,
        operator.truncation,
        operator.resolution,
        0.0,
        operator.gram_error,
    )
