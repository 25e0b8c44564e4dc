"""Parameter grids for closed surfaces with spectral differentiation."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import fft
from scipy.special import roots_legendre

from willmore_tori.exceptions import GridError

SQRT2 = np.sqrt(2.0)


class Axis(ABC):
    """One parameter direction of a surface grid."""

    n: int

    @property
    @abstractmethod
    def nodes(self) -> np.ndarray:
        """Parameter values."""

    @property
    @abstractmethod
    def weights(self) -> np.ndarray:
        """Quadrature weights in the parameter."""

    @abstractmethod
    def diff(self, values: np.ndarray, axis: int, order: int = 1) -> np.ndarray:
        """Derivative with respect to the parameter along array axis ``axis``."""

    @property
    def periodic(self) -> bool:
        return False


class FourierAxis(Axis):
    """Uniform periodic parameter s_j = 2 pi j / n with trigonometric differentiation."""

    def __init__(self, n: int):
        if n < 8 or n % 2:
            raise GridError(f"Periodic axis needs an even resolution >= 8, got {n}")
        self.n = int(n)
        self._wavenumbers = np.arange(self.n // 2 + 1, dtype=float)

    @cached_property
    def nodes(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n) / self.n

    @cached_property
    def weights(self) -> np.ndarray:
        return np.full(self.n, 2.0 * np.pi / self.n)

    @property
    def periodic(self) -> bool:
        return True

    def diff(self, values: np.ndarray, axis: int, order: int = 1) -> np.ndarray:
        if values.shape[axis] != self.n:
            raise GridError(f"Expected {self.n} samples along axis {axis}, got {values.shape[axis]}")
        multiplier = (1j * self._wavenumbers) ** order
        if order % 2:
            multiplier[-1] = 0.0
        shape = [1] * values.ndim
        shape[axis] = multiplier.size
        coeffs = fft.rfft(values, axis=axis) * multiplier.reshape(shape)
        return fft.irfft(coeffs, n=self.n, axis=axis)

    def __eq__(self, other) -> bool:
        return isinstance(other, FourierAxis) and other.n == self.n

    def __hash__(self) -> int:
        return hash(("fourier", self.n))


class LegendreAxis(Axis):
    """Gauss-Legendre latitude nodes on (-pi/2, pi/2) with polynomial differentiation."""

    def __init__(self, n: int):
        if n < 4:
            raise GridError(f"Gauss-Legendre axis needs at least 4 nodes, got {n}")
        self.n = int(n)
        x, w = roots_legendre(self.n)
        self._x = x
        self._w = w

    @cached_property
    def nodes(self) -> np.ndarray:
        return 0.5 * np.pi * self._x

    @cached_property
    def weights(self) -> np.ndarray:
        return 0.5 * np.pi * self._w

    @cached_property
    def matrix(self) -> np.ndarray:
        """Barycentric differentiation matrix in the latitude variable."""
        t = self.nodes
        diffs = t[:, None] - t[None, :]
        np.fill_diagonal(diffs, 1.0)
        bary = 1.0 / np.prod(diffs, axis=1)
        d = (bary[None, :] / bary[:, None]) / diffs
        np.fill_diagonal(d, 0.0)
        np.fill_diagonal(d, -d.sum(axis=1))
        return d

    def diff(self, values: np.ndarray, axis: int, order: int = 1) -> np.ndarray:
        if values.shape[axis] != self.n:
            raise GridError(f"Expected {self.n} samples along axis {axis}, got {values.shape[axis]}")
        out = np.moveaxis(values, axis, 0)
        for _ in range(order):
            out = np.tensordot(self.matrix, out, axes=(1, 0))
        return np.moveaxis(out, 0, axis)

    def __eq__(self, other) -> bool:
        return isinstance(other, LegendreAxis) and other.n == self.n

    def __hash__(self) -> int:
        return hash(("legendre", self.n))


@dataclass(frozen=True)
class SurfaceGrid:
    """
    Sampled immersion of a closed surface on a tensor-product parameter grid.

    ``positions[i, j]`` are chart coordinates at parameter node (i, j). For tori
    both axes are periodic; for spheres axis 0 is the Gauss-Legendre latitude.
    ``phi``/``theta`` hold the torus angles of each node when the grid samples
    the Clifford torus (possibly through a graded reparametrization).
    """

    positions: np.ndarray
    axes: tuple[Axis, Axis]
    phi: Optional[np.ndarray] = field(default=None, repr=False)
    theta: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=float)
        expected = (self.axes[0].n, self.axes[1].n, 3)
        if positions.shape != expected:
            raise GridError(f"positions shape {positions.shape} does not match axes {expected}")
        if not np.all(np.isfinite(positions)):
            raise GridError("positions must be finite")
        object.__setattr__(self, "positions", positions)

    @property
    def n_phi(self) -> int:
        return self.axes[0].n

    @property
    def n_theta(self) -> int:
        return self.axes[1].n

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_phi, self.n_theta)

    @property
    def periodic(self) -> bool:
        return self.axes[0].periodic and self.axes[1].periodic

    @cached_property
    def weights(self) -> np.ndarray:
        return np.outer(self.axes[0].weights, self.axes[1].weights)

    def diff(self, values: np.ndarray, direction: int, order: int = 1) -> np.ndarray:
        """Parameter derivative of per-node data (leading axes are the grid axes)."""
        values = np.asarray(values, dtype=float)
        if values.shape[:2] != self.shape:
            raise GridError(f"Field shape {values.shape[:2]} does not match grid {self.shape}")
        return self.axes[direction].diff(values, axis=direction, order=order)

    def with_positions(self, positions: np.ndarray) -> "SurfaceGrid":
        """Same parameter grid, new immersion."""
        return SurfaceGrid(np.asarray(positions), self.axes, self.phi, self.theta)

    def scaled(self, factor: float, center=(0.0, 0.0, 0.0)) -> "SurfaceGrid":
        c = np.asarray(center, dtype=float)
        return self.with_positions(c + factor * (self.positions - c))

    def translated(self, offset) -> "SurfaceGrid":
        return self.with_positions(self.positions + np.asarray(offset, dtype=float))

    def rotated(self, rotation: np.ndarray) -> "SurfaceGrid":
        return self.with_positions(self.positions @ np.asarray(rotation).T)


@dataclass(frozen=True)
class ScalarField:
    """Per-node real values on a SurfaceGrid."""

    values: np.ndarray
    grid: SurfaceGrid = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise GridError(f"ScalarField shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise GridError("ScalarField values must be finite")
        object.__setattr__(self, "values", values)


def field_values(field_or_array, grid: Optional[SurfaceGrid] = None) -> np.ndarray:
    if isinstance(field_or_array, ScalarField):
        return field_or_array.values
    values = np.asarray(field_or_array, dtype=float)
    if grid is not None and values.shape[:2] != grid.shape:
        raise GridError(f"Field shape {values.shape} does not match grid {grid.shape}")
    return values


def spectral_gradient(field: ScalarField) -> tuple[ScalarField, ScalarField]:
    """Parameter derivatives (d/dphi, d/dtheta) of a scalar field."""
    grid = field.grid
    return (
        ScalarField(grid.diff(field.values, 0), grid),
        ScalarField(grid.diff(field.values, 1), grid),
    )


def clifford_point(phi, theta) -> np.ndarray:
    """X(phi, theta) of the Clifford torus with radii (sqrt 2, 1)."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    rho = SQRT2 + np.cos(phi)
    return np.stack([rho * np.cos(theta), rho * np.sin(theta), np.sin(phi)], axis=-1)


def graded_angle(s: np.ndarray, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """phi = 2 arctan(kappa tan(s/2)) on [0, 2 pi) and d phi / d s."""
    half = 0.5 * np.asarray(s, dtype=float)
    angle = 2.0 * np.arctan2(kappa * np.sin(half), np.cos(half))
    speed = kappa / (np.cos(half) ** 2 + kappa**2 * np.sin(half) ** 2)
    return angle, speed


def build_clifford_torus(n_phi: int, n_theta: int) -> SurfaceGrid:
    """Clifford torus sampled on the uniform (phi, theta) grid."""
    return graded_torus(n_phi, n_theta, 1.0, 1.0)


def graded_torus(n_phi: int, n_theta: int, kappa_phi: float, kappa_theta: float) -> SurfaceGrid:
    """
    Clifford torus on a graded grid clustering nodes near (phi, theta) = (0, 0).

    kappa < 1 concentrates nodes around angle 0; kappa = 1 is the uniform grid.
    """
    if not (0.0 < kappa_phi <= 1.0 and 0.0 < kappa_theta <= 1.0):
        raise GridError(f"Grading factors must lie in (0, 1], got {kappa_phi}, {kappa_theta}")
    axes = (FourierAxis(n_phi), FourierAxis(n_theta))
    if kappa_phi == 1.0:
        phi_1d = axes[0].nodes
    else:
        phi_1d, _ = graded_angle(axes[0].nodes, kappa_phi)
    if kappa_theta == 1.0:
        theta_1d = axes[1].nodes
    else:
        theta_1d, _ = graded_angle(axes[1].nodes, kappa_theta)
    phi, theta = np.meshgrid(phi_1d, theta_1d, indexing="ij")
    return SurfaceGrid(clifford_point(phi, theta), axes, phi, theta)


def build_round_sphere(n_lat: int, n_lon: int, center=(0.0, 0.0, 0.0), radius: float = 1.0) -> SurfaceGrid:
    """Round sphere on a Gauss-Legendre latitude by periodic longitude grid."""
    if radius <= 0:
        raise GridError(f"Sphere radius must be positive, got {radius}")
    axes = (LegendreAxis(n_lat), FourierAxis(n_lon))
    lat, lon = np.meshgrid(axes[0].nodes, axes[1].nodes, indexing="ij")
    unit = np.stack([np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)], axis=-1)
    return SurfaceGrid(np.asarray(center, dtype=float) + radius * unit, axes)
