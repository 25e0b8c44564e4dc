"""Ambient 3-metric models with analytic first and second derivatives."""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from willmore_tori.ambient_metrics.curvature import (
    DELTA,
    CurvatureData,
    christoffel_symbols,
    h_gradient,
    h_hessian,
    h_tensor,
    orthonormal_frame,
    ricci_from_metric,
    to_frame,
)
from willmore_tori.ambient_metrics.types import MetricKind
from willmore_tori.exceptions import DomainError


@dataclass(frozen=True)
class MetricSample:
    """Metric and its coordinate derivatives at a batch of points."""

    g: np.ndarray
    dg: np.ndarray
    ddg: np.ndarray


def _points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise DomainError(f"Points must have 3 coordinates, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError("Points must be finite")
    return x


class MetricModel(ABC):
    """Base class for ambient metrics given in a single coordinate chart."""

    kind: MetricKind

    @abstractmethod
    def check_domain(self, x: np.ndarray) -> None:
        """Raise DomainError if any point lies outside the validity domain."""

    @abstractmethod
    def _sample(self, x: np.ndarray) -> MetricSample:
        pass

    def sample(self, x) -> MetricSample:
        x = _points(x)
        self.check_domain(x)
        return self._sample(x)

    def christoffel(self, x) -> np.ndarray:
        s = self.sample(x)
        return christoffel_symbols(np.linalg.inv(s.g), s.dg)

    def ricci_tensor(self, x) -> np.ndarray:
        """Coordinate components Ric_ab at x."""
        s = self.sample(x)
        return ricci_from_metric(s.g, s.dg, s.ddg)

    @property
    def is_flat(self) -> bool:
        return False


class EuclideanMetric(MetricModel):
    kind = MetricKind.EUCLIDEAN

    def check_domain(self, x: np.ndarray) -> None:
        return None

    def _sample(self, x: np.ndarray) -> MetricSample:
        batch = x.shape[:-1]
        return MetricSample(
            g=np.broadcast_to(DELTA, batch + (3, 3)).copy(),
            dg=np.zeros(batch + (3, 3, 3)),
            ddg=np.zeros(batch + (3, 3, 3, 3)),
        )

    def christoffel(self, x) -> np.ndarray:
        x = _points(x)
        return np.zeros(x.shape[:-1] + (3, 3, 3))

    def ricci_tensor(self, x) -> np.ndarray:
        x = _points(x)
        return np.zeros(x.shape[:-1] + (3, 3))

    @property
    def is_flat(self) -> bool:
        return True

    def __repr__(self) -> str:
        return "EuclideanMetric()"


class NormalExpansionMetric(MetricModel):
    """g = delta + 1/3 R x x, the normal-coordinate expansion truncated at second order."""

    kind = MetricKind.NORMAL_EXPANSION

    def __init__(self, curvature: CurvatureData, rho0: float = 10.0):
        if rho0 <= 0:
            raise DomainError(f"Validity radius must be positive, got {rho0}")
        self.curvature = curvature
        self.rho0 = float(rho0)
        self._hessian = h_hessian(curvature)

    def check_domain(self, x: np.ndarray) -> None:
        r = np.linalg.norm(x, axis=-1)
        if np.any(r >= self.rho0):
            raise DomainError(
                f"Point at |x| = {float(r.max()):.6g} outside expansion radius {self.rho0}"
            )

    def _sample(self, x: np.ndarray) -> MetricSample:
        batch = x.shape[:-1]
        return MetricSample(
            g=DELTA + h_tensor(self.curvature, x),
            dg=h_gradient(self.curvature, x),
            ddg=np.broadcast_to(self._hessian, batch + (3, 3, 3, 3)).copy(),
        )

    @property
    def is_flat(self) -> bool:
        return not np.any(self.curvature.ric)

    def __repr__(self) -> str:
        return f"NormalExpansionMetric(ric={self.curvature.ric.tolist()}, rho0={self.rho0})"


class ConformallyFlatMetric(MetricModel):
    """g = exp(2f) delta with analytic f, df, ddf."""

    @abstractmethod
    def exponent(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(f, f_a, f_ab) at x."""

    def _sample(self, x: np.ndarray) -> MetricSample:
        f, df, ddf = self.exponent(x)
        e2f = np.exp(2.0 * f)[..., None, None]
        g = e2f * DELTA
        dg = 2.0 * np.einsum("...c,ab->...cab", df, DELTA) * e2f[..., None]
        second = 2.0 * ddf + 4.0 * np.einsum("...c,...d->...cd", df, df)
        ddg = np.einsum("...cd,ab->...cdab", second, DELTA) * e2f[..., None, None]
        return MetricSample(g=g, dg=dg, ddg=ddg)

    def christoffel(self, x) -> np.ndarray:
        x = _points(x)
        self.check_domain(x)
        _, df, _ = self.exponent(x)
        return (
            np.einsum("ki,...j->...kij", DELTA, df)
            + np.einsum("kj,...i->...kij", DELTA, df)
            - np.einsum("ij,...k->...kij", DELTA, df)
        )

    def ricci_tensor(self, x) -> np.ndarray:
        """Ric = -(ddf - df df) - (lap f + |df|^2) delta in three dimensions."""
        x = _points(x)
        self.check_domain(x)
        _, df, ddf = self.exponent(x)
        dfdf = np.einsum("...a,...b->...ab", df, df)
        lap = np.trace(ddf, axis1=-2, axis2=-1)
        grad2 = np.einsum("...a,...a->...", df, df)
        return -(ddf - dfdf) - (lap + grad2)[..., None, None] * DELTA


class SchwarzschildMetric(ConformallyFlatMetric):
    """Spatial Schwarzschild metric (1 + m/2r)^4 delta on R^3 minus the origin."""

    kind = MetricKind.SCHWARZSCHILD

    def __init__(self, mass: float):
        if mass <= 0:
            raise DomainError(f"Schwarzschild mass must be positive, got {mass}")
        self.mass = float(mass)

    @property
    def horizon_radius(self) -> float:
        return self.mass / 2.0

    def check_domain(self, x: np.ndarray) -> None:
        r = np.linalg.norm(x, axis=-1)
        if np.any(r <= 1e-12 * max(1.0, self.mass)):
            raise DomainError("Schwarzschild metric is singular at the origin")

    def exponent(self, x: np.ndarray):
        m = self.mass
        r = np.linalg.norm(x, axis=-1)
        u = 1.0 + m / (2.0 * r)
        du = -m * x / (2.0 * r[..., None] ** 3)
        outer = np.einsum("...a,...b->...ab", x, x)
        ddu = -(m / 2.0) * (
            DELTA / r[..., None, None] ** 3 - 3.0 * outer / r[..., None, None] ** 5
        )
        f = 2.0 * np.log(u)
        df = 2.0 * du / u[..., None]
        ddf = 2.0 * ddu / u[..., None, None] - 2.0 * np.einsum(
            "...a,...b->...ab", du, du
        ) / (u**2)[..., None, None]
        return f, df, ddf

    def __repr__(self) -> str:
        return f"SchwarzschildMetric(mass={self.mass})"


class ConstantCurvatureMetric(ConformallyFlatMetric):
    """Space form of curvature K in the conformal chart g = delta / (1 + K|x|^2/4)^2."""

    kind = MetricKind.CONSTANT_CURVATURE

    def __init__(self, curvature: float):
        self.curvature = float(curvature)

    @property
    def domain_radius(self) -> float:
        k = self.curvature
        return np.inf if k >= 0 else 2.0 / np.sqrt(-k)

    def check_domain(self, x: np.ndarray) -> None:
        r = np.linalg.norm(x, axis=-1)
        if np.any(r >= self.domain_radius):
            raise DomainError(
                f"Point at |x| = {float(r.max()):.6g} outside the chart radius {self.domain_radius:.6g}"
            )

    def exponent(self, x: np.ndarray):
        k = self.curvature
        r2 = np.einsum("...i,...i->...", x, x)
        q = 1.0 + 0.25 * k * r2
        f = -np.log(q)
        df = -0.5 * k * x / q[..., None]
        ddf = -0.5 * k * DELTA / q[..., None, None] + 0.25 * k**2 * np.einsum(
            "...a,...b->...ab", x, x
        ) / (q**2)[..., None, None]
        return f, df, ddf

    @property
    def is_flat(self) -> bool:
        return self.curvature == 0.0

    def __repr__(self) -> str:
        return f"ConstantCurvatureMetric(curvature={self.curvature})"


class ScaledMetric(MetricModel):
    """g_eps(y) = eps^-2 g pulled back by x = center + eps y, i.e. g(center + eps y) in y."""

    def __init__(self, base: MetricModel, epsilon: float, center=(0.0, 0.0, 0.0)):
        if epsilon <= 0:
            raise DomainError(f"epsilon must be positive, got {epsilon}")
        self.base = base
        self.epsilon = float(epsilon)
        self.center = _points(center)
        self.kind = base.kind

    def to_base(self, y) -> np.ndarray:
        return self.center + self.epsilon * _points(y)

    def from_base(self, x) -> np.ndarray:
        return (_points(x) - self.center) / self.epsilon

    def check_domain(self, y: np.ndarray) -> None:
        self.base.check_domain(self.to_base(y))

    def _sample(self, y: np.ndarray) -> MetricSample:
        s = self.base._sample(self.to_base(y))
        eps = self.epsilon
        return MetricSample(g=s.g, dg=eps * s.dg, ddg=eps**2 * s.ddg)

    def christoffel(self, y) -> np.ndarray:
        return self.epsilon * self.base.christoffel(self.to_base(y))

    def ricci_tensor(self, y) -> np.ndarray:
        return self.epsilon**2 * self.base.ricci_tensor(self.to_base(y))

    @property
    def is_flat(self) -> bool:
        return self.base.is_flat

    def __repr__(self) -> str:
        return f"ScaledMetric({self.base!r}, epsilon={self.epsilon}, center={self.center.tolist()})"


def metric_at(model: MetricModel, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(g, dg, christoffel) at x."""
    s = model.sample(x)
    return s.g, s.dg, christoffel_symbols(np.linalg.inv(s.g), s.dg)


def curvature_at(model: MetricModel, P) -> CurvatureData:
    """Curvature data at P in the Gram-Schmidt orthonormal coordinate frame."""
    P = _points(P)
    if P.shape != (3,):
        raise DomainError(f"curvature_at expects a single point, got shape {P.shape}")
    if model.is_flat:
        return CurvatureData.flat()
    g = model.sample(P).g
    ric = model.ricci_tensor(P)
    return CurvatureData.from_ricci(to_frame(ric, orthonormal_frame(g)))
