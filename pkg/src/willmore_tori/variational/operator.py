"""Linearized Willmore operator: flat L0~, its curved extension and the Galerkin matrix."""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from willmore_tori.ambient_metrics.models import EuclideanMetric, MetricModel
from willmore_tori.exceptions import DomainError
from willmore_tori.logging_config import get_logger
from willmore_tori.mobius_family.family import MobiusParam, ResolutionReport, family_surface
from willmore_tori.mobius_family.jacobi import JacobiBasis, jacobi_fields
from willmore_tori.settings import numerics
from willmore_tori.surface_kernel.calculus import SurfaceCalculus
from willmore_tori.surface_kernel.forms import FormsField, fundamental_forms
from willmore_tori.surface_kernel.grid import SurfaceGrid
from willmore_tori.variational.first_variation import first_variation_density, normal_graph
from willmore_tori.variational.galerkin import FourierBasis, GalerkinBasis

logger = get_logger(__name__)


class _Derivatives:
    """First and second parameter derivatives of a batch of fields (n0, n1, b)."""

    def __init__(self, grid: SurfaceGrid, values: np.ndarray):
        self.values = values
        self.d0 = grid.diff(values, 0)
        self.d1 = grid.diff(values, 1)
        self.d00 = grid.diff(values, 0, order=2)
        self.d11 = grid.diff(values, 1, order=2)
        self.d01 = grid.diff(self.d0, 1)


@dataclass
class _SecondOrder:
    """a00 v_00 + a01 v_01 + a11 v_11 + b0 v_0 + b1 v_1 + c v with per-node coefficients."""

    a00: np.ndarray
    a01: np.ndarray
    a11: np.ndarray
    b0: np.ndarray
    b1: np.ndarray
    c: np.ndarray

    @classmethod
    def contraction(cls, tensor: np.ndarray, christoffel: np.ndarray) -> "_SecondOrder":
        """v -> T^ij (Hess v)_ij for a symmetric contravariant T."""
        b = -np.einsum("...ij,...kij->...k", tensor, christoffel)
        zero = np.zeros(tensor.shape[:-2])
        return cls(tensor[..., 0, 0], 2.0 * tensor[..., 0, 1], tensor[..., 1, 1], b[..., 0], b[..., 1], zero)

    def __add__(self, other: "_SecondOrder") -> "_SecondOrder":
        return _SecondOrder(*(a + b for a, b in zip(self._parts(), other._parts())))

    def scaled(self, factor) -> "_SecondOrder":
        return _SecondOrder(*(factor * a for a in self._parts()))

    def _parts(self):
        return (self.a00, self.a01, self.a11, self.b0, self.b1, self.c)

    def __call__(self, d: _Derivatives) -> np.ndarray:
        x = (..., None)
        return (
            self.a00[x] * d.d00
            + self.a01[x] * d.d01
            + self.a11[x] * d.d11
            + self.b0[x] * d.d0
            + self.b1[x] * d.d1
            + self.c[x] * d.values
        )


class JacobiOperator:
    """
    L~ phi = L(L phi) + H^2/2 L phi + 2H <Aring, Hess phi> + 2 Aring(grad phi, grad H)
             + phi (|grad H|^2 + H lap H + 2 <Hess H, Aring> + 2 H^2 |Aring|^2) + curvature terms,

    with L = -lap - |A|^2 - Ric(n, n). In Euclidean space the curvature terms
    vanish and this is the flat operator L0~, whose kernel at a Willmore torus
    contains the Jacobi fields.
    """

    def __init__(self, forms: FormsField, metric: Optional[MetricModel] = None, ric_step: float = 1e-4):
        self.forms = forms
        self.grid = forms.grid
        self.metric = metric or forms.metric
        self.calc = SurfaceCalculus(forms)
        self.ric_step = ric_step

    @cached_property
    def _aring_up(self) -> np.ndarray:
        gi = self.forms.gbar_inv
        return np.einsum("...ik,...kl,...lj->...ij", gi, self.forms.Aring, gi)

    @cached_property
    def _ricci(self) -> Optional[np.ndarray]:
        if self.metric.is_flat:
            return None
        return self.metric.ricci_tensor(self.grid.positions)

    def _normal_ricci(self) -> np.ndarray:
        if self._ricci is None:
            return np.zeros(self.grid.shape)
        n = self.forms.n
        return np.einsum("...a,...ab,...b->...", n, self._ricci, n)

    def _normal_ricci_derivative(self) -> np.ndarray:
        """(nabla_n Ric)(n, n), Ric differentiated by centered differences."""
        x = self.grid.positions
        n = self.forms.n
        gamma = self.metric.christoffel(x)
        dric = np.stack(
            [
                (
                    self.metric.ricci_tensor(x + self.ric_step * e)
                    - self.metric.ricci_tensor(x - self.ric_step * e)
                )
                / (2.0 * self.ric_step)
                for e in np.eye(3)
            ],
            axis=-3,
        )
        cov = (
            dric
            - np.einsum("...dca,...db->...cab", gamma, self._ricci)
            - np.einsum("...dcb,...ad->...cab", gamma, self._ricci)
        )
        return np.einsum("...c,...a,...b,...cab->...", n, n, n, cov)

    @cached_property
    def _first(self) -> _SecondOrder:
        """L = -lap - |A|^2 - Ric(n, n)."""
        op = _SecondOrder.contraction(self.forms.gbar_inv, self.calc.christoffel).scaled(-1.0)
        op.c = -self.forms.A_norm2 - self._normal_ricci()
        return op

    @cached_property
    def _rest(self) -> _SecondOrder:
        forms = self.forms
        H = forms.H
        op = _SecondOrder.contraction(2.0 * H[..., None, None] * self._aring_up, self.calc.christoffel)

        grad_h = self.calc.gradient(H)
        hess_h = self.calc.hessian(H)
        lap_h = np.einsum("...ij,...ij->...", forms.gbar_inv, hess_h)
        # covector Aring(grad H, .) raised by gbar^-1
        drift = np.einsum("...ki,...ij,...j->...k", forms.gbar_inv, forms.Aring, grad_h)
        b = 2.0 * drift
        potential = (
            self.calc.norm2(grad_h)
            + H * lap_h
            + 2.0 * self.calc.inner(hess_h, forms.Aring)
            + 2.0 * H**2 * forms.Aring_norm2
        )

        if self._ricci is not None:
            ric = self._ricci
            tangents = forms.tangents
            # varpi_i = Ric(n, X_i), tangential part of Ric(n, .)
            varpi = np.einsum("...a,...ab,...ib->...i", forms.n, ric, tangents)
            varpi_up = np.einsum("...ij,...j->...i", forms.gbar_inv, varpi)
            ric_t = np.einsum("...ia,...ab,...jb->...ij", tangents, ric, tangents)
            b = b + 2.0 * H[..., None] * varpi_up
            potential = (
                potential
                + 2.0 * np.einsum("...i,...i->...", varpi_up, self.calc.differential(H))
                + 2.0 * H * np.einsum("...ij,...ij->...", self._aring_up, ric_t)
                - H * self._normal_ricci_derivative()
            )

        op.b0 = op.b0 + b[..., 0]
        op.b1 = op.b1 + b[..., 1]
        op.c = potential
        return op

    def apply(self, values: np.ndarray) -> np.ndarray:
        """L~ applied to per-node fields of shape (n0, n1) or (n0, n1, b)."""
        values = np.asarray(values, dtype=float)
        squeeze = values.ndim == 2
        if squeeze:
            values = values[..., None]
        d = _Derivatives(self.grid, values)
        first = self._first(d)
        half_h2 = (0.5 * self.forms.H**2)[..., None]
        out = self._first(_Derivatives(self.grid, first)) + half_h2 * first + self._rest(d)
        return out[..., 0] if squeeze else out


def flat_operator(forms: FormsField) -> JacobiOperator:
    if not isinstance(forms.metric, EuclideanMetric):
        forms = fundamental_forms(forms.grid, EuclideanMetric())
    return JacobiOperator(forms)


def curved_operator_density(forms: FormsField, phi, ric_step: float = 1e-4) -> np.ndarray:
    """L~ phi in the ambient metric of ``forms``."""
    return JacobiOperator(forms, ric_step=ric_step).apply(np.asarray(getattr(phi, "values", phi)))


def galerkin_matrix(operator: JacobiOperator, basis: GalerkinBasis, chunk: int = 64) -> np.ndarray:
    """M_kl = integral of psi_k (L~ psi_l) dsigma, assembled in column blocks."""
    size = basis.size
    matrix = np.empty((size, size))
    for start in range(0, size, chunk):
        stop = min(size, start + chunk)
        psi = basis.functions(range(start, stop))
        matrix[:, start:stop] = basis.project(operator.apply(psi))
    return matrix


@dataclass(frozen=True)
class OperatorMatrix:
    """Galerkin matrix of L0~ on a family torus."""

    matrix: np.ndarray = field(repr=False)
    param: MobiusParam
    truncation: int
    resolution: int
    asymmetry: float
    gram_error: float

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def symmetric(self) -> np.ndarray:
        return 0.5 * (self.matrix + self.matrix.T)


def quadrature_resolution(report: ResolutionReport, truncation: int) -> int:
    base = numerics().spectral.quadrature_resolution
    n = max(base, report.n_phi + 4 * truncation)
    return n + (n % 2)


def assemble_flat_operator(
    param: MobiusParam,
    truncation: Optional[int] = None,
    resolution: Optional[int] = None,
) -> OperatorMatrix:
    """
    Symmetric Galerkin matrix of L0~ at R T_omega(torus) on modes of degree <= truncation.

    Away from omega = 0 the Jacobi fields are no longer low-degree modes; the
    eight-dimensional near-kernel at |omega| = 0.4 needs truncation 20.

    Raises:
        DomainError: if the distortion cap was hit for this omega.
    """
    cfg = numerics().spectral
    truncation = truncation or cfg.truncation
    if resolution is None:
        grid, report = family_surface(param)
        resolution = quadrature_resolution(report, truncation)
    grid, report = family_surface(param, resolution)
    if report.capped:
        raise DomainError(f"Distortion cap exceeded at |omega|={param.modulus:.6f}")

    forms = fundamental_forms(grid, EuclideanMetric())
    basis = GalerkinBasis(FourierBasis(truncation), grid, forms.dsigma)
    matrix = galerkin_matrix(JacobiOperator(forms), basis)
    asymmetry = float(np.linalg.norm(matrix - matrix.T) / np.linalg.norm(matrix))
    gram = basis.gram_error() if basis.size <= 1024 else float("nan")
    logger.info(
        f"Assembled L0~ of size {basis.size} at omega={param.omega} on {grid.shape} nodes",
        extra={"event": "operator_assembled", "size": basis.size, "asymmetry": asymmetry},
    )
    return OperatorMatrix(matrix, param, truncation, grid.n_phi, asymmetry, gram)


def jacobi_residuals(
    param: MobiusParam, resolution: Optional[int] = None, basis: Optional[JacobiBasis] = None
) -> dict[str, float]:
    """||L0~ Z|| / ||Z|| in L^2(dsigma) for each nontrivial Jacobi field."""
    grid, _ = family_surface(param, resolution)
    forms = fundamental_forms(grid, EuclideanMetric())
    basis = basis or jacobi_fields(param, grid)
    operator = JacobiOperator(forms)
    out = {}
    for label, fld, trivial in zip(basis.labels, basis.fields, basis.trivial):
        if trivial:
            continue
        image = operator.apply(fld.values)
        out[label] = float(
            np.sqrt(np.sum(image**2 * forms.measure) / np.sum(fld.values**2 * forms.measure))
        )
    return out


def linearization_discrepancy(grid: SurfaceGrid, metric: MetricModel, phi, step: float = 1e-4) -> dict[str, float]:
    """
    Relative L^2 distance between the centered difference of W' along X + t phi n
    and, respectively, the curved L~ and the flat L0~ applied to phi.
    """
    forms = fundamental_forms(grid, metric)
    values = np.asarray(getattr(phi, "values", phi), dtype=float)
    plus = first_variation_density(fundamental_forms(normal_graph(grid, forms, step * values), metric))
    minus = first_variation_density(fundamental_forms(normal_graph(grid, forms, -step * values), metric))
    derivative = (plus.values - minus.values) / (2.0 * step)

    def distance(other: np.ndarray) -> float:
        return float(
            np.sqrt(np.sum((derivative - other) ** 2 * forms.measure) / np.sum(derivative**2 * forms.measure))
        )

    return {
        "curved": distance(JacobiOperator(forms).apply(values)),
        "flat": distance(flat_operator(forms).apply(values)),
    }
