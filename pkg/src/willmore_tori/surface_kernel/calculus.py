"""Intrinsic calculus on a sampled surface: gradient, Hessian, Laplace-Beltrami."""

from functools import cached_property

import numpy as np

from willmore_tori.ambient_metrics.curvature import christoffel_symbols
from willmore_tori.surface_kernel.forms import FormsField
from willmore_tori.surface_kernel.grid import ScalarField, field_values


class SurfaceCalculus:
    """Covariant derivatives of scalar fields w.r.t. the induced metric of ``forms``."""

    def __init__(self, forms: FormsField):
        self.forms = forms
        self.grid = forms.grid

    @cached_property
    def christoffel(self) -> np.ndarray:
        """Christoffel symbols of gbar, shape (n0, n1, k, i, j)."""
        gbar = self.forms.gbar
        dgbar = np.stack([self.grid.diff(gbar, 0), self.grid.diff(gbar, 1)], axis=-3)
        return christoffel_symbols(self.forms.gbar_inv, dgbar)

    def differential(self, f) -> np.ndarray:
        """(d_0 f, d_1 f), shape (n0, n1, 2)."""
        values = field_values(f, self.grid)
        return np.stack([self.grid.diff(values, 0), self.grid.diff(values, 1)], axis=-1)

    def gradient(self, f) -> np.ndarray:
        """Contravariant gradient gbar^ij d_j f."""
        return np.einsum("...ij,...j->...i", self.forms.gbar_inv, self.differential(f))

    def hessian(self, f) -> np.ndarray:
        """Covariant Hessian d_ij f - Gamma^k_ij d_k f."""
        values = field_values(f, self.grid)
        d0 = self.grid.diff(values, 0)
        d1 = self.grid.diff(values, 1)
        d00 = self.grid.diff(values, 0, order=2)
        d11 = self.grid.diff(values, 1, order=2)
        d01 = self.grid.diff(d0, 1)
        second = np.stack([np.stack([d00, d01], axis=-1), np.stack([d01, d11], axis=-1)], axis=-2)
        first = np.stack([d0, d1], axis=-1)
        return second - np.einsum("...kij,...k->...ij", self.christoffel, first)

    def laplacian(self, f) -> np.ndarray:
        return np.einsum("...ij,...ij->...", self.forms.gbar_inv, self.hessian(f))

    def inner(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Full contraction <S, T> of two covariant 2-tensors."""
        gi = self.forms.gbar_inv
        return np.einsum("...ik,...jl,...ij,...kl->...", gi, gi, s, t)

    def bilinear(self, s: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """S(u, v) for contravariant u, v."""
        return np.einsum("...ij,...i,...j->...", s, u, v)

    def norm2(self, u: np.ndarray) -> np.ndarray:
        """|u|^2 for a contravariant vector."""
        return np.einsum("...ij,...i,...j->...", self.forms.gbar, u, u)


def laplace_beltrami(field: ScalarField, forms: FormsField) -> ScalarField:
    return ScalarField(SurfaceCalculus(forms).laplacian(field.values), field.grid)


def surface_gradient(field: ScalarField, forms: FormsField) -> np.ndarray:
    return SurfaceCalculus(forms).gradient(field.values)


def surface_hessian(field: ScalarField, forms: FormsField) -> np.ndarray:
    return SurfaceCalculus(forms).hessian(field.values)
