"""Real Fourier Galerkin basis on a periodic surface grid, orthonormal in L^2(dsigma)."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import fft

from willmore_tori.exceptions import GridError
from willmore_tori.surface_kernel.grid import SurfaceGrid


@dataclass(frozen=True)
class FourierBasis:
    """
    Modes cos(m s + n t), sin(m s + n t) with |m|, |n| <= degree, orthonormal in ds dt.

    Index 0 is the constant; the rest come in (cos, sin) pairs ordered by
    max(|m|, |n|) so lower truncations are prefixes.
    """

    degree: int

    def __post_init__(self):
        if self.degree < 1:
            raise GridError(f"Fourier degree must be >= 1, got {self.degree}")

    @cached_property
    def modes(self) -> tuple[tuple[int, int, int], ...]:
        d = self.degree
        pairs = [(m, n) for m in range(0, d + 1) for n in range(-d, d + 1) if m > 0 or n > 0]
        pairs.sort(key=lambda mn: (max(abs(mn[0]), abs(mn[1])), mn[0], mn[1]))
        out = [(0, 0, 0)]
        for m, n in pairs:
            out += [(m, n, 0), (m, n, 1)]
        return tuple(out)

    @property
    def size(self) -> int:
        return len(self.modes)

    def evaluate(self, s: np.ndarray, t: np.ndarray, indices=None) -> np.ndarray:
        """Mode values on the tensor grid (s_i, t_j), shape (n_s, n_t, k)."""
        indices = range(self.size) if indices is None else indices
        ss, tt = np.meshgrid(s, t, indexing="ij")
        columns = []
        for k in indices:
            m, n, parity = self.modes[k]
            if m == 0 and n == 0:
                columns.append(np.full(ss.shape, 1.0 / (2.0 * np.pi)))
                continue
            phase = m * ss + n * tt
            wave = np.cos(phase) if parity == 0 else np.sin(phase)
            columns.append(wave / (np.sqrt(2.0) * np.pi))
        return np.stack(columns, axis=-1)


@dataclass(frozen=True)
class GalerkinBasis:
    """psi_k = f_k / sqrt(w), w the area density in the grid parameters."""

    fourier: FourierBasis
    grid: SurfaceGrid = field(repr=False)
    dsigma: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.grid.periodic:
            raise GridError("Galerkin basis needs a doubly periodic grid")
        limit = min(self.grid.shape) // 2
        if 2 * self.fourier.degree >= limit:
            raise GridError(
                f"Degree {self.fourier.degree} aliases on a {self.grid.shape} grid; "
                f"need 2 * degree < {limit}"
            )

    @property
    def size(self) -> int:
        return self.fourier.size

    @cached_property
    def root_density(self) -> np.ndarray:
        return np.sqrt(self.dsigma)

    @cached_property
    def _frequency_index(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        n0, n1 = self.grid.shape
        modes = np.array(self.fourier.modes)
        return np.mod(modes[:, 0], n0), np.mod(modes[:, 1], n1), modes[:, 2]

    def functions(self, indices=None) -> np.ndarray:
        """psi_k at the nodes, shape (n0, n1, k)."""
        s = self.grid.axes[0].nodes
        t = self.grid.axes[1].nodes
        return self.fourier.evaluate(s, t, indices) / self.root_density[..., None]

    def project(self, values: np.ndarray) -> np.ndarray:
        """
        c_k = integral of psi_k v dsigma for v of shape (n0, n1) or (n0, n1, b).

        Evaluated with one FFT over the grid; exact for the discrete inner product.
        """
        values = np.asarray(values, dtype=float)
        squeeze = values.ndim == 2
        if squeeze:
            values = values[..., None]
        u = values * (self.root_density * self.grid.weights)[..., None]
        spectrum = fft.fft2(u, axes=(0, 1))
        i0, i1, parity = self._frequency_index
        picked = spectrum[i0, i1, :]
        coeffs = np.where(parity[:, None] == 0, picked.real, -picked.imag)
        coeffs[1:] /= np.sqrt(2.0) * np.pi
        coeffs[0] /= 2.0 * np.pi
        return coeffs[:, 0] if squeeze else coeffs

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        """sum_k c_k psi_k at the nodes."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.size,):
            raise GridError(f"Expected {self.size} coefficients, got {coeffs.shape}")
        return self.functions() @ coeffs

    def gram_error(self) -> float:
        """max |<psi_k, psi_l>_dsigma - delta_kl|."""
        gram = self.project(self.functions())
        return float(np.abs(gram - np.eye(self.size)).max())
