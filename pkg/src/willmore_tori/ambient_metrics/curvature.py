"""Curvature data at a point and curvature assembly from metric derivatives.

Index conventions (all arrays carry leading batch axes ``...``):

* ``g[..., a, b]``            metric components
* ``dg[..., c, a, b]``        = d_c g_ab
* ``ddg[..., c, d, a, b]``    = d_c d_d g_ab
* ``gamma[..., k, i, j]``     = Gamma^k_ij
* ``riem[a, m, n, b]``        = R_{amnb}, with Ric_mn = sum_a R_{aman} and
  sectional curvature K(e_i, e_j) = R_{ijij}; the second-order normal
  coordinate expansion reads g_ab = delta_ab + 1/3 R_{amnb} x^m x^n.
"""

from dataclasses import dataclass, field

import numpy as np

from willmore_tori.exceptions import DomainError
from willmore_tori.logging_config import get_logger

logger = get_logger(__name__)

DELTA = np.eye(3)


def riemann_from_ricci(ric: np.ndarray) -> np.ndarray:
    """Rebuild R_{amnb} from a symmetric 3x3 Ricci tensor (Weyl part vanishes in 3D)."""
    ric = np.asarray(ric, dtype=float)
    sc = float(np.trace(ric))
    d = DELTA
    return (
        np.einsum("an,mb->amnb", ric, d)
        + np.einsum("mb,an->amnb", ric, d)
        - np.einsum("ab,mn->amnb", ric, d)
        - np.einsum("mn,ab->amnb", ric, d)
        - 0.5 * sc * (np.einsum("an,mb->amnb", d, d) - np.einsum("ab,mn->amnb", d, d))
    )


@dataclass(frozen=True)
class CurvatureData:
    """Ricci, scalar and Riemann curvature at a point, in an orthonormal frame."""

    ric: np.ndarray
    sc: float
    riem: np.ndarray = field(repr=False)

    @classmethod
    def from_ricci(cls, ric: np.ndarray) -> "CurvatureData":
        ric = np.asarray(ric, dtype=float)
        if ric.shape != (3, 3):
            raise DomainError(f"Ricci tensor must be 3x3, got shape {ric.shape}")
        if not np.allclose(ric, ric.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(ric).max())):
            raise DomainError("Ricci tensor must be symmetric")
        ric = 0.5 * (ric + ric.T)
        return cls(ric=ric, sc=float(np.trace(ric)), riem=riemann_from_ricci(ric))

    @classmethod
    def flat(cls) -> "CurvatureData":
        return cls.from_ricci(np.zeros((3, 3)))

    def rotate(self, rotation: np.ndarray) -> "CurvatureData":
        """Express the data in the basis rotated by ``rotation`` (Q ric Q^T)."""
        q = np.asarray(rotation, dtype=float)
        return CurvatureData.from_ricci(q @ self.ric @ q.T)

    def ricci(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.asarray(u) @ self.ric @ np.asarray(v))

    def sectional(self, u: np.ndarray, v: np.ndarray) -> float:
        """Sectional curvature of the plane spanned by u and v."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        num = np.einsum("amnb,a,m,n,b->", self.riem, u, v, u, v)
        den = (u @ u) * (v @ v) - (u @ v) ** 2
        if den <= 0.0:
            raise DomainError("Sectional curvature needs two independent vectors")
        return float(num / den)

    def sectional_orthogonal_to(self, n: np.ndarray) -> float:
        """Sectional curvature of the plane orthogonal to n."""
        n = np.asarray(n, dtype=float)
        n = n / np.linalg.norm(n)
        trial = DELTA[int(np.argmin(np.abs(n)))]
        e1 = trial - (trial @ n) * n
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(n, e1)
        return self.sectional(e1, e2)

    def eigen_extremes(self) -> tuple[float, float, np.ndarray, np.ndarray]:
        """(lambda_min, lambda_max, v_min, v_max) of the Ricci form."""
        w, v = np.linalg.eigh(self.ric)
        return float(w[0]), float(w[-1]), v[:, 0], v[:, -1]

    @property
    def norm(self) -> float:
        """Frobenius norm of the Riemann tensor."""
        return float(np.sqrt(np.sum(self.riem**2)))


def synthetic_curvature(ric_diag, basis_rotation: np.ndarray | None = None) -> CurvatureData:
    """Curvature data with prescribed Ricci eigenvalues in a rotated basis."""
    diag = np.asarray(ric_diag, dtype=float)
    if diag.shape != (3,):
        raise DomainError(f"ric_diag needs 3 entries, got {diag.shape}")
    data = CurvatureData.from_ricci(np.diag(diag))
    if basis_rotation is not None:
        data = data.rotate(basis_rotation)
    return data


def h_tensor(curv: CurvatureData, x: np.ndarray) -> np.ndarray:
    """Quadratic metric perturbation h_ab(x) = 1/3 R_{amnb} x^m x^n."""
    x = np.asarray(x, dtype=float)
    ric, sc = curv.ric, curv.sc
    r2 = np.einsum("...i,...i->...", x, x)
    rx = x @ ric
    xrx = np.einsum("...i,...i->...", x, rx)
    outer = np.einsum("...a,...b->...ab", x, x)
    mixed = np.einsum("...a,...b->...ab", x, rx)
    return (
        (sc / 6.0) * (r2[..., None, None] * DELTA - outer)
        - xrx[..., None, None] * DELTA / 3.0
        - r2[..., None, None] * ric / 3.0
        + (mixed + np.swapaxes(mixed, -1, -2)) / 3.0
    )


def h_gradient(curv: CurvatureData, x: np.ndarray) -> np.ndarray:
    """d_c h_ab(x), shape (..., c, a, b)."""
    x = np.asarray(x, dtype=float)
    ric, sc = curv.ric, curv.sc
    d = DELTA
    rx = x @ ric
    term_sc = (sc / 6.0) * (
        2.0 * np.einsum("...c,ab->...cab", x, d)
        - np.einsum("ac,...b->...cab", d, x)
        - np.einsum("...a,bc->...cab", x, d)
    )
    term_ric = (
        -(2.0 / 3.0) * np.einsum("ab,...c->...cab", d, rx)
        - (2.0 / 3.0) * np.einsum("...c,ab->...cab", x, ric)
        + (
            np.einsum("ac,...b->...cab", d, rx)
            + np.einsum("...a,bc->...cab", x, ric)
            + np.einsum("bc,...a->...cab", d, rx)
            + np.einsum("...b,ac->...cab", x, ric)
        )
        / 3.0
    )
    return term_sc + term_ric


def h_hessian(curv: CurvatureData) -> np.ndarray:
    """d_c d_d h_ab (constant), shape (c, d, a, b)."""
    ric, sc = curv.ric, curv.sc
    d = DELTA
    return (sc / 6.0) * (
        2.0 * np.einsum("cd,ab->cdab", d, d)
        - np.einsum("ac,bd->cdab", d, d)
        - np.einsum("ad,bc->cdab", d, d)
    ) + (
        -(2.0 / 3.0) * np.einsum("ab,cd->cdab", d, ric)
        - (2.0 / 3.0) * np.einsum("cd,ab->cdab", d, ric)
        + (
            np.einsum("ac,bd->cdab", d, ric)
            + np.einsum("ad,bc->cdab", d, ric)
            + np.einsum("bc,ad->cdab", d, ric)
            + np.einsum("bd,ac->cdab", d, ric)
        )
        / 3.0
    )


def normal_derivative_h(curv: CurvatureData, x: np.ndarray, n: np.ndarray) -> np.ndarray:
    """(d h / d n)_ab at x."""
    return np.einsum("...c,...cab->...ab", np.asarray(n, dtype=float), h_gradient(curv, x))


def h_bounds(curv: CurvatureData, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Explicit bounds (|h| <= C0 |y|^2, |dh| <= C1 |y|) of the truncated expansion."""
    r = np.linalg.norm(np.asarray(y, dtype=float), axis=-1)
    c = curv.norm
    return c * r**2 / 3.0, 2.0 * c * r / 3.0


def christoffel_symbols(g_inv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)."""
    # lowered[..., i, j, l] = 1/2 (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
    lowered = 0.5 * (dg + np.swapaxes(dg, -3, -2) - np.moveaxis(dg, -3, -1))
    return np.einsum("...kl,...ijl->...kij", g_inv, lowered)


def ricci_from_metric(g: np.ndarray, dg: np.ndarray, ddg: np.ndarray) -> np.ndarray:
    """Coordinate Ricci tensor Ric_bd = R^a_{bad} from metric derivatives."""
    g_inv = np.linalg.inv(g)
    # dginv[..., c, a, l] = d_c g^al
    dginv = -np.einsum("...ap,...cpq,...ql->...cal", g_inv, dg, g_inv)
    gamma = christoffel_symbols(g_inv, dg)
    # s[..., l, d, b] = d_d g_bl + d_b g_dl - d_l g_db
    s = (
        np.einsum("...dbl->...ldb", dg)
        + np.einsum("...bdl->...ldb", dg)
        - dg
    )
    # ds[..., c, l, d, b] = d_c of s
    ds = (
        np.einsum("...cdbl->...cldb", ddg)
        + np.einsum("...cbdl->...cldb", ddg)
        - ddg
    )
    # dgamma[..., c, a, d, b] = d_c Gamma^a_db
    dgamma = 0.5 * (
        np.einsum("...cal,...ldb->...cadb", dginv, s)
        + np.einsum("...al,...cldb->...cadb", g_inv, ds)
    )
    # Ric_bd = d_a Gamma^a_db - d_d Gamma^a_ab + Gamma^a_ae Gamma^e_db - Gamma^a_de Gamma^e_ab
    term1 = np.einsum("...aadb->...bd", dgamma)
    term2 = np.einsum("...daab->...bd", dgamma)
    trace_gamma = np.einsum("...aae->...e", gamma)
    term3 = np.einsum("...e,...edb->...bd", trace_gamma, gamma)
    term4 = np.einsum("...ade,...eab->...bd", gamma, gamma)
    ric = term1 - term2 + term3 - term4
    return 0.5 * (ric + np.swapaxes(ric, -1, -2))


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Gram-Schmidt of the coordinate basis w.r.t. g; columns are frame vectors."""
    lower = np.linalg.cholesky(g)
    return np.swapaxes(np.linalg.inv(lower), -1, -2)


def to_frame(tensor: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """Components T(E_i, E_j) of a covariant 2-tensor in a frame E."""
    return np.einsum("...ai,...ab,...bj->...ij", frame, tensor, frame)
