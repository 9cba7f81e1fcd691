"""Pointwise functionals built from jets: norms, dilatations, Heinz ratio,
invariant Laplacian and gradient, Wu ratio."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import InvalidArgumentError, SingularDerivativeError
from .maps import MapSpec, jet

DET_RELATIVE_FLOOR = 1e-14
HEINZ_SIGN_TOL = -1e-9


def _finite_matrix(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim < 2:
        raise InvalidArgumentError("expected a matrix")
    if not np.all(np.isfinite(A)):
        raise InvalidArgumentError("matrix has non-finite entries")
    return A


def op_norm(A) -> float | np.ndarray:
    """Largest singular value (batched over leading axes)."""
    A = _finite_matrix(A)
    s = np.linalg.svd(A, compute_uv=False)
    out = s[..., 0]
    return float(out) if np.ndim(out) == 0 else out


def frob_norm(A) -> float | np.ndarray:
    A = _finite_matrix(A)
    out = np.sqrt(np.sum(np.abs(A) ** 2, axis=(-2, -1)))
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class DilatationSample:
    """Local dilatation ``|f'(x)|^d / J_f(x)`` at one point.

    ``local_K`` is ``inf`` (and ``degenerate`` set) when the Jacobian
    determinant is not positive relative to ``op_norm**d``.
    """

    point: np.ndarray
    local_K: float
    jacobian_det: float
    op_norm: float
    degenerate: bool = False


def dilatation_from_jacobian(J: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched ``(local_K, det, op_norm)`` for square real Jacobians."""
    J = np.asarray(J, dtype=float)
    d = J.shape[-1]
    if J.shape[-2] != d:
        raise InvalidArgumentError("dilatation needs a square Jacobian")
    op = np.linalg.svd(J, compute_uv=False)[..., 0]
    det = np.linalg.det(J)
    with np.errstate(divide="ignore", invalid="ignore"):
        K = op ** d / det
    K = np.where(det > DET_RELATIVE_FLOOR * op ** d, K, np.inf)
    # a vanishing derivative satisfies |f'|^d <= K J_f for every K >= 1
    K = np.where(op == 0.0, 1.0, K)
    return K, det, op


def local_dilatation(f: MapSpec, x) -> DilatationSample:
    x = np.asarray(x, dtype=float)
    jd = jet(f, x)
    K, det, op = dilatation_from_jacobian(jd.jacobian_real)
    return DilatationSample(x, float(K), float(det), float(op), bool(np.isinf(K)))


def ball_sample(dim: int, n_points: int = 500, radius: float = 0.95, seed: int = 0x5EED) -> np.ndarray:
    """Quasi-random points in the closed ball of given radius.

    Scrambled Halton points in the cube are mapped to the ball through
    ``(r, direction)`` with ``r = radius * u**(1/dim)`` and a Gaussian
    direction obtained by the inverse normal CDF, so the sample is
    uniform in volume and reproducible from ``seed``.
    """
    eng = qmc.Halton(d=dim + 1, scramble=True, seed=seed)
    u = eng.random(n_points)
    u = np.clip(u, 1e-12, 1 - 1e-12)
    g = ndtri(u[:, 1:])
    g /= np.linalg.norm(g, axis=1)[:, None]
    rad = radius * u[:, 0] ** (1.0 / dim)
    return rad[:, None] * g


@dataclass
class EmpiricalK:
    """Sampled maximum of the local dilatation, kept with its sample."""

    K_hat: float
    points: np.ndarray
    local_K: np.ndarray
    radius: float
    seed: int


def empirical_K(f: MapSpec, n_points: int = 500, radius: float = 0.95, seed: int = 0x5EED) -> EmpiricalK:
    if f.domain_dim != f.codomain_dim:
        raise InvalidArgumentError("dilatation needs equal domain and codomain dimensions")
    pts = ball_sample(f.domain_dim, n_points, radius, seed)
    jd = jet(f, pts)
    K, _, _ = dilatation_from_jacobian(jd.jacobian_real)
    return EmpiricalK(float(np.max(K)), pts, K, radius, seed)


def second_dilatation(f: MapSpec, z) -> tuple[np.ndarray, float]:
    """Solve ``conj(Dbar f) = omega Df`` at a real point ``z``.

    Returns ``(omega, ||omega||)`` with the operator norm.
    """
    if not f.is_complex:
        raise InvalidArgumentError("second dilatation needs a complex map")
    jd = jet(f, z)
    single = jd.Df.ndim == 2
    Df = jd.Df[None] if single else jd.Df
    Dbar = jd.Dbar[None] if single else jd.Dbar
    s = np.linalg.svd(Df, compute_uv=False)
    if np.any(s[..., -1] <= 1e-14 * np.maximum(s[..., 0], 1e-300)):
        raise SingularDerivativeError(f"Df is singular at {np.asarray(z).tolist()}")
    # omega Df = conj(Dbar)  <=>  Df^T omega^T = conj(Dbar)^T
    omega = np.swapaxes(np.linalg.solve(np.swapaxes(Df, -1, -2),
                                        np.swapaxes(np.conj(Dbar), -1, -2)), -1, -2)
    norm = op_norm(omega)
    if single:
        return omega[0], float(norm[0])
    return omega, norm


@dataclass
class HeinzRatio:
    ratio: float
    sign_ok: bool
    indeterminate: bool
    numerator: float
    denominator: float


def heinz_ratio(f: MapSpec, x, tol: float = HEINZ_SIGN_TOL) -> HeinzRatio:
    """``(sum_j f_j Lap f_j) / (sum_j |grad f_j|^2)`` at one point."""
    jd = jet(f, x)
    num = float(np.sum(jd.value * jd.laplacians))
    den = float(np.sum(jd.jacobian_real ** 2))
    sign_ok = num >= tol
    if den <= 1e-300:
        return HeinzRatio(float("nan"), sign_ok, True, num, den)
    return HeinzRatio(num / den, sign_ok, False, num, den)


def invariant_laplacian(f: MapSpec, x) -> np.ndarray:
    """``(1-|x|^2)^2 Lap f + 2(n-2)(1-|x|^2) <grad f, x>`` per component."""
    jd = jet(f, x)
    x = np.asarray(x, dtype=float)
    n = f.domain_dim
    s = 1.0 - np.sum(x * x, axis=-1)
    radial = np.einsum("...kj,...j->...k", jd.jacobian_real, x)
    s = np.asarray(s)[..., None]
    return s ** 2 * jd.laplacians + 2.0 * (n - 2) * s * radial


def invariant_gradient(f: MapSpec, x) -> np.ndarray:
    """``(1-|x|^2) grad f_k`` for each component (rows)."""
    jd = jet(f, x)
    x = np.asarray(x, dtype=float)
    s = 1.0 - np.sum(x * x, axis=-1)
    return np.asarray(s)[..., None, None] * jd.jacobian_real


def wu_ratio_matrix(Df: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched ``||Df|| / |det Df|^{1/n}``; second output flags ``det = 0``."""
    Df = np.asarray(Df)
    n = Df.shape[-1]
    op = np.linalg.svd(Df, compute_uv=False)[..., 0]
    det = np.abs(np.linalg.det(Df))
    flag = det <= 0.0
    with np.errstate(divide="ignore"):
        w = np.where(flag, np.inf, op / np.where(flag, 1.0, det) ** (1.0 / n))
    return w, flag


def wu_ratio(f: MapSpec, z) -> float:
    """Wu ratio of the holomorphic derivative ``Df`` at a real point.

    Returns ``inf`` when ``det Df = 0``.
    """
    if not f.is_complex:
        raise InvalidArgumentError("wu_ratio needs a complex map")
    jd = jet(f, z)
    w, _ = wu_ratio_matrix(jd.Df)
    return float(w) if np.ndim(w) == 0 else w
