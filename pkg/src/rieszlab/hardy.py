"""Integral means, Hardy norms, Green identities, square functions,
non-tangential maxima and harmonic conjugation on the disk."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ConvergenceError, InvalidArgumentError
from .maps import (DiskAnalytic, FourierHarmonic, MapSpec, approximate_zeros, jet)
from .quadrature import (SphereRule, ball_rule, default_ball_sphere_level, integrate_ball, integrate_sphere,
                         max_product_level, radial_rule, sphere_rule)

DEFAULT_R_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.995, 0.999)
DEFAULT_MU = 1e6
MEAN_TOL = 1e-7
# the circle rule is cheap, so allow fine levels for radii close to 1
CIRCLE_MAX_LEVEL = 16


# --------------------------------------------------------------------------
# integral means


def _max_level(n: int) -> int:
    return CIRCLE_MAX_LEVEL if n == 2 else min(max_product_level(n), 8)


def _start_level(n: int, r: float) -> int:
    if n != 2:
        return 1
    # roughly enough circle nodes to see features of width 1 - r
    need = 4.0 / max(1.0 - r, 1e-6)
    return max(1, min(CIRCLE_MAX_LEVEL - 1, int(math.ceil(math.log2(need / 8.0))) + 1))


def sphere_averages(f: MapSpec, r: float, integrands, rule: SphereRule | None = None,
                    tol: float = MEAN_TOL, strict: bool = True,
                    max_level: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Averages of several integrands of ``f`` over the sphere of radius ``r``.

    Each integrand receives the ``(N, m)`` values of ``f`` at the nodes and
    returns ``(N,)``.  ``f`` is evaluated once per level and shared by all
    integrands.

    With an explicit ``rule`` the error is the difference to the next
    level (product rules) or the standard error (Monte Carlo).  Without
    one, levels are refined until two consecutive ones agree within
    ``tol`` relative to the value.  If that does not happen by
    ``max_level``, a :class:`ConvergenceError` is raised when ``strict``,
    otherwise the last value is returned with the last difference as its
    error.
    """
    n = f.domain_dim
    integrands = list(integrands)

    def level_values(rl: SphereRule) -> np.ndarray:
        phi = lambda z: np.column_stack([g(v) for v in [f._value(r * z)] for g in integrands])
        return np.atleast_1d(integrate_sphere(rl, phi))

    if rule is not None:
        if rule.method == "monte-carlo":
            phi = lambda z: np.column_stack([g(v) for v in [f._value(r * z)] for g in integrands])
            val, err = integrate_sphere(rule, phi, return_error=True)
            return np.atleast_1d(val), np.atleast_1d(err)
        value = level_values(rule)
        try:
            finer = level_values(sphere_rule(n, rule.level + 1))
        except InvalidArgumentError:
            return value, np.full_like(value, np.nan)
        return finer, np.abs(finer - value)

    level = _start_level(n, r)
    top = _max_level(n) if max_level is None else max(max_level, level + 1)
    prev = level_values(sphere_rule(n, level))
    k = len(prev)
    done = np.zeros(k, dtype=bool)
    best = prev.copy()
    best_err = np.full(k, np.inf)
    prev_rich = None
    for lev in range(level + 1, top + 1):
        cur = level_values(sphere_rule(n, lev))
        err = np.abs(cur - prev)
        ok = (err <= tol * np.abs(cur)) | (err <= 1e-15)
        upd = ~done & (ok | (err < best_err))
        best[upd], best_err[upd] = cur[upd], err[upd]
        done |= ok
        if n == 2:
            # integrands with kinks at grid angles (zeros of f on the circle,
            # e.g. on the real axis) converge like h^2; one Richardson step
            # recovers fast convergence there
            rich = (4.0 * cur - prev) / 3.0
            if prev_rich is not None:
                rerr = np.abs(rich - prev_rich)
                rok = ~done & (rerr <= tol * np.abs(rich))
                best[rok], best_err[rok] = rich[rok], rerr[rok]
                done |= rok
            prev_rich = rich
        if done.all():
            return best, best_err
        prev = cur
    if strict:
        raise ConvergenceError(
            f"sphere average at r={r} did not converge to {tol:g} by level {top}",
            value=float(best[~done][0]), err=float(best_err[~done][0]))
    return best, best_err


def sphere_average(f: MapSpec, r: float, integrand, rule: SphereRule | None = None,
                   tol: float = MEAN_TOL, strict: bool = True,
                   max_level: int | None = None) -> tuple[float, float]:
    """Single-integrand form of :func:`sphere_averages`."""
    v, e = sphere_averages(f, r, [integrand], rule, tol, strict, max_level)
    return float(v[0]), float(e[0])


def mean_powers(f: MapSpec, r: float, cells, rule: SphereRule | None = None, tol: float = MEAN_TOL,
                strict: bool = True, max_level: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``M_p^p(r, f_I)`` for several ``(indices, p)`` cells in one sweep.

    ``indices`` selects real components (0-based; ``None`` for all).
    """
    cells = list(cells)
    if r == 0.0:
        v0 = f._value(np.zeros((1, f.domain_dim)))[0]
        vals = [np.linalg.norm(v0 if idx is None else v0[list(idx)]) ** p for idx, p in cells]
        return np.asarray(vals), np.zeros(len(cells))

    def make(idx, p):
        if idx is None:
            return lambda v: np.linalg.norm(v, axis=1) ** p
        idx = list(idx)
        return lambda v: np.linalg.norm(v[:, idx], axis=1) ** p

    return sphere_averages(f, r, [make(i, p) for i, p in cells], rule, tol, strict, max_level)


def _check_rp(r: float, p: float) -> None:
    if not (0.0 <= r < 1.0):
        raise InvalidArgumentError(f"radius must lie in [0, 1), got {r!r}")
    if not (p > 0.0):
        raise InvalidArgumentError(f"exponent must be positive, got {p!r}")


def integral_mean(f: MapSpec, r: float, p: float, rule: SphereRule | None = None,
                  tol: float = MEAN_TOL) -> tuple[float, float]:
    """``M_p(r, f) = (int_S |f(r zeta)|^p d sigma)^{1/p}`` with an error estimate."""
    _check_rp(r, p)
    if r == 0.0:
        v = float(np.linalg.norm(f._value(np.zeros((1, f.domain_dim)))[0]))
        return v, 0.0
    I, dI = sphere_average(f, r, lambda v: np.linalg.norm(v, axis=1) ** p, rule, tol)
    if I <= 0.0:
        return 0.0, float(dI) ** (1.0 / p)
    M = I ** (1.0 / p)
    return M, M / p * dI / I


def integral_mean_power(f: MapSpec, r: float, p: float, rule: SphereRule | None = None,
                        tol: float = MEAN_TOL) -> tuple[float, float]:
    """``M_p^p(r, f)`` with its error estimate."""
    _check_rp(r, p)
    if r == 0.0:
        return float(np.linalg.norm(f._value(np.zeros((1, f.domain_dim)))[0])) ** p, 0.0
    return sphere_average(f, r, lambda v: np.linalg.norm(v, axis=1) ** p, rule, tol)


@dataclass
class MeansTable:
    """Rows ``(r, p, value, err)`` of integral means."""

    rows: list = field(default_factory=list)

    def add(self, r: float, p: float, value: float, err: float) -> None:
        self.rows.append((float(r), float(p), float(value), float(err)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "p", "value", "err"])
        for row in self.rows:
            w.writerow([repr(x) for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "MeansTable":
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        rd = csv.DictReader(lines)
        t = cls()
        for row in rd:
            t.add(row["r"], row["p"], row["value"], row["err"])
        return t


def means_table(f: MapSpec, r_grid, p_list, rule: SphereRule | None = None) -> MeansTable:
    t = MeansTable()
    for p in p_list:
        for r in r_grid:
            v, e = integral_mean(f, r, p, rule)
            t.add(r, p, v, e)
    return t


@dataclass
class HardyNorm:
    """Grid estimate of ``sup_r M_p(r, f)`` with the divergence indicator.

    ``diverging`` is set when the last three grid increments each exceed
    10% and the tail (``r >= 0.9``) fits ``a + b log(1/(1-r))`` with
    ``b > 0`` and ``R^2 > 0.99``.  It is a numerical indicator only.
    """

    sup: float
    diverging: bool
    r_grid: tuple
    values: np.ndarray
    errs: np.ndarray
    slope: float
    r_squared: float


def log_fit(r, values) -> tuple[float, float]:
    """Slope and ``R^2`` of ``values`` against ``log(1/(1-r))``."""
    x = np.log(1.0 / (1.0 - np.asarray(r, dtype=float)))
    y = np.asarray(values, dtype=float)
    if len(x) < 2 or np.ptp(x) == 0:
        return 0.0, 0.0
    b, a = np.polyfit(x, y, 1)
    resid = y - (a + b * x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 0.0
    return float(b), r2


def hardy_norm(f: MapSpec, p: float, r_grid=DEFAULT_R_GRID, rule: SphereRule | None = None) -> HardyNorm:
    r_grid = tuple(float(r) for r in r_grid)
    if any(b <= a for a, b in zip(r_grid, r_grid[1:])):
        raise InvalidArgumentError("r_grid must be strictly increasing")
    vals, errs = zip(*(integral_mean(f, r, p, rule) for r in r_grid))
    vals, errs = np.asarray(vals), np.asarray(errs)
    tail = np.asarray(r_grid) >= 0.9
    slope, r2 = log_fit(np.asarray(r_grid)[tail], vals[tail]) if tail.sum() >= 3 else (0.0, 0.0)
    steps = len(vals) >= 4 and all(vals[i + 1] > 1.1 * vals[i] for i in range(len(vals) - 4, len(vals) - 1))
    diverging = bool(steps and slope > 0 and r2 > 0.99)
    return HardyNorm(float(vals.max()), diverging, r_grid, vals, errs, slope, r2)


# --------------------------------------------------------------------------
# conjugation on the disk


def conjugate_coefficients(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Fourier coefficients of the harmonic conjugate with ``v(0) = 0``.

    ``u = a_0 + sum r^k (a_k cos k theta + b_k sin k theta)`` maps to
    ``v = sum r^k (a_k sin k theta - b_k cos k theta)``.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    size = max(len(a), len(b), 1)
    a = np.pad(a, (0, size - len(a)))
    b = np.pad(b, (0, size - len(b)))
    a2, b2 = -b.copy(), a.copy()
    a2[0] = 0.0
    b2[0] = 0.0
    return a2, b2


def fourier_of_real_part(coeffs) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients of ``Re sum c_k z^k``: ``a_k = Re c_k``, ``b_k = -Im c_k``."""
    c = np.asarray(coeffs, dtype=complex).ravel()
    a, b = c.real.copy(), -c.imag.copy()
    b[0] = 0.0
    return a, b


def conjugate_disk(u) -> FourierHarmonic:
    """Harmonic conjugate of ``u`` on the disk, normalized by ``v(0) = 0``.

    ``u`` is a :class:`FourierHarmonic`, a :class:`DiskAnalytic` (its real
    part is used) or a pair ``(a, b)`` of coefficient sequences.
    """
    if isinstance(u, FourierHarmonic):
        a, b = u.a, u.b
    elif isinstance(u, DiskAnalytic):
        a, b = fourier_of_real_part(u.coeffs)
    else:
        a, b = u
    return FourierHarmonic(*conjugate_coefficients(a, b))


# --------------------------------------------------------------------------
# Green weights


def _check_sr(s, r, allow_r_one: bool = True) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0.0):
        raise InvalidArgumentError("s must be positive (the Green weight is singular at 0)")
    if not (0.0 < r <= 1.0) or (r == 1.0 and not allow_r_one):
        raise InvalidArgumentError(f"r must lie in (0, 1), got {r!r}")
    if np.any(s > r * (1.0 + 1e-14)):
        raise InvalidArgumentError("s must not exceed r")
    return np.minimum(s, r)


def green_G(n: int, s, r: float):
    """``G_n(s, r)``: ``(s^{2-n} - r^{2-n})/(n(n-2))`` for ``n >= 3``, ``log(r/s)/2`` for ``n = 2``."""
    s = _check_sr(s, r)
    if n == 2:
        out = 0.5 * np.log(r / s)
    elif n >= 3:
        out = (s ** (2.0 - n) - r ** (2.0 - n)) / (n * (n - 2.0))
    else:
        raise InvalidArgumentError("n must be >= 2")
    return float(out) if out.ndim == 0 else out


def _g_antiderivative(n: int, t):
    # (1-t^2)^{n-2} t^{1-n} = sum_k C(n-2,k) (-1)^k t^{2k+1-n}
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for k in range(n - 1):
        c = special.comb(n - 2, k, exact=True) * (-1) ** k
        e = 2 * k + 2 - n
        out = out + (c * np.log(t) if e == 0 else c * t ** e / e)
    return out


def green_g_hyperbolic(n: int, s, r: float):
    """``g(s, r) = (1/n) int_s^r (1-t^2)^{n-2} t^{1-n} dt``.

    Evaluated from the term-by-term antiderivative of the binomial
    expansion of ``(1-t^2)^{n-2}``, which is exact for integer ``n``.
    """
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    s = _check_sr(s, r, allow_r_one=False)
    out = (_g_antiderivative(n, r) - _g_antiderivative(n, s)) / n
    out = np.maximum(out, 0.0)
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# Green identities


def smoothed_power_laplacian(jd, p: float, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """``F^p`` and ``Lap(F^p)`` for ``F = (|f|^2 + eps)^{1/2}`` from jet data.

    Uses ``Lap F^p = (p/2)(p/2-1) F^{p-4} |grad|f|^2|^2 + (p/2) F^{p-2} Lap|f|^2``
    with ``grad|f|^2 = 2 J^T f`` and ``Lap|f|^2 = 2 (sum |grad f_j|^2 + sum f_j Lap f_j)``.
    """
    f = jd.value
    F2 = np.sum(f * f, axis=-1) + eps
    grad_sq = 4.0 * np.sum(np.einsum("...kj,...k->...j", jd.jacobian_real, f) ** 2, axis=-1)
    lap_sq = 2.0 * (np.sum(jd.jacobian_real ** 2, axis=(-2, -1)) + np.sum(f * jd.laplacians, axis=-1))
    q = p / 2.0
    pos = F2 > 0.0
    safe = np.where(pos, F2, 1.0)
    t1 = np.where(pos & (q * (q - 1.0) != 0.0), q * (q - 1.0) * safe ** (q - 2.0) * grad_sq, 0.0)
    t2 = np.where(pos | (q == 1.0), q * safe ** (q - 1.0) * lap_sq, 0.0)
    return F2 ** q, t1 + t2


@dataclass
class GreenResidual:
    residual: float
    lhs: float
    rhs: float
    err: float


def hardy_stein_residual(f: MapSpec, r: float, p: float, mu: float = DEFAULT_MU,
                         radial_level: int = 2, sphere_level: int | None = None,
                         details: bool = False):
    """Residual of the Euclidean Green identity for ``psi = F_mu^p``.

    ``|M_p^p(r, F_mu) - F_mu(0)^p - int_{B_r} Lap(F_mu^p) G_n(|x|, r) dV_N|``.
    For ``p >= 2`` no smoothing is applied (``1/mu`` is replaced by 0).
    For planar maps the volume rule is graded toward zeros of ``f``.
    """
    if not (0.0 < r < 1.0):
        raise InvalidArgumentError(f"r must lie in (0, 1), got {r!r}")
    if not (p > 1.0):
        raise InvalidArgumentError(f"p must exceed 1, got {p!r}")
    if not (mu >= 1.0):
        raise InvalidArgumentError(f"mu must be >= 1, got {mu!r}")
    n = f.domain_dim
    eps = 0.0 if p >= 2.0 else 1.0 / mu

    x0 = np.zeros((1, n))
    psi0 = (float(np.sum(f._value(x0) ** 2)) + eps) ** (p / 2.0)
    mean, mean_err = sphere_average(
        f, r, lambda v: (np.sum(v * v, axis=1) + eps) ** (p / 2.0), tol=1e-13)

    zeros = approximate_zeros(f, min(r + 0.05, 0.999)) if n == 2 else None
    finest = 1e-4
    if zeros is not None and len(zeros):
        speeds = [np.linalg.norm(jet(f, z).jacobian_real) for z in zeros]
        scale = math.sqrt(eps) / max(min(speeds), 1e-12) if eps > 0 else 1e-4
        finest = min(scale, 1e-3) / 16.0

    def volume(rl, sl):
        rule = ball_rule(n, r, rl, sl, singular_points=zeros, finest=finest)
        return integrate_ball(rule, lambda pts: smoothed_power_laplacian(jet(f, pts), p, eps)[1],
                              radial_factor=lambda s: green_G(n, s, r))

    if sphere_level is None:
        sphere_level = default_ball_sphere_level(n)
    vol = volume(radial_level, sphere_level)
    vol_fine = volume(radial_level + 1, sphere_level + 1)
    lhs = mean - psi0
    res = GreenResidual(abs(lhs - vol_fine), lhs, vol_fine, abs(vol_fine - vol) + mean_err)
    return res if details else res.residual


def invariant_green_residual(f: MapSpec, r: float, radial_level: int = 2, sphere_level: int | None = None,
                             details: bool = False):
    """Residual of the invariant Green identity for ``psi = |f|^2``.

    ``|int_S psi(r zeta) d sigma - psi(0) - int_{B_r} g(|x|, r) Lap_h psi dV_h|``
    with ``dV_h = (1-|x|^2)^{-n} dV_N``.  ``Lap_h psi`` is assembled from
    the jet: ``(1-|x|^2)^2 Lap psi + 2(n-2)(1-|x|^2) <grad psi, x>``.
    """
    if not (0.0 < r < 1.0):
        raise InvalidArgumentError(f"r must lie in (0, 1), got {r!r}")
    n = f.domain_dim
    psi0 = float(np.sum(f._value(np.zeros((1, n))) ** 2))
    mean, mean_err = sphere_average(f, r, lambda v: np.sum(v * v, axis=1), tol=1e-13)

    def integrand(pts):
        jd = jet(f, pts)
        s = 1.0 - np.sum(pts * pts, axis=1)
        lap = 2.0 * (np.sum(jd.jacobian_real ** 2, axis=(1, 2)) + np.sum(jd.value * jd.laplacians, axis=1))
        grad = 2.0 * np.einsum("ikj,ik->ij", jd.jacobian_real, jd.value)
        lap_h = s ** 2 * lap + 2.0 * (n - 2) * s * np.sum(grad * pts, axis=1)
        return lap_h * s ** (-n)

    def volume(rl, sl):
        rule = ball_rule(n, r, rl, sl)
        return integrate_ball(rule, integrand, radial_factor=lambda s: green_g_hyperbolic(n, s, r))

    if sphere_level is None:
        sphere_level = default_ball_sphere_level(n)
    vol = volume(radial_level, sphere_level)
    vol_fine = volume(radial_level + 1, sphere_level + 1)
    lhs = mean - psi0
    res = GreenResidual(abs(lhs - vol_fine), lhs, vol_fine, abs(vol_fine - vol) + mean_err)
    return res if details else res.residual


# --------------------------------------------------------------------------
# radial square functions


def _unit(zeta, dim: int) -> np.ndarray:
    zeta = np.asarray(zeta, dtype=float).ravel()
    if zeta.shape != (dim,) or abs(np.linalg.norm(zeta) - 1.0) > 1e-12:
        raise InvalidArgumentError("zeta must be a unit vector of the domain dimension")
    return zeta


def _radial_integral(f: MapSpec, zeta, weight_fn, level: int, tol: float, name: str) -> tuple[float, float]:
    """``int_0^upper weight_fn(r, jet(r zeta)) dr`` at two levels."""
    upper = min(1.0, f.radius_cap)
    if not f.has_analytic_jet:
        # finite-difference stencils need room; the dropped tail is O(1e-10)
        upper = min(upper, 1.0 - 1e-5)

    def at(lev):
        r, w = radial_rule(lev, upper=upper)
        jd = jet(f, r[:, None] * zeta[None, :])
        return float(w @ weight_fn(r, jd)), r, w, jd

    coarse = at(level)[0]
    fine, r, w, jd = at(level + 1)
    err = abs(fine - coarse)
    # contribution of the outermost panels; a bounded integrand gives a tiny tail
    vals = weight_fn(r, jd)
    tail = float(np.sum((w * vals)[r > upper - 1e-5]))
    if err > tol * max(1.0, abs(fine)) or (abs(fine) > 0 and abs(tail) > 1e-3 * abs(fine)):
        raise ConvergenceError(f"{name}: radial integral does not settle (possible non-integrable growth)",
                               value=fine, err=err)
    return fine, err


def littlewood_paley_g(f: MapSpec, zeta, level: int = 3, tol: float = 1e-8) -> float:
    """``(int_0^1 |Df(r zeta)|^2 (1 - r) dr)^{1/2}`` for a holomorphic map (Frobenius ``|Df|``)."""
    if not f.is_complex:
        raise InvalidArgumentError("littlewood_paley_g needs a complex map")
    zeta = _unit(zeta, f.domain_dim)
    val, _ = _radial_integral(f, zeta, lambda r, jd: np.sum(np.abs(jd.Df) ** 2, axis=(1, 2)) * (1.0 - r),
                              level, tol, "littlewood_paley_g")
    return math.sqrt(max(val, 0.0))


def g_tilde(f: MapSpec, zeta, level: int = 3, tol: float = 1e-8) -> float:
    """``(int_0^1 |grad^h f(r zeta)|^2 / (1 - r) dr)^{1/2}``.

    The singular weight is cancelled before discretization:
    ``(1 - r^2)^2 / (1 - r) = (1 - r)(1 + r)^2``.  Non-integrable growth
    raises :class:`ConvergenceError`.
    """
    zeta = _unit(zeta, f.domain_dim)
    val, _ = _radial_integral(
        f, zeta, lambda r, jd: (1.0 - r) * (1.0 + r) ** 2 * np.sum(jd.jacobian_real ** 2, axis=(1, 2)),
        level, tol, "g_tilde")
    return math.sqrt(max(val, 0.0))


def stoll_G(f: MapSpec, zeta, level: int = 3, tol: float = 1e-8, harmonic_tol: float = 1e-6) -> float:
    """``(int_0^1 (1 - r) Lap(|f|^2)(r zeta) dr)^{1/2}`` for a harmonic map.

    ``Lap |f|^2 = 2 sum_j |grad f_j|^2`` is used after checking
    ``sum_j f_j Lap f_j`` vanishes along the ray.
    """
    zeta = _unit(zeta, f.domain_dim)

    def weight(r, jd):
        resid = np.abs(np.sum(jd.value * jd.laplacians, axis=1))
        scale = 1.0 + np.sum(jd.jacobian_real ** 2, axis=(1, 2))
        if np.any(resid > harmonic_tol * scale):
            raise InvalidArgumentError("stoll_G needs a harmonic map (sum f_j Lap f_j != 0 on the ray)")
        return (1.0 - r) * 2.0 * np.sum(jd.jacobian_real ** 2, axis=(1, 2))

    val, _ = _radial_integral(f, zeta, weight, level, tol, "stoll_G")
    return math.sqrt(max(val, 0.0))


# --------------------------------------------------------------------------
# non-tangential maximal function


@dataclass
class NontangentialMax:
    """Sampled lower bound for ``sup_{Gamma_alpha(zeta)} |f|``."""

    value: float
    n_points: int
    lower_bound: bool = True


def _orthogonal_directions(zeta: np.ndarray, count: int) -> np.ndarray:
    n = len(zeta)
    q, _ = np.linalg.qr(np.column_stack([zeta, np.eye(n)]))
    basis = q[:, 1:n]                     # orthonormal basis of zeta^perp
    if n == 2:
        dirs = np.array([[1.0], [-1.0]])
    else:
        dirs = sphere_rule(n - 1, 1).nodes if n - 1 >= 2 else np.array([[1.0], [-1.0]])
        dirs = dirs[:count] if count < len(dirs) else dirs
    return dirs @ basis.T


def nontangential_skeleton(zeta, depth_levels: int = 12, n_angles: int = 16, n_azimuth: int = 16,
                           min_depth: float = 1e-3) -> np.ndarray:
    """Fixed sample points ``(1-t)(cos b zeta + sin b u)`` independent of ``alpha``."""
    zeta = np.asarray(zeta, dtype=float)
    depths = np.logspace(np.log10(min_depth), 0.0, depth_levels)
    angles = np.concatenate([[0.0], np.logspace(-4, np.log10(np.pi), n_angles)])
    dirs = _orthogonal_directions(zeta, n_azimuth)
    pts = []
    for t in depths:
        for b in angles:
            pts.append((1.0 - t) * (np.cos(b) * zeta[None, :] + np.sin(b) * dirs))
    return np.unique(np.concatenate(pts), axis=0)


def nontangential_max(f: MapSpec, zeta, alpha: float, depth_levels: int = 12,
                      min_depth: float = 1e-3, n_angles: int = 16, n_azimuth: int = 16) -> NontangentialMax:
    """Largest ``|f|`` over the skeleton points inside ``{|y - zeta| < alpha (1 - |y|)}``."""
    if not (alpha > 1.0):
        raise InvalidArgumentError(f"alpha must exceed 1, got {alpha!r}")
    zeta = _unit(zeta, f.domain_dim)
    pts = nontangential_skeleton(zeta, depth_levels, n_angles, n_azimuth, min_depth)
    rad = np.linalg.norm(pts, axis=1)
    inside = (np.linalg.norm(pts - zeta, axis=1) < alpha * (1.0 - rad)) & (rad <= f.radius_cap)
    pts = pts[inside]
    if len(pts) == 0:
        return NontangentialMax(0.0, 0)
    vals = np.linalg.norm(f._value(pts), axis=1)
    return NontangentialMax(float(vals.max()), int(len(pts)))


# --------------------------------------------------------------------------
# power means


def power_mean_sides(a, p: float) -> tuple[float, float]:
    """Both sides of ``(sum |a_k|)^p <= c sum |a_k|^p``.

    ``c = 1`` for ``p < 1`` and ``c = n^{p-1}`` for ``p >= 1``.
    """
    a = np.abs(np.asarray(a).ravel())
    if not (p > 0):
        raise InvalidArgumentError("p must be positive")
    c = 1.0 if p < 1.0 else len(a) ** (p - 1.0)
    return float(np.sum(a) ** p), float(c * np.sum(a ** p))
