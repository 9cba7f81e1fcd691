"""Numerical checks of the explicit inequalities, the sharpness example and
the counterexample, each returning a :class:`VerificationReport`.

Verdict rule (used by every check): with ``margin = rhs - lhs`` and a
combined error ``err``,

* ``pass`` when ``margin >= -err``;
* ``inconclusive`` when a check allows slack (dilatation estimated from a
  sample) and ``-slack * err <= margin < -err``, or when quadrature or a
  derivative fails;
* ``fail`` otherwise.

``err`` always includes a floor of ``1e-12 * max(1, |lhs|, |rhs|)`` so that
exact equalities are not decided by rounding.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .calculus import (ball_sample, dilatation_from_jacobian, empirical_K, op_norm,
                       wu_ratio_matrix)
from .errors import (ConvergenceError, EvaluationError, InvalidArgumentError,
                     SingularDerivativeError)
from .hardy import (DEFAULT_R_GRID, conjugate_disk, fourier_of_real_part,
                    hardy_norm, hardy_stein_residual, invariant_green_residual,
                    log_fit, mean_powers, power_mean_sides)
from .maps import (CustomMap, DiskAnalytic, FourierHarmonic, HolomorphicPolynomial,
                   MapSpec, PlanarHarmonic, PluriharmonicPair, SharpnessExample,
                   ShearCounterexample, coordinate, hyperbolic_poisson_extend, jet,
                   poisson_extend)

DEFAULT_SEED = 0x5EED
ERR_FLOOR = 1e-12
DILATATION_SLACK = 10.0
VERDICTS = ("pass", "inconclusive", "fail")
# interior grid for extensions; the discrete kernel sum is reliable there
EXTENSION_R_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
PLURI_R_GRID = (0.3, 0.5, 0.7, 0.9)
# sphere level of the boundary rule for n = 3 extensions in the suites;
# resolves the extension to about 1e-3 relative up to r = 0.9
EXTENSION_SUITE_LEVEL = 5
# sphere levels for high-dimensional means (n -> max level)
MEAN_MAX_LEVEL = {3: 5, 4: 4}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


@dataclass
class VerificationReport:
    check_name: str
    parameters: dict
    lhs: float
    rhs: float
    margin: float
    err: float
    verdict: str
    details: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return _jsonable(asdict(self))

    @property
    def key(self) -> str:
        """Identity of the check used when merging report files."""
        items = ",".join(f"{k}={_fmt(v)}" for k, v in sorted(self.parameters.items()))
        return f"{self.check_name}[{items}]"


def _fmt(v) -> str:
    v = _jsonable(v)
    return repr(v)


def verdict_of(lhs: float, rhs: float, err: float, slack: float = 1.0) -> str:
    """Verdict from both sides and the combined error (see module docstring)."""
    if not all(np.isfinite([lhs, rhs])) or not np.isfinite(err):
        return "inconclusive"
    margin = rhs - lhs
    tol = err + ERR_FLOOR * max(1.0, abs(lhs), abs(rhs))
    if margin >= -tol:
        return "pass"
    if margin >= -slack * tol:
        return "inconclusive"
    return "fail"


def composite_verdict(verdicts) -> str:
    verdicts = list(verdicts)
    if "fail" in verdicts:
        return "fail"
    if "inconclusive" in verdicts:
        return "inconclusive"
    return "pass"


def make_report(name: str, params: dict, lhs: float, rhs: float, err: float,
                slack: float = 1.0, details: dict | None = None,
                verdict: str | None = None) -> VerificationReport:
    lhs, rhs, err = float(lhs), float(rhs), float(err)
    tol = err + ERR_FLOOR * max(1.0, abs(lhs), abs(rhs)) if np.isfinite(err) else err
    v = verdict_of(lhs, rhs, err, slack) if verdict is None else verdict
    return VerificationReport(name, dict(params), lhs, rhs, rhs - lhs, tol, v, details or {})


def _inconclusive(name: str, params: dict, reason: str) -> VerificationReport:
    nan = float("nan")
    return VerificationReport(name, dict(params), nan, nan, nan, nan, "inconclusive", {"reason": reason})


def _from_cells(name: str, params: dict, cells: list, slack: float = 1.0,
                extra: dict | None = None) -> VerificationReport:
    """Combine per-radius cells ``(label, lhs, rhs, err)`` into one report.

    The reported sides are those of the cell with the smallest relative
    margin; every cell is listed in ``details``.
    """
    verdicts = [verdict_of(l, r, e, slack) for _, l, r, e in cells]
    rel = [(r - l) / max(abs(r), 1e-300) for _, l, r, e in cells]
    i = int(np.argmin(rel))
    _, l, r, e = cells[i]
    details = {"cells": [{"at": lab, "lhs": l_, "rhs": r_, "err": e_, "verdict": v}
                         for (lab, l_, r_, e_), v in zip(cells, verdicts)]}
    details.update(extra or {})
    return make_report(name, params, l, r, e, slack, details, composite_verdict(verdicts))


def _max_level(f: MapSpec):
    return MEAN_MAX_LEVEL.get(f.domain_dim, 3 if f.domain_dim > 4 else None)


# (map -> {(r, indices, p): (value, err)}); filled by prefetch_means so that
# checks at several exponents share one set of map evaluations
_MEANS_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _cell_key(r, idx, p):
    return (float(r), None if idx is None else tuple(idx), float(p))


def prefetch_means(f: MapSpec, r_grid, cells) -> None:
    """Compute ``M_p^p`` for all ``(indices, p)`` cells on a grid in one sweep per radius."""
    store = _MEANS_CACHE.setdefault(f, {})
    for r in r_grid:
        vals, errs = mean_powers(f, r, cells, strict=False, max_level=_max_level(f))
        for (idx, p), v, e in zip(cells, vals, errs):
            store[_cell_key(r, idx, p)] = (float(v), float(e))


def clear_means_cache() -> None:
    _MEANS_CACHE.clear()


def _powers(f: MapSpec, r: float, cells):
    """``M_p^p`` values and errors; never raises on slow convergence."""
    store = _MEANS_CACHE.get(f, {})
    hits = [store.get(_cell_key(r, idx, p)) for idx, p in cells]
    if all(h is not None for h in hits):
        return np.array([h[0] for h in hits]), np.array([h[1] for h in hits])
    return mean_powers(f, r, cells, strict=False, max_level=_max_level(f))


def _mean(f: MapSpec, r: float, p: float, idx=None) -> tuple[float, float]:
    (I,), (dI,) = _powers(f, r, [(idx, p)])
    if I <= 0:
        return 0.0, float(dI) ** (1.0 / p)
    M = I ** (1.0 / p)
    return M, M / p * dI / I


def p_star(p: float) -> float:
    return max(p, p / (p - 1.0))


def riesz_cot(p: float) -> float:
    return 1.0 / math.tan(math.pi / (2.0 * p_star(p)))


def riesz_sin(p: float) -> float:
    return math.sin(math.pi / (2.0 * p_star(p)))


# --------------------------------------------------------------------------
# classical conjugate function


def _fourier(u):
    if isinstance(u, FourierHarmonic):
        return u.a, u.b
    if isinstance(u, DiskAnalytic):
        return fourier_of_real_part(u.coeffs)
    a, b = u
    return FourierHarmonic(a, b).a, FourierHarmonic(a, b).b


def check_riesz_planar(u, p: float, r_grid=DEFAULT_R_GRID) -> VerificationReport:
    """``M_p(r, v) <= cot(pi/(2p*)) M_p(r, u)`` and
    ``M_p(r, u + iv) <= M_p(r, u) / sin(pi/(2p*))`` for every ``r`` on the grid."""
    if not (p > 1.0):
        raise InvalidArgumentError(f"p must exceed 1, got {p!r}")
    a, b = _fourier(u)
    um = FourierHarmonic(a, b)
    vm = conjugate_disk((a, b))
    fm = DiskAnalytic(a - 1j * b)        # u + iv
    c, s = riesz_cot(p), riesz_sin(p)
    params = {"p": p, "degree": len(a) - 1, "r_grid": list(r_grid)}
    cells = []
    try:
        for r in r_grid:
            Mu, eu = _mean(um, r, p)
            Mv, ev = _mean(vm, r, p)
            Mf, ef = _mean(fm, r, p)
            cells.append((f"conjugate r={r}", Mv, c * Mu, ev + c * eu))
            cells.append((f"analytic r={r}", Mf, Mu / s, ef + eu / s))
    except (ConvergenceError, EvaluationError) as exc:
        return _inconclusive("riesz_planar", params, str(exc))
    conj = [cl for cl in cells if cl[0].startswith("conjugate")]
    ratio = max(l / r if r > 0 else (0.0 if l == 0 else np.inf) for _, l, r, _ in conj)
    return _from_cells("riesz_planar", params, cells, extra={"max_ratio_to_bound": ratio,
                                                             "cot": c, "sin": s})


# --------------------------------------------------------------------------
# coordinate domination for harmonic and invariant-harmonic maps


def _check_harmonic(f: MapSpec, invariant: bool = False, seed: int = DEFAULT_SEED,
                    tol: float = 1e-6) -> float:
    pts = ball_sample(f.domain_dim, 64, 0.9, seed)
    jd = jet(f, pts)
    if invariant:
        s = 1.0 - np.sum(pts * pts, axis=1)
        radial = np.einsum("ikj,ij->ik", jd.jacobian_real, pts)
        resid = s[:, None] ** 2 * jd.laplacians + 2.0 * (f.domain_dim - 2) * s[:, None] * radial
    else:
        resid = jd.laplacians
    scale = 1.0 + np.max(np.abs(jd.jacobian_real)) ** 2 + np.max(np.abs(jd.value))
    worst = float(np.max(np.abs(resid)))
    if worst > tol * scale:
        kind = "invariant-harmonic" if invariant else "harmonic"
        raise InvalidArgumentError(f"map is not {kind} (residual {worst:.3g})")
    return worst


def domination_constant(n: int, K: float, p: float) -> float:
    return (1.0 + (n - 1) * K * K) / (p - 1.0)


def _check_p_range(p: float) -> None:
    if not (1.0 < p <= 2.0):
        raise InvalidArgumentError(f"p must lie in (1, 2], got {p!r}")


def check_cor_1_2(f: MapSpec, k: int = 1, p: float = 1.5, r: float = 0.9,
                  n_points: int = 500, seed: int = DEFAULT_SEED, label: str = "") -> VerificationReport:
    """``M_p^p(r,f) <= |f(0)|^p + (1+(n-1)K^2)/(p-1) (M_p^p(r,f_k) - |f_k(0)|^p)`` with sampled K."""
    _check_p_range(p)
    if not (0.0 <= r < 1.0):
        raise InvalidArgumentError(f"r must lie in [0, 1), got {r!r}")
    if not (1 <= k <= f.codomain_dim):
        raise InvalidArgumentError(f"coordinate {k} not in 1..{f.codomain_dim}")
    n = f.domain_dim
    params = {"map": label or type(f).__name__, "n": n, "k": k, "p": p, "r": r, "seed": seed,
              "n_points": n_points}
    _check_harmonic(f, seed=seed)
    est = empirical_K(f, n_points, max(0.95, r), seed)
    params["K_hat"] = est.K_hat
    if not np.isfinite(est.K_hat):
        return _inconclusive("cor_1_2", params, "sampled dilatation is infinite")
    C = domination_constant(n, est.K_hat, p)
    v0 = f._value(np.zeros((1, n)))[0]
    try:
        (If, Ik), (ef, ek) = _powers(f, r, [(None, p), ((k - 1,), p)])
    except (ConvergenceError, EvaluationError) as exc:
        return _inconclusive("cor_1_2", params, str(exc))
    lhs = If
    rhs = np.linalg.norm(v0) ** p + C * (Ik - abs(v0[k - 1]) ** p)
    return make_report("cor_1_2", params, lhs, rhs, ef + C * ek, DILATATION_SLACK,
                       {"constant": C, "M_p^p(f)": If, "M_p^p(f_k)": Ik})


def check_thm_1_3_B1(f: MapSpec, j: int = 1, p: float = 1.5, r_grid=EXTENSION_R_GRID,
                     n_points: int = 500, seed: int = DEFAULT_SEED, label: str = "",
                     k_radius: float | None = None) -> VerificationReport:
    """``||f||_p^p <= |f(0)|^p + (1+(n-1)K^2)/(p-1) (||f_j||_p^p - |f_j(0)|^p)`` on a radius grid.

    The dilatation is sampled on the ball of radius ``k_radius`` (default:
    the largest grid radius), the region the means actually probe.
    """
    _check_p_range(p)
    n = f.domain_dim
    params = {"map": label or type(f).__name__, "n": n, "j": j, "p": p, "r_grid": list(r_grid),
              "seed": seed, "n_points": n_points}
    _check_harmonic(f, invariant=True, seed=seed)
    est = empirical_K(f, n_points, max(r_grid) if k_radius is None else k_radius, seed)
    params["K_hat"] = est.K_hat
    if not np.isfinite(est.K_hat):
        return _inconclusive("thm_1_3", params, "sampled dilatation is infinite")
    C = domination_constant(n, est.K_hat, p)
    v0 = f._value(np.zeros((1, n)))[0]
    If, Ij, ef, ej = [], [], [], []
    try:
        for r in r_grid:
            (a, b), (ea, eb) = _powers(f, r, [(None, p), ((j - 1,), p)])
            If.append(a), Ij.append(b), ef.append(ea), ej.append(eb)
    except (ConvergenceError, EvaluationError) as exc:
        return _inconclusive("thm_1_3", params, str(exc))
    i, m = int(np.argmax(If)), int(np.argmax(Ij))
    lhs = If[i]
    rhs = np.linalg.norm(v0) ** p + C * (Ij[m] - abs(v0[j - 1]) ** p)
    return make_report("thm_1_3", params, lhs, rhs, ef[i] + C * ej[m], DILATATION_SLACK,
                       {"constant": C, "sup_M_p^p(f)": lhs, "sup_M_p^p(f_j)": Ij[m]})


# --------------------------------------------------------------------------
# pluriharmonic maps


def sampled_second_dilatation(f: MapSpec, n_points: int = 200, radius: float = 0.95,
                              seed: int = DEFAULT_SEED) -> float:
    """Largest ``||omega_f||`` over a quasi-random sample."""
    pts = ball_sample(f.domain_dim, n_points, radius, seed)
    jd = jet(f, pts)
    s = np.linalg.svd(jd.Df, compute_uv=False)
    if np.any(s[:, -1] <= 1e-14 * s[:, 0]):
        raise SingularDerivativeError("Df is singular on the sample")
    omega = np.swapaxes(np.linalg.solve(np.swapaxes(jd.Df, 1, 2), np.swapaxes(np.conj(jd.Dbar), 1, 2)), 1, 2)
    return float(np.max(op_norm(omega)))


def check_thm_1_5(f: MapSpec, p: float, r_grid=PLURI_R_GRID, kappa: float | None = None,
                  n_points: int = 200, seed: int = DEFAULT_SEED, label: str = "") -> VerificationReport:
    """Conjugate-function bounds for ``f = u + iv`` with ``||omega_f|| <= kappa``.

    ``kappa = 0``: ``M_p(r,v) <= sqrt(n) cot(pi/(2p*)) M_p(r,u)``.
    ``kappa > 0``, ``p`` in (1, 2]: ``M_p^p(r,v) <= 2n(1+kappa^2)/((p-1)(1-kappa)^2) M_p^p(r,u)``.
    """
    if not f.is_complex:
        raise InvalidArgumentError("check_thm_1_5 needs a complex map")
    if not (p > 1.0):
        raise InvalidArgumentError(f"p must exceed 1, got {p!r}")
    n = f.domain_dim // 2
    params = {"map": label or type(f).__name__, "n": n, "p": p, "r_grid": list(r_grid), "seed": seed}
    v0 = f._value(np.zeros((1, 2 * n)))[0][1::2]
    if np.max(np.abs(v0)) > 1e-12:
        raise InvalidArgumentError("the imaginary part must vanish at the origin")
    try:
        k_hat = sampled_second_dilatation(f, n_points, 0.95, seed)
    except SingularDerivativeError as exc:
        return _inconclusive("thm_1_5", params, str(exc))
    if kappa is None:
        kappa = 0.0 if k_hat < 1e-12 else k_hat
    elif k_hat > kappa + 1e-9:
        raise InvalidArgumentError(f"sampled ||omega|| = {k_hat:.6g} exceeds kappa = {kappa}")
    if not (0.0 <= kappa < 1.0):
        raise InvalidArgumentError("kappa must lie in [0, 1)")
    params["kappa"] = kappa
    params["kappa_hat"] = k_hat
    u_idx = tuple(range(0, 2 * n, 2))
    v_idx = tuple(range(1, 2 * n, 2))
    cells = []
    try:
        if kappa == 0.0:
            c = math.sqrt(n) * riesz_cot(p)
            for r in r_grid:
                Mu, eu = _mean(f, r, p, u_idx)
                Mv, ev = _mean(f, r, p, v_idx)
                cells.append((f"r={r}", Mv, c * Mu, ev + c * eu))
        else:
            if p > 2.0:
                raise InvalidArgumentError("no explicit constant for kappa > 0 and p > 2")
            c = 2.0 * n * (1.0 + kappa ** 2) / ((p - 1.0) * (1.0 - kappa) ** 2)
            for r in r_grid:
                (Iu, Iv), (eu, ev) = _powers(f, r, [(u_idx, p), (v_idx, p)])
                cells.append((f"r={r}", Iv, c * Iu, ev + c * eu))
    except (ConvergenceError, EvaluationError) as exc:
        return _inconclusive("thm_1_5", params, str(exc))
    return _from_cells("thm_1_5", params, cells, extra={"constant": c})


# --------------------------------------------------------------------------
# sharpness example


def sharpness_probe(K: float, r_grid=DEFAULT_R_GRID, tol: float = 1e-4, min_slope: float = 0.2,
                    min_ratio: float = 2.0, seed: int = DEFAULT_SEED) -> VerificationReport:
    """Probe of the sharpness example: constant means of ``f_1`` and growing means of ``f``.

    (a) ``M_1(r, f_1) = 2K/(K+1)`` within ``tol`` on the grid;
    (b) ``M_1(r, f)`` strictly increasing, slope ``>= min_slope`` against
        ``log(1/(1-r))`` on the tail ``r >= 0.9`` with ``R^2 > 0.99``, and
        ``M_1(0.999, f) / M_1(0.9, f) >= min_ratio``;
    (c) sampled local dilatation ``<= K + 1e-6``.
    """
    f = SharpnessExample(K)
    r_grid = tuple(r_grid)
    params = {"K": K, "r_grid": list(r_grid), "tol": tol, "seed": seed}
    target = 2.0 * K / (K + 1.0)
    try:
        f1 = [_mean(coordinate(f, 1), r, 1.0) for r in r_grid]
        full = [_mean(f, r, 1.0) for r in r_grid]
    except (ConvergenceError, EvaluationError) as exc:
        return _inconclusive("sharpness", params, str(exc))
    dev = max(abs(m - target) for m, _ in f1)
    dev_err = max(e for _, e in f1)
    vals = np.array([m for m, _ in full])
    errs = np.array([e for _, e in full])
    tail = np.asarray(r_grid) >= 0.9
    slope, r2 = log_fit(np.asarray(r_grid)[tail], vals[tail])
    increasing = bool(np.all(np.diff(vals) > 0))
    i9 = r_grid.index(0.9) if 0.9 in r_grid else int(np.argmax(tail))
    ratio = float(vals[-1] / vals[i9])
    ratio_err = float(ratio * (errs[-1] / vals[-1] + errs[i9] / vals[i9]))
    est = empirical_K(f, 200, 0.95, seed)
    parts = {
        "f1_constant": verdict_of(dev, tol, dev_err),
        "increasing": "pass" if increasing else "fail",
        "slope": verdict_of(min_slope, slope, 0.0),
        "log_fit_r2": "pass" if r2 > 0.99 else "fail",
        "ratio": verdict_of(min_ratio, ratio, ratio_err),
        "dilatation": verdict_of(est.K_hat, K + 1e-6, 0.0),
    }
    details = {"parts": parts, "f1_target": target, "f1_max_deviation": dev,
               "means_f": vals.tolist(), "slope": slope, "r_squared": r2,
               "ratio_0.999_over_0.9": ratio, "K_hat": est.K_hat}
    return make_report("sharpness", params, min_ratio, ratio, ratio_err, details=details,
                       verdict=composite_verdict(parts.values()))


# --------------------------------------------------------------------------
# planar bridge, shear counterexample, Wu ratio


def _bridge_report(f: MapSpec, kappa: float, seed: int, label: str) -> VerificationReport:
    """Sampled ``K <= (1+kappa)/(1-kappa)`` and ``sup|g'/h'| <= (K-1)/(K+1)``."""
    pts = ball_sample(2, 300, 0.95, seed)
    jd = jet(f, pts)
    Kloc, _, _ = dilatation_from_jacobian(jd.jacobian_real)
    K_hat = float(np.max(Kloc))
    mu = float(np.max(np.abs(jd.Dbar[:, 0, 0] / jd.Df[:, 0, 0])))
    bound_K = (1.0 + kappa) / (1.0 - kappa)
    bound_mu = (K_hat - 1.0) / (K_hat + 1.0)
    a = verdict_of(K_hat, bound_K, 1e-8)
    b = verdict_of(mu, bound_mu, 1e-8)
    return make_report("prop_1_1.bridge", {"map": label, "kappa": kappa, "seed": seed},
                       K_hat, bound_K, 1e-8,
                       details={"sup_dilatation": mu, "converse_bound": bound_mu,
                                "parts": {"K_bound": a, "converse": b}},
                       verdict=composite_verdict([a, b]))


def _shear_report(kappa: float, seed: int) -> VerificationReport:
    f = ShearCounterexample(kappa)
    rng = np.random.default_rng(seed)
    pts = ball_sample(4, 10, 0.95, seed)
    jd = jet(f, pts)
    omega = np.swapaxes(np.linalg.solve(np.swapaxes(jd.Df, 1, 2), np.swapaxes(np.conj(jd.Dbar), 1, 2)), 1, 2)
    omega_dev = float(np.max(np.abs(omega - kappa * np.eye(2))))
    z = pts[:, 0::2] + 1j * pts[:, 1::2]
    _, Dh = f.h_parts(z)
    det = Dh[:, 0, 0] * Dh[:, 1, 1] - Dh[:, 0, 1] * Dh[:, 1, 0]
    det_exact = bool(np.all(det == 1.0))
    J_h = np.abs(det) ** 2
    wu = []
    for x1 in (0.0, 0.9, 0.99):
        w, _ = wu_ratio_matrix(jet(f, np.array([x1, 0.0, 0.0, 0.0])).Df)
        wu.append(float(w))
    increasing = wu[0] < wu[1] < wu[2]
    parts = {
        "omega_is_kappa_I": verdict_of(omega_dev, 1e-10, 0.0),
        "det_Dh_is_1": "pass" if det_exact and np.all(J_h == 1.0) else "fail",
        "wu_unbounded_trend": "pass" if increasing and wu[2] >= 9.9e3 else "fail",
    }
    del rng
    return make_report("prop_1_1.shear", {"kappa": kappa, "seed": seed}, 9.9e3, wu[2], 0.0,
                       details={"omega_max_deviation": omega_dev, "wu_ratios": wu, "parts": parts},
                       verdict=composite_verdict(parts.values()))


def _wu_report(f: MapSpec, seed: int, label: str) -> VerificationReport:
    """Pointwise ``wu <= K_loc^{1-1/n} (1 + 1e-6)`` for a holomorphic map."""
    n = f.domain_dim // 2
    pts = ball_sample(2 * n, 200, 0.95, seed)
    jd = jet(f, pts)
    if np.max(np.abs(jd.Dbar)) != 0.0:
        raise InvalidArgumentError("the Wu comparison needs a holomorphic map")
    Kloc, _, _ = dilatation_from_jacobian(jd.jacobian_real)
    w, flag = wu_ratio_matrix(jd.Df)
    ok = ~flag & np.isfinite(Kloc)
    bound = Kloc[ok] ** (1.0 - 1.0 / n) * (1.0 + 1e-6)
    excess = w[ok] / bound
    i = int(np.argmax(excess))
    return make_report("prop_1_1.wu", {"map": label, "n": n, "seed": seed},
                       float(w[ok][i]), float(bound[i]), 0.0,
                       details={"points": int(ok.sum()), "skipped_degenerate": int((~ok).sum())})


def check_prop_1_1(seed: int = DEFAULT_SEED, kappas=(0.25, 0.5, 0.75), families: int = 5) -> VerificationReport:
    """Composite: planar bridge, shear counterexample and Wu comparison."""
    subs = []
    for kappa in kappas:
        subs.append(_bridge_report(PlanarHarmonic([0, 1], [0, kappa]), kappa, seed, f"h=z,g={kappa}z"))
        for i, (f, kap) in enumerate(random_planar_qr(families, seed + 1, kappa=kappa)):
            subs.append(_bridge_report(f, kap, seed + i, f"planar_qr[{i}]"))
        subs.append(_shear_report(kappa, seed))
    for i, f in enumerate(random_analytic(families, seed + 2)):
        subs.append(_wu_report(f, seed, f"analytic[{i}]"))
    for i, (f, _) in enumerate(random_pluriharmonic(families, seed + 3, n=2, kappa=0.0)):
        subs.append(_wu_report(f, seed, f"holomorphic_n2[{i}]"))
    worst = min(subs, key=lambda s: (VERDICTS.index(s.verdict) * -1, s.margin if np.isfinite(s.margin) else -np.inf))
    return make_report("prop_1_1", {"seed": seed, "kappas": list(kappas), "families": families},
                       worst.lhs, worst.rhs, worst.err,
                       details={"parts": [s.to_record() for s in subs]},
                       verdict=composite_verdict(s.verdict for s in subs))


# --------------------------------------------------------------------------
# Heinz class


def check_heinz_class(f: MapSpec, sample=None, n_points: int = 200, radius: float = 0.8,
                      seed: int = DEFAULT_SEED, label: str = "", identity_tol: float = 1e-5) -> VerificationReport:
    """Sign of ``sum f_j Lap f_j``, empirical ``a = sup`` of the Heinz ratio,
    and ``Lap f_j^2 = 2|grad f_j|^2`` for harmonic coordinates."""
    pts = ball_sample(f.domain_dim, n_points, radius, seed) if sample is None else np.atleast_2d(sample)
    jd = jet(f, pts)
    num = np.sum(jd.value * jd.laplacians, axis=1)
    den = np.sum(jd.jacobian_real ** 2, axis=(1, 2))
    ok = den > 1e-300
    a_hat = float(np.max(num[ok] / den[ok])) if ok.any() else float("nan")
    params = {"map": label or type(f).__name__, "n_points": len(pts), "seed": seed, "radius": radius}
    # harmonic coordinates: compare a finite-difference Laplacian of f_j^2 with 2|grad f_j|^2
    harmonic = np.all(np.abs(jd.laplacians) <= 1e-8 * (1.0 + np.abs(jd.value)), axis=0)
    ident = {}
    for j in np.flatnonzero(harmonic):
        sq = CustomMap(lambda x, j=j: f._value(x)[:, j] ** 2, f.domain_dim, 1)
        lap_sq = jet(sq, pts, scheme="finite-difference").laplacians[:, 0]
        two_grad = 2.0 * np.sum(jd.jacobian_real[:, j, :] ** 2, axis=1)
        dev = np.abs(lap_sq - two_grad) / np.maximum(1.0, two_grad)
        ident[f"f{j + 1}"] = float(np.max(dev))
    ident_ok = all(v <= identity_tol for v in ident.values())
    sign = verdict_of(0.0, float(np.min(num)), 1e-9)
    verdict = composite_verdict([sign, "pass" if ident_ok else "fail"])
    return make_report("heinz", params, 0.0, float(np.min(num)), 1e-9,
                       details={"a_hat": a_hat, "indeterminate_points": int((~ok).sum()),
                                "square_identity_max_rel_dev": ident, "sign": sign},
                       verdict=verdict)


# --------------------------------------------------------------------------
# seeded families


def random_unit_disk(rng, size) -> np.ndarray:
    return np.sqrt(rng.uniform(size=size)) * np.exp(2j * np.pi * rng.uniform(size=size))


def random_analytic(count: int = 20, seed: int = DEFAULT_SEED, max_degree: int = 10) -> list:
    """Polynomials of degree 1..max_degree with coefficients uniform in the unit disk."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        d = int(rng.integers(1, max_degree + 1))
        out.append(DiskAnalytic(random_unit_disk(rng, d + 1)))
    return out


def random_planar_qr(count: int = 10, seed: int = DEFAULT_SEED, kappa: float | None = None,
                     max_degree: int = 5) -> list:
    """Planar harmonic maps ``h + conj(g)`` with ``|g'/h'| <= kappa`` on the disk.

    ``h = z + sum c_k z^k`` with ``sum k|c_k| <= 0.9`` (so ``h' != 0``) and
    ``g' = kappa B h'`` with ``sum |b_k| <= 1``.  Returns ``(map, kappa)`` pairs.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        d = int(rng.integers(2, max_degree + 1))
        c = random_unit_disk(rng, d - 1)
        k = np.arange(2, d + 1)
        c *= 0.9 * rng.uniform() / max(np.sum(k * np.abs(c)), 1e-300)
        h = np.concatenate([[0.0, 1.0], c])
        B = random_unit_disk(rng, int(rng.integers(1, 4)))
        B /= max(np.sum(np.abs(B)), 1e-300)
        kap = float(rng.uniform(0.1, 0.6)) if kappa is None else kappa
        gp = kap * npoly.polymul(B, npoly.polyder(h))
        g = npoly.polyint(gp)
        g[0] = 0.0
        out.append((PlanarHarmonic(h, g), kap))
    return out


def _random_unitary(rng, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pluriharmonic(count: int = 10, seed: int = DEFAULT_SEED, n: int = 2,
                         kappa: float = 0.0, strength: float = 0.3) -> list:
    """Maps ``h + conj(g)`` on the ball of C^n with ``g = kappa C (h - h(0))``, ``C`` unitary.

    ``h`` is the identity plus a random quadratic perturbation with
    ``||Dh - I|| < 1`` on the ball and a real constant, so ``v(0) = 0``.
    The second dilatation is ``kappa C`` exactly; families whose sampled
    ``||omega||`` exceeds ``kappa`` are redrawn.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        comps = []
        for k in range(n):
            c = {}
            for i in range(n):
                for j in range(i, n):
                    e = [0] * n
                    e[i] += 1
                    e[j] += 1
                    c[tuple(e)] = complex(random_unit_disk(rng, 1)[0])
            comps.append(c)
        quad = HolomorphicPolynomial(n, tuple(comps))
        # |D quad| <= 2 sum |c| on the ball, so the scaling keeps ||Dh - I|| < 1
        total = sum(abs(v) for c in quad.components for v in c.values())
        quad = quad.left_multiply(np.eye(n) * strength / (2.0 * total))
        const = rng.uniform(-1.0, 1.0, n)
        h = HolomorphicPolynomial.linear(np.eye(n), const) + quad
        C = _random_unitary(rng, n)
        g = h.drop_constant().left_multiply(kappa * C)
        f = PluriharmonicPair(h, g)
        try:
            if sampled_second_dilatation(f, 100, 0.95, seed) > kappa + 1e-9:
                continue
        except SingularDerivativeError:
            continue
        out.append((f, kappa))
    return out


def random_extensions(count: int = 5, seed: int = DEFAULT_SEED, n: int = 3, strength: float = 0.15,
                      invariant: bool = True, rule_level: int | None = None) -> list:
    """Extensions of ``zeta + strength * (quadratic in zeta)`` from S^{n-1}."""
    rng = np.random.default_rng(seed)
    out = []
    extend = hyperbolic_poisson_extend if invariant else poisson_extend
    for _ in range(count):
        T = rng.standard_normal((n, n, n))
        T /= np.max(np.abs(T).sum(axis=(1, 2)))
        phi = (lambda z, T=T: z + strength * np.einsum("kij,ni,nj->nk", T, z, z))
        out.append(extend(phi, n, rule_level=rule_level))
    return out


def identity_map(n_complex: int = 1) -> PluriharmonicPair:
    h = HolomorphicPolynomial.identity(n_complex)
    return PluriharmonicPair(h, HolomorphicPolynomial.linear(np.zeros((n_complex, n_complex))))


# --------------------------------------------------------------------------
# suites


SUITES = ("riesz_planar", "cor_1_2", "thm_1_3", "thm_1_5", "sharpness", "prop_1_1",
          "heinz", "norms", "power_mean", "green_identities")


@dataclass
class SuiteConfig:
    """Parameters of a suite run; ``None`` selects the suite default."""

    suite: str
    p_list: tuple | None = None
    r_grid: tuple | None = None
    K_list: tuple | None = None
    kappa: float | None = None
    seed: int = DEFAULT_SEED
    level: int | None = None
    coordinate: int = 1
    count: int | None = None
    tolerance: float | None = None
    map: MapSpec | None = None
    map_label: str = ""

    def __post_init__(self):
        if self.suite not in SUITES:
            raise InvalidArgumentError(f"unknown suite {self.suite!r}; expected one of {', '.join(SUITES)}")
        if self.p_list is not None and any(not (p > 0) for p in self.p_list):
            raise InvalidArgumentError("p values must be positive")
        if self.r_grid is not None and any(not (0.0 <= r < 1.0) for r in self.r_grid):
            raise InvalidArgumentError("r values must lie in [0, 1)")
        if self.level is not None and self.level < 1:
            raise InvalidArgumentError("levels must be >= 1")
        if self.K_list is not None and any(not (K >= 1) for K in self.K_list):
            raise InvalidArgumentError("K values must be >= 1")
        if self.kappa is not None and not (0.0 <= self.kappa < 1.0):
            raise InvalidArgumentError("kappa must lie in [0, 1)")
        if self.count is not None and self.count < 1:
            raise InvalidArgumentError("count must be >= 1")


def _suite_riesz(cfg: SuiteConfig) -> list:
    ps = cfg.p_list or (1.2, 1.5, 2.0, 3.0, 5.0)
    for p in ps:
        if not p > 1:
            raise InvalidArgumentError(f"p must exceed 1, got {p}")
    grid = cfg.r_grid or DEFAULT_R_GRID
    maps = [cfg.map] if cfg.map is not None else random_analytic(cfg.count or 20, cfg.seed)
    out = []
    for i, f in enumerate(maps):
        for p in ps:
            rep = check_riesz_planar(f, p, grid)
            rep.parameters["map"] = cfg.map_label or f"analytic[{i}]"
            out.append(rep)
    return out


def _cor_maps(cfg: SuiteConfig) -> list:
    if cfg.map is not None:
        return [(cfg.map_label or type(cfg.map).__name__, cfg.map)]
    maps = [(f"sharpness(K={K})", SharpnessExample(K)) for K in (cfg.K_list or (1.0, 2.0, 5.0))]
    maps.append(("identity", identity_map(1)))
    for i, (f, kap) in enumerate(random_planar_qr(cfg.count or 10, cfg.seed, cfg.kappa)):
        maps.append((f"planar_qr[{i}]", f))
    return maps


def _suite_cor(cfg: SuiteConfig) -> list:
    ps = cfg.p_list or (1.25, 1.5, 2.0)
    for p in ps:
        _check_p_range(p)
    rs = cfg.r_grid or (0.5, 0.9, 0.99)
    out = []
    for label, f in _cor_maps(cfg):
        for p in ps:
            for r in rs:
                out.append(check_cor_1_2(f, cfg.coordinate, p, r, seed=cfg.seed, label=label))
    return out


def _suite_thm13(cfg: SuiteConfig) -> list:
    ps = cfg.p_list or (1.5, 2.0)
    for p in ps:
        _check_p_range(p)
    grid = cfg.r_grid or EXTENSION_R_GRID
    out = []
    if cfg.map is not None:
        maps = [(cfg.map_label or type(cfg.map).__name__, cfg.map)]
    else:
        maps = [(f"hyperbolic_extension_n3[{i}]", f)
                for i, f in enumerate(random_extensions(cfg.count or 5, cfg.seed, 3,
                                                         rule_level=cfg.level or EXTENSION_SUITE_LEVEL))]
    for label, f in maps:
        prefetch_means(f, grid, [(idx, p) for p in ps for idx in (None, (cfg.coordinate - 1,))])
        for p in ps:
            out.append(check_thm_1_3_B1(f, cfg.coordinate, p, grid, seed=cfg.seed, label=label))
    if cfg.map is None:
        out.extend(n2_cross_check(cfg.seed, ps))
    return out


def n2_cross_check(seed: int = DEFAULT_SEED, p_list=(1.5, 2.0), r: float = 0.9) -> list:
    """In the plane the hyperbolic and Euclidean kernels coincide; the
    domination check on the hyperbolic extension must agree with the
    same check on the Euclidean extension."""
    out = []
    for i, (fh, fe) in enumerate(zip(random_extensions(2, seed, 2, invariant=True),
                                     random_extensions(2, seed, 2, invariant=False))):
        for p in p_list:
            a = check_cor_1_2(fh, 1, p, r, seed=seed, label=f"hyperbolic_extension_n2[{i}]")
            b = check_cor_1_2(fe, 1, p, r, seed=seed, label=f"poisson_extension_n2[{i}]")
            diff = abs(a.lhs - b.lhs) + abs(a.rhs - b.rhs)
            agree = a.verdict == b.verdict
            out.append(make_report("thm_1_3.n2_cross_check", {"index": i, "p": p, "r": r, "seed": seed},
                                   diff, 1e-8, 0.0,
                                   details={"verdict_hyperbolic": a.verdict, "verdict_euclidean": b.verdict},
                                   verdict=composite_verdict([verdict_of(diff, 1e-8, 0.0),
                                                              "pass" if agree else "fail", a.verdict])))
    return out


def _suite_thm15(cfg: SuiteConfig) -> list:
    out = []
    grid = cfg.r_grid or PLURI_R_GRID
    count = cfg.count or 10
    if cfg.map is not None:
        for p in cfg.p_list or (1.5,):
            out.append(check_thm_1_5(cfg.map, p, grid, cfg.kappa, seed=cfg.seed, label=cfg.map_label))
        return out
    kappas = (0.0, 0.5) if cfg.kappa is None else (cfg.kappa,)
    for kappa in kappas:
        ps = cfg.p_list or ((1.5, 2.0, 3.0) if kappa == 0.0 else (1.5,))
        for n in (1, 2):
            fams = random_pluriharmonic(count // 2 + (count % 2 if n == 1 else 0), cfg.seed + n, n, kappa)
            for i, (f, kap) in enumerate(fams):
                for p in ps:
                    out.append(check_thm_1_5(f, p, grid, kap, seed=cfg.seed,
                                             label=f"pluriharmonic_n{n}_kappa{kap}[{i}]"))
    return out


def _suite_sharpness(cfg: SuiteConfig) -> list:
    grid = cfg.r_grid or DEFAULT_R_GRID
    tol = cfg.tolerance or 1e-4
    return [sharpness_probe(K, grid, tol, seed=cfg.seed) for K in (cfg.K_list or (1.0, 3.0))]


def _suite_prop11(cfg: SuiteConfig) -> list:
    kappas = (cfg.kappa,) if cfg.kappa is not None else (0.25, 0.5, 0.75)
    return [check_prop_1_1(cfg.seed, kappas, cfg.count or 5)]


def _suite_heinz(cfg: SuiteConfig) -> list:
    if cfg.map is not None:
        return [check_heinz_class(cfg.map, seed=cfg.seed, label=cfg.map_label)]
    maps = [(f"sharpness(K={K})", SharpnessExample(K)) for K in (cfg.K_list or (2.0,))]
    maps += [(f"planar_qr[{i}]", f) for i, (f, _) in enumerate(random_planar_qr(cfg.count or 3, cfg.seed))]
    maps.append(("squared_norm_n3", CustomMap(lambda x: np.column_stack([np.sum(x * x, axis=1), 0 * x[:, 0]]), 3, 2)))
    return [check_heinz_class(f, seed=cfg.seed, label=label) for label, f in maps]


def boundedness_consistency(f: MapSpec, k: int, p: float, r_grid=DEFAULT_R_GRID,
                            label: str = "") -> VerificationReport:
    """Qualitative form of the domination inequalities with non-explicit constants:
    bounded means of ``f_k`` must come with bounded means of ``f``."""
    nf = hardy_norm(f, p, r_grid)
    nk = hardy_norm(coordinate(f, k), p, r_grid)
    violated = (not nk.diverging) and nf.diverging
    return make_report("norms", {"map": label or type(f).__name__, "k": k, "p": p, "r_grid": list(r_grid)},
                       float(violated), 0.0, 0.0,
                       details={"coordinate_diverging": nk.diverging, "map_diverging": nf.diverging,
                                "sup_coordinate": nk.sup, "sup_map": nf.sup})


def _suite_norms(cfg: SuiteConfig) -> list:
    ps = cfg.p_list or (1.5, 2.0)
    grid = cfg.r_grid or DEFAULT_R_GRID
    if cfg.map is not None:
        maps = [(cfg.map_label or type(cfg.map).__name__, cfg.map)]
    else:
        maps = [(f"sharpness(K={K})", SharpnessExample(K)) for K in (cfg.K_list or (2.0,))]
        maps.append(("identity", identity_map(1)))
        maps += [(f"planar_qr[{i}]", f) for i, (f, _) in enumerate(random_planar_qr(cfg.count or 3, cfg.seed))]
    return [boundedness_consistency(f, cfg.coordinate, p, grid, label) for label, f in maps for p in ps]


def _suite_power_mean(cfg: SuiteConfig) -> list:
    rng = np.random.default_rng(cfg.seed)
    out = []
    for p in cfg.p_list or (0.5, 1.0, 2.0, 3.7):
        worst = None
        for _ in range(cfg.count or 1000):
            m = int(rng.integers(1, 11))
            a = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            lhs, rhs = power_mean_sides(a, p)
            cell = (lhs, rhs, 1e-12 * rhs)
            if worst is None or (rhs - lhs) / rhs < (worst[1] - worst[0]) / worst[1]:
                worst = cell
        out.append(make_report("power_mean", {"p": p, "count": cfg.count or 1000, "seed": cfg.seed}, *worst))
    return out


def _suite_green(cfg: SuiteConfig) -> list:
    tol_e = cfg.tolerance or 1e-5
    out = []
    ident = CustomMap(lambda x: x, 2, 2)
    for r in cfg.r_grid or (0.3, 0.7):
        res = hardy_stein_residual(ident, r, 2.0, details=True)
        out.append(make_report("green.euclidean", {"map": "identity_R2", "p": 2.0, "r": r},
                               res.residual, tol_e, 0.0, details=asdict(res)))
    for i, f in enumerate(random_analytic(cfg.count or 5, cfg.seed)):
        for p in cfg.p_list or (1.5, 2.0, 3.0):
            for r in cfg.r_grid or (0.3, 0.7):
                res = hardy_stein_residual(f, r, p, details=True)
                out.append(make_report("green.euclidean", {"map": f"analytic[{i}]", "p": p, "r": r,
                                                           "seed": cfg.seed},
                                       res.residual, tol_e, 0.0, details=asdict(res)))
    out.extend(invariant_green_checks(cfg.seed))
    return out


def invariant_green_checks(seed: int = DEFAULT_SEED, count: int = 1, r: float = 0.5,
                           tol: float = 1e-4) -> list:
    out = []
    for i, f in enumerate(random_extensions(count, seed, 3, invariant=True)):
        res = invariant_green_residual(f, r, details=True)
        out.append(make_report("green.invariant", {"map": f"hyperbolic_extension_n3[{i}]", "r": r, "seed": seed},
                               res.residual, tol, 0.0, details=asdict(res)))
    return out


_RUNNERS = {
    "riesz_planar": _suite_riesz,
    "cor_1_2": _suite_cor,
    "thm_1_3": _suite_thm13,
    "thm_1_5": _suite_thm15,
    "sharpness": _suite_sharpness,
    "prop_1_1": _suite_prop11,
    "heinz": _suite_heinz,
    "norms": _suite_norms,
    "power_mean": _suite_power_mean,
    "green_identities": _suite_green,
}


def run_suite(config: SuiteConfig | str, **kwargs) -> list:
    """Run a named suite and return its reports in a deterministic order."""
    cfg = config if isinstance(config, SuiteConfig) else SuiteConfig(config, **kwargs)
    return _RUNNERS[cfg.suite](cfg)


def suite_verdict(reports) -> str:
    return composite_verdict(r.verdict for r in reports)
