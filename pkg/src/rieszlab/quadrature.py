"""Quadrature for the normalized surface measure on S^{n-1} and the
normalized volume measure on balls B^n_r.

Normalizations used throughout the package:

* ``sigma`` is the rotation-invariant probability measure on S^{n-1};
* ``dV_N`` is Lebesgue measure divided by the volume of the unit ball,
  so the unit ball has total mass 1 and B^n_r has mass r^n.

In polar coordinates ``dV_N = n rho^{n-1} d rho d sigma``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ConvergenceError, EvaluationError, InvalidArgumentError

DEFAULT_SEED = 0x5EED
MC_BASE_BUDGET = 2 ** 16
PRODUCT_NODE_LIMIT = 2 ** 22
# chunk size (points x inner nodes) for memory-bounded evaluation
CHUNK = 2 ** 16


@dataclass(frozen=True, eq=False)
class SphereRule:
    """Nodes and weights realizing sigma on S^{n-1}.

    ``method`` is ``"product-angular"`` (deterministic product rule) or
    ``"monte-carlo"`` (normalized Gaussian samples, equal weights).
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    level: int
    method: str = "product-angular"
    seed: int | None = None

    def __post_init__(self):
        # rules are cached and shared, so freeze the arrays
        self.nodes.flags.writeable = False
        self.weights.flags.writeable = False

    @property
    def size(self) -> int:
        return len(self.weights)


@dataclass(frozen=True, eq=False)
class BallRule:
    """Product rule for dV_N on B^n_r.

    ``radial_weights`` already carry the factor ``n rho^{n-1}``, so
    ``sum(radial_weights) == radius**dim`` and the integral of ``F`` is
    ``sum_i sum_j radial_weights[i] * sphere.weights[j] * F(rho_i zeta_j)``.
    """

    dim: int
    radius: float
    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    sphere: SphereRule
    breakpoints: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def size(self) -> int:
        return len(self.radial_nodes) * self.sphere.size


def _circle_nodes(count: int) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(count) / count
    return np.column_stack([np.cos(theta), np.sin(theta)])


def _polar_rule(n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    # last coordinate t of S^{n-1} has density proportional to (1-t^2)^{(n-3)/2}
    a = (n - 3) / 2.0
    if a == 0.0:
        t, w = special.roots_legendre(m)
    else:
        t, w = special.roots_jacobi(m, a, a)
    return t, w / w.sum()


def _product_sphere(n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    if n == 2:
        count = 2 * m
        return _circle_nodes(count), np.full(count, 1.0 / count)
    inner_nodes, inner_weights = _product_sphere(n - 1, m)
    t, wt = _polar_rule(n, m)
    s = np.sqrt(1.0 - t * t)
    nodes = np.concatenate(
        [np.kron(s[:, None], np.ones((len(inner_weights), 1))) * np.tile(inner_nodes, (m, 1)),
         np.repeat(t, len(inner_weights))[:, None]],
        axis=1,
    )
    weights = np.kron(wt, inner_weights)
    return nodes, weights


def _product_size(n: int, m: int) -> int:
    return 2 * m * m ** (n - 2)


def _normalize(nodes: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    nodes = nodes / np.linalg.norm(nodes, axis=1)[:, None]
    weights = weights / math.fsum(weights)
    return nodes, weights


@functools.lru_cache(maxsize=64)
def sphere_rule(n: int, level: int, method: str | None = None, seed: int = DEFAULT_SEED) -> SphereRule:
    """Build a quadrature rule for sigma on S^{n-1}.

    Parameters
    ----------
    n : int
        Ambient real dimension, ``n >= 2``.
    level : int
        Resolution, ``level >= 1``.  For product rules the polar factor
        uses ``4 * 2**(level-1)`` Gauss-Jacobi nodes per recursion step and
        the circle ``8 * 2**(level-1)`` equally spaced nodes, so ``n=2``,
        ``level=1`` gives 8 nodes.  Monte Carlo rules use
        ``2**16 * 2**(level-1)`` samples.
    method : {"product-angular", "monte-carlo"}, optional
        Defaults to the product rule for ``n <= 6`` and Monte Carlo above.
    seed : int
        Seed for the Monte Carlo stream; the stream is derived from
        ``(seed, level)`` so each call is reproducible on its own.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidArgumentError(f"sphere dimension must be an integer >= 2, got {n!r}")
    if not isinstance(level, (int, np.integer)) or level < 1:
        raise InvalidArgumentError(f"level must be an integer >= 1, got {level!r}")
    if method is None:
        method = "product-angular" if n <= 6 else "monte-carlo"

    if method == "product-angular":
        m = 4 * 2 ** (level - 1)
        if _product_size(n, m) > PRODUCT_NODE_LIMIT:
            raise InvalidArgumentError(
                f"product rule on S^{n - 1} at level {level} needs {_product_size(n, m)} nodes; "
                "lower the level or use method='monte-carlo'"
            )
        nodes, weights = _product_sphere(n, m)
        nodes, weights = _normalize(nodes, weights)
        return SphereRule(n, nodes, weights, level, method)
    if method == "monte-carlo":
        count = MC_BASE_BUDGET * 2 ** (level - 1)
        rng = np.random.default_rng(np.random.SeedSequence([seed, level]))
        nodes = rng.standard_normal((count, n))
        nodes, weights = _normalize(nodes, np.ones(count))
        return SphereRule(n, nodes, weights, level, method, seed)
    raise InvalidArgumentError(f"unknown sphere rule method {method!r}")


def circle_rule_from_breakpoints(breaks, level: int) -> SphereRule:
    """Composite Gauss-Legendre rule on the circle with panel ends ``breaks``.

    ``breaks`` are angles in ``[0, 2 pi]`` including both ends.  Used to
    grade the angular resolution toward known near-singular directions.
    """
    breaks = np.asarray(breaks, dtype=float)
    m = 4 * 2 ** (level - 1)
    x, w = special.roots_legendre(m)
    a, b = breaks[:-1], breaks[1:]
    half = 0.5 * (b - a)
    theta = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
    weights = (half[:, None] * w[None, :]).ravel() / (2.0 * np.pi)
    theta = theta.ravel()
    nodes = np.column_stack([np.cos(theta), np.sin(theta)])
    nodes, weights = _normalize(nodes, weights)
    return SphereRule(2, nodes, weights, level, "product-angular")


def _check_finite(values: np.ndarray, nodes: np.ndarray) -> None:
    flat = values.reshape(len(values), -1)
    bad = ~np.isfinite(flat).all(axis=1)
    if bad.any():
        i = int(np.argmax(bad))
        raise EvaluationError(f"integrand is not finite at node {nodes[i].tolist()}", node=nodes[i])


def integrate_sphere(rule: SphereRule, phi, return_error: bool = False):
    """Integrate ``phi`` against sigma with ``rule``.

    ``phi`` is vectorized: it receives the ``(N, n)`` node array and returns
    ``(N,)`` or ``(N, m)`` values.  With ``return_error=True`` the result is
    ``(value, err)`` where ``err`` is the Monte Carlo standard error (zero
    for product rules).
    """
    values = np.asarray(phi(rule.nodes))
    if values.shape[0] != rule.size:
        raise InvalidArgumentError("integrand must return one value (row) per node")
    _check_finite(values, rule.nodes)
    value = np.tensordot(rule.weights, values, axes=(0, 0))
    if not return_error:
        return float(value) if np.ndim(value) == 0 else value
    if rule.method == "monte-carlo":
        err = np.std(values, axis=0, ddof=1) / math.sqrt(rule.size)
    else:
        err = np.zeros_like(value)
    if np.ndim(value) == 0:
        return float(value), float(err)
    return value, err


def max_product_level(n: int) -> int:
    level = 1
    while _product_size(n, 4 * 2 ** level) <= PRODUCT_NODE_LIMIT:
        level += 1
    return level


def integrate_sphere_adaptive(n: int, phi, tol: float = 1e-10, start_level: int = 1,
                              max_level: int | None = None) -> tuple[float, float]:
    """Refine product rules until two consecutive levels agree.

    Returns ``(value, err)`` from the finest level, where ``err`` is the
    absolute difference to the previous level.  Raises
    :class:`ConvergenceError` if ``max_level`` is reached first; the error
    carries the last value and difference.
    """
    if max_level is None:
        max_level = max_product_level(n)
    prev = integrate_sphere(sphere_rule(n, start_level), phi)
    for level in range(start_level + 1, max_level + 1):
        cur = integrate_sphere(sphere_rule(n, level), phi)
        err = float(np.max(np.abs(np.asarray(cur) - np.asarray(prev))))
        if err <= tol * max(1.0, float(np.max(np.abs(cur)))):
            return cur, err
        prev = cur
    raise ConvergenceError(
        f"sphere quadrature on S^{n - 1} did not reach tolerance {tol:g} by level {max_level}",
        value=prev, err=err,
    )


def _gauss_panels(breaks: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = special.roots_legendre(m)
    a, b = breaks[:-1], breaks[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def graded_points(center: float, finest: float, lo: float, hi: float) -> list[float]:
    """Breakpoints ``center +- finest * 2**j`` clipped to ``(lo, hi)``."""
    out = [center] if lo < center < hi else []
    step = finest
    while step < (hi - lo):
        for p in (center - step, center + step):
            if lo < p < hi:
                out.append(p)
        step *= 2.0
    return out


def _dedupe(points: np.ndarray, gap: float) -> np.ndarray:
    points = np.sort(points)
    keep = [points[0]]
    for p in points[1:]:
        if p - keep[-1] > gap:
            keep.append(p)
    keep[-1] = points[-1]
    return np.asarray(keep)


def default_ball_sphere_level(n: int) -> int:
    return {2: 5}.get(n, 2)


def ball_rule(n: int, r: float, radial_level: int = 2, sphere_level: int | None = None,
              singular_points=None, finest: float = 1e-4) -> BallRule:
    """Build a product rule for dV_N on B^n_r.

    The radial factor is composite Gauss-Legendre on panels graded
    dyadically toward the origin (the Green kernel of the plane has a
    logarithmic singularity there).  ``singular_points`` lists points of
    the ball near which the integrand is known to vary on a small scale
    (zeros of a map, say); the radial panels, and for ``n = 2`` the angular
    panels too, are graded geometrically toward them down to ``finest``.
    """
    if not (0.0 < r <= 1.0):
        raise InvalidArgumentError(f"radius must lie in (0, 1], got {r!r}")
    if sphere_level is None:
        sphere_level = default_ball_sphere_level(n)
    if radial_level < 1 or sphere_level < 1:
        raise InvalidArgumentError("levels must be >= 1")
    dyadic = 24 if n == 2 else 3
    breaks = [0.0, r] + [r * 2.0 ** (-k) for k in range(1, dyadic + 1)]
    angle_breaks = []
    if singular_points is not None:
        for y in np.atleast_2d(np.asarray(singular_points, dtype=float)):
            rho0 = float(np.linalg.norm(y))
            if rho0 > r + 0.25:
                continue
            breaks.extend(graded_points(rho0, finest, 0.0, r))
            if n == 2 and rho0 > 4.0 * finest:
                theta0 = math.atan2(y[1], y[0]) % (2.0 * np.pi)
                for t in graded_points(theta0, finest / rho0, theta0 - np.pi, theta0 + np.pi):
                    angle_breaks.append(t % (2.0 * np.pi))
    breaks = _dedupe(np.asarray(breaks), 1e-15)
    m = 4 * 2 ** (radial_level - 1)
    rho, w = _gauss_panels(breaks, m)
    w = w * n * rho ** (n - 1)
    if angle_breaks:
        base = list(np.linspace(0.0, 2.0 * np.pi, 17))
        ab = _dedupe(np.asarray(base + angle_breaks), 1e-15)
        # 16 base panels: level L - 3 gives about the node count of the
        # uniform circle rule at level L
        sphere = circle_rule_from_breakpoints(ab, max(1, sphere_level - 3))
    else:
        sphere = sphere_rule(n, sphere_level)
    return BallRule(n, float(r), rho, w, sphere, breaks)


def integrate_ball(rule: BallRule, phi, radial_factor=None) -> float:
    """Integrate ``phi`` over B^n_r against dV_N.

    ``radial_factor(rho)``, if given, multiplies the integrand and is
    evaluated on the radial nodes only (e.g. a Green kernel depending on
    ``|x|``).  Evaluation is chunked over radial shells.
    """
    weights = rule.radial_weights
    if radial_factor is not None:
        weights = weights * np.asarray(radial_factor(rule.radial_nodes), dtype=float)
    S = rule.sphere.size
    per_chunk = max(1, CHUNK // S)
    total = 0.0
    for start in range(0, len(rule.radial_nodes), per_chunk):
        rho = rule.radial_nodes[start:start + per_chunk]
        pts = (rho[:, None, None] * rule.sphere.nodes[None, :, :]).reshape(-1, rule.dim)
        vals = np.asarray(phi(pts), dtype=float)
        _check_finite(vals, pts)
        vals = vals.reshape(len(rho), S)
        total += float(weights[start:start + per_chunk] @ (vals @ rule.sphere.weights))
    return total


def radial_rule(level: int = 3, upper: float = 1.0, lower: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights for ``int_lower^upper . dr``.

    Panels are graded geometrically toward ``upper`` so that integrands
    whose scale shrinks like ``1 - r`` near the boundary are resolved.
    """
    if not (0.0 <= lower < upper <= 1.0):
        raise InvalidArgumentError("radial interval must satisfy 0 <= lower < upper <= 1")
    m = 4 * 2 ** (level - 1)
    breaks = [lower, upper]
    gap = upper - lower
    k = 1
    while gap * 2.0 ** (-k) > 1e-6 and k < 24:
        breaks.append(upper - gap * 2.0 ** (-k))
        k += 1
    return _gauss_panels(np.sort(np.asarray(breaks)), m)
