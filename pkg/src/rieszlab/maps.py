"""Mappings on the unit ball and their pointwise jets.

Points are real arrays.  A map on the complex ball of C^n is evaluated at
real points ``(x_1, y_1, ..., x_n, y_n)`` with ``z_j = x_j + i y_j`` and
returns real vectors ``(u_1, v_1, ..., u_n, v_n)``.  All evaluation is
vectorized over a leading axis: ``(N, d)`` points give ``(N, m)`` values.

Every complex variant is written as ``f = h + conj(g)`` with ``h, g``
holomorphic and ``g(0) = 0``, so that ``Df = Dh`` and
``conj(Dbar f) = Dg``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.spatial import cKDTree

from .errors import DomainError, InvalidArgumentError, PrecisionLossError
from .quadrature import CHUNK, SphereRule, sphere_rule

EXTENSION_RADIUS_CAP = 0.999
FD_STEP = 1e-5
FD_LAPLACE_STEP = 1e-3


@dataclass
class JetData:
    """Value and first/second order data of a map at a batch of points.

    ``jacobian_real[i, k, j] = d f_k / d x_j`` in real coordinates;
    ``laplacians[i, k] = Laplacian of f_k``.  ``Df`` and ``Dbar`` are the
    complex derivative matrices ``d f_k / d z_j`` and ``d f_k / d zbar_j``
    and are only present for complex variants.
    """

    value: np.ndarray
    jacobian_real: np.ndarray
    laplacians: np.ndarray
    Df: np.ndarray | None = None
    Dbar: np.ndarray | None = None
    scheme: str = "analytic"

    def __getitem__(self, i) -> "JetData":
        pick = lambda a: None if a is None else a[i]
        return JetData(self.value[i], self.jacobian_real[i], self.laplacians[i],
                       pick(self.Df), pick(self.Dbar), self.scheme)

    @property
    def gradient_sq(self) -> np.ndarray:
        """Per-component ``|grad f_k|^2``."""
        return np.sum(self.jacobian_real ** 2, axis=-1)


def _as_points(x, dim: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != dim:
        raise InvalidArgumentError(f"expected points in R^{dim}, got shape {x.shape}")
    return x, single


def _check_domain(x: np.ndarray, cap: float = 1.0) -> None:
    rad = np.linalg.norm(x, axis=1)
    if cap >= 1.0:
        bad = rad >= 1.0
    else:
        bad = rad > cap
    if bad.any():
        i = int(np.argmax(bad))
        raise DomainError(f"point {x[i].tolist()} has norm {rad[i]:.6g}; "
                          f"the map is evaluated only for |x| {'< 1' if cap >= 1.0 else f'<= {cap}'}")


def to_complex(x: np.ndarray) -> np.ndarray:
    """``(N, 2n)`` real points to ``(N, n)`` complex points."""
    return x[:, 0::2] + 1j * x[:, 1::2]


def to_real(z: np.ndarray) -> np.ndarray:
    """``(N, n)`` complex values to interleaved ``(N, 2n)`` real values."""
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def real_jacobian(Df: np.ndarray, Dbar: np.ndarray) -> np.ndarray:
    """Real Jacobian of ``f`` from ``Df`` and ``Dbar`` (batched).

    With ``a = df_k/dz_j`` and ``b = df_k/dzbar_j`` one has
    ``df_k/dx_j = a + b`` and ``df_k/dy_j = i (a - b)``.
    """
    dx = Df + Dbar
    dy = 1j * (Df - Dbar)
    N, n, _ = Df.shape
    J = np.empty((N, 2 * n, 2 * n))
    J[:, 0::2, 0::2] = dx.real
    J[:, 1::2, 0::2] = dx.imag
    J[:, 0::2, 1::2] = dy.real
    J[:, 1::2, 1::2] = dy.imag
    return J


class MapSpec:
    """Base class of all map variants."""

    domain_dim: int
    codomain_dim: int
    radius_cap: float = 1.0

    def _value(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _jet(self, x: np.ndarray) -> JetData:
        raise NotImplementedError

    @property
    def has_analytic_jet(self) -> bool:
        return type(self)._jet is not MapSpec._jet

    @property
    def is_complex(self) -> bool:
        return False


class ComplexHarmonicMap(MapSpec):
    """``f = h + conj(g)`` on the unit ball of C^n."""

    n: int

    @property
    def domain_dim(self) -> int:
        return 2 * self.n

    @property
    def codomain_dim(self) -> int:
        return 2 * self.n

    @property
    def is_complex(self) -> bool:
        return True

    def holomorphic_parts(self, z: np.ndarray):
        """Return ``h, Dh, g, Dg`` at complex points ``z`` of shape (N, n)."""
        raise NotImplementedError

    def complex_value(self, z) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        h, _, g, _ = self.holomorphic_parts(z)
        return h + np.conj(g)

    def _value(self, x):
        return to_real(self.complex_value(to_complex(x)))

    def _jet(self, x):
        z = to_complex(x)
        h, Dh, g, Dg = self.holomorphic_parts(z)
        Df = Dh
        Dbar = np.conj(Dg)
        return JetData(
            value=to_real(h + np.conj(g)),
            jacobian_real=real_jacobian(Df, Dbar),
            laplacians=np.zeros((len(x), 2 * self.n)),
            Df=Df, Dbar=Dbar, scheme="analytic",
        )


def _poly1(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size == 0:
        c = np.zeros(1, dtype=complex)
    return c


@dataclass(frozen=True, eq=False)
class DiskAnalytic(ComplexHarmonicMap):
    """Complex polynomial ``a_0 + a_1 z + ... + a_d z^d`` on the disk."""

    coeffs: np.ndarray
    n: int = field(default=1, init=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _poly1(self.coeffs))

    def holomorphic_parts(self, z):
        w = z[:, 0]
        h = npoly.polyval(w, self.coeffs)[:, None]
        dh = npoly.polyval(w, npoly.polyder(self.coeffs))[:, None, None]
        zero = np.zeros_like(h)
        return h, dh, zero, np.zeros_like(dh)


@dataclass(frozen=True, eq=False)
class PlanarHarmonic(ComplexHarmonicMap):
    """``f = h + conj(g)`` on the disk with polynomial ``h, g`` and ``g(0) = 0``."""

    h: np.ndarray
    g: np.ndarray
    n: int = field(default=1, init=False)

    def __post_init__(self):
        h, g = _poly1(self.h), _poly1(self.g)
        if abs(g[0]) != 0.0:
            raise InvalidArgumentError("g must satisfy g(0) = 0")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)

    def holomorphic_parts(self, z):
        w = z[:, 0]
        h = npoly.polyval(w, self.h)[:, None]
        dh = npoly.polyval(w, npoly.polyder(self.h))[:, None, None]
        g = npoly.polyval(w, self.g)[:, None]
        dg = npoly.polyval(w, npoly.polyder(self.g))[:, None, None]
        return h, dh, g, dg


@dataclass(frozen=True, eq=False)
class HolomorphicPolynomial:
    """Polynomial map C^n -> C^n.

    ``components[k]`` maps exponent tuples ``(e_1, ..., e_n)`` to complex
    coefficients of ``z_1^{e_1} ... z_n^{e_n}`` in the k-th component.
    """

    n: int
    components: tuple

    def __post_init__(self):
        comps = tuple({tuple(int(e) for e in k): complex(v) for k, v in dict(c).items()}
                      for c in self.components)
        if len(comps) != self.n or any(len(k) != self.n for c in comps for k in c):
            raise InvalidArgumentError("polynomial components do not match the dimension")
        object.__setattr__(self, "components", comps)

    @classmethod
    def identity(cls, n: int) -> "HolomorphicPolynomial":
        return cls.linear(np.eye(n))

    @classmethod
    def linear(cls, A, b=None) -> "HolomorphicPolynomial":
        A = np.asarray(A, dtype=complex)
        n = A.shape[0]
        comps = []
        for k in range(n):
            c = {}
            for j in range(n):
                if A[k, j] != 0:
                    c[tuple(int(i == j) for i in range(n))] = A[k, j]
            if b is not None and b[k] != 0:
                c[(0,) * n] = complex(b[k])
            comps.append(c)
        return cls(n, tuple(comps))

    def __add__(self, other: "HolomorphicPolynomial") -> "HolomorphicPolynomial":
        comps = []
        for a, b in zip(self.components, other.components):
            c = dict(a)
            for k, v in b.items():
                c[k] = c.get(k, 0.0) + v
            comps.append(c)
        return HolomorphicPolynomial(self.n, tuple(comps))

    def left_multiply(self, C) -> "HolomorphicPolynomial":
        """The polynomial ``z -> C h(z)`` for a constant matrix ``C``."""
        C = np.asarray(C, dtype=complex)
        comps = []
        for k in range(self.n):
            c = {}
            for j in range(self.n):
                if C[k, j] == 0:
                    continue
                for e, v in self.components[j].items():
                    c[e] = c.get(e, 0.0) + C[k, j] * v
            comps.append(c)
        return HolomorphicPolynomial(self.n, tuple(comps))

    def constant_term(self) -> np.ndarray:
        zero = (0,) * self.n
        return np.array([c.get(zero, 0.0) for c in self.components], dtype=complex)

    def drop_constant(self) -> "HolomorphicPolynomial":
        zero = (0,) * self.n
        return HolomorphicPolynomial(self.n, tuple({k: v for k, v in c.items() if k != zero}
                                                   for c in self.components))

    def value(self, z: np.ndarray) -> np.ndarray:
        out = np.zeros((len(z), self.n), dtype=complex)
        for k, comp in enumerate(self.components):
            for e, v in comp.items():
                out[:, k] += v * np.prod(z ** np.asarray(e), axis=1)
        return out

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        out = np.zeros((len(z), self.n, self.n), dtype=complex)
        for k, comp in enumerate(self.components):
            for e, v in comp.items():
                e = np.asarray(e)
                for j in range(self.n):
                    if e[j] == 0:
                        continue
                    ej = e.copy()
                    ej[j] -= 1
                    out[:, k, j] += v * e[j] * np.prod(z ** ej, axis=1)
        return out


@dataclass(frozen=True, eq=False)
class PluriharmonicPair(ComplexHarmonicMap):
    """``f = h + conj(g)`` on the ball of C^n with polynomial ``h, g``, ``g(0) = 0``."""

    h: HolomorphicPolynomial
    g: HolomorphicPolynomial

    def __post_init__(self):
        if self.h.n != self.g.n:
            raise InvalidArgumentError("h and g must act on the same C^n")
        if np.any(self.g.constant_term() != 0):
            raise InvalidArgumentError("g must satisfy g(0) = 0")

    @property
    def n(self) -> int:
        return self.h.n

    def holomorphic_parts(self, z):
        return self.h.value(z), self.h.jacobian(z), self.g.value(z), self.g.jacobian(z)


@dataclass(frozen=True, eq=False)
class SharpnessExample(ComplexHarmonicMap):
    """The planar K-quasiconformal map ``F + kappa conj(F)``, ``F = (1+z)/(1-z)``.

    In real coordinates

        f_1 = 2K (1 - |x|^2) / ((K+1) |x - e_1|^2),
        f_2 = 4 x_2 / ((K+1) |x - e_1|^2),

    so ``f_1`` is ``2K/(K+1)`` times the Poisson kernel at ``e_1``.
    """

    K: float
    n: int = field(default=1, init=False)

    def __post_init__(self):
        if not (np.isfinite(self.K) and self.K >= 1.0):
            raise InvalidArgumentError(f"K must be >= 1, got {self.K!r}")

    @property
    def kappa(self) -> float:
        return (self.K - 1.0) / (self.K + 1.0)

    def holomorphic_parts(self, z):
        w = z[:, 0]
        F = (1.0 + w) / (1.0 - w)
        dF = 2.0 / (1.0 - w) ** 2
        k = self.kappa
        # constants moved into h so that g(0) = 0
        h = (F + k)[:, None]
        g = (k * (F - 1.0))[:, None]
        return h, dF[:, None, None], g, (k * dF)[:, None, None]

    def _value(self, x):
        # closed real form, used by eval so the explicit formulas are what is sampled
        d2 = (1.0 - x[:, 0]) ** 2 + x[:, 1] ** 2
        s = 1.0 - x[:, 0] ** 2 - x[:, 1] ** 2
        K = self.K
        return np.column_stack([2.0 * K * s / ((K + 1.0) * d2), 4.0 * x[:, 1] / ((K + 1.0) * d2)])


@dataclass(frozen=True, eq=False)
class ShearCounterexample(ComplexHarmonicMap):
    """``f = h + kappa conj(h)`` with ``h(z) = (z_1, z_2 + 1/(1 - z_1))`` on the ball of C^2."""

    kappa: float
    n: int = field(default=2, init=False)

    def __post_init__(self):
        if not (0.0 <= self.kappa < 1.0):
            raise InvalidArgumentError(f"kappa must lie in [0, 1), got {self.kappa!r}")

    def h_parts(self, z):
        z1, z2 = z[:, 0], z[:, 1]
        h = np.column_stack([z1, z2 + 1.0 / (1.0 - z1)])
        Dh = np.zeros((len(z), 2, 2), dtype=complex)
        Dh[:, 0, 0] = 1.0
        Dh[:, 1, 0] = 1.0 / (1.0 - z1) ** 2
        Dh[:, 1, 1] = 1.0
        return h, Dh

    def holomorphic_parts(self, z):
        h, Dh = self.h_parts(z)
        h0 = np.array([0.0, 1.0])
        k = self.kappa
        return h + k * h0, Dh, k * (h - h0), k * Dh


class BoundarySamples:
    """Boundary data given as samples on a spherical grid.

    Evaluation at a point of the sphere returns the value of the nearest
    sample node.
    """

    def __init__(self, nodes, values):
        self.nodes = np.asarray(nodes, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim == 1:
            self.values = self.values[:, None]
        if len(self.nodes) != len(self.values):
            raise InvalidArgumentError("boundary grid needs one value row per node")
        self._tree = cKDTree(self.nodes)

    def __call__(self, zeta):
        _, idx = self._tree.query(np.atleast_2d(zeta))
        return self.values[idx]


def _boundary_values(phi, rule: SphereRule) -> np.ndarray:
    vals = np.asarray(phi(rule.nodes), dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    if vals.shape[0] != rule.size or not np.isfinite(vals).all():
        raise InvalidArgumentError("boundary function must be finite at every sphere node")
    return vals


def _neg_power(a: np.ndarray, e: float) -> np.ndarray:
    """``a ** -e`` using multiplications when ``e`` is an integer or half-integer."""
    if 2 * e != int(2 * e) or e > 16:
        return a ** -e
    out = np.reciprocal(np.sqrt(a)) if int(2 * e) % 2 else np.ones_like(a)
    inv = np.reciprocal(a)
    for _ in range(int(e)):
        out = out * inv
    return out


class _KernelExtension(MapSpec):
    """Shared machinery for kernel integrals ``sum_j w_j K(x, zeta_j) phi(zeta_j)``."""

    radius_cap = EXTENSION_RADIUS_CAP

    def __init__(self, phi, n: int, level: int | None = None, rule: SphereRule | None = None):
        if rule is None:
            if level is None:
                level = default_extension_level(n)
            rule = sphere_rule(n, level)
        if rule.dim != n:
            raise InvalidArgumentError("rule dimension does not match n")
        self.phi = phi
        self.n = n
        self.rule = rule
        self.samples = _boundary_values(phi, rule)
        self.weighted = rule.weights[:, None] * self.samples
        self.domain_dim = n
        self.codomain_dim = self.samples.shape[1]
        # constant data extends to the constant itself; the discrete kernel
        # sum would only reproduce it away from the boundary
        self.constant = np.ptp(self.samples, axis=0) == 0.0
        self.weighted[:, self.constant] = 0.0
        self.offset = np.where(self.constant, self.samples[0], 0.0)

    def _kernel(self, x, d, dist2):
        raise NotImplementedError

    def _chunks(self, N):
        step = max(1, CHUNK * 16 // self.rule.size)
        for start in range(0, N, step):
            yield slice(start, min(N, start + step))

    def _value(self, x):
        out = np.empty((len(x), self.codomain_dim))
        for sl in self._chunks(len(x)):
            xs = x[sl]
            # |x - zeta|^2 = |x|^2 + 1 - 2<x, zeta> on the unit sphere; the
            # cancellation is harmless since |x| <= EXTENSION_RADIUS_CAP
            dist2 = np.sum(xs * xs, axis=1)[:, None] + 1.0 - 2.0 * (xs @ self.rule.nodes.T)
            P = self._kernel(xs, None, dist2)[0]
            out[sl] = P @ self.weighted
        return out + self.offset

    def _jet(self, x):
        N, n, m = len(x), self.n, self.codomain_dim
        val = np.empty((N, m))
        jac = np.empty((N, m, n))
        lap = np.empty((N, m))
        for sl in self._chunks(N):
            xs = x[sl]
            d = xs[:, None, :] - self.rule.nodes[None, :, :]
            dist2 = np.einsum("ijk,ijk->ij", d, d)
            P, gradP, lapP = self._kernel(xs, d, dist2, derivatives=True)
            val[sl] = P @ self.weighted
            jac[sl] = np.einsum("ijk,jm->imk", gradP, self.weighted)
            lap[sl] = lapP @ self.weighted
        return JetData(val + self.offset, jac, lap, scheme="analytic")


class HarmonicExtension(_KernelExtension):
    """Euclidean Poisson extension ``P[phi]`` with ``P(x, zeta) = (1-|x|^2)/|x-zeta|^n``.

    The sphere integral is discretized once with ``rule``.  The discrete
    kernel sum is itself exactly harmonic, so jets use the analytic kernel
    derivatives.  It resolves the continuous extension only where ``1-|x|``
    is large compared with the node spacing of ``rule``.
    """

    def _kernel(self, x, d, dist2, derivatives=False):
        n = self.n
        s = (1.0 - np.sum(x * x, axis=1))[:, None]
        inv = _neg_power(dist2, n / 2.0)
        P = s * inv
        if not derivatives:
            return (P,)
        grad = (-2.0 * x[:, None, :] * inv[..., None]
                - n * (s * inv / dist2)[..., None] * d)
        xd = np.einsum("ik,ijk->ij", x, d)
        lap = 2.0 * n * inv / dist2 * (-dist2 + s + 2.0 * xd)
        return P, grad, lap


class InvariantHarmonicExtension(_KernelExtension):
    """Hyperbolic Poisson extension with ``P_h(x, zeta) = (1-|x|^2)^{n-1}/|x-zeta|^{2n-2}``."""

    def _kernel(self, x, d, dist2, derivatives=False):
        n = self.n
        r2 = np.sum(x * x, axis=1)[:, None]
        s = 1.0 - r2
        q = 2.0 - 2.0 * n
        B = _neg_power(dist2, n - 1.0)
        A = s ** (n - 1)
        P = A * B
        if not derivatives:
            return (P,)
        gradA = -2.0 * (n - 1) * s ** (n - 2)            # times x
        gradB = q * dist2 ** (q / 2.0 - 1.0)              # times d
        lapA = -2.0 * n * (n - 1) * s ** (n - 2) + 4.0 * (n - 1) * (n - 2) * r2 * s ** (n - 3)
        lapB = q * (q + n - 2) * dist2 ** (q / 2.0 - 1.0)
        xd = np.einsum("ik,ijk->ij", x, d)
        grad = gradA[..., None] * B[..., None] * x[:, None, :] + (A * gradB)[..., None] * d
        lap = B * lapA + A * lapB + 2.0 * gradA * gradB * xd
        return P, grad, lap


def default_extension_level(n: int) -> int:
    return {2: 6, 3: 4, 4: 3}.get(n, 2)


def poisson_extend(phi, n: int, m: int | None = None, rule_level: int | None = None) -> HarmonicExtension:
    """Euclidean Poisson extension of boundary data ``phi`` on S^{n-1}.

    ``phi`` is a vectorized callable ``(M, n) -> (M,)`` or ``(M, m)``, or a
    :class:`BoundarySamples` grid.  ``m``, if given, is checked against the
    number of returned components.
    """
    ext = HarmonicExtension(phi, n, rule_level)
    if m is not None and ext.codomain_dim != m:
        raise InvalidArgumentError(f"boundary function has {ext.codomain_dim} components, expected {m}")
    return ext


def hyperbolic_poisson_extend(phi, n: int, m: int | None = None,
                              rule_level: int | None = None) -> InvariantHarmonicExtension:
    """Invariant-harmonic extension of ``phi`` by the hyperbolic Poisson kernel."""
    ext = InvariantHarmonicExtension(phi, n, rule_level)
    if m is not None and ext.codomain_dim != m:
        raise InvalidArgumentError(f"boundary function has {ext.codomain_dim} components, expected {m}")
    return ext


@dataclass(frozen=True, eq=False)
class FourierHarmonic(MapSpec):
    """Real harmonic function ``a_0 + sum_k r^k (a_k cos k theta + b_k sin k theta)`` on the disk.

    ``b[0]`` is ignored.  Internally this is ``Re sum_k c_k z^k`` with
    ``c_k = a_k - i b_k``.
    """

    a: np.ndarray
    b: np.ndarray
    domain_dim: int = field(default=2, init=False)
    codomain_dim: int = field(default=1, init=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).ravel()
        b = np.asarray(self.b, dtype=float).ravel()
        size = max(len(a), len(b), 1)
        a = np.pad(a, (0, size - len(a)))
        b = np.pad(b, (0, size - len(b)))
        b[0] = 0.0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def analytic(self) -> DiskAnalytic:
        return DiskAnalytic(self.a - 1j * self.b)

    def _value(self, x):
        return self.analytic._value(x)[:, :1]

    def _jet(self, x):
        return _project(self.analytic._jet(x), [0])


def _project(j: JetData, idx) -> JetData:
    return JetData(j.value[:, idx], j.jacobian_real[:, idx, :], j.laplacians[:, idx],
                   None, None, j.scheme)


@dataclass(frozen=True, eq=False)
class Projection(MapSpec):
    """Selected real components of another map (0-based ``indices``)."""

    base: MapSpec
    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx or min(idx) < 0 or max(idx) >= self.base.codomain_dim:
            raise InvalidArgumentError(f"component indices {idx} out of range")
        object.__setattr__(self, "indices", idx)

    @property
    def domain_dim(self):
        return self.base.domain_dim

    @property
    def codomain_dim(self):
        return len(self.indices)

    @property
    def radius_cap(self):
        return self.base.radius_cap

    @property
    def has_analytic_jet(self):
        return self.base.has_analytic_jet

    def _value(self, x):
        return self.base._value(x)[:, list(self.indices)]

    def _jet(self, x):
        return _project(self.base._jet(x), list(self.indices))


def coordinate(f: MapSpec, k: int) -> Projection:
    """The k-th real coordinate function of ``f`` (1-based)."""
    if not (1 <= k <= f.codomain_dim):
        raise InvalidArgumentError(f"coordinate index {k} not in 1..{f.codomain_dim}")
    return Projection(f, (k - 1,))


@dataclass(frozen=True, eq=False)
class CustomMap(MapSpec):
    """Arbitrary vectorized map ``func: (N, d) -> (N, m)``; jets by finite differences."""

    func: Callable
    domain_dim: int
    codomain_dim: int

    def _value(self, x):
        v = np.asarray(self.func(x), dtype=float)
        return v.reshape(len(x), self.codomain_dim)


@dataclass(frozen=True, eq=False)
class Scaled(MapSpec):
    """``c * f`` for a real constant ``c``."""

    base: MapSpec
    c: float

    @property
    def domain_dim(self):
        return self.base.domain_dim

    @property
    def codomain_dim(self):
        return self.base.codomain_dim

    @property
    def radius_cap(self):
        return self.base.radius_cap

    @property
    def has_analytic_jet(self):
        return self.base.has_analytic_jet

    def _value(self, x):
        return self.c * self.base._value(x)

    def _jet(self, x):
        j = self.base._jet(x)
        sc = lambda a: None if a is None else self.c * a
        return JetData(self.c * j.value, self.c * j.jacobian_real, self.c * j.laplacians,
                       sc(j.Df), sc(j.Dbar), j.scheme)


def evaluate(f: MapSpec, x) -> np.ndarray:
    """Evaluate ``f`` at one point ``(d,)`` or a batch ``(N, d)``."""
    pts, single = _as_points(x, f.domain_dim)
    _check_domain(pts, f.radius_cap)
    v = f._value(pts)
    return v[0] if single else v


eval_map = evaluate


def _fd_jet(f: MapSpec, x: np.ndarray) -> JetData:
    N, d = x.shape
    cap = min(f.radius_cap, 1.0)
    room = cap - np.linalg.norm(x, axis=1)
    # steps shrink near the boundary so the stencil (reach 2 steps) stays inside
    h = np.minimum(FD_STEP, room / 4.0)[:, None]
    hl = np.minimum(FD_LAPLACE_STEP, room / 4.0)[:, None]
    if np.any(hl < 1e-7):
        i = int(np.argmax(hl[:, 0] < 1e-7))
        raise PrecisionLossError(f"finite-difference stencil at {x[i].tolist()} is too close to the boundary")
    eye = np.eye(d)
    val = f._value(x)
    m = val.shape[1]

    def central(step):
        J = np.empty((N, m, d))
        for j in range(d):
            J[:, :, j] = (f._value(x + step * eye[j]) - f._value(x - step * eye[j])) / (2.0 * step)
        return J

    def second(step):
        L = np.zeros((N, m))
        for j in range(d):
            L += f._value(x + step * eye[j]) - 2.0 * val + f._value(x - step * eye[j])
        return L / step ** 2

    jac = (4.0 * central(h / 2.0) - central(h)) / 3.0
    lap = (4.0 * second(hl / 2.0) - second(hl)) / 3.0
    Df = Dbar = None
    if f.is_complex:
        # d/dz = (d/dx - i d/dy)/2 and d/dzbar = (d/dx + i d/dy)/2 on complex components
        fx = jac[:, 0::2, 0::2] + 1j * jac[:, 1::2, 0::2]
        fy = jac[:, 0::2, 1::2] + 1j * jac[:, 1::2, 1::2]
        Df = 0.5 * (fx - 1j * fy)
        Dbar = 0.5 * (fx + 1j * fy)
    return JetData(val, jac, lap, Df, Dbar, scheme="finite-difference")


def jet(f: MapSpec, x, scheme: str | None = None) -> JetData:
    """Jet of ``f`` at one point or a batch.

    ``scheme`` is ``"analytic"`` (default where available) or
    ``"finite-difference"``.
    """
    pts, single = _as_points(x, f.domain_dim)
    _check_domain(pts, f.radius_cap)
    if scheme is None:
        scheme = "analytic" if f.has_analytic_jet else "finite-difference"
    if scheme == "analytic":
        if not f.has_analytic_jet:
            raise InvalidArgumentError(f"{type(f).__name__} has no analytic jet")
        out = f._jet(pts)
    elif scheme == "finite-difference":
        out = _fd_jet(f, pts)
    else:
        raise InvalidArgumentError(f"unknown jet scheme {scheme!r}")
    return out[0] if single else out


def approximate_zeros(f: MapSpec, radius: float, grid: int = 200) -> np.ndarray:
    """Zeros of a planar map ``R^2 -> R^2`` inside the disk of given radius.

    Polynomial variants use the companion matrix; other maps use grid
    minima of ``|f|`` refined by Newton steps on the real Jacobian.
    Returns real points of shape ``(k, 2)``.
    """
    if f.domain_dim != 2 or f.codomain_dim != 2:
        return np.empty((0, f.domain_dim))
    if isinstance(f, DiskAnalytic):
        c = np.trim_zeros(f.coeffs, "b")
        if len(c) <= 1:
            return np.empty((0, 2))
        roots = np.roots(c[::-1])
        roots = roots[np.abs(roots) < radius + 1e-3]
        return np.column_stack([roots.real, roots.imag])
    t = np.linspace(-radius, radius, grid)
    X, Y = np.meshgrid(t, t)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    pts = pts[np.linalg.norm(pts, axis=1) < min(radius, 0.999 * f.radius_cap)]
    mag = np.linalg.norm(f._value(pts), axis=1)
    scale = max(float(np.max(mag)), 1e-300)
    cand = pts[mag < 0.05 * scale]
    found = []
    for p in cand:
        z = p.copy()
        for _ in range(30):
            if np.linalg.norm(z) >= 0.9999 * f.radius_cap:
                break
            jd = jet(f, z)
            try:
                step = np.linalg.solve(jd.jacobian_real, jd.value)
            except np.linalg.LinAlgError:
                break
            z = z - step
            if np.linalg.norm(step) < 1e-14:
                break
        if (np.linalg.norm(z) < radius + 1e-3 and np.linalg.norm(f._value(z[None]))
                < 1e-10 * max(1.0, scale)):
            if all(np.linalg.norm(z - q) > 1e-8 for q in found):
                found.append(z)
    return np.asarray(found).reshape(-1, 2)
