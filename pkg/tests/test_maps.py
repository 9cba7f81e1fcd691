from __future__ import annotations

import numpy as np
import pytest
from scipy import integrate

from rieszlab.errors import DomainError, InvalidArgumentError, PrecisionLossError
from rieszlab.maps import (BoundarySamples, CustomMap, DiskAnalytic, FourierHarmonic,
                           HolomorphicPolynomial, PlanarHarmonic, PluriharmonicPair, Projection,
                           Scaled, SharpnessExample, ShearCounterexample, approximate_zeros,
                           coordinate, evaluate, hyperbolic_poisson_extend, jet, poisson_extend)
from rieszlab.quadrature import sphere_rule


def test_sharpness_value_at_origin():
    assert np.allclose(evaluate(SharpnessExample(1.0), [0.0, 0.0]), [1.0, 0.0], atol=1e-15)
    assert np.allclose(evaluate(SharpnessExample(3.0), [0.0, 0.0]), [1.5, 0.0], atol=1e-15)


def test_sharpness_closed_form_matches_complex_form():
    f = SharpnessExample(2.5)
    x = np.array([[0.3, -0.4], [0.9, 0.1], [-0.5, 0.5]])
    z = x[:, 0] + 1j * x[:, 1]
    F = (1 + z) / (1 - z)
    k = f.kappa
    w = F + k * np.conj(F)
    assert np.allclose(evaluate(f, x), np.column_stack([w.real, w.imag]), atol=1e-13)


def test_shear_value_at_origin():
    f = ShearCounterexample(0.3)
    assert np.allclose(evaluate(f, np.zeros(4)), [0.0, 0.0, 1.3, 0.0], atol=1e-15)
    h, _ = f.h_parts(np.zeros((1, 2), dtype=complex))
    assert np.allclose(h[0], [0.0, 1.0])


def test_disk_analytic_square():
    f = DiskAnalytic([0, 0, 1])
    assert np.allclose(evaluate(f, [0.5, 0.0]), [0.25, 0.0])


def test_domain_errors():
    with pytest.raises(DomainError):
        evaluate(DiskAnalytic([0, 1]), [1.0, 0.0])
    ext = poisson_extend(lambda z: z[:, 0], 2)
    with pytest.raises(DomainError):
        evaluate(ext, [0.9995, 0.0])
    with pytest.raises(InvalidArgumentError):
        evaluate(DiskAnalytic([0, 1]), [0.1, 0.2, 0.3])


def test_planar_harmonic_requires_g0_zero():
    with pytest.raises(InvalidArgumentError):
        PlanarHarmonic([0, 1], [0.5, 0.1])


def _random_pairs(rng):
    h = HolomorphicPolynomial(2, ({(1, 0): 1.0, (1, 1): 0.2j}, {(0, 1): 1.0, (2, 0): -0.3}))
    g = HolomorphicPolynomial(2, ({(0, 2): 0.1}, {(1, 0): 0.2 + 0.1j}))
    return PluriharmonicPair(h, g)


@pytest.mark.parametrize("make", [
    lambda: DiskAnalytic([0.2, 1, 0.3 - 0.1j, 0.05j]),
    lambda: PlanarHarmonic([0.1, 1, 0.2], [0, 0.3, 0.1j]),
    lambda: SharpnessExample(2.0),
    lambda: ShearCounterexample(0.4),
    lambda: _random_pairs(None),
])
def test_analytic_jet_matches_finite_differences(make):
    f = make()
    pts = np.random.default_rng(3).uniform(-0.3, 0.3, (6, f.domain_dim))
    a = jet(f, pts)
    b = jet(f, pts, scheme="finite-difference")
    assert np.allclose(a.value, b.value, atol=1e-14)
    assert np.allclose(a.jacobian_real, b.jacobian_real, atol=1e-8)
    assert np.allclose(a.laplacians, b.laplacians, atol=1e-6)
    assert np.allclose(a.Df, b.Df, atol=1e-8) and np.allclose(a.Dbar, b.Dbar, atol=1e-8)


def test_jet_of_single_point_and_gradient_sq():
    jd = jet(DiskAnalytic([0, 0, 1]), [0.5, 0.0])
    assert jd.jacobian_real.shape == (2, 2)
    # z^2: df/dx = 2z, so |grad u|^2 = |grad v|^2 = 4|z|^2
    assert np.allclose(jd.gradient_sq, [1.0, 1.0])


def test_unknown_scheme():
    with pytest.raises(InvalidArgumentError):
        jet(DiskAnalytic([0, 1]), [0.1, 0.1], scheme="spectral")
    with pytest.raises(InvalidArgumentError):
        jet(CustomMap(lambda x: x, 2, 2), [0.1, 0.1], scheme="analytic")


def test_fd_precision_loss_near_cap():
    ext = poisson_extend(lambda z: z, 2)
    with pytest.raises(PrecisionLossError):
        jet(ext, [0.999 - 1e-8, 0.0], scheme="finite-difference")


def test_custom_map_laplacian():
    f = CustomMap(lambda x: np.sum(x * x, axis=1), 3, 1)
    jd = jet(f, [0.2, 0.1, -0.3])
    assert jd.laplacians[0] == pytest.approx(6.0, abs=1e-6)
    assert np.allclose(jd.jacobian_real[0], [0.4, 0.2, -0.6], atol=1e-9)


def test_poisson_extension_reproduces_cosine():
    ext = poisson_extend(lambda z: z[:, 0], 2)
    x = np.array([[0.3, 0.4], [-0.6, 0.2], [0.0, 0.8]])
    assert np.allclose(evaluate(ext, x)[:, 0], x[:, 0], atol=1e-8)


def test_poisson_extension_matches_quadrature_oracle():
    phi = lambda t: np.exp(np.cos(t)) * np.sin(2 * t)
    x = np.array([0.4, -0.3])
    kern = lambda t: (1 - x @ x) / ((x[0] - np.cos(t)) ** 2 + (x[1] - np.sin(t)) ** 2)
    ref = integrate.quad(lambda t: kern(t) * phi(t), 0, 2 * np.pi, epsabs=1e-13)[0] / (2 * np.pi)
    ext = poisson_extend(lambda z: np.exp(z[:, 0]) * 2 * z[:, 0] * z[:, 1], 2)
    assert evaluate(ext, x)[0] == pytest.approx(ref, abs=1e-10)


def test_extension_of_constant_is_exact():
    ext = hyperbolic_poisson_extend(lambda z: np.ones(len(z)), 3)
    x = np.array([[0.1, 0.2, 0.3], [0.99, 0.0, 0.0]])
    assert np.allclose(evaluate(ext, x), 1.0, atol=1e-15)
    ext = poisson_extend(lambda z: np.full(len(z), 2.5), 4)
    assert np.allclose(evaluate(ext, [0.5, 0.5, 0.0, 0.0]), 2.5)


@pytest.mark.parametrize("n", [3, 4])
def test_hyperbolic_kernel_integrates_to_one(n):
    rule = sphere_rule(n, 5 if n == 3 else 4)
    x = np.zeros(n)
    x[0] = 0.5
    d2 = np.sum((x - rule.nodes) ** 2, axis=1)
    total = np.sum(rule.weights * (1 - 0.25) ** (n - 1) / d2 ** (n - 1))
    assert total == pytest.approx(1.0, abs=1e-6)


def test_extension_value_at_origin_is_mean():
    phi = lambda z: z[:, 0] ** 2 + z[:, 1]
    for extend in (poisson_extend, hyperbolic_poisson_extend):
        ext = extend(phi, 3)
        assert evaluate(ext, np.zeros(3))[0] == pytest.approx(1 / 3, abs=1e-12)


def test_extensions_coincide_in_the_plane():
    phi = lambda z: np.column_stack([z[:, 0] ** 3, np.exp(z[:, 1])])
    a = poisson_extend(phi, 2)
    b = hyperbolic_poisson_extend(phi, 2)
    x = np.random.default_rng(1).uniform(-0.6, 0.6, (10, 2))
    assert np.allclose(evaluate(a, x), evaluate(b, x), atol=1e-8)


def test_extension_jets_are_harmonic():
    phi = lambda z: np.column_stack([z[:, 0] * z[:, 1], z[:, 2] ** 3])
    x = np.array([[0.2, -0.1, 0.3], [0.5, 0.1, 0.1]])
    jd = jet(poisson_extend(phi, 3), x)
    assert np.max(np.abs(jd.laplacians)) <= 1e-10
    f = hyperbolic_poisson_extend(phi, 3)
    jd = jet(f, x)
    s = 1 - np.sum(x * x, axis=1)
    inv = s[:, None] ** 2 * jd.laplacians + 2 * s[:, None] * np.einsum("ikj,ij->ik", jd.jacobian_real, x)
    assert np.max(np.abs(inv)) <= 1e-10
    fd = jet(f, x, scheme="finite-difference")
    assert np.allclose(jd.jacobian_real, fd.jacobian_real, atol=1e-8)
    assert np.allclose(jd.laplacians, fd.laplacians, atol=1e-5)


def test_boundary_samples_lookup():
    nodes = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    bs = BoundarySamples(nodes, [1.0, 2.0, 3.0, 4.0])
    assert bs(np.array([[0.9, 0.1]]))[0, 0] == 1.0
    assert bs(np.array([[-0.1, -0.99]]))[0, 0] == 4.0
    with pytest.raises(InvalidArgumentError):
        BoundarySamples(nodes, [1.0, 2.0])


def test_holomorphic_polynomial_algebra():
    I = HolomorphicPolynomial.identity(2)
    L = HolomorphicPolynomial.linear([[1, 2], [0, 1j]], [1, 0])
    S = I + L
    z = np.array([[0.1 + 0.2j, -0.3j]])
    assert np.allclose(S.value(z), z + (z @ np.array([[1, 2], [0, 1j]]).T + [1, 0]))
    assert np.allclose(S.jacobian(z)[0], np.eye(2) + [[1, 2], [0, 1j]])
    assert np.allclose(S.constant_term(), [1, 0])
    assert np.allclose(S.drop_constant().constant_term(), 0)
    C = np.array([[0, 1], [1, 0]])
    assert np.allclose(S.left_multiply(C).value(z), S.value(z) @ C.T)


def test_pluriharmonic_pair_requires_g0_zero():
    h = HolomorphicPolynomial.identity(2)
    with pytest.raises(InvalidArgumentError):
        PluriharmonicPair(h, HolomorphicPolynomial.linear(np.eye(2), [1, 0]))


def test_fourier_harmonic_and_projection():
    u = FourierHarmonic([1.0, 0.5], [0.0, 0.25])
    x = np.array([0.3, 0.4])
    r, t = 0.5, np.arctan2(0.4, 0.3)
    assert evaluate(u, x)[0] == pytest.approx(1 + r * (0.5 * np.cos(t) + 0.25 * np.sin(t)))
    f = DiskAnalytic([0, 1])
    assert evaluate(coordinate(f, 2), x)[0] == pytest.approx(0.4)
    with pytest.raises(InvalidArgumentError):
        coordinate(f, 3)
    with pytest.raises(InvalidArgumentError):
        Projection(f, (5,))


def test_scaled_map():
    f = Scaled(DiskAnalytic([0, 0, 1]), 3.0)
    assert np.allclose(evaluate(f, [0.5, 0.0]), [0.75, 0.0])
    assert np.allclose(jet(f, [0.5, 0.0]).jacobian_real, 3 * jet(DiskAnalytic([0, 0, 1]), [0.5, 0.0]).jacobian_real)


def test_approximate_zeros():
    f = DiskAnalytic([-0.25, 0, 1])
    zs = approximate_zeros(f, 0.9)
    assert sorted(np.round(zs[:, 0], 10)) == [-0.5, 0.5]
    g = PlanarHarmonic([-0.1, 1], [0, 0.2])
    zs = approximate_zeros(g, 0.9)
    # z + 0.2 conj(z) = 0.1 has the real root 0.1/1.2
    assert len(zs) == 1 and np.allclose(zs[0], [0.1 / 1.2, 0.0], atol=1e-10)
