from __future__ import annotations

import math

import numpy as np
import pytest

from rieszlab.errors import InvalidArgumentError
from rieszlab.maps import (CustomMap, DiskAnalytic, HolomorphicPolynomial, PlanarHarmonic,
                           PluriharmonicPair, Scaled, SharpnessExample, hyperbolic_poisson_extend,
                           poisson_extend)
from rieszlab.verify import (SuiteConfig, VerificationReport, check_cor_1_2, check_heinz_class,
                             check_prop_1_1, check_riesz_planar, check_thm_1_3_B1, check_thm_1_5,
                             composite_verdict, domination_constant, identity_map, make_report,
                             random_analytic, random_pluriharmonic, random_planar_qr, riesz_cot,
                             run_suite, sampled_second_dilatation, sharpness_probe, verdict_of)


def test_verdict_rule():
    assert verdict_of(1.0, 2.0, 0.0) == "pass"
    assert verdict_of(1.0, 1.0, 0.0) == "pass"
    assert verdict_of(1.0 + 1e-13, 1.0, 0.0) == "pass"          # rounding floor
    assert verdict_of(1.1, 1.0, 0.2) == "pass"
    assert verdict_of(1.1, 1.0, 0.01) == "fail"
    assert verdict_of(1.1, 1.0, 0.02, slack=10) == "inconclusive"
    assert verdict_of(float("nan"), 1.0, 0.0) == "inconclusive"
    assert composite_verdict(["pass", "inconclusive"]) == "inconclusive"
    assert composite_verdict(["inconclusive", "fail", "pass"]) == "fail"
    assert composite_verdict([]) == "pass"


def test_report_fields_and_record():
    rep = make_report("x", {"p": 2.0}, 1.0, 3.0, 0.5)
    assert rep.margin == 2.0 and rep.verdict == "pass"
    rec = rep.to_record()
    assert set(rec) == {"check_name", "parameters", "lhs", "rhs", "margin", "err", "verdict", "details"}
    inf_rep = make_report("y", {}, float("inf"), 1.0, 0.0)
    assert inf_rep.to_record()["lhs"] == "inf" and inf_rep.verdict == "inconclusive"


def test_riesz_constants():
    assert riesz_cot(2.0) == pytest.approx(1.0)
    assert riesz_cot(3.0) == pytest.approx(math.sqrt(3))
    assert riesz_cot(1.5) == pytest.approx(riesz_cot(3.0))


def test_riesz_symmetric_case_is_near_extremal():
    rep = check_riesz_planar(DiskAnalytic([0, 1]), 2.0)
    assert rep.verdict == "pass"
    assert rep.details["max_ratio_to_bound"] >= 0.999


def test_riesz_constant_u():
    rep = check_riesz_planar(DiskAnalytic([1.0]), 1.5)
    assert rep.verdict == "pass"
    conj = [c for c in rep.details["cells"] if c["at"].startswith("conjugate")]
    assert all(c["lhs"] == 0.0 and c["rhs"] == pytest.approx(riesz_cot(1.5)) for c in conj)


@pytest.mark.parametrize("p", [1.2, 5.0])
def test_riesz_random_polynomials(p):
    for f in random_analytic(3, seed=99):
        assert check_riesz_planar(f, p, (0.5, 0.9, 0.999)).verdict == "pass"


def test_riesz_rejects_p():
    with pytest.raises(InvalidArgumentError):
        check_riesz_planar(DiskAnalytic([0, 1]), 1.0)


def test_cor_1_2_examples():
    assert check_cor_1_2(SharpnessExample(2.0), 1, 1.5, 0.9).verdict == "pass"
    rep = check_cor_1_2(identity_map(1), 1, 2.0, 0.9)
    assert rep.verdict == "pass" and rep.parameters["K_hat"] == pytest.approx(1.0)
    # at p = 2 the constant is 2 and M_2^2(x_1) = r^2/2, so the sides coincide
    assert rep.lhs == pytest.approx(rep.rhs, rel=1e-12)
    rep = check_cor_1_2(identity_map(1), 1, 1.25, 0.9)
    assert rep.verdict == "pass" and rep.margin > 2 * rep.lhs
    kappa = 0.5
    rep = check_cor_1_2(PlanarHarmonic([0, 1], [0, 0, kappa / 2]), 1, 2.0, 0.9)
    assert rep.verdict == "pass"


def test_cor_1_2_preconditions():
    with pytest.raises(InvalidArgumentError):
        check_cor_1_2(SharpnessExample(2.0), 1, 0.5, 0.9)
    with pytest.raises(InvalidArgumentError):
        check_cor_1_2(SharpnessExample(2.0), 3, 1.5, 0.9)
    sq = CustomMap(lambda x: np.column_stack([np.sum(x * x, axis=1), x[:, 1]]), 2, 2)
    with pytest.raises(InvalidArgumentError):
        check_cor_1_2(sq, 1, 1.5, 0.5)


def test_cor_1_2_degenerate_dilatation_is_inconclusive():
    # z^2 fixes the origin with a vanishing derivative only there; fold the
    # plane instead so the Jacobian changes sign
    fold = PlanarHarmonic([0, 0.2], [0, 1.0])
    rep = check_cor_1_2(fold, 1, 1.5, 0.5)
    assert rep.verdict == "inconclusive" and "infinite" in rep.details["reason"]


def test_domination_constant():
    assert domination_constant(2, 1.0, 2.0) == 2.0
    assert domination_constant(4, 2.0, 1.5) == pytest.approx((1 + 12) / 0.5)


def test_thm_1_3_extension_of_identity():
    f = hyperbolic_poisson_extend(lambda z: z, 3, rule_level=5)
    rep = check_thm_1_3_B1(f, 1, 1.5, (0.3, 0.6, 0.9))
    assert rep.verdict == "pass"


def test_thm_1_3_constant_data():
    f = hyperbolic_poisson_extend(lambda z: np.column_stack([np.full(len(z), 0.5), np.ones(len(z)), -np.ones(len(z))]), 3)
    rep = check_thm_1_3_B1(f, 1, 1.5, (0.3, 0.6))
    # both sides reduce to |f(0)|^p; a constant map has local K = 1
    assert rep.lhs == pytest.approx(1.5 ** 1.5, rel=1e-12)
    assert abs(rep.margin) <= rep.err + 1e-12
    assert rep.verdict == "pass"


def test_thm_1_3_rejects_euclidean_harmonic_map_in_3d():
    f = poisson_extend(lambda z: z, 3)
    with pytest.raises(InvalidArgumentError):
        check_thm_1_3_B1(f, 1, 1.5, (0.5,))


def test_thm_1_3_planar_cross_check():
    phi = lambda z: np.column_stack([z[:, 0] + 0.1 * z[:, 1] ** 2, z[:, 1]])
    a = check_cor_1_2(hyperbolic_poisson_extend(phi, 2), 1, 1.5, 0.9)
    b = check_cor_1_2(poisson_extend(phi, 2), 1, 1.5, 0.9)
    assert a.verdict == b.verdict == "pass"
    assert a.lhs == pytest.approx(b.lhs, rel=1e-8) and a.rhs == pytest.approx(b.rhs, rel=1e-8)


def test_thm_1_5_planar_symmetric_case():
    for k in (1, 3):
        c = np.zeros(k + 1)
        c[k] = 1
        rep = check_thm_1_5(DiskAnalytic(c), 2.0, (0.5, 0.9))
        assert rep.verdict == "pass"
        for cell in rep.details["cells"]:
            assert cell["lhs"] == pytest.approx(cell["rhs"], rel=1e-9)


def test_thm_1_5_holomorphic_n2():
    h = HolomorphicPolynomial(2, ({(1, 0): 1.0, (0, 2): 0.1}, {(0, 1): 1.0, (1, 1): -0.1j}))
    f = PluriharmonicPair(h, HolomorphicPolynomial.linear(np.zeros((2, 2))))
    rep = check_thm_1_5(f, 3.0)
    assert rep.verdict == "pass"
    assert rep.details["constant"] == pytest.approx(math.sqrt(2) * math.sqrt(3))


def test_thm_1_5_kappa_bound_constant():
    h = HolomorphicPolynomial(2, ({(1, 0): 1.0}, {(0, 1): 1.0, (2, 0): 0.25}))
    f = PluriharmonicPair(h, h.left_multiply(0.5 * np.eye(2)))
    rep = check_thm_1_5(f, 1.5, kappa=0.5)
    assert rep.verdict == "pass"
    assert rep.details["constant"] == pytest.approx(40.0)
    with pytest.raises(InvalidArgumentError):
        check_thm_1_5(f, 3.0, kappa=0.5)
    with pytest.raises(InvalidArgumentError):
        check_thm_1_5(f, 1.5, kappa=0.25)


def test_thm_1_5_requires_v0_zero():
    with pytest.raises(InvalidArgumentError):
        check_thm_1_5(DiskAnalytic([0.5j, 1]), 2.0)


def test_thm_1_5_singular_derivative_is_inconclusive():
    # Df has rank one everywhere
    sing = PluriharmonicPair(HolomorphicPolynomial(2, ({(1, 0): 1.0}, {(1, 0): 1.0})),
                             HolomorphicPolynomial.linear(np.zeros((2, 2))))
    rep = check_thm_1_5(sing, 2.0)
    assert rep.verdict == "inconclusive"


def test_random_pluriharmonic_families_respect_kappa():
    for f, kappa in random_pluriharmonic(3, seed=4, n=2, kappa=0.5):
        assert sampled_second_dilatation(f) <= 0.5 + 1e-9
        assert np.allclose(f._value(np.zeros((1, 4)))[0][1::2], 0.0)


def test_random_planar_qr_families():
    for f, kappa in random_planar_qr(5, seed=8):
        assert 0 < kappa < 1
        rep = check_cor_1_2(f, 1, 1.5, 0.9)
        assert rep.verdict == "pass"


def test_sharpness_probe_K1():
    rep = sharpness_probe(1.0)
    assert rep.verdict == "pass"
    assert rep.details["f1_max_deviation"] <= 1e-9
    assert rep.details["ratio_0.999_over_0.9"] == pytest.approx(2.2737, abs=1e-3)


def test_sharpness_probe_K3_measurements():
    # measured values of the probe; the ratio test does not reach 2 for K = 3
    rep = sharpness_probe(3.0)
    parts = rep.details["parts"]
    assert rep.details["f1_target"] == 1.5
    assert parts["f1_constant"] == "pass" and parts["dilatation"] == "pass"
    assert parts["increasing"] == "pass" and parts["log_fit_r2"] == "pass"
    assert rep.details["ratio_0.999_over_0.9"] == pytest.approx(1.7551, abs=1e-3)


def test_prop_1_1():
    rep = check_prop_1_1(families=2)
    assert rep.verdict == "pass"
    shear = [p for p in rep.details["parts"] if p["check_name"] == "prop_1_1.shear"]
    for s in shear:
        assert s["details"]["omega_max_deviation"] <= 1e-10
        assert s["details"]["wu_ratios"][2] >= 1e4 * (1 - 1e-6)
    bridge = [p for p in rep.details["parts"] if p["parameters"].get("map", "").startswith("h=z")]
    assert len(bridge) == 3
    for b in bridge:
        assert b["lhs"] == pytest.approx(b["rhs"], abs=1e-8)


def test_heinz_class():
    assert check_heinz_class(DiskAnalytic([0, 1, 0.3])).verdict == "pass"
    rep = check_heinz_class(SharpnessExample(2.0))
    assert rep.verdict == "pass"
    assert max(rep.details["square_identity_max_rel_dev"].values()) <= 1e-5
    assert rep.details["a_hat"] == pytest.approx(0.0, abs=1e-12)
    bad = CustomMap(lambda x: np.column_stack([2 - np.sum(x * x, axis=1), 0 * x[:, 0]]), 2, 2)
    assert check_heinz_class(bad).verdict == "fail"


def test_suite_config_validation():
    with pytest.raises(InvalidArgumentError):
        SuiteConfig("nope")
    with pytest.raises(InvalidArgumentError):
        SuiteConfig("riesz_planar", p_list=(0.0,))
    with pytest.raises(InvalidArgumentError):
        SuiteConfig("riesz_planar", r_grid=(1.0,))
    with pytest.raises(InvalidArgumentError):
        SuiteConfig("riesz_planar", level=0)
    with pytest.raises(InvalidArgumentError):
        run_suite("cor_1_2", p_list=(0.5,))


def test_suites_are_deterministic():
    a = [r.to_record() for r in run_suite("power_mean", seed=7)]
    b = [r.to_record() for r in run_suite("power_mean", seed=7)]
    assert a == b
    assert all(r["verdict"] == "pass" for r in a)


def test_norms_suite():
    reps = run_suite("norms", count=1)
    assert all(r.verdict == "pass" for r in reps)
    sharp = [r for r in reps if r.parameters["map"].startswith("sharpness")]
    assert sharp and not sharp[0].details["coordinate_diverging"]


def test_scale_covariance():
    f = SharpnessExample(2.0)
    a = check_cor_1_2(f, 1, 1.5, 0.9)
    b = check_cor_1_2(Scaled(f, 3.0), 1, 1.5, 0.9)
    assert b.lhs == pytest.approx(3.0 ** 1.5 * a.lhs, rel=1e-9)
    assert b.verdict == a.verdict
