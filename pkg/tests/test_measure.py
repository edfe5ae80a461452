from __future__ import annotations

import math

import numpy as np
import pytest

from bergman_spectra.isotypic import SignatureIndex
from bergman_spectra.mat2 import in_domain
from bergman_spectra.measure import (
    ORBIT_CONSTANT,
    NumericalError,
    QuadConfig,
    WeightParams,
    a_exponents,
    a_weight,
    b_poly,
    c_lambda,
    integrate_omega,
    mc_integral_vlambda,
    omega_contains,
    orbit_integral,
)
from bergman_spectra.orbits import canonical_matrix


def density(r1, r2, r3):
    return r1**3 * r2 * r3


def test_weight_params_validation():
    for bad in (3, 2.5, float("nan"), float("inf")):
        with pytest.raises(ValueError, match="lambda > 3"):
            WeightParams(bad)
    assert WeightParams(3.01).lam == 3.01


def test_c_lambda():
    assert c_lambda(4) == pytest.approx(12 / math.pi**4) == pytest.approx(0.1231918, abs=1e-7)
    assert c_lambda(5) == pytest.approx(72 / math.pi**4) == pytest.approx(0.7391507, abs=1e-7)
    assert c_lambda(3 + 1e-12) < 1e-11
    assert WeightParams(4).c == c_lambda(4)


def test_b_poly():
    assert b_poly(0, 0, 0) == 1
    assert b_poly(1, 0, 0) == 0
    assert b_poly(0.5, 0.1, 0.3) == pytest.approx(0.6725, abs=1e-15)


def test_b_is_defect_determinant():
    r = (0.5, 0.1, 0.3)
    Z = canonical_matrix(r)
    assert np.linalg.det(np.eye(2) - Z @ Z.conj().T).real == pytest.approx(b_poly(*r))


def test_a_weight_alternate_exponents():
    r = (0.3, 0.7, 0.2)
    assert a_weight(r, SignatureIndex(0, 0, 0), 0, "alternate") == pytest.approx(0.3**4 * 0.7 * 0.2**2)
    assert a_weight((0.5,) * 3, SignatureIndex(2, 1, 1), 0, "alternate") == pytest.approx(0.5**13)


def test_a_weight_exact_exponents():
    assert a_exponents(SignatureIndex(0, 0, 0), 0) == (3, 1, 1)
    assert a_weight((0.5,) * 3, SignatureIndex(2, 1, 1), 0) == pytest.approx(0.5**11)
    for idx in (SignatureIndex(3, 1, 2), SignatureIndex(4, 0, 3)):
        for k in range(idx.j + 1):
            assert a_weight((1, 1, 1), idx, k) == 1
    with pytest.raises(ValueError):
        a_weight((1, 1, 1), SignatureIndex(1, 0, 0), 1)
    with pytest.raises(ValueError):
        a_exponents(SignatureIndex(0, 0, 0), 0, "other")


def test_omega_contains():
    assert omega_contains((0.1, 0.1, 0.1))
    assert not omega_contains((1.1, 0, 0))
    assert omega_contains((0.9, 0.43, 0.1))


def test_omega_matches_domain():
    rng = np.random.default_rng(0)
    r = rng.uniform(0, 1, (2000, 3))
    for x in r:
        assert omega_contains(x) == bool(in_domain(canonical_matrix(x)))


def test_quad_config_validation():
    with pytest.raises(ValueError):
        QuadConfig(nodes_per_axis=4)
    with pytest.raises(ValueError):
        QuadConfig(scheme="simpson")
    with pytest.raises(ValueError):
        QuadConfig(boundary_margin=1e-3)
    assert QuadConfig.for_degree(8).nodes_per_axis == 64
    assert QuadConfig.for_degree(9).nodes_per_axis == 96


def test_integrate_zero():
    res = integrate_omega(lambda r1, r2, r3: 0 * r1, 4)
    assert res.value == 0 and res.error == 0


@pytest.mark.parametrize("lam", [3.05, 3.5, 4.0, 5.0, 7.5, 20.0])
def test_normalization(lam):
    res = integrate_omega(density, lam, QuadConfig(64))
    assert ORBIT_CONSTANT * c_lambda(lam) * res.value == pytest.approx(1, abs=1e-10)
    assert res.error <= 1e-8


def test_alternate_density_does_not_normalize():
    # The r1^4 r2 r3^2 density integrates to 48 / (525 pi^3) at lambda = 4.
    res = integrate_omega(lambda r1, r2, r3: r1**4 * r2 * r3**2, 4)
    assert 2 * math.pi * c_lambda(4) * res.value == pytest.approx(48 / (525 * math.pi**3), rel=1e-10)


def test_doubling_converges():
    a = integrate_omega(density, 5, QuadConfig(64)).value
    b = integrate_omega(density, 5, QuadConfig(128)).value
    assert abs(a - b) <= 1e-8


def test_adaptive_scheme():
    f = lambda r1, r2, r3: np.cos(40 * r1 * r2) * r3**2  # noqa: E731
    res = integrate_omega(f, 5, QuadConfig(8, scheme="adaptive", tol=1e-12))
    ref = integrate_omega(f, 5, QuadConfig(128))
    assert res.nodes_per_axis > 16
    assert abs(res.value - ref.value) <= 1e-11


def test_monotone():
    f = lambda r1, r2, r3: r1**2 + r2  # noqa: E731
    g = lambda r1, r2, r3: r1**2  # noqa: E731
    assert integrate_omega(f, 4).value >= integrate_omega(g, 4).value


def test_non_finite_integrand_aborts():
    with pytest.raises(NumericalError), np.errstate(divide="ignore"):
        integrate_omega(lambda r1, r2, r3: np.log(r1 - r1), 4)


def test_closed_moments():
    # int b dv_4 = c_4 / c_5, since b dv_4 is a multiple of v_5.
    assert orbit_integral(b_poly, 4).value == pytest.approx(c_lambda(4) / c_lambda(5), abs=1e-12)
    assert orbit_integral(lambda r1, r2, r3: r1**2, 4).value == pytest.approx(0.5, abs=1e-12)


def test_mc_constant_at_lambda_4_is_exact():
    mean, err = mc_integral_vlambda(lambda Z: np.ones(len(Z)), 4, 100_000, seed=1)
    assert abs(mean - 1) <= 1e-12 and err <= 1e-12


def test_mc_constant_at_lambda_5():
    mean, err = mc_integral_vlambda(lambda Z: np.ones(len(Z)), 5, 1_000_000, seed=2)
    assert abs(mean - 1) <= 4 * err


def test_mc_rejects_bad_input():
    with pytest.raises(ValueError):
        mc_integral_vlambda(lambda Z: 1.0, 3.5, 1000, 0)
    with pytest.raises(ValueError):
        mc_integral_vlambda(lambda Z: 1.0, 4, 0, 0)
    mean, _ = mc_integral_vlambda(lambda Z: np.ones(len(Z)), 3.5, 10_000, 0, allow_unbounded_weight=True)
    assert np.isfinite(mean)


def _top_singular_sq(s, det_abs):
    return (s + np.sqrt(np.maximum(s * s - 4 * det_abs**2, 0))) / 2


def test_mc_indicator_matches_quadrature():
    # The indicator of ||Z||_op <= 1/2 is invariant; on the orbit it depends on r only.
    def F(Z):
        s = (np.abs(Z) ** 2).sum(axis=(-2, -1))
        return (_top_singular_sq(s, np.abs(np.linalg.det(Z))) <= 0.25).astype(float)

    def f(r1, r2, r3):
        return (_top_singular_sq(r1**2 + r2**2 + r3**2, r1 * r3) <= 0.25).astype(float)

    mean, err = mc_integral_vlambda(F, 5, 1_000_000, seed=3)
    ref = orbit_integral(f, 5, QuadConfig(128)).value
    # A discontinuous integrand converges slowly under quadrature; allow for it.
    assert abs(mean - ref) <= 4 * err + 2e-3
