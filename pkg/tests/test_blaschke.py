import mpmath
import numpy as np
import pytest
from hypothesis import given

from discode.blaschke import (
    FiniteBlaschke, carleson_point_mass_constant, derivative_at_zero, separation_constant,
)
from discode.geometry import pseudo_hyperbolic

from .strategies import disc_points, separated_sets


def mp_blaschke(zeros, z):
    out = mpmath.mpc(1)
    for c in zeros:
        c = mpmath.mpc(c)
        out *= z if c == 0 else (abs(c) / c) * (c - z) / (1 - mpmath.conj(c) * z)
    return out


def test_value_at_a_zero():
    assert FiniteBlaschke([0.5]).eval_jet(0.5, 0).value == 0


def test_origin_convention():
    B = FiniteBlaschke([0.0])
    j = B.eval_jet(0.3, 1)
    assert abs(j.value - 0.3) < 1e-16 and abs(j.d1 - 1) < 1e-16
    assert B.origin_multiplicity == 1


def test_value_at_origin():
    assert abs(FiniteBlaschke([0.5])(0.0) - 0.5) < 1e-16


def test_against_extended_precision_product():
    zeros = [0.5, -0.3j, 0.7 + 0.1j, 0.0]
    B = FiniteBlaschke(zeros)
    z = 0.2 - 0.4j
    with mpmath.workdps(30):
        want = [complex(mpmath.diff(lambda x: mp_blaschke(zeros, x), mpmath.mpc(z), k)) for k in range(3)]
    got = B.jet(np.array([z]), 2).derivs[0]
    assert np.allclose(got, want, rtol=1e-12, atol=1e-14)


def test_long_product_does_not_underflow():
    zeros = 1 - 2.0 ** -np.arange(1, 40)
    B = FiniteBlaschke(zeros)
    v = B(np.array([-0.5]))[0]
    assert np.isfinite(v) and v != 0


@given(separated_sets(1, 4))
def test_unimodular_on_the_circle_and_bounded_inside(zeros):
    B = FiniteBlaschke(zeros)
    th = np.linspace(0, 2 * np.pi, 64)
    assert np.allclose(np.abs(B(0.999999 * np.exp(1j * th))), 1, atol=1e-4)
    assert np.all(np.abs(B(0.5 * np.exp(1j * th))) <= 1 + 1e-14)


@pytest.mark.parametrize("zeros, want", [([0], 1.0), ([0, 0.5], 0.5), ([0, 0.5, -0.5], 0.25)])
def test_separation_examples(zeros, want):
    assert abs(separation_constant(zeros) - want) < 1e-15


def test_separation_rejects_duplicates():
    with pytest.raises(ValueError):
        separation_constant([0.2, 0.2])


@given(separated_sets(2, 4))
def test_separation_is_the_smallest_deleted_product(zeros):
    B = FiniteBlaschke(zeros)
    d = separation_constant(zeros)
    assert abs(d - min(B.deleted_product(n) for n in range(len(zeros)))) < 1e-14
    # |B'(z_n)|(1-|z_n|^2) equals the deleted product
    for n, c in enumerate(zeros):
        lhs = abs(derivative_at_zero(B, c)) * (1 - abs(c) ** 2)
        assert abs(lhs - B.deleted_product(n)) < 1e-12


def test_derivative_at_origin_zero():
    assert derivative_at_zero(FiniteBlaschke([0.0]), 0.0) == 1


@given(separated_sets(1, 4))
def test_derivative_at_zero_matches_the_jet(zeros):
    B = FiniteBlaschke(zeros)
    for c in zeros:
        assert abs(derivative_at_zero(B, c) - B.jet(np.array([c]), 1).d1[0]) < 1e-10


def test_derivative_at_non_zero_raises():
    with pytest.raises(ValueError):
        derivative_at_zero(FiniteBlaschke([0.5]), 0.1)


def test_point_mass_at_origin():
    rep = carleson_point_mass_constant([0.0], [1.0])
    assert abs(rep.constant - 1) < 1e-15 and rep.maximizer == 0


def test_point_masses_against_dense_search():
    zs = 1 - 2.0 ** -np.arange(1, 11)
    rep = carleson_point_mass_constant(zs)
    a = np.concatenate([np.linspace(0, 0.9995, 20001), zs])
    brute = max(np.sum((1 - zs) * (1 - x**2) / np.abs(1 - x * zs) ** 2) for x in a)
    assert rep.constant <= brute * (1 + 1e-12)
    assert rep.constant >= 0.97 * brute


def test_non_blaschke_masses_grow():
    vals = []
    for N in (10, 20, 50):
        n = np.arange(1, N + 1)
        vals.append(carleson_point_mass_constant(1 - 1 / n, 1 / n).constant)
    assert vals[0] < vals[1] < vals[2]


@given(disc_points(0.9))
def test_point_mass_kernel_is_mobius_derivative(a):
    # (1-|a|^2)/|1-conj(a)z|^2 = |φ_a'(z)|, checked numerically
    z = 0.3 - 0.1j
    h = 1e-6
    from discode.geometry import mobius_involution as phi
    fd = abs(phi(a, z + h) - phi(a, z - h)) / (2 * h)
    assert abs(fd - (1 - abs(a) ** 2) / abs(1 - np.conj(a) * z) ** 2) < 1e-6
    assert pseudo_hyperbolic(a, a) == 0
