import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discode import jets as J

from .strategies import disc_points


def mp_derivs(fn, z, n):
    return [complex(mpmath.diff(fn, mpmath.mpc(z), k)) for k in range(n + 1)]


CASES = [
    (lambda: J.exp(J.identity * J.identity), lambda z: mpmath.exp(z * z)),
    (lambda: J.log(1 - J.identity), lambda z: mpmath.log(1 - z)),
    (lambda: J.sqrt(1 - J.identity**2), lambda z: mpmath.sqrt(1 - z * z)),
    (lambda: 1 / (1 - J.identity) ** 2, lambda z: 1 / (1 - z) ** 2),
    (lambda: J.mobius(0.3 - 0.2j), lambda z: (mpmath.mpc(0.3, -0.2) - z) / (1 - mpmath.mpc(0.3, 0.2) * z)),
    (lambda: J.polynomial([1, 2, 0, -1]), lambda z: 1 + 2 * z - z**3),
    (lambda: J.power(1 + J.identity, 1j), lambda z: (1 + z) ** 1j),
]


@pytest.mark.parametrize("make, ref", CASES)
def test_jets_match_extended_precision_derivatives(make, ref):
    f = make()
    z = 0.3 + 0.25j
    got = f.jet(np.array([z]), 4).derivs[0]
    with mpmath.workdps(30):
        want = mp_derivs(ref, z, 4)
    for k in range(5):
        assert abs(got[k] - want[k]) <= 1e-12 * max(1.0, abs(want[k])), k


def test_jet_accessors():
    j = J.exp(J.identity).jet(np.array([0.0]), 3)
    assert j.order == 3
    assert np.allclose([j.value[0], j.d1[0], j.d2[0], j.d3[0], j[2][0]], 1.0)


def test_scalar_and_shape_handling():
    f = J.identity * 2 + 1
    assert f(0.25) == 1.5
    z = np.zeros((3, 4), dtype=complex)
    assert f.taylor(z, 3).shape == (3, 4, 3)


def test_derivative_operator():
    f = J.exp(2 * J.identity)
    d = J.derivative(f, 2)
    assert abs(d(0.1) - 4 * np.exp(0.2)) < 1e-13
    assert J.derivative(f, 0) is f


def test_antiderivative_and_reexpand():
    c = np.array([1.0, 2.0, 3.0])  # 1 + 2z + 3z^2 at p
    A = J.antiderivative(c, 5.0)
    assert np.allclose(A, [5, 1, 1, 1])
    # re-centre 1 + 2h + 3h^2 at h = 0.1
    r = J.reexpand(c, np.array([0.1]), 3)[0]
    assert np.allclose(r, [1.23, 2.6, 3.0])


@given(disc_points(0.8), st.integers(1, 3))
def test_removable_quotient_agrees_with_the_cancelled_function(p, m):
    # (z - p)^m e^z / (z - p)^m = e^z, including right at p
    fac = (J.identity - p) ** m
    q = J.RemovableQuotient(fac * J.exp(J.identity), fac, [p], orders=[m])
    pts = np.array([p, p + 1e-5, p + 0.3 * (1 - abs(p))])
    got = q.jet(pts, 2)
    want = np.exp(pts)
    for d in (got.value, got.d1, got.d2):
        assert np.max(np.abs(d - want)) < 1e-8 * np.max(np.abs(want))


def test_fd_audit_is_small_for_smooth_functions():
    assert J.fd_audit(J.exp(J.identity), np.array([0.1, 0.2j]), h=1e-4) < 1e-6


@given(disc_points(0.9))
def test_quotient_rule_consistency(z):
    f = J.exp(J.identity) / (2 - J.identity)
    g = f * (2 - J.identity)
    j = g.jet(np.array([z]), 3)
    assert np.allclose(j.derivs[0], np.exp(z), rtol=1e-12)
