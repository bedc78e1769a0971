import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discode import jets as J
from discode.blaschke import FiniteBlaschke
from discode.gallery import get_entry
from discode.geometry import PathSpec, make_grid, pseudo_hyperbolic
from discode.ode import (
    InitialData, NumericalAbort, ReductionOfOrder, exclusion_radius, find_zeros, integrate,
    integrate_system, propagate_basis, radial_paths, reduction_basis, residual, second_solution,
)

from .strategies import disc_points

Z = J.identity


def test_integrate_linear():
    tr = integrate(0.0, InitialData(0, 0, 1), 0.7)
    assert abs(tr.f[-1, 0] - 0.7) < 1e-12
    assert np.allclose(tr.fp[:, 0], 1.0)


def test_integrate_sine():
    tr = integrate(1.0, InitialData(0, 0, 1), 0.5)
    assert abs(tr.f[-1, 0] - np.sin(0.5)) < 1e-10


def test_integrate_legendre_first_solution():
    tr = integrate(1 / (1 - Z * Z) ** 2, InitialData(0, 1, 0), 0.5)
    assert abs(tr.f[-1, 0] - np.sqrt(0.75)) < 1e-10


def test_integrate_along_a_polyline_in_the_complex_plane():
    path = PathSpec((0j, 0.3j, 0.3 + 0.3j, -0.2 + 0.5j))
    tr = integrate(1.0, InitialData(0, 1, 0), path, tol=1e-12)
    assert abs(tr.f[-1, 0] - np.cos(-0.2 + 0.5j)) < 1e-10
    z, f, fp = tr.at(tr.s[-1] * 0.37, A=J.constant(1.0))
    assert abs(f[0] - np.cos(z)) < 1e-7 and abs(fp[0] + np.sin(z)) < 1e-7


def test_trivial_initial_data_rejected():
    with pytest.raises(ValueError):
        InitialData(0, 0, 0)


def test_path_near_the_boundary_aborts():
    with pytest.raises(NumericalAbort):
        integrate(0.0, InitialData(0, 1, 0), 1 - 1e-9)


def test_path_must_start_at_the_initial_point():
    with pytest.raises(ValueError):
        integrate(0.0, InitialData(0.1, 1, 0), PathSpec((0j, 0.5 + 0j)))


@given(st.floats(0.05, 0.9), st.floats(0, 2 * np.pi))
def test_wronskian_is_conserved_in_double_precision(r, t):
    A = 1 / (1 - Z * Z) ** 2
    tr = integrate_system(A, 0.0, [1.0, 0.0], [0.0, 1.0], r * np.exp(1j * t))
    assert np.max(np.abs(tr.wronskian() - 1)) < 1e-8


def test_extended_precision_matches_double_precision():
    A = J.exp(Z)
    a = integrate_system(A, 0.0, [1.0, 0.0], [0.0, 1.0], 0.6 + 0.2j)
    b = integrate_system(A, 0.0, [1.0, 0.0], [0.0, 1.0], 0.6 + 0.2j, digits=30)
    assert np.allclose(a.f[-1], b.f[-1], atol=1e-9)
    assert np.max(np.abs(b.wronskian() - 1)) < 1e-25


def test_basis_for_zero_coefficient():
    b = propagate_basis(0.0)
    z = np.array([0.2 + 0.1j, -0.4j])
    assert np.allclose(b.f1(z), 1) and np.allclose(b.f2(z), z)
    assert b.wronskian == 1


def test_basis_for_unit_coefficient():
    b = propagate_basis(1.0)
    z = np.array([0.3, 0.5 - 0.5j])
    assert np.allclose(b.f1(z), np.cos(z), atol=1e-9)
    assert np.allclose(b.f2(z), np.sin(z), atol=1e-9)
    assert b.wronskian_error(z) < 1e-8


def test_radial_paths():
    ps = radial_paths(0.0, 0.9, 8)
    assert len(ps) == 8
    assert all(abs(abs(p.end) - 0.9) < 1e-15 for p in ps)


def test_second_solution_of_constant():
    assert abs(second_solution(1.0, 0.0, 0.4) - 0.4) < 1e-14


def test_second_solution_legendre():
    f1 = J.sqrt(1 - Z * Z)
    assert abs(second_solution(f1, 0.0, 0.5) - np.sqrt(0.75) * np.arctanh(0.5)) < 1e-12


@given(disc_points(0.85))
def test_second_solution_of_exponential(z):
    # f1 = e^{cz}: ∫ e^{-2cζ} dζ from 0 is (1 - e^{-2cz})/(2c)
    c = 0.7 - 0.2j
    got = second_solution(J.exp(c * Z), 0.0, np.array([z]))[0]
    want = np.exp(c * z) * (1 - np.exp(-2 * c * z)) / (2 * c)
    assert abs(got - want) < 1e-11


def test_reduction_of_order_with_a_zero():
    # ∫_0^z dζ/(ζ - 0.5)^2 = -1/(z - 0.5) - 2, so f2 = -1 - 2(z - 0.5)
    f1 = Z - 0.5
    excl = [(0.5, exclusion_radius([0.5]))]
    f2 = ReductionOfOrder(f1, 0.0, excl)
    z = np.array([0.5, 0.5 + 1e-4, 0.3j, -0.6, 0.8])
    want = -1 - 2 * (z - 0.5)
    assert np.max(np.abs(f2(z) - want)) < 1e-10
    b = reduction_basis(f1, 0.0, excl, A=0.0)
    assert b.wronskian_error(z) < 1e-9


@pytest.mark.parametrize("target", [0.8, 0.5, 0.5 + 1e-14])
def test_reduction_of_order_aborts_across_an_unlisted_zero(target):
    with pytest.raises(NumericalAbort):
        second_solution(Z - 0.5, 0.0, np.array([target]))


def test_alpha_inside_exclusion_disc_rejected():
    with pytest.raises(ValueError):
        ReductionOfOrder(Z - 0.5, 0.49, [(0.5, 0.1)])


def test_residual_examples():
    g = make_grid(64, 256, 0.9, "boundary-refined")
    e = get_entry("legendre")
    assert residual(e.A, e.f1, g) <= 1e-10
    assert residual(1.0, J.exp(1j * Z), g) < 1e-12
    neg = residual(1.0, Z, g)
    assert neg > 0.4


def test_find_zeros_of_a_blaschke_product():
    g = make_grid(64, 256, 0.9, "boundary-refined")
    roots = find_zeros(FiniteBlaschke([0.3, -0.5j]), g)
    assert len(roots) == 2
    for want in (0.3, -0.5j):
        assert min(abs(r - want) for r in roots) < 1e-10


def test_find_zeros_zero_free_function():
    g = make_grid(64, 256, 0.9, "boundary-refined")
    assert find_zeros(get_entry("thm1_i").f1, g) == []


def test_find_zeros_sine():
    g = make_grid(64, 256, 0.9, "boundary-refined")
    sin = (J.exp(1j * np.pi * Z) - J.exp(-1j * np.pi * Z)) / 2j
    roots = find_zeros(sin, g)
    assert len(roots) == 1 and abs(roots[0]) < 1e-12


def test_find_zeros_multiple_root():
    g = make_grid(32, 128, 0.9, "uniform")
    roots = find_zeros((Z - 0.4j) ** 3, g, tol=1e-12)
    assert len(roots) == 1 and abs(roots[0] - 0.4j) < 1e-8


@given(st.lists(disc_points(0.7), min_size=1, max_size=3))
def test_find_zeros_recovers_blaschke_zeros(zs):
    if any(pseudo_hyperbolic(a, b) < 0.1 for i, a in enumerate(zs) for b in zs[:i]):
        return
    g = make_grid(48, 192, 0.9, "boundary-refined")
    roots = find_zeros(FiniteBlaschke(zs), g)
    assert len(roots) == len(zs)
    for w in zs:
        assert min(abs(r - w) for r in roots) < 1e-9


def test_ode_taylor_series_matches_mpmath_solution():
    # f'' + f = 0 with f(0.2)=1, f'(0.2)=0 is cos(z - 0.2)
    b = propagate_basis(1.0, z0=0.2)
    z = 0.2 + 0.05j
    d = b.f1.jet(np.array([z]), 3).derivs[0]
    with mpmath.workdps(25):
        want = [complex(mpmath.diff(lambda x: mpmath.cos(x - 0.2), mpmath.mpc(z), k)) for k in range(4)]
    assert np.allclose(d, want, atol=1e-9)
