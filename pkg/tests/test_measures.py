import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discode import gallery as G
from discode import jets as J
from discode import measures as M
from discode.geometry import make_grid
from discode.ode import SolutionBasis

Z = J.identity
GRID = make_grid(48, 192, 0.9, "boundary-refined")


def one_z():
    return SolutionBasis(J.constant(1.0), Z, 1.0 + 0j, A=J.constant(0.0))


def cos_sin():
    c = (J.exp(1j * Z) + J.exp(-1j * Z)) / 2
    s = (J.exp(1j * Z) - J.exp(-1j * Z)) / 2j
    return SolutionBasis(c, s, 1.0 + 0j, A=J.constant(1.0))


# ---------------------------------------------------------------- growth ---

def test_growth_of_constant():
    rep = M.growth_norm(1.0, 0.0, GRID)
    assert rep.sup == 1 and np.allclose(rep.profile, 1) and rep.verdict == "stabilized"


def test_growth_of_pole():
    rep = M.growth_norm(1 / (1 - Z), 1.0, GRID, radii=(0.9, 0.99, 0.999))
    assert rep.sup < 2
    assert abs(rep.profile[-1] - 1.999) < 1e-9  # (1-r^2)/(1-r) = 1 + r on the real axis
    assert abs(rep.argmax.imag) < 1e-12 and rep.argmax.real > 0


def test_thm1_i_coefficient_profile_increases():
    rep = M.growth_norm(G.get_entry("thm1_i").A, 2.0, GRID)
    assert np.all(np.diff(rep.profile) > 0)


def test_growth_outside_exclusions():
    sup, _ = M.growth_norm_outside(1.0, 1.0, GRID, [(0.5, 0.3)])
    assert sup <= 1
    sup0, _ = M.growth_norm_outside(1.0, 0.0, GRID, [(0.5, 0.3)])
    assert sup0 == 1
    with pytest.raises(ValueError):
        M.growth_norm_outside(1.0, 0.0, GRID, [(0.0, 0.95)])


def test_min_modulus_decreases_for_legendre():
    infs = [M.min_modulus_outside(G.get_entry("legendre").basis(),
                                  make_grid(32, 128, r, "boundary-refined")).inf
            for r in (0.9, 0.99, 0.999)]
    assert infs[0] > infs[1] > infs[2]
    rep = M.min_modulus_outside(G.get_entry("legendre").basis(), GRID)
    assert rep.floor_holds and rep.floor_constant > 0


def test_min_modulus_rejects_full_cover():
    with pytest.raises(ValueError):
        M.min_modulus_outside(one_z(), GRID, [(0.0, 0.95)])


# -------------------------------------------------------------- Carleson ---

def area_kernel_integral(a, r):
    """Exact ∫_{D(0,r)} (1-|a|^2)/|1-conj(a)z|^2 dm."""
    s = abs(a) ** 2
    if s == 0:
        return np.pi * r * r
    return np.pi * (1 - s) * -np.log1p(-s * r * r) / s


def test_carleson_of_area_measure_matches_closed_form():
    a = M.default_a_grid(6, 16)
    radii = (0.5, 0.9)
    rep = M.carleson_constant(M.DensityMeasure(lambda z: np.ones(z.shape), "dm"), a, radii,
                              make_grid(128, 256, 0.9, "uniform", breakpoints=(0.5,)))
    for r, got in zip(radii, rep.profile):
        want = max(area_kernel_integral(x, r) for x in a)
        assert abs(got - want) < 1e-4 * want
    assert rep.r_max == 0.9 and rep.radii == radii


def test_carleson_profile_is_monotone_and_record_is_complete():
    rep = M.carleson_constant(M.coefficient_density(G.get_entry("legendre").A))
    assert np.all(np.diff(rep.profile) >= 0)
    rec = rep.to_record()
    assert rec["verdict"] == rep.verdict and len(rec["profile"]) == 3
    assert rec["label"].startswith("lower bound")


def test_density_validation():
    mu = M.DensityMeasure(lambda z: -np.ones(z.shape), "negative")
    with pytest.raises(ValueError):
        mu(np.array([0.1]))


def test_coefficient_density_formula():
    mu = M.coefficient_density(2.0)
    assert abs(mu(np.array([0.5]))[0] - 4 * 0.75**3) < 1e-15


def test_default_a_grid():
    a = M.default_a_grid(3, 4)
    assert a[0] == 0 and len(a) == 13
    assert np.allclose(sorted(set(np.round(np.abs(a[1:]), 12))), [0.5, 0.75, 0.875])


# ---------------------------------------------------- characteristic T0 ---

def test_T0_of_constant_is_zero():
    assert M.ahlfors_shimizu_T0(J.constant(2.0), 0.5) == 0


def test_T0_of_identity_matches_closed_form():
    # w = z: (1/π)∫ (1+|z|^2)^{-2} log(r/|z|) dm = log(1+r^2)/2
    for r in (0.3, 0.5, 0.8):
        assert abs(M.ahlfors_shimizu_T0(Z, r) - 0.5 * np.log1p(r * r)) < 1e-14


def test_T0_dual_form_agrees():
    got = M.ahlfors_shimizu_T0_dual(Z, 0.5)
    assert abs(got - M.ahlfors_shimizu_T0(Z, 0.5)) < 1e-6


def test_T0_on_a_grid_converges():
    errs = []
    for n in (16, 32):
        g = make_grid(n, 4 * n, 0.5, "uniform")
        errs.append(abs(M.ahlfors_shimizu_T0(Z, 0.5, grid=g) - 0.5 * np.log1p(0.25)))
    assert errs[0] / errs[1] > 3


def test_T0_radius_validation():
    with pytest.raises(ValueError):
        M.ahlfors_shimizu_T0(Z, 1.0)


@pytest.mark.parametrize("r", [0.3, 0.5, 0.7])
def test_balance_legendre_and_one_z(r):
    assert M.circle_mean_u_balance(G.get_entry("legendre").basis(), r) <= 1e-5
    assert M.circle_mean_u_balance(one_z(), r) <= 1e-12


def test_balance_small_radius():
    assert M.circle_mean_u_balance(G.get_entry("legendre").basis(), 1e-4) < 1e-12


# ------------------------------------------------------ Littlewood-Paley ---

def test_littlewood_paley_identity_function():
    b = M.littlewood_paley_balance(Z)
    assert abs(b.lhs - 1) < 1e-14 and abs(b.rhs - 1) < 1e-14
    with mpmath.workdps(30):
        assert mpmath.quad(lambda r: r * mpmath.log(1 / r), [0, 1]) == mpmath.mpf(1) / 4


def test_littlewood_paley_constant():
    b = M.littlewood_paley_balance(J.constant(2.0))
    assert b.lhs == pytest.approx(4) and b.rhs == pytest.approx(4) and b.residual < 1e-14


@given(st.integers(1, 6), st.floats(0.2, 1.0))
def test_littlewood_paley_monomials(k, r):
    b = M.littlewood_paley_balance(M.monomial(k), r)
    assert abs(b.lhs - r ** (2 * k)) < 1e-13
    assert b.residual <= 1e-12


def test_littlewood_paley_radius_validation():
    with pytest.raises(ValueError):
        M.littlewood_paley_balance(Z, 1.5)


# --------------------------------------------------------------- others ---

def test_uchiyama_cos_sin_is_stabilized():
    rep, sup = M.uchiyama_constant(cos_sin(), 1.0)
    assert rep.verdict == "stabilized" and np.isfinite(sup)


def test_uchiyama_rejects_nonpositive_epsilon():
    with pytest.raises(ValueError):
        M.uchiyama_constant(cos_sin(), 0.0)


def test_sublevel_mass():
    assert np.all(M.sublevel_mass(one_z(), 0.5) == 0)  # |f1|^2+|f2|^2 >= 1
    # the set {|f1|^2+|f2|^2 < 0.01} is a cusp at ±1 reached only beyond r = 0.9999
    leg = M.sublevel_mass(G.get_entry("legendre").basis(), 0.01, radii=(0.999, 0.99999, 0.999999))
    assert leg[0] == 0 and 0 < leg[1] < leg[2]
    huge = M.sublevel_mass(one_z(), 1e9, radii=(0.5, 0.9))
    assert abs(huge[0] - np.pi * -np.log(1 - 0.25)) < 1e-3  # ∫_{D(0,r)} dm/(1-|z|^2)
    assert huge[1] > huge[0]


def test_lipschitz_audit():
    assert M.lipschitz_audit(J.constant(1.0), 0.0, [(0.0, 0.3)]) == 0
    pairs = [(x, x + 0.1) for x in np.linspace(0, 0.4, 5)]
    ratio = M.lipschitz_audit(Z, 0.0, pairs)
    assert 0 < ratio < 2
    with pytest.raises(ValueError):
        M.lipschitz_audit(Z, 0.0, [(0.0, 0.9)])
