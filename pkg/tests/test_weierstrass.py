import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsurf.catalog import available, catalog_lookup
from minsurf.domains import Disk
from minsurf.expr import parse_expression
from minsurf.quadrature import Path
from minsurf.weierstrass import (
    SingularCurvatureError,
    SurfaceSample,
    WeierstrassData,
    WeierstrassSurface,
    first_fundamental_form,
    gaussian_curvature_R,
    immerse,
    immerse_fg,
    immerse_R,
    phi_triple,
    phi_vector,
)
from oracles import HELICOID_ZETA0, catenoid_xyphi, enneper_xyphi, helicoid_xyphi

ONE = parse_expression("1")
ZERO = parse_expression("0")
TAU = parse_expression("w")


def enneper_fg():
    return WeierstrassData(form="FG", f=ONE, g=TAU, zeta0=0, X0=(0, 0, 0), domain=Disk(0j, 1.5))


def test_phi_triple_examples():
    assert phi_triple(ONE, ZERO, 0) == (1, 1j, 0)
    assert phi_triple(ONE, ONE, 0.7 - 0.2j) == (0, 2j, 2)
    assert phi_triple(ONE, TAU, 1j) == pytest.approx((2, 0, 2j))


def test_enneper_fg_values():
    data = enneper_fg()
    assert np.array_equal(immerse_fg(data, 0).position, [0, 0, 0])
    assert immerse_fg(data, 1).position == pytest.approx([2 / 3, 0, 1], abs=1e-14)
    assert immerse_fg(data, 1j).position == pytest.approx([0, -2 / 3, -1], abs=1e-14)


def test_helicoid_base_point_and_axis():
    data = catalog_lookup("helicoid")
    assert np.array_equal(immerse_R(data, HELICOID_ZETA0).position, [1, 0, 0])
    assert immerse_R(data, 0.2j).position == pytest.approx([2.4, 0, 0], abs=1e-12)


@pytest.mark.parametrize("zeta", [0.3 + 0.1j, -0.5 - 0.01j, 0.06 - 0.02j, -0.9 + 0.1j, 0.7j])
def test_helicoid_matches_closed_form(zeta):
    got = immerse_R(catalog_lookup("helicoid"), zeta).position
    assert got == pytest.approx(helicoid_xyphi(zeta), abs=1e-10)


@pytest.mark.parametrize("zeta", [0.3 + 0.1j, -0.5 - 0.01j, 0.1 - 0.6j])
def test_catenoid_matches_closed_form(zeta):
    got = immerse_R(catalog_lookup("catenoid"), zeta).position
    assert got == pytest.approx(catenoid_xyphi(zeta), abs=1e-10)


def test_user_path_must_start_at_base():
    data = catalog_lookup("helicoid")
    with pytest.raises(ValueError):
        immerse_R(data, 0.5j, path=Path.segment(0.3j, 0.5j))
    p = Path((HELICOID_ZETA0, 0.5 + 0.5j, 0.5j))
    assert immerse_R(data, 0.5j, path=p).position == pytest.approx(helicoid_xyphi(0.5j), abs=1e-12)


def test_form_is_checked():
    with pytest.raises(ValueError):
        immerse_fg(catalog_lookup("enneper"), 0.1)
    with pytest.raises(ValueError):
        immerse_R(enneper_fg(), 0.1)


def test_data_invariants():
    with pytest.raises(ValueError, match="outside"):
        WeierstrassData(form="R", R=ONE, zeta0=3, domain=Disk(0j, 1))
    with pytest.raises(ValueError, match="singularity"):
        WeierstrassData(form="R", R=ONE, zeta0=0, singularities=(0,))
    with pytest.raises(ArithmeticError):
        WeierstrassData(form="R", R=parse_expression("1/w"), zeta0=0)
    with pytest.raises(ValueError):
        WeierstrassData(form="FG", f=ONE)


def test_derivatives_present_iff_requested():
    data = catalog_lookup("enneper")
    s0 = immerse(data, 0.3, derivatives=0)
    s2 = immerse(data, 0.3, derivatives=2)
    assert s0.first is None and s0.second is None
    assert len(s2.first) == 2 and len(s2.second) == 3


def test_analytic_derivatives_match_closed_form_differences():
    data = catalog_lookup("helicoid")
    zeta, h = 0.3 + 0.2j, 1e-6
    s = immerse(data, zeta, derivatives=1)
    fd1 = (helicoid_xyphi(zeta + h) - helicoid_xyphi(zeta - h)) / (2 * h)
    fd2 = (helicoid_xyphi(zeta + 1j * h) - helicoid_xyphi(zeta - 1j * h)) / (2 * h)
    assert s.first[0] == pytest.approx(fd1, rel=1e-7)
    assert s.first[1] == pytest.approx(fd2, rel=1e-7)


def test_curvature_examples():
    assert gaussian_curvature_R(ONE, 0) == -4
    assert gaussian_curvature_R(ONE, 1) == -0.25
    R = catalog_lookup("helicoid").R
    # graph curvature -(1 + x^2 + y^2)^-2 of atan(y/x) at (1, 0)
    assert gaussian_curvature_R(R, HELICOID_ZETA0) == pytest.approx(-1 / (1 + 1) ** 2, rel=1e-14)
    with pytest.raises(SingularCurvatureError):
        gaussian_curvature_R(parse_expression("w"), 0)


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(min_magnitude=0.05, max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.sampled_from(["helicoid", "enneper", "catenoid"]))
def test_curvature_is_negative(w, name):
    assert gaussian_curvature_R(catalog_lookup(name).R, w) < 0


def test_first_fundamental_form_examples():
    plane = SurfaceSample(0j, np.zeros(3), (np.array([1.0, 0, 0]), np.array([0, 1.0, 0])))
    stretched = SurfaceSample(0j, np.zeros(3), (np.array([1.0, 0, 0]), np.array([0, 2.0, 0])))
    assert first_fundamental_form(plane) == (1, 0, 1)
    assert first_fundamental_form(stretched) == (1, 0, 4)
    with pytest.raises(ValueError):
        first_fundamental_form(SurfaceSample(0j, np.zeros(3)))


def test_helicoid_sample_is_conformal():
    E, F, G = first_fundamental_form(immerse(catalog_lookup("helicoid"), HELICOID_ZETA0, derivatives=1))
    assert abs(E - G) <= 1e-8 * E and abs(F) <= 1e-8 * E


def test_null_identity_on_random_catalog_points():
    rng = np.random.default_rng(3)
    for name in available():
        data = catalog_lookup(name)
        w = rng.uniform(0.1, 1.0, 300) * np.exp(1j * rng.uniform(-np.pi, np.pi, 300))
        phi = phi_vector(data, w)
        lhs = np.abs(np.sum(phi * phi, axis=0))
        assert np.all(lhs <= 1e-12 * np.sum(np.abs(phi) ** 2, axis=0))


def test_fg_and_R_forms_agree_when_g_is_the_identity():
    f = parse_expression("1/(2*w^2)")
    fg = WeierstrassData(form="FG", f=f, g=TAU, zeta0=0.5j, X0=(0, 1, 2), singularities=(0,),
                         domain=catalog_lookup("catenoid").domain)
    r = WeierstrassData(form="R", R=f, zeta0=0.5j, X0=(0, 1, 2), singularities=(0,), domain=fg.domain)
    for zeta in (0.3 + 0.1j, -0.4 - 0.2j, 0.9j):
        assert immerse_fg(fg, zeta).position == pytest.approx(immerse_R(r, zeta).position, abs=1e-8)


def test_fg_with_nontrivial_g_matches_substitution():
    # g = tau^2 on the right half plane; R(w) = f / g'(tau) with w = g(tau)
    tau0, tau = 0.5 + 0.1j, 0.8 + 0.3j
    fg = WeierstrassData(form="FG", f=parse_expression("2*w"), g=parse_expression("w^2"), zeta0=tau0,
                         domain=Disk(0.5, 0.6))
    r = WeierstrassData(form="R", R=ONE, zeta0=tau0**2, domain=Disk(0j, 2))
    assert immerse_fg(fg, tau).position == pytest.approx(immerse_R(r, tau**2).position, abs=1e-12)


def test_surface_offset_matches_positions():
    s = WeierstrassSurface(catalog_lookup("catenoid"))
    a, d = 0.4 - 0.3j, 0.01 + 0.02j
    assert s.offset(a, d) == pytest.approx(s.position(a + d) - s.position(a), abs=1e-12)
    assert np.array_equal(s.offset(a, 0), np.zeros(3))


def test_catalog_errors_and_entries():
    with pytest.raises(KeyError, match="catenoid, enneper, helicoid"):
        catalog_lookup("costa")
    h = catalog_lookup("helicoid")
    assert h.singularities == (0j,)
    assert h.domain.r_inner == 0.05 and h.domain.r_outer == 0.95
    e = catalog_lookup("enneper")
    assert e.domain.radius == 1.5
    assert math.isclose(abs(catalog_lookup("catenoid").zeta0), math.sqrt(2) - 1)
