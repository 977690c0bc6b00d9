import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from minsurf.expr import evaluate, parse_expression
from minsurf.quadrature import IntegrationError, Path, integrate_along, integrate_vector


def test_constant_integrand():
    assert integrate_along(parse_expression("1"), Path.segment(0, 1 + 1j)) == pytest.approx(1 + 1j, abs=1e-15)


def test_linear_integrand():
    assert integrate_along(parse_expression("w"), Path.segment(0, 2)) == pytest.approx(2, abs=1e-14)


def test_helicoid_R_against_antiderivative():
    F = parse_expression("i/(2*w)")
    got = integrate_along(parse_expression("-i/(2*w^2)"), Path.segment(1j, 2j))
    assert got == pytest.approx(-0.25, abs=1e-13)
    assert got == pytest.approx(evaluate(F, 2j) - evaluate(F, 1j), abs=1e-13)


def _scipy_segment(e, a, b):
    # independent oracle: real and imaginary parts with QUADPACK on the parametrization
    d = b - a
    re = quad(lambda t: (evaluate(e, a + t * d) * d).real, 0, 1, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
    im = quad(lambda t: (evaluate(e, a + t * d) * d).imag, 0, 1, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
    return complex(re, im)


@pytest.mark.parametrize("text", ["exp(w)*sin(3*w)", "1/(w-2)", "sqrt(w+3)*log(w+2)", "1/(2*w^2)"])
def test_against_quadpack(text):
    e = parse_expression(text)
    pts = [0.2 + 0.1j, 0.9 - 0.4j, -0.3 + 0.8j]
    got = integrate_along(e, Path(tuple(pts)))
    ref = sum(_scipy_segment(e, a, b) for a, b in zip(pts[:-1], pts[1:]))
    assert abs(got - ref) < 1e-11


def test_near_pole_is_resolved_adaptively():
    # passes 1e-3 from the pole of 1/w^2
    e = parse_expression("1/w^2")
    got = integrate_along(e, Path.segment(-1 + 1e-3j, 1 + 1e-3j))
    exact = -1 / (1 + 1e-3j) + 1 / (-1 + 1e-3j)
    assert abs(got - exact) < 1e-9 * abs(exact)


def test_budget_exhaustion_is_reported():
    fn = lambda w: evaluate(parse_expression("1/w"), w)  # noqa: E731
    with pytest.raises(IntegrationError, match="no convergence"):
        integrate_vector(fn, Path.segment(-1 + 1e-9j, 1 + 1e-9j), max_evals=200)


def test_singular_point_on_path_fails():
    with pytest.raises(ArithmeticError):
        integrate_along(parse_expression("1/w"), Path.segment(-1, 1))


def test_path_validation():
    with pytest.raises(ValueError):
        Path((1,))
    with pytest.raises(ValueError):
        Path((0, 1, 1))
    with pytest.raises(ValueError):
        Path((0, float("nan")))
    p = Path((0, 1, 1 + 1j))
    assert p.reversed().waypoints == (1 + 1j, 1, 0)
    assert p.distance_to(0.5 + 0.5j) == pytest.approx(0.5)


def test_vector_integrand_and_reversal():
    e = lambda w: np.array([np.ones_like(w), w, w * w])  # noqa: E731
    path = Path((0, 1 + 1j, 2j))
    v, err = integrate_vector(e, path)
    b = 2j
    assert np.allclose(v, [b, b * b / 2, b**3 / 3], atol=1e-14)
    assert err <= 1e-12
    back, _ = integrate_vector(e, path.reversed())
    assert np.allclose(back, -v, atol=1e-14)


def test_results_are_deterministic():
    e = parse_expression("exp(w)/(w-3)")
    path = Path((0, 1 + 2j, 2 - 1j))
    assert integrate_along(e, path) == integrate_along(e, path)


@settings(max_examples=40, deadline=None)
@given(
    st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
)
def test_path_independence_for_entire_integrands(a, mid):
    if abs(a - 1) < 1e-6 or abs(mid - a) < 1e-6 or abs(mid - 1) < 1e-6:
        return
    e = parse_expression("exp(w)*cos(w)+w^3")
    tol = 1e-12
    direct = integrate_along(e, Path.segment(a, 1), tol)
    bent = integrate_along(e, Path((a, mid, 1)), tol)
    F = lambda w: cmath.exp(w) * (cmath.cos(w) + cmath.sin(w)) / 2 + w**4 / 4  # noqa: E731
    exact = F(1) - F(a)
    scale = 1 + abs(exact)
    assert abs(direct - bent) <= 2 * tol + 200 * np.finfo(float).eps * scale
    assert abs(direct - exact) <= 1e-11 * scale
