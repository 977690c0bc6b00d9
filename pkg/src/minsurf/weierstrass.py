"""Weierstrass-Enneper representation in (f, g) form and R form.

With data (f, g) the immersion is ``X = X0 + Re int Phi`` where
``Phi = ((1 - g^2) f, i (1 + g^2) f, 2 f g)``. In R form the parameter is the
Gauss-map coordinate itself (g = w) and ``Phi = ((1 - w^2) R, i (1 + w^2) R, 2 w R)``.

Because Phi is holomorphic, derivatives with respect to the real coordinates
are available in closed form: ``X_1 = Re Phi``, ``X_2 = -Im Phi`` and
``X_11 = -X_22 = Re Phi'``, ``X_12 = -Im Phi'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domains import Disk
from .expr import Expr, differentiate, evaluate
from .quadrature import DEFAULT_TOL, Path, integrate_vector

FD_STEP = 1e-5


class SingularCurvatureError(ArithmeticError):
    """R vanishes at the requested point, so the curvature is unbounded."""


@dataclass(frozen=True)
class WeierstrassData:
    """Generating data of a minimal surface.

    ``form`` is ``"R"`` (use ``R``) or ``"FG"`` (use ``f`` and ``g``). The
    optional ``F``/``Finv`` pair are the hodographic coordinate ``rho = F(zeta)``
    with ``F' = R`` and its local inverse.
    """

    form: str
    R: Optional[Expr] = None
    f: Optional[Expr] = None
    g: Optional[Expr] = None
    zeta0: complex = 0j
    X0: tuple = (0.0, 0.0, 0.0)
    singularities: tuple = ()
    domain: object = field(default_factory=lambda: Disk(0j, 1.0))
    name: str = ""
    F: Optional[Expr] = None
    Finv: Optional[Expr] = None

    def __post_init__(self):
        object.__setattr__(self, "zeta0", complex(self.zeta0))
        object.__setattr__(self, "X0", tuple(float(c) for c in self.X0))
        object.__setattr__(self, "singularities", tuple(complex(s) for s in self.singularities))
        if self.form == "R":
            if self.R is None:
                raise ValueError("R-form data needs R")
        elif self.form == "FG":
            if self.f is None or self.g is None:
                raise ValueError("FG-form data needs f and g")
        else:
            raise ValueError(f"form must be 'R' or 'FG', got {self.form!r}")
        if not self.domain.contains(self.zeta0):
            raise ValueError(f"base parameter {self.zeta0} lies outside the domain")
        if self.zeta0 in self.singularities:
            raise ValueError("base parameter is a declared singularity")
        if self.form == "R":
            evaluate(self.R, self.zeta0)


@dataclass(frozen=True)
class SurfaceSample:
    parameter: complex
    position: np.ndarray
    first: Optional[tuple] = None
    second: Optional[tuple] = None


def phi_triple(f: Expr, g: Expr, tau):
    """Return ``((1-g^2) f, i (1+g^2) f, 2 f g)`` evaluated at ``tau``."""
    fv = evaluate(f, tau)
    gv = evaluate(g, tau)
    g2 = gv * gv
    return ((1 - g2) * fv, 1j * (1 + g2) * fv, 2 * fv * gv)


def phi_vector(data: WeierstrassData, zeta) -> np.ndarray:
    """Phi at ``zeta`` as a complex array of shape ``(3,) + shape(zeta)``."""
    if data.form == "FG":
        return np.array(phi_triple(data.f, data.g, zeta))
    w = np.asarray(zeta, dtype=complex)
    r = evaluate(data.R, w)
    w2 = w * w
    return np.array([(1 - w2) * r, 1j * (1 + w2) * r, 2 * w * r])


def phi_vector_prime(data: WeierstrassData, zeta) -> np.ndarray:
    """Derivative of Phi with respect to the parameter."""
    w = np.asarray(zeta, dtype=complex)
    if data.form == "FG":
        fv, gv = evaluate(data.f, w), evaluate(data.g, w)
        df, dg = evaluate(differentiate(data.f), w), evaluate(differentiate(data.g), w)
        g2 = gv * gv
        return np.array([
            (1 - g2) * df - 2 * gv * dg * fv,
            1j * ((1 + g2) * df + 2 * gv * dg * fv),
            2 * (df * gv + fv * dg),
        ])
    r = evaluate(data.R, w)
    dr = evaluate(differentiate(data.R), w)
    w2 = w * w
    return np.array([
        (1 - w2) * dr - 2 * w * r,
        1j * ((1 + w2) * dr + 2 * w * r),
        2 * (r + w * dr),
    ])


def default_path(data: WeierstrassData, zeta, start=None) -> Path:
    """Integration path from ``start`` (default: the base parameter) to ``zeta``."""
    a = data.zeta0 if start is None else complex(start)
    return data.domain.path(a, complex(zeta), data.singularities)


def _integrate_phi(data: WeierstrassData, path: Path, tol: float) -> np.ndarray:
    value, _ = integrate_vector(lambda w: phi_vector(data, w), path, tol)
    return value.real


def _derivatives(data, zeta, order):
    if order < 1:
        return None, None
    phi = phi_vector(data, zeta)
    first = (phi.real.copy(), -phi.imag)
    if order < 2:
        return first, None
    dphi = phi_vector_prime(data, zeta)
    second = (dphi.real.copy(), -dphi.imag, -dphi.real)
    return first, second


def _immerse(data, zeta, path, tol, derivatives):
    zeta = complex(zeta)
    x0 = np.array(data.X0, dtype=float)
    if zeta == data.zeta0 and path is None:
        pos = x0
    else:
        if path is None:
            path = default_path(data, zeta)
        if abs(path.start - data.zeta0) > 0 or abs(path.end - zeta) > 0:
            raise ValueError("path must run from the base parameter to the target")
        pos = x0 + _integrate_phi(data, path, tol)
    first, second = _derivatives(data, zeta, derivatives)
    return SurfaceSample(zeta, pos, first, second)


def immerse_fg(data: WeierstrassData, tau, path: Path = None, tol: float = DEFAULT_TOL,
               derivatives: int = 0) -> SurfaceSample:
    """Point ``X0 + Re int_{tau0}^{tau} Phi`` of the surface given by (f, g)."""
    if data.form != "FG":
        raise ValueError("immerse_fg needs FG-form data")
    return _immerse(data, tau, path, tol, derivatives)


def immerse_R(data: WeierstrassData, zeta, path: Path = None, tol: float = DEFAULT_TOL,
              derivatives: int = 0) -> SurfaceSample:
    """Point of the surface generated by R.

    ``x = x0 + Re int (1 - w^2) R dw``, ``y = y0 + Re int i (1 + w^2) R dw``,
    ``phi = phi0 + Re int 2 w R dw``, integrated from ``data.zeta0``.
    """
    if data.form != "R":
        raise ValueError("immerse_R needs R-form data")
    return _immerse(data, zeta, path, tol, derivatives)


def immerse(data: WeierstrassData, zeta, path: Path = None, tol: float = DEFAULT_TOL,
            derivatives: int = 0) -> SurfaceSample:
    return _immerse(data, zeta, path, tol, derivatives)


def gaussian_curvature_R(R: Expr, w) -> float:
    """``K = -4 / (|R(w)|^2 (1 + |w|^2)^4)``."""
    w = complex(w)
    r = evaluate(R, w)
    if r == 0:
        raise SingularCurvatureError(f"R vanishes at w={w}; curvature is unbounded")
    return -4.0 / (abs(r) ** 2 * (1.0 + abs(w) ** 2) ** 4)


def first_fundamental_form(sample: SurfaceSample):
    """``(E, F, G)`` from the first parameter derivatives of ``sample``."""
    if sample.first is None:
        raise ValueError("sample carries no first derivatives")
    x1, x2 = (np.asarray(v, dtype=float) for v in sample.first)
    return float(x1 @ x1), float(x1 @ x2), float(x2 @ x2)


class WeierstrassSurface:
    """Sampler over the parameter plane of a :class:`WeierstrassData`."""

    def __init__(self, data: WeierstrassData, tol: float = DEFAULT_TOL):
        self.data = data
        self.tol = tol

    def position(self, zeta) -> np.ndarray:
        return _immerse(self.data, zeta, None, self.tol, 0).position

    def offset(self, zeta, delta) -> np.ndarray:
        """``X(zeta + delta) - X(zeta)`` by one short straight integral."""
        zeta = complex(zeta)
        if delta == 0:
            return np.zeros(3)
        return _integrate_phi(self.data, Path.segment(zeta, zeta + delta), self.tol)

    def sample(self, zeta, order: int = 1, position: bool = True) -> SurfaceSample:
        zeta = complex(zeta)
        pos = self.position(zeta) if position else np.full(3, np.nan)
        first, second = _derivatives(self.data, zeta, order)
        return SurfaceSample(zeta, pos, first, second)

    def phi(self, zeta) -> np.ndarray:
        return phi_vector(self.data, zeta)

    def contains(self, zeta) -> bool:
        return self.data.domain.contains(zeta)


class ChartSurface:
    """A :class:`WeierstrassSurface` viewed through its domain's grid chart.

    The chart is conformal, so isothermality and harmonicity carry over.
    """

    def __init__(self, surface: WeierstrassSurface):
        self.surface = surface
        self.domain = surface.data.domain

    def position(self, s) -> np.ndarray:
        return self.surface.position(complex(self.domain.from_chart(s)))

    def offset(self, s, delta) -> np.ndarray:
        s = complex(s)
        z = complex(self.domain.from_chart(s))
        dz = complex(self.domain.from_chart(s + delta)) - z
        return self.surface.offset(z, dz)

    def sample(self, s, order: int = 1, position: bool = True) -> SurfaceSample:
        s = complex(s)
        z = complex(self.domain.from_chart(s))
        pos = self.surface.position(z) if position else np.full(3, np.nan)
        phi = self.surface.phi(z) * complex(self.domain.chart_derivative(s))
        first = (phi.real.copy(), -phi.imag) if order >= 1 else None
        second = None
        if order >= 2:
            dz = complex(self.domain.chart_derivative(s))
            ddz = complex(self.domain.chart_second_derivative(s))
            dphi = phi_vector_prime(self.surface.data, z) * dz * dz + self.surface.phi(z) * ddz
            second = (dphi.real.copy(), -dphi.imag, -dphi.real)
        return SurfaceSample(s, pos, first, second)

    def contains(self, s) -> bool:
        return self.domain.chart_contains(s)


class FunctionSurface:
    """Sampler for an explicit map ``p -> X`` (test charts, graphs).

    Derivatives use central differences with step ``1e-5 (1 + |p|)``.
    """

    def __init__(self, fn, domain=None):
        self.fn = fn
        self.domain = domain

    def position(self, p) -> np.ndarray:
        return np.asarray(self.fn(complex(p)), dtype=float)

    def offset(self, p, delta) -> np.ndarray:
        return self.position(complex(p) + delta) - self.position(p)

    def sample(self, p, order: int = 1, position: bool = True) -> SurfaceSample:
        p = complex(p)
        h = FD_STEP * (1 + abs(p))
        x = self.position(p)
        first = second = None
        if order >= 1:
            first = (
                (self.position(p + h) - self.position(p - h)) / (2 * h),
                (self.position(p + 1j * h) - self.position(p - 1j * h)) / (2 * h),
            )
        if order >= 2:
            h = 10 * h
            xpp, xmm = self.position(p + h), self.position(p - h)
            ypp, ymm = self.position(p + 1j * h), self.position(p - 1j * h)
            mixed = (
                self.position(p + h + 1j * h) - self.position(p + h - 1j * h)
                - self.position(p - h + 1j * h) + self.position(p - h - 1j * h)
            ) / (4 * h * h)
            second = ((xpp - 2 * x + xmm) / h**2, mixed, (ypp - 2 * x + ymm) / h**2)
        return SurfaceSample(p, x, first, second)

    def contains(self, p) -> bool:
        return True if self.domain is None else self.domain.contains(p)
