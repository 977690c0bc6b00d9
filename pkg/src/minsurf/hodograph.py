"""Hodographic and conformal coordinates of a minimal graph.

For a graph ``phi(x, y)`` with ``z = x + i y`` the first-order data are the
Wirtinger derivatives ``u = phi_zbar`` and ``v = phi_z = conj(u)``. The
conformal coordinate is

    zeta = 2 u / (1 + sqrt(1 + 4 |u|^2)),    u = zeta / (1 - |zeta|^2),

which is the quotient ``(sqrt(1 + 4uv) - 1) / (2v)`` with the removable
singularity at ``v = 0`` taken out. In these coordinates ``zbar`` splits as
``F(zeta) + G(conj zeta)`` and the Weierstrass function is ``R = F'``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .expr import Expr, differentiate, evaluate, parse_expression
from .quadrature import DEFAULT_TOL, Path, integrate_vector
from .domains import straight_path
from .weierstrass import SurfaceSample

DEGENERACY_THRESHOLD = 1e-12
INVERSE_CHECK = 1e-8


class HodographError(ArithmeticError):
    """The hodograph map is not invertible at the requested point."""


@dataclass(frozen=True)
class GraphPatch:
    """A graph ``(x, y, phi(x, y))`` with symbolic first and second partials."""

    phi: Expr
    domain: object = None
    variables: tuple = ("x", "y")

    @classmethod
    def from_text(cls, text: str, domain=None, variables=("x", "y")) -> "GraphPatch":
        return cls(parse_expression(text, variables), domain, tuple(variables))

    def __post_init__(self):
        x, y = self.variables
        px = differentiate(self.phi, x)
        py = differentiate(self.phi, y)
        object.__setattr__(self, "phi_x", px)
        object.__setattr__(self, "phi_y", py)
        object.__setattr__(self, "phi_xx", differentiate(px, x))
        object.__setattr__(self, "phi_xy", differentiate(px, y))
        object.__setattr__(self, "phi_yy", differentiate(py, y))

    def _at(self, e, x, y):
        xn, yn = self.variables
        return np.real(evaluate(e, {xn: x, yn: y}))

    def value(self, x, y):
        return self._at(self.phi, x, y)

    def gradient(self, x, y):
        return self._at(self.phi_x, x, y), self._at(self.phi_y, x, y)

    def hessian(self, x, y):
        return (self._at(self.phi_xx, x, y), self._at(self.phi_xy, x, y),
                self._at(self.phi_yy, x, y))


@dataclass(frozen=True)
class HodographFrame:
    x: float
    y: float
    z: complex
    u: complex
    v: complex
    zeta: complex
    phi: float = float("nan")
    indicator: float = float("nan")
    degenerate: bool = False
    rho: Optional[complex] = None


def wirtinger_uv(patch: GraphPatch, x, y):
    """``u = (phi_x + i phi_y) / 2`` and ``v = conj(u)``."""
    px, py = patch.gradient(x, y)
    u = (px + 1j * py) * 0.5
    if np.ndim(u) == 0:
        u = complex(u)
        return u, u.conjugate()
    return u, np.conj(u)


def zeta_from_u(u):
    """Conformal coordinate ``2u / (1 + sqrt(1 + 4|u|^2))``; always inside the unit disk."""
    u = np.asarray(u, dtype=complex)
    out = 2 * u / (1 + np.sqrt(1 + 4 * (u.real**2 + u.imag**2)))
    return complex(out) if out.ndim == 0 else out


def u_from_zeta(zeta):
    """Inverse map ``zeta / (1 - |zeta|^2)``."""
    zeta = np.asarray(zeta, dtype=complex)
    den = 1 - (zeta.real**2 + zeta.imag**2)
    if np.any(den == 0):
        raise HodographError("the transformation is singular on |zeta| = 1")
    out = zeta / den
    return complex(out) if out.ndim == 0 else out


def _u_partials(patch: GraphPatch, x, y):
    pxx, pxy, pyy = patch.hessian(x, y)
    # u_x = (phi_xx + i phi_xy)/2, u_y = (phi_xy + i phi_yy)/2
    ux = 0.5 * (pxx + 1j * pxy)
    uy = 0.5 * (pxy + 1j * pyy)
    u_z = 0.5 * (ux - 1j * uy)
    u_zbar = 0.5 * (ux + 1j * uy)
    return u_z, u_zbar


def umbilic_indicator(patch: GraphPatch, x, y):
    """``|u_zbar v_z - u_z v_zbar|``; it vanishes exactly where the Hessian of phi is singular."""
    u_z, u_zbar = _u_partials(patch, x, y)
    v_z, v_zbar = np.conj(u_zbar), np.conj(u_z)
    return np.abs(u_zbar * v_z - u_z * v_zbar)


def _degenerate(patch, x, y, threshold):
    u_z, u_zbar = _u_partials(patch, x, y)
    scale = np.abs(u_z) ** 2 + np.abs(u_zbar) ** 2
    ind = umbilic_indicator(patch, x, y)
    return ind, ind <= threshold * scale


def conformal_coordinates(patch: GraphPatch, grid, threshold: float = DEGENERACY_THRESHOLD) -> list:
    """Hodograph frames ``(z, u, v, zeta)`` at each ``(x, y)`` of ``grid``.

    Points where the hodograph map is singular (umbilics, where the indicator
    falls below ``threshold`` times the local second-derivative scale) are
    flagged ``degenerate``.
    """
    pts = np.asarray(grid, dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    u, v = wirtinger_uv(patch, x, y)
    zeta = zeta_from_u(u)
    phi = patch.value(x, y)
    ind, flag = _degenerate(patch, x, y, threshold)
    return [
        HodographFrame(float(x[k]), float(y[k]), complex(x[k], y[k]), complex(u[k]), complex(v[k]),
                       complex(zeta[k]), float(phi[k]), float(ind[k]), bool(flag[k]))
        for k in range(len(x))
    ]


def frames_from_surface(surface, zetas) -> list:
    """Frames for points of a parametrized surface whose parameter is the conformal coordinate.

    ``surface`` is a Weierstrass sampler in R form; ``u`` comes from the
    inverse map since no explicit graph is available.
    """
    out = []
    for zeta in np.ravel(zetas):
        zeta = complex(zeta)
        X = surface.position(zeta)
        u = u_from_zeta(zeta)
        out.append(HodographFrame(float(X[0]), float(X[1]), complex(X[0], X[1]), u, u.conjugate(),
                                  zeta, float(X[2])))
    return out


def zeta_derivatives(patch: GraphPatch, frames):
    """``(z_zeta, zbar_zeta)`` at each frame from the inverted hodograph Jacobian."""
    x = np.array([f.x for f in frames])
    y = np.array([f.y for f in frames])
    zeta = np.array([f.zeta for f in frames])
    u_z, u_zbar = _u_partials(patch, x, y)
    v_z, v_zbar = np.conj(u_zbar), np.conj(u_z)
    det = u_z * v_zbar - u_zbar * v_z
    if np.any(det == 0):
        raise HodographError("hodograph Jacobian is singular")
    # inverse of [[u_z, u_zbar], [v_z, v_zbar]] is [[z_u, z_v], [zbar_u, zbar_v]]
    z_u, z_v = v_zbar / det, -u_zbar / det
    zb_u, zb_v = -v_z / det, u_z / det
    eta = np.conj(zeta)
    q = (1 - zeta * eta) ** 2
    u_zeta, v_zeta = 1 / q, eta * eta / q
    return z_u * u_zeta + z_v * v_zeta, zb_u * u_zeta + zb_v * v_zeta


def frame_linear_residuals(patch: GraphPatch, frames) -> np.ndarray:
    """Relative residual ``|z_zeta + zeta^2 zbar_zeta| / (|z_zeta| + |zeta^2 zbar_zeta|)`` per frame.

    It vanishes on minimal graphs, where the hodograph system is linear.
    """
    z_zeta, zb_zeta = zeta_derivatives(patch, frames)
    zeta = np.array([f.zeta for f in frames])
    a, b = z_zeta, zeta * zeta * zb_zeta
    return np.abs(a + b) / (np.abs(a) + np.abs(b))


def _jacobian_rhat(patch: GraphPatch, frames):
    u = np.array([f.u for f in frames])
    v = np.array([f.v for f in frames])
    zeta = np.array([f.zeta for f in frames])
    z_zeta, zb_zeta = zeta_derivatives(patch, frames)
    phi_zeta = u * zb_zeta + v * z_zeta
    return phi_zeta / zeta


def _mls_fit(d, w, rhs, order):
    cols = [np.ones(len(d))]
    p = np.ones(len(d), dtype=complex)
    for _ in range(order):
        p = p * d
        cols += [p.real, p.imag]
    A = np.column_stack(cols) * w[:, None]
    coef, _, rank, _ = np.linalg.lstsq(A, rhs * w, rcond=None)
    return coef, rank == 2 * order + 1


def _mls_rhat(frames, k: int, order: int):
    if k < 2 * order + 2:
        raise HodographError(f"stencil of {k} neighbours cannot fit {2 * order + 1} basis terms")
    if len(frames) < k:
        raise HodographError(f"insufficient neighbours: {len(frames)} frames for a {k}-point stencil")
    zeta = np.array([f.zeta for f in frames])
    phi = np.array([f.phi for f in frames])
    tree = cKDTree(np.column_stack([zeta.real, zeta.imag]))
    dist, idx = tree.query(np.column_stack([zeta.real, zeta.imag]), k=k)
    out = np.empty(len(frames), dtype=complex)
    for n in range(len(frames)):
        h = dist[n, -1]
        if h == 0:
            raise HodographError(f"degenerate stencil at zeta={zeta[n]}")
        d = (zeta[idx[n]] - zeta[n]) / h
        w = np.exp(-(dist[n] / h) ** 2)
        rhs = phi[idx[n]] - phi[n]
        # symmetric stencils (lattices) can annihilate the top harmonics; drop order until full rank
        for m in range(order, 0, -1):
            coef, full = _mls_fit(d, w, rhs, m)
            if full:
                break
        else:
            raise HodographError(f"collinear stencil at zeta={zeta[n]}")
        # d/dzeta of a Re(d) + b Im(d) is (a - i b)/2, undo the 1/h scaling
        out[n] = 0.5 * (coef[1] - 1j * coef[2]) / h / zeta[n]
    return out


def recover_R(patch: Optional[GraphPatch], frames, method: str = "jacobian",
              k: int = 12, order: int = 4) -> list:
    """Estimate ``R = F'`` at each frame as ``phi_zeta / zeta``.

    ``method="jacobian"`` inverts the hodograph Jacobian built from the
    symbolic second partials of ``patch`` and applies the chain rule, which is
    exact up to rounding. ``method="mls"`` fits ``phi`` over the ``k`` nearest
    frames in the zeta plane with harmonic polynomials up to ``order`` and
    reads ``phi_zeta`` off the linear term; it needs only sampled values, so
    ``patch`` may be ``None``.

    Returns a list of ``(zeta, Rhat)`` pairs.
    """
    frames = list(frames)
    for f in frames:
        if f.degenerate:
            raise HodographError(f"frame at ({f.x}, {f.y}) is degenerate (umbilic)")
        if f.zeta == 0:
            raise HodographError(f"frame at ({f.x}, {f.y}) has zeta = 0")
    if method == "jacobian":
        if patch is None:
            raise ValueError("the jacobian method needs the graph patch")
        rhat = _jacobian_rhat(patch, frames)
    elif method == "mls":
        rhat = _mls_rhat(frames, k, order)
    else:
        raise ValueError(f"unknown method {method!r}")
    return [(f.zeta, complex(r)) for f, r in zip(frames, rhat)]


def _zeta_derivative(field, zeta, eta, names, step):
    if isinstance(field, Expr):
        return evaluate(differentiate(field, names[0]), {names[0]: zeta, names[1]: eta})
    h = step * (1 + abs(zeta))
    return (field(zeta + h, eta) - field(zeta - h, eta)) / (2 * h)


def linear_system_residual(z, zbar, zeta, names=("zeta", "eta"), step: float = 1e-5) -> complex:
    """``zeta^2 * dzbar/dzeta + dz/dzeta`` at ``zeta`` with ``eta = conj(zeta)`` held fixed.

    ``z`` and ``zbar`` are expressions in the two independent variables
    ``names`` or callables ``(zeta, eta) -> value`` (differentiated by central
    differences).
    """
    zeta = complex(zeta)
    eta = zeta.conjugate()
    dz = _zeta_derivative(z, zeta, eta, names, step)
    dzb = _zeta_derivative(zbar, zeta, eta, names, step)
    return complex(zeta * zeta * dzb + dz)


def rho_from_zeta(F: Expr, zeta):
    """Hodographic coordinates ``rho = F(zeta)`` and ``sigma = conj(rho)``."""
    zeta = complex(zeta)
    dF = evaluate(differentiate(F), zeta)
    if dF == 0:
        raise HodographError(f"F'(zeta) = 0 at zeta={zeta}; no local inverse")
    rho = evaluate(F, zeta)
    return rho, rho.conjugate()


def normal_from_phi_rho(phi_rho) -> np.ndarray:
    """Unit normal ``(2 Re p, 2 Im p, |p|^2 - 1) / (1 + |p|^2)`` for ``p = phi_rho``."""
    p = complex(phi_rho)
    a = p.real**2 + p.imag**2
    return np.array([2 * p.real, 2 * p.imag, a - 1]) / (1 + a)


def _rho_integrals(Finv: Expr, path: Path, tol: float):
    def integrand(r):
        zeta = evaluate(Finv, r)
        return np.array([zeta, zeta * zeta])

    (i1, i2), _ = integrate_vector(integrand, path, tol)
    return complex(i1), complex(i2)


def _check_inverse(F, Finv, rho):
    back = evaluate(F, evaluate(Finv, rho))
    if abs(back - rho) > INVERSE_CHECK * (1 + abs(rho)):
        raise HodographError(f"F(Finv(rho)) = {back} differs from rho = {rho}")


def surface_from_rho(Finv: Expr, rho, rho0, X0=(0.0, 0.0, 0.0), tol: float = DEFAULT_TOL,
                     F: Expr = None, path: Path = None, singularities=()) -> SurfaceSample:
    """Surface point in hodographic coordinates.

    With ``zeta = Finv(rho)`` and ``sigma = conj(rho)``::

        x   = x0 + (drho + dsigma)/2 - I2/2 - conj(I2)/2
        y   = y0 + (dsigma - drho)/(2i) - I2/(2i) + conj(I2)/(2i)
        phi = phi0 + I1 + conj(I1)

    where ``I1 = int Finv``, ``I2 = int Finv^2`` from ``rho0`` to ``rho``; the
    sigma-side integrals are the conjugates of the rho-side ones. When ``F``
    is given, ``F(Finv(rho)) = rho`` is checked first.
    """
    rho, rho0 = complex(rho), complex(rho0)
    X0 = np.asarray(X0, dtype=float)
    if F is not None:
        _check_inverse(F, Finv, rho)
        _check_inverse(F, Finv, rho0)
    if rho == rho0 and path is None:
        return SurfaceSample(rho, X0.copy())
    if path is None:
        path = straight_path(rho0, rho, singularities)
    i1, i2 = _rho_integrals(Finv, path, tol)
    drho = rho - rho0
    dsigma = drho.conjugate()
    x = (drho + dsigma) / 2 - i2 / 2 - i2.conjugate() / 2
    y = (dsigma - drho) / 2j - i2 / 2j + i2.conjugate() / 2j
    phi = i1 + i1.conjugate()
    return SurfaceSample(rho, X0 + np.array([x.real, y.real, phi.real]))


class RhoSurface:
    """Sampler over the rho plane (positions and short-segment offsets)."""

    def __init__(self, Finv: Expr, rho0, X0=(0.0, 0.0, 0.0), tol: float = DEFAULT_TOL,
                 F: Expr = None, singularities=()):
        self.Finv, self.F = Finv, F
        self.rho0 = complex(rho0)
        self.X0 = tuple(X0)
        self.tol = tol
        self.singularities = tuple(singularities)

    def position(self, rho) -> np.ndarray:
        return surface_from_rho(self.Finv, rho, self.rho0, self.X0, self.tol, self.F,
                                singularities=self.singularities).position

    def offset(self, rho, delta) -> np.ndarray:
        rho = complex(rho)
        return surface_from_rho(self.Finv, rho + delta, rho, (0.0, 0.0, 0.0), self.tol).position

    def phi_rho(self, rho) -> complex:
        """``d phi / d rho``, which equals ``Finv(rho)``."""
        return evaluate(self.Finv, complex(rho))

    def contains(self, rho) -> bool:
        return True
