"""Numerical checks of the identities a minimal surface must satisfy.

Samplers are duck-typed objects with ``position(p)``, ``offset(p, delta)``
(``X(p + delta) - X(p)``), ``sample(p, order)`` and ``contains(p)``; see
:class:`minsurf.weierstrass.WeierstrassSurface` and
:class:`minsurf.weierstrass.FunctionSurface`.

All finite-difference steps are relative: ``h = h0 * (1 + |p|)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .expr import evaluate
from .weierstrass import (
    WeierstrassData,
    WeierstrassSurface,
    first_fundamental_form,
    gaussian_curvature_R,
    phi_vector,
)

FIRST_STEP = 1e-5
SECOND_STEP = 1e-4


class DegenerateMetricError(ArithmeticError):
    """The first fundamental form is singular at the requested point."""


@dataclass(frozen=True)
class ResidualReport:
    """Outcome of one check over a grid.

    ``passed`` is ``max_abs_residual <= tolerance * scale_reference``.
    """

    name: str
    grid: str
    max_abs_residual: float
    mean_abs_residual: float
    scale_reference: float
    tolerance: float
    passed: bool
    worst_location: list
    worst_value: float

    def to_dict(self) -> dict:
        return asdict(self)


def make_report(name, grid_desc, values, locations, tolerance, scale=1.0) -> ResidualReport:
    values = np.asarray(values, dtype=float).ravel()
    locations = np.asarray(locations, dtype=complex).ravel()
    k = int(np.argmax(values))
    worst = values[k]
    return ResidualReport(
        name=name,
        grid=grid_desc,
        max_abs_residual=float(worst),
        mean_abs_residual=float(np.mean(values)),
        scale_reference=float(scale),
        tolerance=float(tolerance),
        passed=bool(np.isfinite(worst) and worst <= tolerance * scale),
        worst_location=[float(locations[k].real), float(locations[k].imag)],
        worst_value=float(worst),
    )


def _grid_desc(grid) -> str:
    g = np.asarray(grid)
    return "x".join(str(n) for n in g.shape) + " points"


# ---------------------------------------------------------------------------
# graphs


def _fd_graph_derivatives(patch, x, y, step):
    h = step * (1 + abs(x) + abs(y))
    f = patch.value
    f0 = f(x, y)
    fxp, fxm = f(x + h, y), f(x - h, y)
    fyp, fym = f(x, y + h), f(x, y - h)
    px = (fxp - fxm) / (2 * h)
    py = (fyp - fym) / (2 * h)
    pxx = (fxp - 2 * f0 + fxm) / h**2
    pyy = (fyp - 2 * f0 + fym) / h**2
    pxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h)
    return px, py, pxx, pxy, pyy


def minimal_eq_residual(patch, x: float, y: float, method: str = None, step: float = SECOND_STEP) -> float:
    """``(1 + phi_y^2) phi_xx - 2 phi_x phi_y phi_xy + (1 + phi_x^2) phi_yy`` at ``(x, y)``.

    ``method`` is ``"analytic"`` (symbolic partials of a GraphPatch) or
    ``"fd"`` (central differences of ``patch.value``); by default the analytic
    route is used when the patch offers it.
    """
    if method is None:
        method = "analytic" if hasattr(patch, "hessian") else "fd"
    if method == "analytic":
        px, py = patch.gradient(x, y)
        pxx, pxy, pyy = patch.hessian(x, y)
    elif method == "fd":
        px, py, pxx, pxy, pyy = _fd_graph_derivatives(patch, x, y, step)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float((1 + py**2) * pxx - 2 * px * py * pxy + (1 + px**2) * pyy)


class RegraphedPatch:
    """A piece of a Weierstrass surface seen as a graph ``phi(x, y)`` near ``zeta_c``.

    ``value(x, y)`` solves ``(x(zeta), y(zeta)) = (x, y)`` by Newton's method,
    with positions taken relative to the centre through short integrals.
    """

    def __init__(self, surface: WeierstrassSurface, zeta_c, max_iter: int = 50):
        self.surface = surface
        self.zeta_c = complex(zeta_c)
        self.center = surface.position(self.zeta_c)
        self.max_iter = max_iter
        if np.linalg.det(self._jacobian(self.zeta_c)) == 0:
            raise DegenerateMetricError("surface is not a graph near the centre")

    def _jacobian(self, zeta):
        phi = phi_vector(self.surface.data, zeta)
        return np.array([[phi[0].real, -phi[0].imag], [phi[1].real, -phi[1].imag]])

    @property
    def xy(self):
        return float(self.center[0]), float(self.center[1])

    def value(self, x, y) -> float:
        target = np.array([x - self.center[0], y - self.center[1]])
        zeta = self.zeta_c
        for _ in range(self.max_iter):
            d = self.surface.offset(self.zeta_c, zeta - self.zeta_c)
            r = d[:2] - target
            step = np.linalg.solve(self._jacobian(zeta), -r)
            zeta = zeta + complex(step[0], step[1])
            if abs(step[0]) + abs(step[1]) <= 1e-11 * (1 + abs(zeta)):
                break
        else:
            raise ArithmeticError(f"re-graphing did not converge at ({x}, {y})")
        d = self.surface.offset(self.zeta_c, zeta - self.zeta_c)
        return float(self.center[2] + d[2])


# ---------------------------------------------------------------------------
# parametrized surfaces


def isothermal_residuals(sampler, grid, tolerance: float = 1e-8, name: str = "isothermal") -> ResidualReport:
    """Largest ``max(|E - G|, |F|) / E`` over ``grid``."""
    pts = np.asarray(grid, dtype=complex)
    values = []
    for p in pts.ravel():
        E, F, G = first_fundamental_form(sampler.sample(complex(p), 1, position=False))
        values.append(np.inf if E == 0 else max(abs(E - G), abs(F)) / E)
    return make_report(name, _grid_desc(pts), values, pts, tolerance)


def laplacian(sampler, p, step: float = 1e-3) -> np.ndarray:
    """5-point Laplacian of the position at ``p``."""
    p = complex(p)
    h = step * (1 + abs(p))
    total = np.zeros(3)
    for d in (h, -h, 1j * h, -1j * h):
        if not sampler.contains(p + d):
            raise ValueError(f"stencil at {p} leaves the domain")
        total = total + sampler.offset(p, d)
    return total / h**2


def harmonic_residual(sampler, grid, step: float = 1e-3, tolerance: float = 1e-4,
                      name: str = "harmonic") -> ResidualReport:
    """Largest component of the 5-point Laplacian, scaled by ``max |X|`` over the grid."""
    pts = np.asarray(grid, dtype=complex)
    values = [float(np.max(np.abs(laplacian(sampler, p, step)))) for p in pts.ravel()]
    scale = max(float(np.linalg.norm(sampler.position(p))) for p in pts.ravel())
    return make_report(name, _grid_desc(pts), values, pts, tolerance, scale)


def _fd_frame(sampler, p, step):
    p = complex(p)
    h = step * (1 + abs(p))
    off = lambda d: sampler.offset(p, d)  # noqa: E731
    xp, xm, yp, ym = off(h), off(-h), off(1j * h), off(-1j * h)
    X1 = (xp - xm) / (2 * h)
    X2 = (yp - ym) / (2 * h)
    X11 = (xp + xm) / h**2
    X22 = (yp + ym) / h**2
    X12 = (off(h + 1j * h) - off(h - 1j * h) - off(-h + 1j * h) + off(-h - 1j * h)) / (4 * h * h)
    return X1, X2, X11, X12, X22


def fundamental_forms(sampler, p, step: float = SECOND_STEP):
    """First and second fundamental forms ``(E, F, G), (L, M, N)`` by finite differences.

    The normal is ``X_1 x X_2 / |X_1 x X_2|``.
    """
    X1, X2, X11, X12, X22 = _fd_frame(sampler, p, step)
    E, F, G = X1 @ X1, X1 @ X2, X2 @ X2
    cross = np.cross(X1, X2)
    norm = np.linalg.norm(cross)
    if norm == 0 or E * G - F * F <= 0:
        raise DegenerateMetricError(f"degenerate metric at {p}")
    n = cross / norm
    return (E, F, G), (X11 @ n, X12 @ n, X22 @ n)


def mean_curvature(sampler, p, step: float = SECOND_STEP) -> float:
    """Signed ``H = (E N - 2 F M + G L) / (2 (E G - F^2))``."""
    (E, F, G), (L, M, N) = fundamental_forms(sampler, p, step)
    return float((E * N - 2 * F * M + G * L) / (2 * (E * G - F * F)))


def gaussian_curvature(sampler, p, step: float = SECOND_STEP) -> float:
    (E, F, G), (L, M, N) = fundamental_forms(sampler, p, step)
    return float((L * N - M * M) / (E * G - F * F))


def numeric_normal(sampler, p, step: float = FIRST_STEP) -> np.ndarray:
    """Unit normal ``X_1 x X_2 / |.|`` from central differences."""
    p = complex(p)
    h = step * (1 + abs(p))
    X1 = (sampler.offset(p, h) - sampler.offset(p, -h)) / (2 * h)
    X2 = (sampler.offset(p, 1j * h) - sampler.offset(p, -1j * h)) / (2 * h)
    c = np.cross(X1, X2)
    return c / np.linalg.norm(c)


def curvature_consistency(data: WeierstrassData, w, step: float = SECOND_STEP, tol: float = None):
    """Closed-form Gaussian curvature of R-form data against the finite-difference value."""
    closed = gaussian_curvature_R(data.R, w)
    surface = WeierstrassSurface(data) if tol is None else WeierstrassSurface(data, tol)
    numeric = gaussian_curvature(surface, w, step)
    return closed, numeric


def null_identity_residuals(data: WeierstrassData, zetas) -> np.ndarray:
    """``|Phi . Phi| / |Phi|^2`` at each parameter."""
    phi = phi_vector(data, np.asarray(zetas, dtype=complex))
    dot = np.abs(np.sum(phi * phi, axis=0))
    norm2 = np.sum(np.abs(phi) ** 2, axis=0)
    return dot / norm2


def is_locally_graph(data: WeierstrassData, zeta, min_vertical: float = 0.5) -> bool:
    """Whether the normal at ``zeta`` is far enough from horizontal to re-graph over (x, y)."""
    if data.form == "R":
        g = complex(zeta)
    else:
        g = evaluate(data.g, complex(zeta))
    a = abs(g) ** 2
    return abs(a - 1) / (1 + a) >= min_vertical
