"""Parameter-plane regions, their sampling grids and default integration paths.

Each domain carries a *chart* ``s -> zeta`` used for grids. Rectangles and
disks use the identity chart; annuli use the log-polar chart
``zeta = center + exp(s)`` with ``Im s`` in ``(-pi, pi)``, which is conformal
and keeps every grid line off the slit along the negative real direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import Path

DETOUR_DISTANCE = 1e-3
_MAX_ARC_STEP = math.pi / 16
_MAX_LOG_STEP = 0.25


def _axis(lo: float, hi: float, n: int, interior: bool) -> np.ndarray:
    if n < 2:
        raise ValueError("grid resolution must be at least 2 in each direction")
    if interior:
        edges = np.linspace(lo, hi, n + 1)
        return 0.5 * (edges[:-1] + edges[1:])
    return np.linspace(lo, hi, n)


def straight_path(a: complex, b: complex, singularities=(), threshold: float = DETOUR_DISTANCE) -> Path:
    """Straight segment ``a -> b``, bent around any singularity it passes too close to.

    The detour keeps to the side of the singularity the segment already passes
    on, so the bent path is homotopic to the straight one.
    """
    path = Path.segment(a, b)
    for s in singularities:
        s = complex(s)
        if path.distance_to(s) >= threshold:
            continue
        d = b - a
        t = min(1.0, max(0.0, ((s - a) * d.conjugate()).real / abs(d) ** 2))
        foot = a + t * d
        normal = 1j * d / abs(d)
        side = (foot - s) * normal.conjugate()
        if side.real < 0:
            normal = -normal
        radius = max(10 * threshold, 0.5 * min(abs(a - s), abs(b - s)))
        path = Path((a, s + radius * normal, b))
        if path.distance_to(s) < threshold:
            raise ValueError(f"cannot route a path from {a} to {b} around singularity {s}")
    return path


@dataclass(frozen=True)
class Rectangle:
    x0: float
    x1: float
    y0: float
    y1: float
    kind = "rectangle"

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("rectangle bounds must satisfy x0 < x1 and y0 < y1")

    def contains(self, p, pad: float = 1e-12) -> bool:
        p = complex(p)
        return (self.x0 - pad <= p.real <= self.x1 + pad) and (self.y0 - pad <= p.imag <= self.y1 + pad)

    def chart_grid(self, n1: int, n2: int, interior: bool = False) -> np.ndarray:
        a = _axis(self.x0, self.x1, n1, interior)
        b = _axis(self.y0, self.y1, n2, interior)
        return a[:, None] + 1j * b[None, :]

    def from_chart(self, s):
        return s

    def chart_derivative(self, s):
        return np.ones_like(np.asarray(s, dtype=complex))

    def chart_second_derivative(self, s):
        return np.zeros_like(np.asarray(s, dtype=complex))

    def chart_contains(self, s) -> bool:
        return self.contains(s)

    def path(self, a, b, singularities=()) -> Path:
        return straight_path(complex(a), complex(b), singularities)

    def describe(self) -> dict:
        return {"kind": self.kind, "bounds": [self.x0, self.x1, self.y0, self.y1]}


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float
    kind = "disk"

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("disk radius must be positive")

    def contains(self, p, pad: float = 1e-12) -> bool:
        return abs(complex(p) - self.center) <= self.radius + pad

    def chart_grid(self, n1: int, n2: int, interior: bool = False) -> np.ndarray:
        # the inscribed square keeps every cell non-degenerate
        h = self.radius / math.sqrt(2.0)
        c = complex(self.center)
        a = _axis(c.real - h, c.real + h, n1, interior)
        b = _axis(c.imag - h, c.imag + h, n2, interior)
        return a[:, None] + 1j * b[None, :]

    def from_chart(self, s):
        return s

    def chart_derivative(self, s):
        return np.ones_like(np.asarray(s, dtype=complex))

    def chart_second_derivative(self, s):
        return np.zeros_like(np.asarray(s, dtype=complex))

    def chart_contains(self, s) -> bool:
        return self.contains(s)

    def path(self, a, b, singularities=()) -> Path:
        return straight_path(complex(a), complex(b), singularities)

    def describe(self) -> dict:
        c = complex(self.center)
        return {"kind": self.kind, "center": [c.real, c.imag], "radius": self.radius}


@dataclass(frozen=True)
class Annulus:
    center: complex
    r_inner: float
    r_outer: float
    kind = "annulus"

    def __post_init__(self):
        if not (0 < self.r_inner < self.r_outer):
            raise ValueError("annulus radii must satisfy 0 < r_inner < r_outer")

    def contains(self, p, pad: float = 1e-12) -> bool:
        r = abs(complex(p) - self.center)
        return self.r_inner - pad <= r <= self.r_outer + pad

    def chart_grid(self, n1: int, n2: int, interior: bool = False) -> np.ndarray:
        logr = _axis(math.log(self.r_inner), math.log(self.r_outer), n1, interior)
        # angles are always cell-centred so no node sits on the slit
        theta = _axis(-math.pi, math.pi, n2, interior=True)
        return logr[:, None] + 1j * theta[None, :]

    def to_chart(self, p):
        return np.log(np.asarray(p, dtype=complex) - self.center)

    def from_chart(self, s):
        return self.center + np.exp(s)

    def chart_derivative(self, s):
        return np.exp(s)

    def chart_second_derivative(self, s):
        return np.exp(s)

    def chart_contains(self, s, pad: float = 1e-12) -> bool:
        s = complex(s)
        return (
            math.log(self.r_inner) - pad <= s.real <= math.log(self.r_outer) + pad
            and -math.pi < s.imag < math.pi
        )

    def path(self, a, b, singularities=()) -> Path:
        """Log-polar polyline from ``a`` to ``b`` that never crosses the slit."""
        a, b = complex(a), complex(b)
        sa, sb = complex(self.to_chart(a)), complex(self.to_chart(b))
        ds = sb - sa
        n = max(1, math.ceil(abs(ds.imag) / _MAX_ARC_STEP), math.ceil(abs(ds.real) / _MAX_LOG_STEP))
        pts = [a] + [complex(self.from_chart(sa + ds * k / n)) for k in range(1, n)] + [b]
        others = [s for s in singularities if complex(s) != complex(self.center)]
        if n == 1:
            return straight_path(a, b, others)
        path = Path(tuple(pts))
        for s in others:
            if path.distance_to(s) < DETOUR_DISTANCE:
                raise ValueError(f"log-polar path from {a} to {b} passes singularity {s}")
        return path

    def describe(self) -> dict:
        c = complex(self.center)
        return {"kind": self.kind, "center": [c.real, c.imag], "radii": [self.r_inner, self.r_outer]}


def domain_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "rectangle":
        return Rectangle(*map(float, d["bounds"]))
    center = complex(*d.get("center", (0.0, 0.0)))
    if kind == "disk":
        return Disk(center, float(d["radius"]))
    if kind == "annulus":
        r0, r1 = d["radii"]
        return Annulus(center, float(r0), float(r1))
    raise ValueError(f"unknown domain kind {kind!r} (expected rectangle, disk or annulus)")
