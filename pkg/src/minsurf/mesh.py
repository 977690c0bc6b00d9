"""Grid sampling of Weierstrass surfaces and OBJ/CSV export.

Vertices are computed by telescoping: the node nearest the base parameter is
integrated directly, its grid row is walked sequentially, and every column is
then walked outward from that row. Each step adds one short integral between
neighbouring nodes, so no vertex pays for a long path.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .quadrature import DEFAULT_TOL, integrate_vector
from .weierstrass import WeierstrassData, phi_vector


class MeshError(ArithmeticError):
    """Integration failed at a grid node."""


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray  # (N, 3) float
    faces: np.ndarray  # (M, 3) int, counterclockwise in the parameter chart
    params: np.ndarray  # (N,) complex
    name: str = ""
    config_hash: str = ""

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        f = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        p = np.asarray(self.params, dtype=complex).ravel()
        if len(p) != len(v):
            raise ValueError("one parameter value per vertex is required")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertex coordinates must be finite")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise ValueError("face index out of range")
        if np.any((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])):
            raise ValueError("face with repeated vertices")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        object.__setattr__(self, "params", p)


def grid_faces(n1: int, n2: int) -> np.ndarray:
    """Two triangles per cell of an ``n1 x n2`` node grid stored row-major."""
    idx = np.arange(n1 * n2).reshape(n1, n2)
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, d = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    tri = np.empty((2 * len(a), 3), dtype=np.int64)
    tri[0::2] = np.column_stack([a, b, c])
    tri[1::2] = np.column_stack([a, c, d])
    return tri


def _threads() -> int:
    try:
        n = int(os.environ.get("MINSURF_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


def sample_mesh(data: WeierstrassData, config=None, resolution=None, tol: float = None) -> Mesh:
    """Sample ``data`` on its domain grid.

    ``config`` is a :class:`minsurf.config.RunConfig`; ``resolution`` and
    ``tol`` override its grid size and quadrature tolerance.
    """
    if resolution is None:
        resolution = config.resolution if config is not None else (16, 16)
    if tol is None:
        tol = config.tolerances["quadrature"] if config is not None else DEFAULT_TOL
    n1, n2 = (int(n) for n in resolution)
    domain = data.domain
    zeta = np.asarray(domain.from_chart(domain.chart_grid(n1, n2)), dtype=complex)

    def step(a, b):
        path = domain.path(a, b, data.singularities)
        try:
            value, _ = integrate_vector(lambda w: phi_vector(data, w), path, tol)
        except ArithmeticError as exc:
            raise MeshError(f"integration to node {b} failed: {exc}") from exc
        return value.real

    X = np.empty((n1, n2, 3))
    i0, j0 = np.unravel_index(int(np.argmin(np.abs(zeta - data.zeta0))), zeta.shape)
    X0 = np.array(data.X0)
    X[i0, j0] = X0 if zeta[i0, j0] == data.zeta0 else X0 + step(data.zeta0, zeta[i0, j0])
    for j in range(j0 + 1, n2):
        X[i0, j] = X[i0, j - 1] + step(zeta[i0, j - 1], zeta[i0, j])
    for j in range(j0 - 1, -1, -1):
        X[i0, j] = X[i0, j + 1] + step(zeta[i0, j + 1], zeta[i0, j])

    def column(j):
        for i in range(i0 + 1, n1):
            X[i, j] = X[i - 1, j] + step(zeta[i - 1, j], zeta[i, j])
        for i in range(i0 - 1, -1, -1):
            X[i, j] = X[i + 1, j] + step(zeta[i + 1, j], zeta[i, j])

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        list(pool.map(column, range(n2)))

    return Mesh(
        vertices=X.reshape(-1, 3),
        faces=grid_faces(n1, n2),
        params=zeta.ravel(),
        name=data.name,
        config_hash=config.hash if config is not None else "",
    )


def _num(x: float) -> str:
    # adding 0.0 folds -0.0 into 0.0
    return f"{float(x) + 0.0:.17g}"


def export_mesh(mesh: Mesh, fmt: str = "OBJ") -> bytes:
    """Serialize ``mesh`` as OBJ or CSV; the output depends only on the mesh."""
    fmt = fmt.upper()
    lines = []
    if fmt == "OBJ":
        lines.append(f"# minsurf mesh name={mesh.name or '-'} config={mesh.config_hash or '-'}")
        lines += ["v " + " ".join(_num(c) for c in v) for v in mesh.vertices]
        lines += ["f " + " ".join(str(int(i) + 1) for i in f) for f in mesh.faces]
    elif fmt == "CSV":
        lines.append("zeta_re,zeta_im,x,y,phi")
        for p, v in zip(mesh.params, mesh.vertices):
            lines.append(",".join(_num(c) for c in (p.real, p.imag, *v)))
    else:
        raise ValueError(f"unknown export format {fmt!r} (expected OBJ or CSV)")
    return ("\n".join(lines) + "\n").encode("ascii")


def read_obj_vertices(blob: bytes) -> np.ndarray:
    """Vertex block of an OBJ document."""
    rows = [line.split()[1:] for line in blob.decode("ascii").splitlines() if line.startswith("v ")]
    return np.array(rows, dtype=float).reshape(-1, 3)
