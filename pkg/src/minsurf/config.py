"""Run configuration read from a TOML document.

Sections::

    [surface]     catalog = "helicoid"  |  R = "..."  |  f = "...", g = "..."  |  phi = "..."
                  zeta0 = [re, im], X0 = [x, y, phi], singularities = [[re, im], ...]
                  F = "...", Finv = "...", expected_R = "..."   (optional)
    [domain]      kind = "rectangle" | "disk" | "annulus" and its parameters
    [grid]        resolution = [n1, n2]  or  "n1xn2"
    [tolerances]  any key of DEFAULT_TOLERANCES
    [output]      mesh, csv, report paths
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .catalog import catalog_lookup
from .domains import Disk, domain_from_dict
from .expr import ExprError, parse_expression
from .hodograph import GraphPatch
from .weierstrass import WeierstrassData

DEFAULT_TOLERANCES = {
    "quadrature": 1e-12,
    "null": 1e-12,
    "isothermal": 1e-8,
    "harmonic": 1e-4,
    "harmonic_step": 1e-3,
    "mean_curvature": 1e-4,
    "curvature": 1e-4,
    "minimality_fd": 1e-4,
    "minimality": 1e-8,
    "linear_system": 1e-8,
    "recover_R": 1e-6,
}


class ConfigError(ValueError):
    """Invalid or incomplete run configuration."""


def parse_resolution(value) -> tuple:
    if isinstance(value, str):
        parts = value.lower().split("x")
    else:
        parts = list(value)
    try:
        n1, n2 = (int(p) for p in parts)
    except (TypeError, ValueError):
        raise ConfigError(f"resolution must look like N1xN2, got {value!r}") from None
    if n1 < 2 or n2 < 2:
        raise ConfigError("resolution must be at least 2 in each direction")
    return n1, n2


def _complex(value, what) -> complex:
    try:
        if isinstance(value, (int, float)):
            return complex(value)
        re, im = value
        return complex(float(re), float(im))
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a number or a [re, im] pair") from None


@dataclass(frozen=True)
class RunConfig:
    source: str  # "catalog" | "R" | "FG" | "graph"
    surface: dict
    domain: Optional[dict] = None
    resolution: tuple = (32, 32)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "resolution", parse_resolution(self.resolution))
        tol = dict(DEFAULT_TOLERANCES)
        for key, value in self.tolerances.items():
            if key not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {key!r}")
            if not isinstance(value, (int, float)) or not value > 0:
                raise ConfigError(f"tolerance {key!r} must be positive")
            tol[key] = float(value)
        object.__setattr__(self, "tolerances", tol)
        if self.source not in ("catalog", "R", "FG", "graph"):
            raise ConfigError(f"unknown surface source {self.source!r}")
        if self.source == "graph" and self.domain is None:
            raise ConfigError("a graph surface needs a [domain] section")

    @property
    def hash(self) -> str:
        doc = {
            "source": self.source,
            "surface": self.surface,
            "domain": self.domain,
            "resolution": list(self.resolution),
            "tolerances": self.tolerances,
        }
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def with_overrides(self, resolution=None, quadrature_tol=None) -> "RunConfig":
        tol = dict(self.tolerances)
        if quadrature_tol is not None:
            tol["quadrature"] = quadrature_tol
        return dataclasses.replace(self, resolution=resolution or self.resolution, tolerances=tol)

    def weierstrass_data(self) -> WeierstrassData:
        if self.source == "graph":
            raise ConfigError("graph configurations carry no Weierstrass data")
        s = self.surface
        try:
            if self.source == "catalog":
                data = catalog_lookup(s["catalog"])
            else:
                exprs = {}
                for key in ("R", "f", "g", "F", "Finv"):
                    if key in s:
                        exprs[key] = parse_expression(s[key], "w")
                data = WeierstrassData(
                    form=self.source,
                    zeta0=_complex(s.get("zeta0", 0.0), "zeta0"),
                    X0=tuple(s.get("X0", (0.0, 0.0, 0.0))),
                    singularities=tuple(_complex(p, "singularity") for p in s.get("singularities", ())),
                    domain=domain_from_dict(self.domain) if self.domain else Disk(0j, 1.0),
                    name=s.get("name", "inline"),
                    **exprs,
                )
                return data
            if self.domain is not None:
                data = dataclasses.replace(data, domain=domain_from_dict(self.domain))
            for key in ("zeta0", "X0"):
                if key in s:
                    value = _complex(s[key], key) if key == "zeta0" else tuple(s[key])
                    data = dataclasses.replace(data, **{key: value})
            return data
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        except (ExprError, ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    def graph_patch(self) -> GraphPatch:
        if self.source != "graph":
            raise ConfigError("not a graph configuration")
        try:
            return GraphPatch.from_text(self.surface["phi"], domain_from_dict(self.domain))
        except (ExprError, ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc


def config_from_dict(doc: dict) -> RunConfig:
    surface = dict(doc.get("surface", {}))
    if "catalog" in surface:
        source = "catalog"
    elif "phi" in surface:
        source = "graph"
    elif "R" in surface:
        source = "R"
    elif "f" in surface and "g" in surface:
        source = "FG"
    else:
        raise ConfigError("[surface] needs one of catalog, R, f and g, or phi")
    grid = doc.get("grid", {})
    try:
        return RunConfig(
            source=source,
            surface=surface,
            domain=doc.get("domain"),
            resolution=grid.get("resolution", (32, 32)),
            tolerances=doc.get("tolerances", {}),
            output=doc.get("output", {}),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(text: str) -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc
    return config_from_dict(doc)


def load_config_file(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return load_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
