"""Classical minimal surfaces in R form."""

from __future__ import annotations

import math

from .domains import Annulus, Disk
from .expr import parse_expression
from .weierstrass import WeierstrassData

_SQRT2M1 = math.sqrt(2.0) - 1.0

# name -> (R, F, F^-1, singularities, domain, zeta0, X0, graph phi(x, y) or None)
_ENTRIES = {
    "helicoid": (
        "-i/(2*w^2)", "i/(2*w)", "i/(2*w)", (0j,), Annulus(0j, 0.05, 0.95),
        1j * _SQRT2M1, (1.0, 0.0, 0.0), "atan(y/x)",
    ),
    "enneper": (
        "1", "w", "w", (), Disk(0j, 1.5), 0j, (0.0, 0.0, 0.0), None,
    ),
    # conjugate partner of the helicoid: R multiplied by the unit constant i
    "catenoid": (
        "1/(2*w^2)", "-1/(2*w)", "-1/(2*w)", (0j,), Annulus(0j, 0.05, 0.95),
        1j * _SQRT2M1, (0.0, -math.sqrt(2.0), math.log(_SQRT2M1)), None,
    ),
}

GRAPHS = {name: entry[7] for name, entry in _ENTRIES.items() if entry[7]}


def available() -> list:
    return sorted(_ENTRIES)


def catalog_lookup(name: str) -> WeierstrassData:
    """Weierstrass data of a named classical surface."""
    try:
        R, F, Finv, sing, domain, zeta0, X0, _ = _ENTRIES[name]
    except KeyError:
        raise KeyError(f"unknown surface {name!r}; available: {', '.join(available())}") from None
    return WeierstrassData(
        form="R",
        R=parse_expression(R, "w"),
        zeta0=zeta0,
        X0=X0,
        singularities=sing,
        domain=domain,
        name=name,
        F=parse_expression(F, "w"),
        Finv=parse_expression(Finv, "w"),
    )
