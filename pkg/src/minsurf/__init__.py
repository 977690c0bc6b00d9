"""Minimal surfaces from Weierstrass data, hodographic coordinates of minimal graphs, and checks."""

__version__ = "0.1.0"

from .catalog import available, catalog_lookup  # noqa: E402
from .domains import Annulus, Disk, Rectangle  # noqa: E402
from .expr import Expr, differentiate, evaluate, parse_expression, to_string  # noqa: E402
from .hodograph import (  # noqa: E402
    GraphPatch,
    HodographFrame,
    conformal_coordinates,
    linear_system_residual,
    normal_from_phi_rho,
    recover_R,
    rho_from_zeta,
    surface_from_rho,
    u_from_zeta,
    umbilic_indicator,
    wirtinger_uv,
    zeta_from_u,
)
from .mesh import Mesh, export_mesh, sample_mesh  # noqa: E402
from .quadrature import Path, integrate_along  # noqa: E402
from .verify import (  # noqa: E402
    ResidualReport,
    curvature_consistency,
    harmonic_residual,
    isothermal_residuals,
    mean_curvature,
    minimal_eq_residual,
)
from .weierstrass import (  # noqa: E402
    SurfaceSample,
    WeierstrassData,
    first_fundamental_form,
    gaussian_curvature_R,
    immerse,
    immerse_fg,
    immerse_R,
    phi_triple,
)
