"""Jets, finite-difference oracles and smoothness probes."""

from .jet import (
    MAX_ORDER,
    Jet,
    JetSpace,
    cbrt,
    cos,
    directional_derivative,
    exp,
    fabs,
    get_space,
    is_jet,
    log,
    power,
    sin,
    sqrt,
    value_of,
)
from .maps import (
    RealMap,
    affine_map,
    constant_map,
    coordinate_map,
    fd_derivative,
    fd_hessians,
    fd_jacobian,
    function_battery,
    identity_map,
    jet_eval,
    map_add,
    map_compose,
    map_mul,
    map_product,
    map_scale,
    map_sub,
)
from .probe import (
    DEFAULT_ORDER,
    DEFAULT_TOL,
    SmoothnessReport,
    fd_steps,
    merge_reports,
    probe_stencil,
    smooth_on_probe,
)

__all__ = [name for name in dir() if not name.startswith("_")]
