"""Depauw field simulator: exact dyadic flows, checkerboard transport,
divergence-free mollification, and path-measure estimators."""

try:
    # installed layout: the extension lives inside the package
    from ._depauw import *  # noqa: F401,F403
    from ._depauw import __doc__ as _core_doc  # noqa: F401
except ImportError:
    # build-tree layout: the extension sits on sys.path directly
    from _depauw import *  # noqa: F401,F403

__all__ = [
    "Cell",
    "Dyadic",
    "MollifiedField",
    "PathEnsemble",
    "TorusPoint",
    "apply_stop",
    "backward_ensemble",
    "bl_distance",
    "cell_center",
    "cell_of",
    "check_properties",
    "checkerboard_value",
    "eval_b",
    "eval_b_truncated",
    "eval_stream",
    "eval_u",
    "eval_w",
    "evolve_rho_B",
    "flow",
    "lipschitz_audit",
    "marginal",
    "quarter_turn_cells",
    "stage_flow_exact",
    "stochasticity",
    "torus_distance",
]
