"""Nonautonomous standard map toolkit."""
from .maps import (
    MapParams,
    PhasePoint,
    RotatingMapParams,
    composed_step,
    iter_nasm,
    nasm_trajectory,
    orbit,
    std_inverse_step,
    std_step,
)
from .periodic import residue_of_orbit, solve_secondary_period1, stability_region
from .rotation import GOLDEN_MEAN, RotationNumber, estimate_rotation_number, special_rotation_numbers
from .symmetries import SymmetryTransform, apply_symmetry, check_orbit_symmetry, conjugate_by_std
from .transport import BoundaryCurve, ScanConfig, critical_ray_bisection, detect_global_transport, trace_cb_gt
from .kam import (
    ContinuationConfig,
    FourierCircle,
    SolverConfig,
    continue_to_breakdown,
    solve_invariant_circle,
    trace_cb_omega,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryCurve",
    "ContinuationConfig",
    "FourierCircle",
    "GOLDEN_MEAN",
    "MapParams",
    "PhasePoint",
    "RotatingMapParams",
    "RotationNumber",
    "ScanConfig",
    "SolverConfig",
    "SymmetryTransform",
    "apply_symmetry",
    "check_orbit_symmetry",
    "composed_step",
    "conjugate_by_std",
    "continue_to_breakdown",
    "critical_ray_bisection",
    "detect_global_transport",
    "estimate_rotation_number",
    "iter_nasm",
    "nasm_trajectory",
    "orbit",
    "residue_of_orbit",
    "solve_invariant_circle",
    "solve_secondary_period1",
    "special_rotation_numbers",
    "stability_region",
    "std_inverse_step",
    "std_step",
    "trace_cb_gt",
    "trace_cb_omega",
]
