from .stepper import (
    FlowTrajectory,
    fnorm_diag,
    heat,
    leray_project,
    nonlinear_term,
    simulate,
)
from .picard import PicardTable, bilinear_B, picard_term
from .moments import (
    MomentTrajectory,
    accumulate_K,
    calibrate_eta,
    find_zero_K12,
)

__all__ = [
    "FlowTrajectory",
    "MomentTrajectory",
    "PicardTable",
    "accumulate_K",
    "bilinear_B",
    "calibrate_eta",
    "find_zero_K12",
    "fnorm_diag",
    "heat",
    "leray_project",
    "nonlinear_term",
    "picard_term",
    "simulate",
]
