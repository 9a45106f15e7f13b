"""Parametric general solutions of linear systems with embedded multicommodity network structure."""

from .affine import AffineForm
from .errors import (
    InconsistentBalanceError,
    InstanceError,
    NetkernelError,
    RankDeficiencyError,
    StructuralSingularityError,
    SupportError,
)
from .instance import ArcRef, Instance, check_consistency, expected_rank, format_instance, parse_instance
from .solution import ParametricSolution, evaluate, residual
from .solver import SolveResult, solve
from .support import Support, build_support, load_support, verify_support

__all__ = [
    "AffineForm",
    "ArcRef",
    "InconsistentBalanceError",
    "Instance",
    "InstanceError",
    "NetkernelError",
    "ParametricSolution",
    "RankDeficiencyError",
    "SolveResult",
    "StructuralSingularityError",
    "Support",
    "SupportError",
    "build_support",
    "check_consistency",
    "evaluate",
    "expected_rank",
    "format_instance",
    "load_support",
    "parse_instance",
    "residual",
    "solve",
    "verify_support",
]
