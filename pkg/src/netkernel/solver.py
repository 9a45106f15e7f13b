"""End-to-end solve: support, cycles, partial solutions, decomposition, assembly."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .affine import AffineForm
from .cycles import FundamentalCycle, PartialSolution, all_cycles, partial_solutions
from .decomposer import (
    ArcPartition,
    SmallSystem,
    assemble_beta,
    coefficient_columns,
    invert,
    rhs_constants,
    select_cyclic,
    solve_cyclic,
)
from .errors import InconsistentBalanceError, SupportError
from .instance import ArcRef, Instance, check_consistency
from .scalars import Scalar
from .solution import ParametricSolution, assemble
from .support import Support, build_support, verify_support


@dataclass
class SolveResult:
    instance: Instance
    support: Support
    cycles: dict[ArcRef, FundamentalCycle]
    partials: dict[int, PartialSolution]
    columns: dict[ArcRef, list[Scalar]]
    constants: tuple[list[Scalar], list[Scalar]]
    partition: ArcPartition
    system: SmallSystem
    cyclic_forms: dict[ArcRef, AffineForm]
    solution: ParametricSolution


def solve(
    inst: Instance,
    support: Support | None = None,
    cyclic: Sequence[ArcRef] | None = None,
) -> SolveResult:
    """Compute the parametric general solution of ``inst``.

    ``support`` and ``cyclic`` pin the spanning trees and the cyclic arcs;
    by default they are chosen automatically.
    """
    bad = [r for r in check_consistency(inst) if not r.consistent]
    if bad:
        detail = ", ".join(f"k={r.k} sum={r.total}" for r in bad)
        raise InconsistentBalanceError(f"balances do not sum to zero: {detail}")
    if support is None:
        support = build_support(inst)
    else:
        check = verify_support(inst, support)
        if not check:
            raise SupportError(check.reason)
    cycles = all_cycles(inst, support)
    partials = partial_solutions(inst, support)
    columns = coefficient_columns(inst, cycles)
    partition, system = select_cyclic(inst, support, cycles, pinned=cyclic, columns=columns)
    constants = rhs_constants(inst, support, partials)
    system.beta = assemble_beta(partition, constants, columns)
    system.D_inv = invert(system.D, inst.arith) if system.size else []
    cyclic_forms = solve_cyclic(system, inst.arith)
    sol = assemble(inst, support, partition, partials, cyclic_forms, cycles)
    return SolveResult(inst, support, cycles, partials, columns, constants, partition, system, cyclic_forms, sol)
