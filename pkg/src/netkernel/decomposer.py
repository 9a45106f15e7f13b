"""Decomposition of the side and coupling rows onto the non-tree arcs.

Substituting the tree-form general solution of every commodity into the
side and coupling rows leaves ``q + |U0|`` equations in the non-tree
variables only.  Each non-tree arc ``f`` contributes the column

    [R_1(L_f), ..., R_q(L_f), delta_1(L_f), ..., delta_|U0|(L_f)]

where ``R_p`` is the signed sum of row ``p``'s coefficients around the
fundamental cycle ``L_f`` and ``delta`` is the sign of the coupled arc on
that cycle (zero if the cycle's commodity is not coupled there).  Choosing
``q + |U0|`` of these arcs as *cyclic* arcs with a nonsingular square
matrix ``D`` lets the cyclic variables be written as affine functions of
the remaining *free* arcs: ``x_C = D^-1 beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .affine import AffineForm
from .cycles import FundamentalCycle, PartialSolution
from .errors import InstanceError, RankDeficiencyError, StructuralSingularityError
from .instance import ArcRef, CouplingConstraint, Instance, SideConstraint
from .scalars import Field, Scalar, format_scalar
from .support import Support

# relative pivot threshold for float-mode elimination
PIVOT_RTOL = 1e-12

Matrix = list[list[Scalar]]


@dataclass(frozen=True)
class ArcPartition:
    tree: Support
    cyclic: tuple[ArcRef, ...]
    free: tuple[ArcRef, ...]


@dataclass
class SmallSystem:
    rows_side: int
    rows_coupling: tuple[tuple[int, int], ...]
    cyclic: tuple[ArcRef, ...]
    D: Matrix
    beta: list[AffineForm] = field(default_factory=list)
    D_inv: Matrix | None = None

    @property
    def size(self) -> int:
        return len(self.cyclic)


def cycle_determinant(cycle: FundamentalCycle, constraint: SideConstraint) -> Scalar:
    """Signed sum of the row's coefficients around the cycle."""
    coeffs = constraint.coeffs
    total = 0
    for arc, sign in cycle.members:
        lam = coeffs.get(arc)
        if lam is not None:
            total += lam * sign
    return total


def coupling_delta(cycle: FundamentalCycle, coupling: CouplingConstraint) -> int:
    k = cycle.entailing.k
    if k not in coupling.commodities:
        return 0
    return cycle.sign(ArcRef(k, coupling.tail, coupling.head))


def coefficient_column(inst: Instance, cycle: FundamentalCycle) -> list[Scalar]:
    one = inst.arith.one()
    col = [one * cycle_determinant(cycle, row) for row in inst.side]
    col += [one * coupling_delta(cycle, row) for row in inst.coupling]
    return col


def coefficient_columns(inst: Instance, cycles: Mapping[ArcRef, FundamentalCycle]) -> dict[ArcRef, list[Scalar]]:
    return {arc: coefficient_column(inst, cyc) for arc, cyc in cycles.items()}


def rhs_constants(
    inst: Instance, support: Support, partials: Mapping[int, PartialSolution]
) -> tuple[list[Scalar], list[Scalar]]:
    """Right-hand sides left after moving the tree partial solutions across.

    Returns ``(A_side, A_coupling)`` with ``A_side[p-1] = alpha_p - sum(lambda * x~)``
    over tree arcs and ``A_coupling[xi] = z - sum(x~)`` over coupled tree arcs.
    """
    tree_sets = {k: support.tree_set(k) for k in support.trees}
    side = []
    for row in inst.side:
        acc = row.rhs
        for arc, lam in row.coeffs.items():
            if arc in tree_sets[arc.k]:
                acc -= lam * partials[arc.k][arc]
        side.append(acc)
    coupling = []
    for row in inst.coupling:
        acc = row.rhs
        for arc in row.arcs:
            if arc in tree_sets[arc.k]:
                acc -= partials[arc.k][arc]
        coupling.append(acc)
    return side, coupling


def _threshold(arith: Field, columns: Sequence[Sequence[Scalar]]) -> float:
    if arith.exact:
        return 0.0
    norm = max((math.sqrt(sum(float(v) * float(v) for v in col)) for col in columns), default=0.0)
    return PIVOT_RTOL * norm


def independent_columns(
    columns: Sequence[Sequence[Scalar]], arith: Field, limit: int | None = None
) -> list[int]:
    """Indices of the greedy (first-come) maximal independent set of columns.

    Each candidate is reduced against the columns accepted so far; the
    largest remaining entry outside the used pivot rows becomes its pivot.
    A candidate whose pivot is zero (or below the float threshold) depends
    on earlier columns and is skipped.
    """
    tol = _threshold(arith, columns)
    accepted: list[int] = []
    pivots: list[tuple[int, list[Scalar]]] = []
    used_rows: set[int] = set()
    for idx, col in enumerate(columns):
        if limit is not None and len(accepted) == limit:
            break
        v = list(col)
        for row, reduced in pivots:
            f = v[row] / reduced[row]
            if f:
                v = [a - f * b for a, b in zip(v, reduced)]
        best, best_abs = None, None
        for r, value in enumerate(v):
            if r not in used_rows and (best_abs is None or abs(value) > best_abs):
                best, best_abs = r, abs(value)
        if best is None or best_abs <= tol:
            continue
        pivots.append((best, v))
        used_rows.add(best)
        accepted.append(idx)
    return accepted


def invert(D: Matrix, arith: Field) -> Matrix:
    """Gauss-Jordan inverse with partial pivoting.

    Raises :class:`StructuralSingularityError` for a singular matrix.
    """
    n = len(D)
    zero, one = arith.zero(), arith.one()
    tol = _threshold(arith, [[D[r][c] for r in range(n)] for c in range(n)])
    aug = [[arith.convert(v) for v in row] + [one if r == c else zero for c in range(n)] for r, row in enumerate(D)]
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(aug[r][c]))
        if abs(aug[piv][c]) <= tol:
            raise StructuralSingularityError(f"matrix D is singular (no pivot in column {c + 1})")
        if piv != c:
            aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        prow = [v / p for v in aug[c]]
        aug[c] = prow
        for r in range(n):
            if r == c:
                continue
            f = aug[r][c]
            if f:
                aug[r] = [a - f * b for a, b in zip(aug[r], prow)]
    return [row[n:] for row in aug]


def select_cyclic(
    inst: Instance,
    support: Support,
    cycles: Mapping[ArcRef, FundamentalCycle],
    pinned: Sequence[ArcRef] | None = None,
    columns: Mapping[ArcRef, list[Scalar]] | None = None,
) -> tuple[ArcPartition, SmallSystem]:
    """Choose the cyclic arcs and build ``D`` (``beta`` and ``D_inv`` are left empty).

    Without ``pinned``, candidates are scanned in commodity then declaration
    order and the first ``q + |U0|`` independent columns are taken, so ``D``
    is nonsingular by construction.  With ``pinned``, those arcs are used in
    the given order and a singular ``D`` raises
    :class:`StructuralSingularityError`.
    """
    m = inst.q + len(inst.coupling)
    if columns is None:
        columns = coefficient_columns(inst, cycles)
    candidates = list(cycles)
    if pinned is not None:
        pinned = tuple(pinned)
        if len(pinned) != m:
            raise InstanceError(f"cyclic pin lists {len(pinned)} arcs, expected q + |U0| = {m}")
        if len(set(pinned)) != m:
            raise InstanceError("cyclic pin lists an arc twice")
        for arc in pinned:
            if arc not in cycles:
                raise InstanceError(f"cyclic arc {arc} is not a non-tree arc of the instance")
        cyclic = pinned
        D = [[columns[arc][r] for arc in cyclic] for r in range(m)]
        if m and len(independent_columns([columns[a] for a in cyclic], inst.arith)) < m:
            raise StructuralSingularityError(
                "pinned cyclic arcs give a singular D; re-select the cyclic arcs"
            )
    else:
        if m > len(candidates):
            raise RankDeficiencyError(
                f"only {len(candidates)} non-tree arcs for q + |U0| = {m} additional rows"
            )
        picked = independent_columns([columns[a] for a in candidates], inst.arith, limit=m)
        if len(picked) < m:
            raise RankDeficiencyError(
                f"side and coupling rows add rank {len(picked)} over the network part, expected "
                f"q + |U0| = {m}; the full system rank is below sum|I^k| - |K| + q + |U0|"
            )
        cyclic = tuple(candidates[i] for i in picked)
        D = [[columns[arc][r] for arc in cyclic] for r in range(m)]
    chosen = set(cyclic)
    free = tuple(arc for arc in candidates if arc not in chosen)
    partition = ArcPartition(support, cyclic, free)
    pairs = tuple((row.tail, row.head) for row in inst.coupling)
    return partition, SmallSystem(inst.q, pairs, cyclic, D)


def assemble_beta(
    partition: ArcPartition,
    constants: tuple[Sequence[Scalar], Sequence[Scalar]],
    columns: Mapping[ArcRef, Sequence[Scalar]],
) -> list[AffineForm]:
    """``beta_r = A_r - sum over free arcs f of column_f[r] * x_f``."""
    side, coupling = constants
    beta = [AffineForm(c) for c in list(side) + list(coupling)]
    for arc in partition.free:
        for r, c in enumerate(columns[arc]):
            if c:
                beta[r].terms[arc] = -c
    return beta


def solve_cyclic(system: SmallSystem, arith: Field) -> dict[ArcRef, AffineForm]:
    """``x_C = D^-1 beta`` applied to constants and every free-arc coefficient."""
    if system.D_inv is None:
        system.D_inv = invert(system.D, arith) if system.size else []
    out = {}
    for t, arc in enumerate(system.cyclic):
        form = AffineForm(arith.zero())
        for s, nu in enumerate(system.D_inv[t]):
            form.iadd_scaled(system.beta[s], nu)
        out[arc] = form
    return out


def parse_cyclic(text: str) -> list[ArcRef]:
    """Read a cyclic-arc pin file: lines ``cyclic <k>:<i>:<j>`` in t-order."""
    arcs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) != 2 or line[0] != "cyclic":
            raise InstanceError("expected 'cyclic <k>:<i>:<j>'", lineno)
        try:
            arcs.append(ArcRef.parse(line[1]))
        except ValueError as exc:
            raise InstanceError(str(exc), lineno) from None
    return arcs


def format_cyclic(arcs: Sequence[ArcRef]) -> str:
    return "".join(f"cyclic {arc}\n" for arc in arcs)


def format_matrix(rows: Matrix) -> list[str]:
    cells = [[format_scalar(v) for v in row] for row in rows]
    width = max((len(c) for row in cells for c in row), default=1)
    return ["[ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells]
