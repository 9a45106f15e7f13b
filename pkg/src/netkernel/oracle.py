"""Brute-force dense verifier.

Builds the explicit matrix ``[M; Q; T]`` of an instance and checks solver
output against it.  Ranks come from fraction-free (Bareiss) elimination on
an integer-scaled copy of the matrix, a separate code path from the
Gauss-Jordan used by the decomposer.  Meant for desk-sized instances only.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import OracleRefusal
from .instance import ArcRef, Instance
from .scalars import Scalar
from .solution import ParametricSolution, evaluate

MAX_COLUMNS = 2000


@dataclass
class DenseSystem:
    matrix: list[list[Scalar]]
    rhs: list[Scalar]
    columns: list[ArcRef]
    row_labels: list[str]
    network_rows: int
    exact: bool = True

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.matrix), len(self.columns)


def assemble_dense(inst: Instance) -> DenseSystem:
    columns = list(inst.arcs())
    if len(columns) > MAX_COLUMNS:
        raise OracleRefusal(f"dense oracle refuses {len(columns)} columns (limit {MAX_COLUMNS})")
    index = {arc: c for c, arc in enumerate(columns)}
    zero = inst.arith.zero()
    one = inst.arith.one()
    rows, rhs, labels = [], [], []
    for net in inst.commodities:
        for i in net.nodes:
            row = [zero] * len(columns)
            for arc in net.arcs:
                if arc.tail == i:
                    row[index[arc]] = one
                elif arc.head == i:
                    row[index[arc]] = -one
            rows.append(row)
            rhs.append(zero + net.balance(i))
            labels.append(f"balance k={net.k} node={i}")
    network_rows = len(rows)
    for side in inst.side:
        row = [zero] * len(columns)
        for arc, lam in side.coeffs.items():
            row[index[arc]] = lam
        rows.append(row)
        rhs.append(side.rhs)
        labels.append(f"side p={side.p}")
    for cpl in inst.coupling:
        row = [zero] * len(columns)
        for arc in cpl.arcs:
            row[index[arc]] = one
        rows.append(row)
        rhs.append(cpl.rhs)
        labels.append(f"couple ({cpl.tail},{cpl.head})")
    return DenseSystem(rows, rhs, columns, labels, network_rows, inst.arith.exact)


def _integer_rows(rows: Sequence[Sequence[Scalar]]) -> list[list[int]]:
    out = []
    for row in rows:
        fr = [Fraction(v) for v in row]
        scale = math.lcm(*(v.denominator for v in fr)) if fr else 1
        out.append([int(v * scale) for v in fr])
    return out


def bareiss_rank(rows: Sequence[Sequence[Scalar]]) -> int:
    """Exact rank by fraction-free elimination over the integers."""
    m = _integer_rows(rows)
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    prev = 1
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, n_rows):
            a = m[i][c]
            row_i, row_r = m[i], m[r]
            for j in range(c + 1, n_cols):
                q, rem = divmod(p * row_i[j] - a * row_r[j], prev)
                assert rem == 0, "Bareiss division must be exact"
                row_i[j] = q
            row_i[c] = 0
        prev = p
        r += 1
    return r


def float_rank(rows: Sequence[Sequence[float]], rtol: float = 1e-10) -> int:
    m = [[float(v) for v in row] for row in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    tol = rtol * max((abs(v) for row in m for v in row), default=0.0)
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = max(range(r, n_rows), key=lambda i: abs(m[i][c]))
        if abs(m[piv][c]) <= tol:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, n_rows):
            f = m[i][c] / m[r][c]
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


def dense_rank(sys: DenseSystem, which: str = "full") -> int:
    if which == "network":
        rows = sys.matrix[: sys.network_rows]
    elif which == "full":
        rows = sys.matrix
    else:
        raise ValueError(f"which must be 'network' or 'full', got {which!r}")
    if not rows or not sys.columns:
        return 0
    return bareiss_rank(rows) if sys.exact else float_rank(rows)


def nullspace_dimension(sys: DenseSystem) -> int:
    return len(sys.columns) - dense_rank(sys, "full")


def apply(sys: DenseSystem, x: Mapping[ArcRef, Scalar], rows: Iterable[int] | None = None) -> list[Scalar]:
    vec = [x.get(arc, 0) for arc in sys.columns]
    idx = range(len(sys.matrix)) if rows is None else rows
    return [sum((a * v for a, v in zip(sys.matrix[r], vec) if a and v), 0) for r in idx]


@dataclass
class Mismatch:
    check: str
    equation: int | None
    label: str
    expected: Scalar
    got: Scalar

    def __str__(self) -> str:
        where = f" equation {self.equation} ({self.label})" if self.equation is not None else f" {self.label}"
        return f"{self.check}:{where}: expected {self.expected}, got {self.got}"


@dataclass
class OracleReport:
    trials: int
    nullity: int
    free: int
    failures: list[Mismatch] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        state = "PASS" if self.passed else f"FAIL ({len(self.failures)} mismatches)"
        return f"oracle {state}: nullity={self.nullity} free={self.free} trials={self.trials}"


def random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-50, 50), rng.randint(1, 12))


def oracle_check(
    inst: Instance,
    sol: ParametricSolution,
    trials: int = 20,
    seed: int = 0,
    vectors: Iterable[Mapping[ArcRef, Scalar]] = (),
    tol: float | None = None,
) -> OracleReport:
    """Check a parametric solution against the explicit system.

    Structural checks (always run): the forms cover every arc, free arcs map
    to themselves, the dense nullity equals the number of free arcs, every
    free-arc direction and every vector in ``vectors`` lies in the kernel of
    the balance rows (directions additionally of the whole matrix).  Then
    ``trials`` random rational assignments must satisfy ``A x = b``.
    """
    sys = assemble_dense(inst)
    if tol is None:
        tol = 0.0 if sys.exact else 1e-9
    nullity = nullspace_dimension(sys)
    report = OracleReport(trials, nullity, len(sol.free))

    def off(value, scale=1.0) -> bool:
        return abs(value) > tol * max(1.0, scale)

    if set(sol.forms) != set(sys.columns):
        missing = sorted(str(a) for a in set(sys.columns) - set(sol.forms))
        extra = sorted(str(a) for a in set(sol.forms) - set(sys.columns))
        report.failures.append(Mismatch("coverage", None, f"missing={missing} extra={extra}", "all arcs", "mismatch"))
        return report
    for f in sol.free:
        form = sol.forms[f]
        if form.constant != 0 or form.terms != {f: 1}:
            report.failures.append(Mismatch("free-identity", None, str(f), f"x{f}", form.format()))
    if nullity != len(sol.free):
        report.failures.append(Mismatch("nullity", None, "dim ker A", nullity, len(sol.free)))
    for f in sol.free:
        for r, v in enumerate(apply(sys, sol.direction(f))):
            if off(v):
                report.failures.append(Mismatch(f"direction x{f}", r + 1, sys.row_labels[r], 0, v))
    network = range(sys.network_rows)
    for n, vec in enumerate(vectors):
        for r, v in zip(network, apply(sys, vec, network)):
            if off(v):
                report.failures.append(Mismatch(f"kernel vector #{n + 1}", r + 1, sys.row_labels[r], 0, v))
    rng = random.Random(seed)
    for t in range(trials):
        assignment = {f: random_rational(rng) for f in sol.free}
        if not sys.exact:
            assignment = {f: float(v) for f, v in assignment.items()}
        x = evaluate(sol, assignment)
        for r, got in enumerate(apply(sys, x)):
            expected = sys.rhs[r]
            if off(got - expected, abs(expected)):
                report.failures.append(Mismatch(f"trial {t + 1}", r + 1, sys.row_labels[r], expected, got))
    return report
