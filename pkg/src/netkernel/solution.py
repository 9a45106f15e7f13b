"""Parametric general solution: every arc as an affine form in the free arcs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .affine import AffineForm, parse_affine
from .cycles import FundamentalCycle, PartialSolution, node_imbalance
from .decomposer import ArcPartition
from .errors import InstanceError
from .instance import ArcRef, Instance
from .scalars import Scalar, format_scalar, parse_scalar
from .support import Support


@dataclass
class ParametricSolution:
    forms: dict[ArcRef, AffineForm]
    free: tuple[ArcRef, ...]

    def __getitem__(self, arc: ArcRef) -> AffineForm:
        return self.forms[arc]

    def direction(self, arc: ArcRef) -> dict[ArcRef, Scalar]:
        """Coefficient of free arc ``arc`` in every form: a kernel vector of the system."""
        return {a: f.terms[arc] for a, f in self.forms.items() if arc in f.terms}


def assemble(
    inst: Instance,
    support: Support,
    partition: ArcPartition,
    partials: Mapping[int, PartialSolution],
    cyclic_forms: Mapping[ArcRef, AffineForm],
    cycles: Mapping[ArcRef, FundamentalCycle],
) -> ParametricSolution:
    """Tree arcs get ``x~ + sum over non-tree f of sign_f * x_f`` with ``x_f`` the
    identity monomial for free arcs and the solved form for cyclic arcs."""
    one = inst.arith.one()
    free = set(partition.free)
    forms: dict[ArcRef, AffineForm] = {}
    for net in inst.commodities:
        tree = support.tree_set(net.k)
        for arc in net.arcs:
            if arc in tree:
                forms[arc] = AffineForm(partials[net.k][arc])
            elif arc in free:
                forms[arc] = AffineForm.variable(arc, one)
            else:
                forms[arc] = cyclic_forms[arc].copy()
    for arc, cycle in cycles.items():
        source = forms[arc]
        for member, sign in cycle.members[1:]:
            forms[member].iadd_scaled(source, sign)
    return ParametricSolution(forms, tuple(partition.free))


def evaluate(sol: ParametricSolution, assignment: Mapping[ArcRef, Scalar] | None = None) -> dict[ArcRef, Scalar]:
    assignment = dict(assignment or {})
    unknown = set(assignment) - set(sol.free)
    if unknown:
        raise KeyError(f"assignment names non-free arcs: {sorted(str(a) for a in unknown)}")
    return {arc: form.evaluate(assignment) for arc, form in sol.forms.items()}


@dataclass
class ResidualReport:
    entries: list[tuple[str, Scalar]] = field(default_factory=list)

    @property
    def max_abs(self) -> Scalar:
        return max((abs(v) for _, v in self.entries), default=0)

    def failures(self, tol: float = 0.0) -> list[tuple[str, Scalar]]:
        return [(label, v) for label, v in self.entries if abs(v) > tol]

    def ok(self, tol: float = 0.0) -> bool:
        return not self.failures(tol)


def residual(inst: Instance, flow: Mapping[ArcRef, Scalar]) -> ResidualReport:
    """``lhs - rhs`` for every balance, side and coupling equation."""
    missing = [a for a in inst.arcs() if a not in flow]
    if missing:
        raise KeyError(f"flow has no value for arcs {[str(a) for a in missing[:5]]}")
    report = ResidualReport()
    for net in inst.commodities:
        imbalance = node_imbalance(net, flow)
        for i in net.nodes:
            report.entries.append((f"balance k={net.k} node={i}", imbalance[i] - net.balance(i)))
    for row in inst.side:
        lhs = sum((lam * flow[arc] for arc, lam in row.coeffs.items()), 0)
        report.entries.append((f"side p={row.p}", lhs - row.rhs))
    for row in inst.coupling:
        lhs = sum((flow[arc] for arc in row.arcs), 0)
        report.entries.append((f"couple ({row.tail},{row.head})", lhs - row.rhs))
    return report


# -- solution files ------------------------------------------------------------


@dataclass
class SolutionFile:
    """Parsed solution file.

    ``free`` is ``None`` for a purely numeric file; ``evaluations`` holds the
    optional ``eval`` blocks as ``(assignment, values)`` pairs.
    """

    forms: dict[ArcRef, AffineForm]
    free: tuple[ArcRef, ...] | None
    evaluations: list[tuple[dict[ArcRef, Scalar], dict[ArcRef, Scalar]]] = field(default_factory=list)

    @property
    def parametric(self) -> bool:
        return self.free is not None

    def solution(self) -> ParametricSolution:
        return ParametricSolution(self.forms, self.free or ())

    def numeric(self) -> dict[ArcRef, Scalar]:
        return {arc: form.constant for arc, form in self.forms.items()}


def format_assignment(assignment: Mapping[ArcRef, Scalar]) -> str:
    return " ".join(f"{arc}={format_scalar(v)}" for arc, v in assignment.items())


def parse_assignment(items: Sequence[str]) -> dict[ArcRef, Scalar]:
    out = {}
    for item in items:
        ref, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"assignment {item!r} is not of the form k:i:j=value")
        out[ArcRef.parse(ref)] = parse_scalar(val)
    return out


def format_solution(
    sol: ParametricSolution,
    evaluations: Sequence[tuple[Mapping[ArcRef, Scalar], Mapping[ArcRef, Scalar]]] = (),
) -> str:
    lines = [f"# parametric solution: {len(sol.forms)} arcs, {len(sol.free)} free"]
    for arc, form in sol.forms.items():
        lines.append(f"x {arc} = {form.format(sol.free)}")
    lines.append("free" + "".join(f" {arc}" for arc in sol.free))
    for assignment, values in evaluations:
        lines.append(f"eval {format_assignment(assignment)}".rstrip())
        for arc, v in values.items():
            lines.append(f"value {arc} = {format_scalar(v)}")
    return "\n".join(lines) + "\n"


def format_numeric(flow: Mapping[ArcRef, Scalar]) -> str:
    return "".join(f"x {arc} = {format_scalar(v)}\n" for arc, v in flow.items())


def parse_solution(text: str) -> SolutionFile:
    forms: dict[ArcRef, AffineForm] = {}
    free = None
    evaluations: list[tuple[dict, dict]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kw, _, rest = line.partition(" ")
        try:
            if kw in ("x", "value"):
                ref, eq, expr = rest.partition("=")
                if not eq:
                    raise ValueError(f"expected '{kw} <k>:<i>:<j> = ...'")
                arc = ArcRef.parse(ref)
                if kw == "x":
                    if arc in forms:
                        raise ValueError(f"arc {arc} given twice")
                    forms[arc] = parse_affine(expr)
                else:
                    if not evaluations:
                        raise ValueError("'value' line outside an 'eval' block")
                    evaluations[-1][1][arc] = parse_scalar(expr)
            elif kw == "free":
                if free is not None:
                    raise ValueError("second 'free' line")
                free = tuple(ArcRef.parse(tok) for tok in rest.split())
            elif kw == "eval":
                evaluations.append((parse_assignment(rest.split()), {}))
            else:
                raise ValueError(f"unknown statement {kw!r}")
        except ValueError as exc:
            raise InstanceError(str(exc), lineno) from None
    allowed = set(free or ())
    for arc, form in forms.items():
        stray = set(form.terms) - allowed
        if stray:
            raise InstanceError(f"form for {arc} uses non-free variables {sorted(str(a) for a in stray)}")
    return SolutionFile(forms, free, evaluations)
