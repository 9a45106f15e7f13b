"""Plain-text dumps of intermediate results (cycles, tables, the small system).

Every line is prefixed with ``# `` so dumps can share a stream with a
solution file without breaking :func:`netkernel.solution.parse_solution`.
"""

from __future__ import annotations

from .decomposer import format_matrix
from .instance import ArcRef
from .scalars import format_scalar
from .solver import SolveResult


def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(header[c]), *(len(r[c]) for r in rows)) if rows else len(header[c]) for c in range(len(header))]

    def fmt(cells: list[str]) -> str:
        return " | ".join(cell.rjust(w) for cell, w in zip(cells, widths))

    return [fmt(header), "-+-".join("-" * w for w in widths)] + [fmt(r) for r in rows]


def _arc(arc: ArcRef) -> str:
    return f"({arc.tail},{arc.head})^{arc.k}"


def column_order(result: SolveResult, k: int) -> list[ArcRef]:
    """Tree arcs in support order, then non-tree arcs in declaration order."""
    net = result.instance.commodity(k)
    return list(result.support.tree(k)) + result.support.non_tree(net)


def cycle_lines(result: SolveResult) -> list[str]:
    out = []
    for arc, cycle in result.cycles.items():
        members = " ".join(f"{'+' if s > 0 else '-'}{_arc(a)}" for a, s in cycle.members)
        out.append(f"cycle L{_arc(arc)}: {members}")
    return out


def vector_tables(result: SolveResult) -> list[str]:
    out = []
    for net in result.instance.commodities:
        cols = column_order(result, net.k)
        rows = []
        for arc in result.support.non_tree(net):
            signs = result.cycles[arc].signs()
            rows.append([f"delta^{net.k}({arc.tail},{arc.head})"] + [str(signs.get(c, 0)) for c in cols])
        out.append(f"characteristic vectors, commodity {net.k}")
        out += _table([f"(i,j)^{net.k}"] + [_arc(c) for c in cols], rows)
        out.append("")
    return out


def partial_lines(result: SolveResult) -> list[str]:
    out = []
    for net in result.instance.commodities:
        cols = column_order(result, net.k)
        vals = ", ".join(format_scalar(result.partials[net.k][c]) for c in cols)
        out.append(f"x~^{net.k} over ({', '.join(_arc(c) for c in cols)}) = ({vals})")
    return out


def determinant_tables(result: SolveResult) -> list[str]:
    inst = result.instance
    arcs = list(result.cycles)
    out = []
    if inst.side:
        rows = [[f"R_{row.p}"] + [format_scalar(result.columns[a][row.p - 1]) for a in arcs] for row in inst.side]
        out.append("cycle determinants")
        out += _table(["(tau,rho)^k"] + [_arc(a) for a in arcs], rows)
        out.append("")
    if inst.coupling:
        q = inst.q
        rows = [
            [f"delta_{row.tail}{row.head}"] + [format_scalar(result.columns[a][q + xi]) for a in arcs]
            for xi, row in enumerate(inst.coupling)
        ]
        out.append("coupling deltas")
        out += _table(["(tau,rho)^k"] + [_arc(a) for a in arcs], rows)
        out.append("")
    side, coupling = result.constants
    consts = [f"A^{p} = {format_scalar(v)}" for p, v in enumerate(side, start=1)]
    consts += [f"A_{row.tail}{row.head} = {format_scalar(v)}" for row, v in zip(inst.coupling, coupling)]
    if consts:
        out.append("constants: " + ", ".join(consts))
    return out


def system_lines(result: SolveResult) -> list[str]:
    sys = result.system
    out = ["cyclic arcs (t-order): " + " ".join(_arc(a) for a in sys.cyclic)]
    out.append("free arcs: " + " ".join(_arc(a) for a in result.partition.free))
    if not sys.size:
        out.append("no side or coupling rows: D is empty")
        return out
    out.append("D =")
    out += ["  " + line for line in format_matrix(sys.D)]
    out.append("beta =")
    out += ["  " + b.format(result.partition.free) for b in sys.beta]
    out.append("D^-1 =")
    out += ["  " + line for line in format_matrix(sys.D_inv)]
    return out


def render(result: SolveResult, cycles: bool = False, small_system: bool = False, tables: bool = False) -> str:
    lines: list[str] = []
    if cycles or tables:
        lines += cycle_lines(result) + [""] + vector_tables(result)
    if tables:
        lines += partial_lines(result) + [""] + determinant_tables(result) + [""]
    if small_system:
        lines += system_lines(result) + [""]
    while lines and not lines[-1]:
        lines.pop()
    return "".join(f"# {line}".rstrip() + "\n" for line in lines)
