"""Problem instances: per-commodity networks plus side and coupling rows.

An instance describes the linear system

* balance rows, one per node ``i`` of every commodity ``k``:
  outflow minus inflow of commodity ``k`` at ``i`` equals ``a[k][i]``;
* ``q`` side rows: ``sum(lambda[p][arc] * x[arc]) == alpha[p]``;
* coupling rows, one per shared arc ``(i, j)``:
  ``sum(x[(k, i, j)] for k in K0(i, j)) == z[i, j]``.

Instances are kept in "network form" (arc lists and sparse rows) and are
never expanded to a matrix here; see :mod:`netkernel.oracle` for that.

Instance file grammar (UTF-8, one statement per line, ``#`` starts a
comment, blank lines ignored)::

    commodity <k>
    node <i> [balance <a>]
    arc <i> <j>
    side rhs <alpha> { <k>:<i>:<j>=<lambda> ... }
    couple <i> <j> rhs <z> commodities <k1>,<k2>,...

``node`` and ``arc`` statements belong to the most recent ``commodity``.
``side`` and ``couple`` statements may appear anywhere; side rows are
numbered ``p = 1..q`` in file order.  Scalars are integers, decimals or
fractions ``p/q`` and are read exactly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, NamedTuple

from .errors import InstanceError
from .scalars import Scalar, format_scalar, get_field, parse_scalar


class ArcRef(NamedTuple):
    """Arc ``(tail, head)`` of commodity ``k``."""

    k: int
    tail: int
    head: int

    def __str__(self) -> str:
        return f"{self.k}:{self.tail}:{self.head}"

    @classmethod
    def parse(cls, text: str) -> ArcRef:
        parts = text.strip().split(":")
        if len(parts) != 3:
            raise ValueError(f"arc reference {text!r} is not of the form k:i:j")
        try:
            k, i, j = (int(p) for p in parts)
        except ValueError:
            raise ValueError(f"arc reference {text!r} has non-integer fields") from None
        return cls(k, i, j)


class Rank(NamedTuple):
    full: int
    network: int


@dataclass(frozen=True)
class CommodityNetwork:
    k: int
    nodes: tuple[int, ...]
    arcs: tuple[ArcRef, ...]
    balances: dict[int, Scalar] = field(default_factory=dict)

    def balance(self, node: int) -> Scalar:
        value = self.balances.get(node)
        return 0 if value is None else value

    def neighbours(self) -> dict[int, list[tuple[ArcRef, int]]]:
        """Undirected adjacency; neighbours appear in arc declaration order."""
        adj: dict[int, list[tuple[ArcRef, int]]] = {i: [] for i in self.nodes}
        for arc in self.arcs:
            adj[arc.tail].append((arc, arc.head))
            adj[arc.head].append((arc, arc.tail))
        return adj

    def is_connected(self) -> bool:
        if not self.nodes:
            return False
        adj = self.neighbours()
        start = min(self.nodes)
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for _, v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == len(self.nodes)


@dataclass(frozen=True)
class SideConstraint:
    p: int
    coeffs: dict[ArcRef, Scalar]
    rhs: Scalar


@dataclass(frozen=True)
class CouplingConstraint:
    tail: int
    head: int
    commodities: tuple[int, ...]
    rhs: Scalar

    @property
    def arcs(self) -> tuple[ArcRef, ...]:
        return tuple(ArcRef(k, self.tail, self.head) for k in self.commodities)


@dataclass(frozen=True)
class Instance:
    commodities: tuple[CommodityNetwork, ...]
    side: tuple[SideConstraint, ...] = ()
    coupling: tuple[CouplingConstraint, ...] = ()
    mode: str = "rational"

    @property
    def arith(self):
        return get_field(self.mode)

    @property
    def q(self) -> int:
        return len(self.side)

    def commodity(self, k: int) -> CommodityNetwork:
        return self.commodities[k - 1]

    def arcs(self) -> Iterator[ArcRef]:
        """All arcs, commodities ascending, declaration order within each."""
        for net in self.commodities:
            yield from net.arcs

    @property
    def n_arcs(self) -> int:
        return sum(len(net.arcs) for net in self.commodities)

    @property
    def n_nodes(self) -> int:
        return sum(len(net.nodes) for net in self.commodities)

    def commodities_at_node(self, node: int) -> set[int]:
        return {net.k for net in self.commodities if node in net.nodes}

    def commodities_on_arc(self, tail: int, head: int) -> set[int]:
        return {net.k for net in self.commodities if ArcRef(net.k, tail, head) in set(net.arcs)}

    def with_mode(self, mode: str) -> Instance:
        """Return a copy whose scalars are held in the given arithmetic mode."""
        fld = get_field(mode)
        conv = fld.convert
        nets = tuple(
            replace(net, balances={i: conv(a) for i, a in net.balances.items()})
            for net in self.commodities
        )
        side = tuple(
            replace(row, coeffs={arc: conv(v) for arc, v in row.coeffs.items()}, rhs=conv(row.rhs))
            for row in self.side
        )
        coupling = tuple(replace(row, rhs=conv(row.rhs)) for row in self.coupling)
        return Instance(nets, side, coupling, fld.name)

    def validate(self, strict: bool = True) -> None:
        """Raise :class:`InstanceError` on the first violated invariant.

        ``strict`` demands a genuinely underdetermined system: the expected
        rank ``sum|I^k| - |K| + q + |U0|`` must be below the arc count.
        Generated instances sitting exactly at the spanning-tree minimum are
        only valid with ``strict=False``.
        """
        if not self.commodities:
            raise InstanceError("instance declares no commodities")
        for pos, net in enumerate(self.commodities, start=1):
            if net.k != pos:
                raise InstanceError(f"commodity ids must be 1..|K| in order; found {net.k} at position {pos}")
            node_set = set(net.nodes)
            if len(node_set) != len(net.nodes):
                raise InstanceError(f"commodity {net.k}: duplicate node")
            if any(i < 1 for i in net.nodes):
                raise InstanceError(f"commodity {net.k}: node ids must be >= 1")
            seen = set()
            for arc in net.arcs:
                if arc.k != net.k:
                    raise InstanceError(f"arc {arc} filed under commodity {net.k}")
                if arc.tail == arc.head:
                    raise InstanceError(f"loop arc {arc}")
                if arc.tail not in node_set or arc.head not in node_set:
                    raise InstanceError(f"arc {arc} has an endpoint outside commodity {net.k}'s nodes")
                if arc in seen:
                    raise InstanceError(f"duplicate arc {arc}")
                seen.add(arc)
            for i in net.balances:
                if i not in node_set:
                    raise InstanceError(f"commodity {net.k}: balance given for unknown node {i}")
            if not net.is_connected():
                raise InstanceError(f"commodity {net.k}: network is not connected")
        declared = set(self.arcs())
        for row in self.side:
            for arc in row.coeffs:
                if arc not in declared:
                    raise InstanceError(f"side row {row.p}: unknown arc {arc}")
        pairs = set()
        for row in self.coupling:
            if (row.tail, row.head) in pairs:
                raise InstanceError(f"arc ({row.tail},{row.head}) coupled twice")
            pairs.add((row.tail, row.head))
            if len(set(row.commodities)) != len(row.commodities):
                raise InstanceError(f"coupling ({row.tail},{row.head}): repeated commodity")
            if len(row.commodities) <= 1:
                raise InstanceError(f"coupling ({row.tail},{row.head}) needs more than one commodity")
            for arc in row.arcs:
                if arc not in declared:
                    raise InstanceError(f"coupling ({row.tail},{row.head}): commodity {arc.k} has no such arc")
        if strict:
            rank = expected_rank(self).full
            if not rank < self.n_arcs:
                raise InstanceError(
                    f"system is not underdetermined: expected rank sum|I^k| - |K| + q + |U0| = {rank} "
                    f">= sum|U^k| = {self.n_arcs}"
                )


@dataclass(frozen=True)
class ConsistencyReport:
    k: int
    total: Scalar
    consistent: bool


def check_consistency(inst: Instance) -> list[ConsistencyReport]:
    """Per-commodity balance sums; a commodity is consistent iff its sum is zero."""
    fld = inst.arith
    out = []
    for net in inst.commodities:
        total = sum((net.balance(i) for i in net.nodes), fld.zero())
        scale = sum((abs(net.balance(i)) for i in net.nodes), 0.0) if not fld.exact else 1.0
        out.append(ConsistencyReport(net.k, total, fld.is_zero(total, scale)))
    return out


def expected_rank(inst: Instance) -> Rank:
    network = inst.n_nodes - len(inst.commodities)
    return Rank(network + inst.q + len(inst.coupling), network)


# -- text format -------------------------------------------------------------


def _tokens(line: str) -> list[str]:
    line = line.split("#", 1)[0]
    return line.replace("{", " { ").replace("}", " } ").split()


def parse_instance(text: str, mode: str = "rational", strict: bool = True) -> Instance:
    comms: dict[int, dict] = {}
    order: list[int] = []
    side: list[SideConstraint] = []
    coupling: list[CouplingConstraint] = []
    current = None

    def scalar(tok: str, lineno: int) -> Fraction:
        try:
            return parse_scalar(tok)
        except ValueError as exc:
            raise InstanceError(str(exc), lineno) from None

    def integer(tok: str, what: str, lineno: int) -> int:
        try:
            return int(tok)
        except ValueError:
            raise InstanceError(f"{what} must be an integer, got {tok!r}", lineno) from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        tok = _tokens(raw)
        if not tok:
            continue
        kw = tok[0]
        if kw == "commodity":
            if len(tok) != 2:
                raise InstanceError("expected 'commodity <k>'", lineno)
            k = integer(tok[1], "commodity id", lineno)
            if k in comms:
                raise InstanceError(f"commodity {k} declared twice", lineno)
            current = comms[k] = {"nodes": [], "arcs": [], "balances": {}}
            order.append(k)
        elif kw == "node":
            if current is None:
                raise InstanceError("'node' before any 'commodity'", lineno)
            if len(tok) not in (2, 4) or (len(tok) == 4 and tok[2] != "balance"):
                raise InstanceError("expected 'node <i> [balance <a>]'", lineno)
            i = integer(tok[1], "node id", lineno)
            if i in current["nodes"]:
                raise InstanceError(f"node {i} declared twice", lineno)
            current["nodes"].append(i)
            if len(tok) == 4:
                current["balances"][i] = scalar(tok[3], lineno)
        elif kw == "arc":
            if current is None:
                raise InstanceError("'arc' before any 'commodity'", lineno)
            if len(tok) != 3:
                raise InstanceError("expected 'arc <i> <j>'", lineno)
            current["arcs"].append((integer(tok[1], "arc tail", lineno), integer(tok[2], "arc head", lineno), lineno))
        elif kw == "side":
            if len(tok) < 5 or tok[1] != "rhs" or tok[3] != "{" or tok[-1] != "}":
                raise InstanceError("expected 'side rhs <alpha> { <k>:<i>:<j>=<lambda> ... }'", lineno)
            coeffs: dict[ArcRef, Fraction] = {}
            for item in tok[4:-1]:
                ref, eq, val = item.partition("=")
                if not eq:
                    raise InstanceError(f"side coefficient {item!r} lacks '='", lineno)
                try:
                    arc = ArcRef.parse(ref)
                except ValueError as exc:
                    raise InstanceError(str(exc), lineno) from None
                if arc in coeffs:
                    raise InstanceError(f"coefficient for {arc} given twice", lineno)
                coeffs[arc] = scalar(val, lineno)
            side.append(SideConstraint(len(side) + 1, coeffs, scalar(tok[2], lineno)))
        elif kw == "couple":
            if len(tok) != 7 or tok[3] != "rhs" or tok[5] != "commodities":
                raise InstanceError("expected 'couple <i> <j> rhs <z> commodities <k1>,<k2>,...'", lineno)
            ks = tuple(sorted(integer(s, "commodity id", lineno) for s in tok[6].split(",") if s))
            coupling.append(
                CouplingConstraint(
                    integer(tok[1], "arc tail", lineno), integer(tok[2], "arc head", lineno), ks, scalar(tok[4], lineno)
                )
            )
        else:
            raise InstanceError(f"unknown statement {kw!r}", lineno)

    if sorted(order) != list(range(1, len(order) + 1)):
        raise InstanceError(f"commodity ids must form the range 1..|K|, got {sorted(order)}")
    nets = []
    for k in sorted(order):
        block = comms[k]
        node_set = set(block["nodes"])
        seen = set()
        arcs = []
        for i, j, lineno in block["arcs"]:
            if i == j:
                raise InstanceError(f"loop arc ({i},{j}) in commodity {k}", lineno)
            if (i, j) in seen:
                raise InstanceError(f"duplicate arc ({i},{j}) in commodity {k}", lineno)
            if i not in node_set or j not in node_set:
                raise InstanceError(f"arc ({i},{j}) uses a node not declared in commodity {k}", lineno)
            seen.add((i, j))
            arcs.append(ArcRef(k, i, j))
        nets.append(CommodityNetwork(k, tuple(block["nodes"]), tuple(arcs), dict(block["balances"])))
    inst = Instance(tuple(nets), tuple(side), tuple(coupling))
    inst.validate(strict=strict)
    if mode != "rational":
        inst = inst.with_mode(mode)
    return inst


def format_instance(inst: Instance) -> str:
    lines = []
    for net in inst.commodities:
        lines.append(f"commodity {net.k}")
        for i in net.nodes:
            if i in net.balances:
                lines.append(f"node {i} balance {format_scalar(net.balances[i])}")
            else:
                lines.append(f"node {i}")
        for arc in net.arcs:
            lines.append(f"arc {arc.tail} {arc.head}")
        lines.append("")
    for row in inst.side:
        items = " ".join(f"{arc}={format_scalar(v)}" for arc, v in row.coeffs.items())
        lines.append(f"side rhs {format_scalar(row.rhs)} {{ {items} }}")
    for row in inst.coupling:
        ks = ",".join(str(k) for k in row.commodities)
        lines.append(f"couple {row.tail} {row.head} rhs {format_scalar(row.rhs)} commodities {ks}")
    return "\n".join(lines).rstrip("\n") + "\n"


def read_instance(path, mode: str = "rational", strict: bool = True) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read(), mode=mode, strict=strict)
