"""Fundamental cycles, characteristic vectors and tree partial solutions.

For one commodity with spanning tree ``T``, each non-tree arc closes a
unique cycle in ``T + arc``.  Walking the cycle in the direction of the
closing ("entailing") arc, an arc is *forward* (sign ``+1``) if it points
the same way and *backward* (``-1``) otherwise.  The signed indicator of
the cycle is a kernel vector of the commodity's incidence matrix, and the
vectors of all non-tree arcs form a basis of that kernel.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import InconsistentBalanceError
from .instance import ArcRef, CommodityNetwork, Instance
from .scalars import Field, RATIONAL, Scalar
from .support import Support


@dataclass(frozen=True)
class FundamentalCycle:
    entailing: ArcRef
    members: tuple[tuple[ArcRef, int], ...]

    @property
    def arcs(self) -> tuple[ArcRef, ...]:
        return tuple(arc for arc, _ in self.members)

    def sign(self, arc: ArcRef) -> int:
        for member, s in self.members:
            if member == arc:
                return s
        return 0

    def signs(self) -> dict[ArcRef, int]:
        return dict(self.members)


@dataclass(frozen=True)
class CharacteristicVector:
    entailing: ArcRef
    components: dict[ArcRef, int]

    def __getitem__(self, arc: ArcRef) -> int:
        return self.components.get(arc, 0)

    def dense(self, arcs: Iterable[ArcRef]) -> tuple[int, ...]:
        return tuple(self.components.get(arc, 0) for arc in arcs)


@dataclass(frozen=True)
class PartialSolution:
    k: int
    values: dict[ArcRef, Scalar]
    eliminations: int = 0

    def __getitem__(self, arc: ArcRef) -> Scalar:
        return self.values[arc]

    def dense(self, arcs: Iterable[ArcRef]) -> tuple[Scalar, ...]:
        return tuple(self.values[arc] for arc in arcs)


class RootedTree:
    """A spanning tree hung from its smallest node, for path queries."""

    def __init__(self, arcs: Sequence[ArcRef]):
        self.arcs = tuple(arcs)
        self._arc_set = frozenset(self.arcs)
        adj: dict[int, list[tuple[ArcRef, int]]] = {}
        for arc in self.arcs:
            adj.setdefault(arc.tail, []).append((arc, arc.head))
            adj.setdefault(arc.head, []).append((arc, arc.tail))
        self.root = min(adj) if adj else None
        self.parent: dict[int, int] = {}
        self.parent_arc: dict[int, ArcRef] = {}
        self.depth: dict[int, int] = {}
        if self.root is None:
            return
        self.depth[self.root] = 0
        stack = [self.root]
        while stack:
            u = stack.pop()
            for arc, v in adj[u]:
                if v not in self.depth:
                    self.depth[v] = self.depth[u] + 1
                    self.parent[v] = u
                    self.parent_arc[v] = arc
                    stack.append(v)

    def __contains__(self, arc: ArcRef) -> bool:
        return arc in self._arc_set

    def path(self, start: int, end: int) -> list[tuple[ArcRef, int]]:
        """Tree arcs walked from ``start`` to ``end`` with their traversal signs."""
        up: list[tuple[ArcRef, int]] = []
        down: list[tuple[ArcRef, int]] = []
        u, v = start, end
        while self.depth[u] > self.depth[v]:
            arc = self.parent_arc[u]
            up.append((arc, 1 if arc.tail == u else -1))
            u = self.parent[u]
        while self.depth[v] > self.depth[u]:
            arc = self.parent_arc[v]
            down.append((arc, 1 if arc.tail == self.parent[v] else -1))
            v = self.parent[v]
        while u != v:
            arc = self.parent_arc[u]
            up.append((arc, 1 if arc.tail == u else -1))
            u = self.parent[u]
            arc = self.parent_arc[v]
            down.append((arc, 1 if arc.tail == self.parent[v] else -1))
            v = self.parent[v]
        return up + down[::-1]

    def cycle(self, entailing: ArcRef) -> FundamentalCycle:
        if entailing in self:
            raise ValueError(f"arc {entailing} is a tree arc and entails no cycle")
        for node in (entailing.tail, entailing.head):
            if node not in self.depth:
                raise ValueError(f"node {node} of arc {entailing} is not spanned by the tree")
        # the entailing arc runs tail -> head; close the loop head -> tail in the tree
        members = [(entailing, 1)] + self.path(entailing.head, entailing.tail)
        return FundamentalCycle(entailing, tuple(members))


def fundamental_cycle(tree: Sequence[ArcRef], entailing: ArcRef) -> FundamentalCycle:
    return RootedTree(tree).cycle(entailing)


def characteristic_vector(cycle: FundamentalCycle, arcs: Iterable[ArcRef] = ()) -> CharacteristicVector:
    """Signed cycle indicator; ``arcs`` (the commodity's arcs) is checked for coverage."""
    comps = dict(cycle.members)
    known = set(arcs)
    if known and not known.issuperset(comps):
        raise ValueError("cycle uses arcs outside the given commodity arc list")
    return CharacteristicVector(cycle.entailing, comps)


def node_imbalance(net: CommodityNetwork, values: Mapping[ArcRef, Scalar]) -> dict[int, Scalar]:
    """Outflow minus inflow at every node for an arc-value mapping (missing arcs = 0)."""
    out = {i: 0 for i in net.nodes}
    for arc in net.arcs:
        x = values.get(arc, 0)
        if x:
            out[arc.tail] += x
            out[arc.head] -= x
    return out


def verify_homogeneous(inst: Instance, k: int, vector: CharacteristicVector) -> bool:
    net = inst.commodity(k)
    fld = inst.arith
    return all(fld.is_zero(v) for v in node_imbalance(net, vector.components).values())


def tree_partial_solution(net: CommodityNetwork, tree: Sequence[ArcRef], arith: Field = RATIONAL) -> PartialSolution:
    """Solve the balance rows on the tree arcs with every other arc fixed at zero.

    Leaves are peeled one at a time (smallest node id first): the balance
    equation of a leaf involves a single remaining tree arc, which fixes
    that arc's value; the value is pushed into the neighbour's equation and
    the leaf is dropped.  The last node's leftover must vanish, otherwise
    the commodity's balances do not sum to zero.
    """
    zero = arith.zero()
    values: dict[ArcRef, Scalar] = {arc: zero for arc in net.arcs}
    residual = {i: arith.convert(net.balance(i)) for i in net.nodes}
    incident: dict[int, set[ArcRef]] = {i: set() for i in net.nodes}
    for arc in tree:
        incident[arc.tail].add(arc)
        incident[arc.head].add(arc)
    leaves = [i for i in net.nodes if len(incident[i]) == 1]
    heapq.heapify(leaves)
    remaining = len(net.nodes)
    eliminated = set()
    steps = 0
    while remaining > 1:
        v = heapq.heappop(leaves)
        (arc,) = incident[v]
        if arc.tail == v:
            x = residual[v]
            u = arc.head
            residual[u] += x
        else:
            x = -residual[v]
            u = arc.tail
            residual[u] -= x
        values[arc] = x
        residual[v] = zero
        eliminated.add(v)
        incident[v].clear()
        incident[u].discard(arc)
        if len(incident[u]) == 1:
            heapq.heappush(leaves, u)
        remaining -= 1
        steps += 1
    last = next(i for i in net.nodes if i not in eliminated)
    leftover = residual[last]
    scale = sum(abs(arith.convert(net.balance(i))) for i in net.nodes) if not arith.exact else 1.0
    if not arith.is_zero(leftover, scale):
        raise InconsistentBalanceError(
            f"commodity {net.k}: balances sum to {leftover}, residual left at the last node {last}"
        )
    return PartialSolution(net.k, values, steps)


def basis(inst: Instance, k: int, support: Support) -> list[CharacteristicVector]:
    """Characteristic vectors of all non-tree arcs of commodity ``k``, declaration order."""
    net = inst.commodity(k)
    rooted = RootedTree(support.tree(k))
    return [characteristic_vector(rooted.cycle(arc), net.arcs) for arc in support.non_tree(net)]


def all_cycles(inst: Instance, support: Support) -> dict[ArcRef, FundamentalCycle]:
    """Fundamental cycle of every non-tree arc, commodities ascending."""
    out: dict[ArcRef, FundamentalCycle] = {}
    for net in inst.commodities:
        rooted = RootedTree(support.tree(net.k))
        for arc in support.non_tree(net):
            out[arc] = rooted.cycle(arc)
    return out


def partial_solutions(inst: Instance, support: Support) -> dict[int, PartialSolution]:
    return {net.k: tree_partial_solution(net, support.tree(net.k), inst.arith) for net in inst.commodities}
