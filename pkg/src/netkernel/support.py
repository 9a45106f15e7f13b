"""Network supports: one spanning tree per commodity.

A set of arcs is a support of the balance rows exactly when, for every
commodity, its arcs form a spanning tree of that commodity's network.
Trees are either built by a deterministic depth-first traversal or read
from a support file (``tree <k>: <i>:<j> <i>:<j> ...``) to pin a choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import InstanceError, SupportError
from .instance import ArcRef, CommodityNetwork, Instance


@dataclass(frozen=True)
class Support:
    trees: Mapping[int, tuple[ArcRef, ...]]

    def tree(self, k: int) -> tuple[ArcRef, ...]:
        return self.trees[k]

    def tree_set(self, k: int) -> frozenset[ArcRef]:
        return frozenset(self.trees[k])

    def non_tree(self, net: CommodityNetwork) -> list[ArcRef]:
        tree = self.tree_set(net.k)
        return [arc for arc in net.arcs if arc not in tree]


def spanning_tree(net: CommodityNetwork) -> tuple[ArcRef, ...]:
    """Depth-first spanning tree from the smallest node id.

    Neighbours are explored in arc declaration order; arcs are returned in
    the order they were discovered.
    """
    adj = net.neighbours()
    root = min(net.nodes)
    seen = {root}
    tree = []
    # explicit stack of (node, neighbour iterator) keeps recursion order
    stack = [(root, iter(adj[root]))]
    while stack:
        node, it = stack[-1]
        for arc, other in it:
            if other not in seen:
                seen.add(other)
                tree.append(arc)
                stack.append((other, iter(adj[other])))
                break
        else:
            stack.pop()
    if len(seen) != len(net.nodes):
        raise InstanceError(f"commodity {net.k}: network is not connected")
    return tuple(tree)


def build_support(inst: Instance) -> Support:
    return Support({net.k: spanning_tree(net) for net in inst.commodities})


@dataclass
class SupportCheck:
    ok: bool
    k: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _tree_problem(net: CommodityNetwork, arcs: tuple[ArcRef, ...]) -> str:
    if len(arcs) != len(net.nodes) - 1:
        return f"has {len(arcs)} arcs, a spanning tree needs |I^k| - 1 = {len(net.nodes) - 1}"
    if len(set(arcs)) != len(arcs):
        return "lists an arc twice"
    parent = {i: i for i in net.nodes}

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for arc in arcs:
        a, b = find(arc.tail), find(arc.head)
        if a == b:
            return f"contains a cycle (closed by arc {arc})"
        parent[a] = b
    # n-1 acyclic arcs on n nodes always span; kept as a guard
    if len({find(i) for i in net.nodes}) != 1:
        return "does not span the commodity's nodes"
    return ""


def verify_support(inst: Instance, support: Support) -> SupportCheck:
    """Check that every tree of ``support`` is a spanning tree of its commodity.

    Raises :class:`SupportError` if the support names an arc that is not
    declared in the instance; otherwise returns a truthy/falsy
    :class:`SupportCheck` naming the first failing commodity.
    """
    for k in support.trees:
        if not 1 <= k <= len(inst.commodities):
            raise SupportError(f"support names unknown commodity {k}")
    for net in inst.commodities:
        declared = set(net.arcs)
        arcs = tuple(support.trees.get(net.k, ()))
        for arc in arcs:
            if arc.k != net.k or arc not in declared:
                raise SupportError(f"support references undeclared arc {arc}")
        problem = _tree_problem(net, arcs)
        if problem:
            return SupportCheck(False, net.k, f"tree {net.k} {problem}")
    return SupportCheck(True)


def parse_support(text: str) -> Support:
    trees: dict[int, tuple[ArcRef, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, colon, rest = line.partition(":")
        words = head.split()
        if not colon or len(words) != 2 or words[0] != "tree":
            raise SupportError("expected 'tree <k>: <i>:<j> ...'", lineno)
        try:
            k = int(words[1])
        except ValueError:
            raise SupportError(f"bad commodity id {words[1]!r}", lineno) from None
        if k in trees:
            raise SupportError(f"tree {k} given twice", lineno)
        arcs = []
        for item in rest.split():
            try:
                i, j = (int(s) for s in item.split(":"))
            except ValueError:
                raise SupportError(f"bad arc {item!r}; expected <i>:<j>", lineno) from None
            arcs.append(ArcRef(k, i, j))
        trees[k] = tuple(arcs)
    return Support(trees)


def load_support(inst: Instance, text: str) -> Support:
    """Parse a support file and insist that it verifies against ``inst``."""
    support = parse_support(text)
    missing = [net.k for net in inst.commodities if net.k not in support.trees]
    if missing:
        raise SupportError(f"support file has no tree for commodities {missing}")
    check = verify_support(inst, support)
    if not check:
        raise SupportError(check.reason)
    return support


def format_support(support: Support) -> str:
    lines = []
    for k in sorted(support.trees):
        arcs = " ".join(f"{a.tail}:{a.head}" for a in support.trees[k])
        lines.append(f"tree {k}: {arcs}".rstrip())
    return "\n".join(lines) + "\n"
