"""Seeded random instance generator.

Each commodity gets a random spanning tree over nodes ``1..N`` plus extra
random arcs.  A random integer flow is sampled and the balances, side
right-hand sides and coupling right-hand sides are read off it, so every
generated instance is consistent and solvable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .instance import ArcRef, CommodityNetwork, CouplingConstraint, Instance, SideConstraint


@dataclass(frozen=True)
class GenConfig:
    commodities: int = 3
    nodes: int = 6
    extra_arcs: int = 3
    side: int = 2
    coupled: int = 1
    seed: int = 1

    def check(self) -> None:
        if self.commodities < 1:
            raise ValueError("need at least one commodity")
        if self.nodes < 2:
            raise ValueError("need at least two nodes per commodity")
        if self.extra_arcs < 0 or self.side < 0 or self.coupled < 0:
            raise ValueError("extra arcs, side rows and coupled arcs must be non-negative")
        if self.coupled and self.commodities < 2:
            raise ValueError("coupling rows need at least two commodities")
        room = self.nodes * (self.nodes - 1) - (self.nodes - 1)
        if self.extra_arcs > room:
            raise ValueError(f"at most {room} extra arcs fit on {self.nodes} nodes")
        if self.commodities * self.extra_arcs < self.side + self.coupled:
            raise ValueError(
                "too few extra arcs: need commodities * extra_arcs >= side + coupled "
                "so there are enough non-tree arcs to solve for"
            )
        if self.coupled > self.nodes * (self.nodes - 1):
            raise ValueError("more coupled arcs than ordered node pairs")


def _random_tree(rng: random.Random, nodes: list[int]) -> list[tuple[int, int]]:
    order = nodes[:]
    rng.shuffle(order)
    arcs = []
    for pos in range(1, len(order)):
        u, v = order[pos], order[rng.randrange(pos)]
        arcs.append((u, v) if rng.random() < 0.5 else (v, u))
    return arcs


def generate_instance(config: GenConfig) -> Instance:
    config.check()
    rng = random.Random(config.seed)
    K = config.commodities
    nodes = list(range(1, config.nodes + 1))
    pairs = [(i, j) for i in nodes for j in nodes if i != j]
    arcs: dict[int, list[tuple[int, int]]] = {}
    for k in range(1, K + 1):
        tree = _random_tree(rng, nodes)
        present = set(tree)
        spare = [p for p in pairs if p not in present]
        extra = rng.sample(spare, config.extra_arcs)
        arcs[k] = tree + extra

    couplings: list[tuple[int, int, tuple[int, ...]]] = []
    taken: set[tuple[int, int]] = set()
    for _ in range(config.coupled):
        shared = [p for p in pairs if p not in taken and sum(p in arcs[k] for k in arcs) >= 2]
        if shared and rng.random() < 0.7:
            pair = rng.choice(shared)
            holders = [k for k in arcs if pair in arcs[k]]
        else:
            pair = rng.choice([p for p in pairs if p not in taken])
            holders = list(range(1, K + 1))
        size = rng.randint(2, len(holders))
        chosen = tuple(sorted(rng.sample(holders, size)))
        for k in chosen:
            if pair not in arcs[k]:
                arcs[k].append(pair)
        taken.add(pair)
        couplings.append((pair[0], pair[1], chosen))

    nets = []
    flow: dict[ArcRef, int] = {}
    for k in range(1, K + 1):
        rng.shuffle(arcs[k])
        refs = tuple(ArcRef(k, i, j) for i, j in arcs[k])
        balance = {i: 0 for i in nodes}
        for arc in refs:
            x = rng.randint(-9, 9)
            flow[arc] = x
            balance[arc.tail] += x
            balance[arc.head] -= x
        nets.append(CommodityNetwork(k, tuple(nodes), refs, {i: Fraction(a) for i, a in balance.items()}))

    side = []
    all_arcs = [a for net in nets for a in net.arcs]
    for p in range(1, config.side + 1):
        coeffs = {}
        for arc in all_arcs:
            lam = rng.randint(-9, 9)
            if lam:
                coeffs[arc] = Fraction(lam)
        rhs = sum(lam * flow[arc] for arc, lam in coeffs.items())
        side.append(SideConstraint(p, coeffs, Fraction(rhs)))

    coupling = []
    for i, j, ks in couplings:
        z = sum(flow[ArcRef(k, i, j)] for k in ks)
        coupling.append(CouplingConstraint(i, j, ks, Fraction(z)))

    inst = Instance(tuple(nets), tuple(side), tuple(coupling))
    inst.validate(strict=False)
    return inst
