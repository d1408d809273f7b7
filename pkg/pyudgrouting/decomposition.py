#!/usr/bin/env python

"""
Decomposition tree of a connected unit disk graph region with portal sets and the portal
distance oracle theta.

An inner node cuts its region along the median strip `|coord - m| <= 1/2` of the better axis.
No edge of length at most 1 jumps over that strip, so the rest of the region splits into
components on either side of the median. The portals are a greedy net of the strip with
radius eps*D/2, hence a shortest path through the strip passes within eps*D/2 of a portal.

The non-portal strip vertices form further children. When the strip holds more than 2/3 of the
region they are halved by rank along the strip, which keeps every child at most half the region.
Any edge between two children has an endpoint in the strip, so only regions of at most
max(2, ceil(1/eps)) vertices become leaves.
"""

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from pyudgrouting.constants import (
    HEIGHT_WARNING_FACTOR,
    PORTALS_WARNING_FACTOR,
    depth_limit,
    leaf_threshold,
)
from pyudgrouting.exceptions import DepthLimitExceeded, EpsilonTooSmall
from pyudgrouting.geometry import INF, UnitDiskGraph, diameter, dijkstra
from pyudgrouting.tree_labels import RootedTree

logger = logging.getLogger(__name__)


@dataclass
class DecompNode:
    id: int
    vertices: tuple[int, ...]
    portals: tuple[int, ...]
    parent: int | None = None
    depth: int = 0
    children: list[int] = field(default_factory=list)
    distances: dict[int, dict[int, float]] = field(default_factory=dict)
    trees: dict[int, RootedTree] = field(default_factory=dict)
    separator: tuple[int, ...] = ()
    axis: int | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class DecompositionTree:
    nodes: list[DecompNode]
    owner: dict[int, int]
    epsilon: float
    diameter: float

    @property
    def root(self) -> DecompNode:
        return self.nodes[0]

    @property
    def spacing(self) -> float:
        return self.epsilon * self.diameter

    @property
    def height(self) -> int:
        return max(node.depth for node in self.nodes)

    @property
    def max_portals(self) -> int:
        return max(len(node.portals) for node in self.nodes)

    def chain(self, v: int) -> list[DecompNode]:
        """
        Nodes whose region contains v, from the root down to the node owning v as a portal
        """
        chain = []
        node = self.nodes[self.owner[v]]
        while True:
            chain.append(node)
            if node.parent is None:
                break
            node = self.nodes[node.parent]
        chain.reverse()
        return chain

    def common_nodes(self, s: int, t: int) -> list[DecompNode]:
        common = []
        for a, b in zip(self.chain(s), self.chain(t)):
            if a.id != b.id:
                break
            common.append(a)
        return common

    def dump(self) -> str:
        """
        Indented text, one line per node: id, region size and portal ids
        """
        lines = []
        stack = [self.root.id]
        while stack:
            node = self.nodes[stack.pop()]
            lines.append(f"{'  ' * node.depth}{node.id} |V|={len(node.vertices)} port={list(node.portals)}")
            stack.extend(reversed(node.children))
        return "\n".join(lines) + "\n"


def _strip(g: UnitDiskGraph, vertices: list[int], axis: int) -> tuple[list[int], list[list[int]]]:
    coords = g.coords[vertices, axis]
    m = float(np.median(coords))
    strip = [v for v, c in zip(vertices, coords) if abs(float(c) - m) <= 0.5]
    inside = set(strip)
    rest = [v for v in vertices if v not in inside]
    return strip, g.components(rest) if rest else []


def _halves(g: UnitDiskGraph, vertices: list[int], axis: int) -> list[list[int]]:
    """
    Components of the lower and the upper half of `vertices` by rank along `axis`
    """
    order = sorted(vertices, key=lambda v: (float(g.coords[v, axis]), v))
    half = (len(order) + 1) // 2
    return [part for side in (order[:half], order[half:]) if side for part in g.components(side)]


def _portal_net(
    g: UnitDiskGraph, region: list[int], strip: list[int], radius: float
) -> tuple[list[int], dict[int, dict[int, float]], dict[int, dict[int, int | None]]]:
    portals: list[int] = []
    distances: dict[int, dict[int, float]] = {}
    parents: dict[int, dict[int, int | None]] = {}
    for v in strip:
        if any(distances[p][v] <= radius for p in portals):
            continue
        portals.append(v)
        distances[v], parents[v] = dijkstra(g, v, region)
    return portals, distances, parents


def build_decomposition(
    g: UnitDiskGraph,
    epsilon: float,
    D: float | None = None,
    vertices: Iterable[int] | None = None,
) -> DecompositionTree:
    """
    Builds the decomposition tree
    :param g: the unit disk graph
    :param epsilon: portal spacing parameter, must exceed 1/D
    :param D: exact diameter of the region, computed when omitted
    :param vertices: optional connected region, defaults to the whole graph
    :return: the tree
    """
    region = sorted(range(g.n) if vertices is None else set(vertices))
    if D is None:
        D = diameter(g, None if vertices is None else region)
    if D <= 0 or epsilon <= 1.0 / D:
        logger.error(f"epsilon={epsilon} must exceed 1/D for D={D}")
        raise EpsilonTooSmall(epsilon, D)
    radius = epsilon * D / 2.0
    threshold = leaf_threshold(epsilon)

    nodes: list[DecompNode] = []
    owner: dict[int, int] = {}
    pending: list[tuple[list[int], int | None, int]] = [(region, None, 0)]
    while pending:
        current, parent, depth = pending.pop(0)
        node = DecompNode(id=len(nodes), vertices=tuple(current), portals=(), parent=parent, depth=depth)
        nodes.append(node)
        if parent is not None:
            nodes[parent].children.append(node.id)

        best = None
        if len(current) > threshold:
            for axis in (0, 1):
                strip, parts = _strip(g, current, axis)
                score = max([len(strip)] + [len(p) for p in parts])
                if best is None or score < best[0]:
                    best = (score, axis, strip, parts)

        if best is None:
            portals = list(current)
            distances, parents = {}, {}
            for p in portals:
                distances[p], parents[p] = dijkstra(g, p, current)
        else:
            _, axis, strip, parts = best
            node.axis = axis
            node.separator = tuple(strip)
            portals, distances, parents = _portal_net(g, current, strip, radius)
            chosen = set(portals)
            leftover = [v for v in strip if v not in chosen]
            if len(strip) * 3 > 2 * len(current):
                logger.debug(f"Node {node.id}: strip holds {len(strip)} of {len(current)} vertices, halving it")
                parts = parts + _halves(g, leftover, 1 - axis)
            elif leftover:
                parts = parts + g.components(leftover)
            for part in sorted(parts, key=lambda c: c[0]):
                pending.append((part, node.id, depth + 1))

        node.portals = tuple(portals)
        node.distances = distances
        for p in portals:
            owner[p] = node.id
            tree_parents = {v: q for v, q in parents[p].items() if distances[p][v] != INF}
            node.trees[p] = RootedTree(p, tree_parents, {v: g.weight(v, q) for v, q in tree_parents.items() if q is not None})

    tree = DecompositionTree(nodes, owner, epsilon, D)
    n = len(region)
    height = tree.height
    limit = depth_limit(n)
    if height > limit:
        logger.error(f"Decomposition height {height} exceeds {limit:.1f}")
        raise DepthLimitExceeded(height, limit, instance=region)
    if height > HEIGHT_WARNING_FACTOR * math.log2(max(n, 2)):
        logger.warning(f"Decomposition height {height} is large for n={n}")
    if tree.max_portals > PORTALS_WARNING_FACTOR / epsilon:
        logger.warning(f"Decomposition node with {tree.max_portals} portals for epsilon={epsilon}")
    logger.debug(f"Decomposition: {len(nodes)} nodes, height {height}, max portals {tree.max_portals}")
    return tree


def oracle_theta(tree: DecompositionTree, s: int, t: int) -> float:
    """
    min over portals p whose region holds both s and t of d_mu(s, p) + d_mu(p, t)
    """
    best = INF
    for node in tree.common_nodes(s, t):
        for p in node.portals:
            best = min(best, node.distances[p][s] + node.distances[p][t])
    return best
