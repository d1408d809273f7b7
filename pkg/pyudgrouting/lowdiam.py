#!/usr/bin/env python

"""
Grid clustering into representatives R and bridge vertices Z, and the low-diameter scheme.

Every vertex stores the shortest-path tree of DG(Z) rooted at its representative.
A packet for t hops to t directly when t is a neighbor, otherwise climbs the tree of t's
representative when the current vertex belongs to it, otherwise moves to its own representative.
"""

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from pyudgrouting.encoding import BitReader, BitWriter, Widths
from pyudgrouting.exceptions import IncompatibleLabels, InvalidEpsilon, NotANeighbor, RoutingError
from pyudgrouting.geometry import BroadcastFn, UnitDiskGraph, dijkstra
from pyudgrouting.routing import RoutingScheme, to_port

logger = logging.getLogger(__name__)

# keeps same-cell distances strictly below epsilon after rounding
CELL_SHRINK = 1.0 - 1e-9


@dataclass(frozen=True)
class ClusterSets:
    """
    R (one representative per occupied grid cell), Z (R plus the endpoints of one bridge per pair of
    cells joined by an edge) and the representative of every vertex
    """

    epsilon: float
    side: float
    R: frozenset[int]
    Z: frozenset[int]
    rep: dict[int, int]
    cells: dict[int, tuple[int, int]]
    bridges: dict[tuple[tuple[int, int], tuple[int, int]], tuple[int, int]] = field(default_factory=dict)


def build_rz(g: UnitDiskGraph, epsilon: float, vertices: Iterable[int] | None = None) -> ClusterSets:
    """
    Grid clustering with cell side epsilon/sqrt(2). The bridge of a cell pair is the shortest edge
    joining the two cells, ties going to the smallest `(u, v)`.

    :param g: the unit disk graph
    :param epsilon: in (0, 1]
    :param vertices: optional region, its induced subgraph must be connected
    :return: the cluster sets
    """
    if not (0.0 < epsilon <= 1.0):
        logger.error(f"epsilon must be in (0, 1], got {epsilon}")
        raise InvalidEpsilon(f"epsilon must be in (0, 1], got {epsilon}")
    region = sorted(range(g.n) if vertices is None else set(vertices))
    inside = set(region)
    side = epsilon / math.sqrt(2.0) * CELL_SHRINK

    grid = np.floor(g.coords[region] / side).astype(np.int64)
    cells = {v: (int(grid[i, 0]), int(grid[i, 1])) for i, v in enumerate(region)}
    owner: dict[tuple[int, int], int] = {}
    for v in region:
        owner.setdefault(cells[v], v)
    rep = {v: owner[cells[v]] for v in region}

    best: dict[tuple[tuple[int, int], tuple[int, int]], tuple[float, int, int]] = {}
    for u in region:
        for v, w in g.adjacency[u]:
            if v <= u or v not in inside or cells[u] == cells[v]:
                continue
            key = tuple(sorted((cells[u], cells[v])))
            candidate = (w, u, v)
            if key not in best or candidate < best[key]:
                best[key] = candidate
    bridges = {key: (u, v) for key, (_, u, v) in best.items()}

    R = frozenset(owner.values())
    Z = set(R)
    for u, v in bridges.values():
        Z.update((u, v))
    sets = ClusterSets(epsilon, side, R, frozenset(Z), rep, cells, bridges)
    if len(Z) > 1 and not g.is_connected(Z):
        raise RoutingError(f"DG(Z) is disconnected for epsilon={epsilon}")
    logger.debug(f"Clustering with epsilon={epsilon}: |R|={len(R)}, |Z|={len(Z)}, |V|={len(region)}")
    return sets


@dataclass(frozen=True)
class LowDiamLabel:
    """
    A representative stores its tree over Z as `(u, v, d)` triples with `u < v`, d=1 when v is the parent.
    Any other vertex stores its representative's id and label.
    """

    self_id: int
    is_cluster: bool
    tree_edges: tuple[tuple[int, int, int], ...] = ()
    rep_id: int | None = None
    rep_label: "LowDiamLabel | None" = None

    @cached_property
    def parent_map(self) -> dict[int, int]:
        parents = {}
        for u, v, d in self.tree_edges:
            if d:
                parents[u] = v
            else:
                parents[v] = u
        return parents

    @property
    def cluster_label(self) -> "LowDiamLabel":
        return self if self.is_cluster else self.rep_label

    @property
    def cluster_id(self) -> int:
        return self.self_id if self.is_cluster else self.rep_id

    def depth(self, v: int) -> int:
        """
        Hops from v to the root in the stored tree
        """
        parents = self.parent_map
        hops = 0
        while v in parents:
            v = parents[v]
            hops += 1
        return hops

    def encode(self, writer: BitWriter, widths: Widths) -> None:
        writer.write(self.self_id, widths.ident)
        writer.write_bool(self.is_cluster)
        if self.is_cluster:
            writer.write(len(self.tree_edges), widths.count)
            for u, v, d in self.tree_edges:
                writer.write(u, widths.ident)
                writer.write(v, widths.ident)
                writer.write(d, 1)
        else:
            writer.write(self.rep_id, widths.ident)
            self.rep_label.encode(writer, widths)

    @classmethod
    def decode(cls, reader: BitReader, widths: Widths) -> "LowDiamLabel":
        self_id = reader.read(widths.ident)
        if reader.read_bool():
            count = reader.read(widths.count)
            edges = tuple(
                (reader.read(widths.ident), reader.read(widths.ident), reader.read(1)) for _ in range(count)
            )
            return cls(self_id, True, edges)
        rep_id = reader.read(widths.ident)
        return cls(self_id, False, rep_id=rep_id, rep_label=cls.decode(reader, widths))


def build_lowdiam_labels(
    g: UnitDiskGraph,
    epsilon: float,
    vertices: Iterable[int] | None = None,
    sets: ClusterSets | None = None,
) -> dict[int, LowDiamLabel]:
    """
    Labels of the low-diameter scheme
    :param g: the unit disk graph
    :param epsilon: in (0, 1]
    :param vertices: optional region
    :param sets: precomputed cluster sets of the same region
    :return: map vertex -> label
    """
    if sets is None:
        sets = build_rz(g, epsilon, vertices)
    cluster_labels: dict[int, LowDiamLabel] = {}
    for r in sorted(sets.R):
        _, parent = dijkstra(g, r, sets.Z)
        edges = []
        for v, p in parent.items():
            if p is None:
                continue
            edges.append((v, p, 1) if v < p else (p, v, 0))
        cluster_labels[r] = LowDiamLabel(r, True, tuple(sorted(edges)))
    labels = {}
    for v, r in sets.rep.items():
        labels[v] = cluster_labels[r] if v == r else LowDiamLabel(v, False, rep_id=r, rep_label=cluster_labels[r])
    return labels


def sigma_diam(lab_s: LowDiamLabel, lab_t: LowDiamLabel, beta: BroadcastFn) -> int:
    """
    Low-diameter routing function
    :param lab_s: label of the current vertex
    :param lab_t: label of the target
    :param beta: broadcast function of the current vertex
    :return: port
    """
    s = lab_s.self_id
    if s == lab_t.self_id:
        raise IncompatibleLabels(f"source and target are both {s}")
    port = beta(lab_t.self_id)
    if port < beta.sentinel:
        return port
    parents = lab_t.cluster_label.parent_map
    if s in parents:
        return to_port(beta, s, parents[s])
    if lab_s.is_cluster:
        # a representative always belongs to the tree of every other representative
        raise NotANeighbor(s, lab_t.cluster_id)
    return to_port(beta, s, lab_s.rep_id)


class LowDiamScheme(RoutingScheme):
    """
    The low-diameter scheme on a graph or on a connected region of it.

    Example usage.
    ```python
    scheme = LowDiamScheme(g, epsilon=0.25)
    trace = route(scheme, assign_ports(g, seed=1), 0, 7)
    ```
    """

    name = "lowdiam"

    def __init__(
        self,
        graph: UnitDiskGraph,
        epsilon: float,
        vertices: Iterable[int] | None = None,
        widths: Widths | None = None,
    ):
        self.epsilon = epsilon
        self.sets = build_rz(graph, epsilon, vertices)
        labels = build_lowdiam_labels(graph, epsilon, sets=self.sets)
        super().__init__(graph, labels, widths or Widths.for_graph(graph.n))

    def sigma(self, lab_s: LowDiamLabel, lab_t: LowDiamLabel, beta: BroadcastFn) -> int:
        return sigma_diam(lab_s, lab_t, beta)

    def progress(self, current: int, target: int) -> tuple:
        tree = self.labels[target].cluster_label
        if current in tree.parent_map or current == tree.self_id:
            return (0, tree.depth(current))
        return (1, 0)

    def sizes(self) -> dict[str, int]:
        return {"R": len(self.sets.R), "Z": len(self.sets.Z)}
