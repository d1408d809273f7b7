#!/usr/bin/env python

"""
The routing-scheme interface, the routing loop and the two reference schemes
(routing along one shortest-path tree, and the full shortest-path-tree baseline).
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Hashable, Iterable
from dataclasses import dataclass
from typing import Any

import numpy as np

from pyudgrouting.constants import STEP_CAP_FACTOR
from pyudgrouting.encoding import BitReader, BitWriter, Widths, encoded_bits
from pyudgrouting.exceptions import IncompatibleLabels, NonTermination, NotANeighbor
from pyudgrouting.geometry import BroadcastFn, PortMap, WeightedGraph, dijkstra
from pyudgrouting.tree_labels import (
    RootedTree,
    TreeLabel,
    build_tree_labels,
    shortest_path_tree,
    tree_next_hop,
)

logger = logging.getLogger(__name__)


def to_port(beta: BroadcastFn, current: int, chosen: int) -> int:
    """
    Port of `chosen` at the current vertex, a non-neighbor is a construction bug
    """
    port = beta(chosen)
    if port >= beta.sentinel or port == 0:
        raise NotANeighbor(current, chosen)
    return port


class RoutingScheme(ABC):
    """
    A headerless labeled routing scheme.

    `sigma` only sees the two labels and the broadcast function of the current vertex,
    everything else on the instance is there for measurements and invariant checks.
    """

    name: str = "scheme"

    def __init__(self, graph: WeightedGraph, labels: dict[int, Any], widths: Widths):
        self.graph = graph
        self.labels = labels
        self.widths = widths

    @abstractmethod
    def sigma(self, lab_s: Any, lab_t: Any, beta: BroadcastFn) -> int:
        """
        The routing function
        :param lab_s: label of the current vertex
        :param lab_t: label of the target
        :param beta: broadcast function of the current vertex
        :return: port to forward on
        """

    @property
    def level_count(self) -> int:
        return 1

    def label_bits(self, v: int) -> int:
        return encoded_bits(self.labels[v], self.widths)

    def label_stats(self) -> dict[str, float]:
        bits = np.array([self.label_bits(v) for v in self.labels], dtype=np.int64)
        return {
            "max_bits": int(bits.max()),
            "mean_bits": float(bits.mean()),
            "total_bits": int(bits.sum()),
        }

    def progress(self, current: int, target: int) -> tuple | None:
        """
        Progress measure of the scheme, must strictly decrease at every hop that does not reach the target
        """
        return None

    def check_hop(self, current: int, nxt: int, target: int) -> None:
        """
        Scheme-specific hop invariants, raises AssertionViolation
        """

    def dispatch_key(self, current: int, target: int) -> Hashable:
        return self.name

    def next_vertex(self, ports: PortMap, current: int, target: int) -> int:
        beta = BroadcastFn(self.graph, ports, current)
        port = self.sigma(self.labels[current], self.labels[target], beta)
        if not 0 < port < beta.sentinel:
            raise NotANeighbor(current, -1)
        return ports.node(current, port)


def route(
    scheme: RoutingScheme,
    ports: PortMap,
    s: int,
    t: int,
    step_cap: int | None = None,
) -> list[int]:
    """
    The routing sequence from s until it reaches t
    :param scheme: a preprocessed scheme
    :param ports: the port numbering the scheme runs on
    :param s: source
    :param t: target
    :param step_cap: maximal number of hops, defaults to 16 n |I|
    :return: visited vertices, s first and t last
    """
    if step_cap is None:
        step_cap = STEP_CAP_FACTOR * scheme.graph.n * scheme.level_count
    trace = [s]
    current = s
    while current != t:
        if len(trace) > step_cap:
            logger.error(f"Route {s} -> {t} exceeded {step_cap} hops")
            raise NonTermination(s, t, trace)
        current = scheme.next_vertex(ports, current, t)
        trace.append(current)
    return trace


def route_length(graph: WeightedGraph, trace: list[int]) -> float:
    return sum(graph.weight(a, b) for a, b in zip(trace, trace[1:]))


class TreeScheme(RoutingScheme):
    """
    Every vertex routes along one shortest-path tree of the whole graph, rooted at `root`.
    Exact inside the tree, stretch against the graph is whatever the tree gives.
    """

    name = "tree"

    def __init__(self, graph: WeightedGraph, root: int = 0, vertices: Iterable[int] | None = None):
        self.tree: RootedTree = shortest_path_tree(graph, root, vertices)
        super().__init__(graph, build_tree_labels(self.tree), Widths.for_graph(graph.n))

    def sigma(self, lab_s: TreeLabel, lab_t: TreeLabel, beta: BroadcastFn) -> int:
        return to_port(beta, lab_s.self_id, tree_next_hop(lab_s, lab_t))

    def progress(self, current: int, target: int) -> tuple:
        return (self.tree.hop_distance(current, target),)


@dataclass(frozen=True)
class SptLabel:
    """
    Own id and the parent of every vertex in the shortest-path tree rooted at the owner
    """

    self_id: int
    parents: tuple[int, ...]

    def encode(self, writer: BitWriter, widths: Widths) -> None:
        writer.write(self.self_id, widths.ident)
        for p in self.parents:
            writer.write(p, widths.ident)

    @classmethod
    def decode(cls, reader: BitReader, widths: Widths) -> "SptLabel":
        self_id = reader.read(widths.ident)
        return cls(self_id, tuple(reader.read(widths.ident) for _ in range(widths.n)))


class SptScheme(RoutingScheme):
    """
    The trivial exact scheme: label(t) is a full shortest-path tree towards t
    """

    name = "spt"

    def __init__(self, graph: WeightedGraph):
        labels = {}
        self._dist = {}
        for t in range(graph.n):
            dist, parent = dijkstra(graph, t)
            labels[t] = SptLabel(t, tuple(t if p is None else p for p in (parent[v] for v in range(graph.n))))
            self._dist[t] = dist
        super().__init__(graph, labels, Widths.for_graph(graph.n))

    def sigma(self, lab_s: SptLabel, lab_t: SptLabel, beta: BroadcastFn) -> int:
        if lab_s.self_id == lab_t.self_id:
            raise IncompatibleLabels(f"source and target are both {lab_s.self_id}")
        return to_port(beta, lab_s.self_id, lab_t.parents[lab_s.self_id])

    def progress(self, current: int, target: int) -> tuple:
        return (self._dist[target][current],)
