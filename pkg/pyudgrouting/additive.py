#!/usr/bin/env python

"""
Headerless routing with additive stretch O(eps*D) on top of the decomposition tree.

For every portal p whose region holds v, the label of v stores the quantized distance to p and
v's label in the shortest-path tree T_p. The packet follows T_p0, where p0 minimizes
`(theta_c, portal id)` over the portals shared by the current vertex and the target.
"""

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass

from pyudgrouting.decomposition import DecompositionTree, build_decomposition
from pyudgrouting.encoding import BitReader, BitWriter, Widths
from pyudgrouting.exceptions import AssertionViolation, EpsilonTooSmall, IncompatibleLabels, NoCommonPortal
from pyudgrouting.geometry import BroadcastFn, UnitDiskGraph, diameter
from pyudgrouting.routing import RoutingScheme, to_port
from pyudgrouting.tree_labels import TreeLabel, build_tree_labels, tree_next_hop

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Quantizer:
    """
    x -> floor(c * x) with c = n / (eps * D)
    """

    c: float

    @classmethod
    def for_region(cls, n: int, epsilon: float, D: float) -> "Quantizer":
        return cls(n / (epsilon * D))

    def __call__(self, x: float) -> int:
        return math.floor(x * self.c)


@dataclass(frozen=True)
class PortalEntry:
    p_id: int
    d_c: int
    l: int
    r: int
    tree_label: TreeLabel

    def encode(self, writer: BitWriter, widths: Widths) -> None:
        writer.write(self.p_id, widths.ident)
        writer.write(self.d_c, widths.distance)
        writer.write(self.l, widths.ident)
        writer.write(self.r, widths.ident)
        self.tree_label.encode(writer, widths)

    @classmethod
    def decode(cls, reader: BitReader, widths: Widths) -> "PortalEntry":
        p_id = reader.read(widths.ident)
        d_c = reader.read(widths.distance)
        l = reader.read(widths.ident)
        r = reader.read(widths.ident)
        return cls(p_id, d_c, l, r, TreeLabel.decode(reader, widths))


@dataclass(frozen=True)
class AdditiveLabel:
    self_id: int
    entries: tuple[PortalEntry, ...]

    def entry(self, p_id: int) -> PortalEntry | None:
        for e in self.entries:
            if e.p_id == p_id:
                return e
        return None

    def encode(self, writer: BitWriter, widths: Widths) -> None:
        writer.write(self.self_id, widths.ident)
        writer.write(len(self.entries), widths.count)
        for e in self.entries:
            e.encode(writer, widths)

    @classmethod
    def decode(cls, reader: BitReader, widths: Widths) -> "AdditiveLabel":
        self_id = reader.read(widths.ident)
        count = reader.read(widths.count)
        return cls(self_id, tuple(PortalEntry.decode(reader, widths) for _ in range(count)))


def theta_c_via(entry_s: PortalEntry, entry_t: PortalEntry) -> int:
    """
    theta_c(s, t; p): d_c(t) - d_c(s) when t is in the subtree of s in T_p, else d_c(t) + d_c(s)
    """
    if entry_s.l <= entry_t.r <= entry_s.r:
        return entry_t.d_c - entry_s.d_c
    return entry_t.d_c + entry_s.d_c


def theta_c(lab_s: AdditiveLabel, lab_t: AdditiveLabel) -> tuple[int, int]:
    """
    The s-t-portal
    :param lab_s: label of s
    :param lab_t: label of t
    :return: `(theta_c(s, t), p0)`, the lexicographic minimum over the common portals
    """
    target = {e.p_id: e for e in lab_t.entries}
    best = None
    for e in lab_s.entries:
        other = target.get(e.p_id)
        if other is None:
            continue
        candidate = (theta_c_via(e, other), e.p_id)
        if best is None or candidate < best:
            best = candidate
    if best is None:
        raise NoCommonPortal(f"labels of {lab_s.self_id} and {lab_t.self_id} share no portal")
    return best


def sigma_add(lab_s: AdditiveLabel, lab_t: AdditiveLabel, beta: BroadcastFn) -> int:
    """
    Next hop along T_p0 towards t
    """
    if lab_s.self_id == lab_t.self_id:
        raise IncompatibleLabels(f"source and target are both {lab_s.self_id}")
    _, p0 = theta_c(lab_s, lab_t)
    nxt = tree_next_hop(lab_s.entry(p0).tree_label, lab_t.entry(p0).tree_label)
    return to_port(beta, lab_s.self_id, nxt)


def build_additive_labels(
    g: UnitDiskGraph,
    epsilon: float,
    vertices: Iterable[int] | None = None,
    D: float | None = None,
    decomposition: DecompositionTree | None = None,
) -> tuple[dict[int, AdditiveLabel], DecompositionTree, Quantizer]:
    """
    Labels of the additive scheme on a graph or on a connected region of it
    :param g: the unit disk graph
    :param epsilon: must exceed 1/D
    :param vertices: optional region
    :param D: exact diameter of the region
    :param decomposition: a prebuilt decomposition of the same region
    :return: labels, decomposition and quantizer
    """
    region = sorted(range(g.n) if vertices is None else set(vertices))
    if D is None:
        D = decomposition.diameter if decomposition else diameter(g, None if vertices is None else region)
    if D <= 0 or epsilon <= 1.0 / D:
        logger.error(f"epsilon={epsilon} must exceed 1/D for D={D}")
        raise EpsilonTooSmall(epsilon, D)
    if decomposition is None:
        decomposition = build_decomposition(g, epsilon, D, None if vertices is None else region)
    quantize = Quantizer.for_region(len(region), epsilon, D)

    entries: dict[int, list[PortalEntry]] = {v: [] for v in region}
    for node in decomposition.nodes:
        for p in node.portals:
            tree_labels = build_tree_labels(node.trees[p])
            dist = node.distances[p]
            for v, lab in tree_labels.items():
                entries[v].append(PortalEntry(p, quantize(dist[v]), lab.l, lab.r, lab))
    labels = {
        v: AdditiveLabel(v, tuple(sorted(es, key=lambda e: e.p_id))) for v, es in entries.items()
    }
    return labels, decomposition, quantize


class AdditiveScheme(RoutingScheme):
    """
    The additive-stretch scheme, on the whole graph or on one cluster of the hierarchy
    """

    name = "additive"

    def __init__(
        self,
        graph: UnitDiskGraph,
        epsilon: float,
        vertices: Iterable[int] | None = None,
        D: float | None = None,
        widths: Widths | None = None,
    ):
        self.epsilon = epsilon
        labels, self.decomposition, self.quantize = build_additive_labels(graph, epsilon, vertices, D)
        super().__init__(graph, labels, widths or Widths.for_graph(graph.n))

    @property
    def diameter(self) -> float:
        return self.decomposition.diameter

    def sigma(self, lab_s: AdditiveLabel, lab_t: AdditiveLabel, beta: BroadcastFn) -> int:
        return sigma_add(lab_s, lab_t, beta)

    def _tree(self, p: int):
        return self.decomposition.nodes[self.decomposition.owner[p]].trees[p]

    def progress(self, current: int, target: int) -> tuple[int, int, int]:
        """
        `(theta_c, p0, hops from current to target in T_p0)`
        """
        value, p0 = theta_c(self.labels[current], self.labels[target])
        return value, p0, self._tree(p0).hop_distance(current, target)

    def check_hop(self, current: int, nxt: int, target: int) -> None:
        if nxt == target:
            return
        lab_s, lab_v, lab_t = self.labels[current], self.labels[nxt], self.labels[target]
        value_s, p0 = theta_c(lab_s, lab_t)
        entry_v = lab_v.entry(p0)
        if entry_v is None:
            raise AssertionViolation("portal-persistence", f"{nxt} left the region of portal {p0}")
        step = self.quantize(self.graph.weight(current, nxt))
        via_s = theta_c_via(lab_s.entry(p0), lab_t.entry(p0))
        via_v = theta_c_via(entry_v, lab_t.entry(p0))
        if via_s < via_v + step:
            raise AssertionViolation(
                "portal-persistence", f"theta_c via {p0}: {via_s} < {via_v} + {step} at hop {current}->{nxt}"
            )
        value_v, q = theta_c(lab_v, lab_t)
        if value_s < value_v + step:
            raise AssertionViolation(
                "potential-decrease", f"theta_c {value_s} < {value_v} + {step} at hop {current}->{nxt}"
            )
        if value_s == value_v and q > p0:
            raise AssertionViolation("portal-tie", f"portal id grew from {p0} to {q} at hop {current}->{nxt}")
