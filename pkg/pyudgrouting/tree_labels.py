#!/usr/bin/env python

"""
Shortest-path routing inside a rooted weighted tree with heavy-path labels.

A label holds the postorder interval of the subtree, the parent, the heavy child and one
`(ancestor, next)` pair per light edge on the root path, which is at most `floor(log2 size)` pairs.
"""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from pyudgrouting.encoding import BitReader, BitWriter, Widths
from pyudgrouting.exceptions import IncompatibleLabels
from pyudgrouting.geometry import WeightedGraph, dijkstra

logger = logging.getLogger(__name__)


class RootedTree:
    """
    A rooted tree over a subset of the host graph's vertices.

    :param root: root id
    :param parents: map vertex -> parent, the root maps to None
    :param weights: optional map child -> weight of the edge to its parent, defaults to 1
    """

    def __init__(
        self,
        root: int,
        parents: Mapping[int, int | None],
        weights: Mapping[int, float] | None = None,
    ):
        if parents.get(root, None) is not None:
            raise ValueError(f"root {root} must not have a parent")
        self.root = root
        self.parent: dict[int, int | None] = dict(parents)
        self.parent[root] = None
        self.weight: dict[int, float] = {
            v: (1.0 if weights is None else float(weights[v]))
            for v, p in self.parent.items()
            if p is not None
        }
        self.children: dict[int, list[int]] = {v: [] for v in self.parent}
        for v, p in self.parent.items():
            if p is not None:
                if p not in self.children:
                    raise ValueError(f"parent {p} of {v} is not a tree vertex")
                self.children[p].append(v)
        for kids in self.children.values():
            kids.sort()
        self.depth: dict[int, int] = {}
        self.dist: dict[int, float] = {}
        for v in self.preorder():
            p = self.parent[v]
            self.depth[v] = 0 if p is None else self.depth[p] + 1
            self.dist[v] = 0.0 if p is None else self.dist[p] + self.weight[v]
        if len(self.depth) != len(self.parent):
            raise ValueError("parent map does not describe a tree rooted at the root")

    @property
    def vertices(self) -> list[int]:
        return sorted(self.parent)

    def __len__(self) -> int:
        return len(self.parent)

    def __contains__(self, v: int) -> bool:
        return v in self.parent

    def preorder(self) -> list[int]:
        order = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children.get(v, ())))
        return order

    def postorder(self) -> list[int]:
        """
        Vertices in postorder, children visited in increasing id order
        """
        order = []
        stack: list[tuple[int, bool]] = [(self.root, False)]
        while stack:
            v, expanded = stack.pop()
            if expanded:
                order.append(v)
                continue
            stack.append((v, True))
            for c in reversed(self.children[v]):
                stack.append((c, False))
        return order

    def path(self, s: int, t: int) -> list[int]:
        """
        The unique tree path from s to t, by parent-pointer walks
        """
        up_s, up_t = [s], [t]
        a, b = s, t
        while self.depth[a] > self.depth[b]:
            a = self.parent[a]
            up_s.append(a)
        while self.depth[b] > self.depth[a]:
            b = self.parent[b]
            up_t.append(b)
        while a != b:
            a = self.parent[a]
            b = self.parent[b]
            up_s.append(a)
            up_t.append(b)
        return up_s + list(reversed(up_t[:-1]))

    def hop_distance(self, s: int, t: int) -> int:
        return len(self.path(s, t)) - 1

    def distance(self, s: int, t: int) -> float:
        path = self.path(s, t)
        return sum(
            self.weight[a] if self.parent[a] == b else self.weight[b] for a, b in zip(path, path[1:])
        )


def shortest_path_tree(g: WeightedGraph, root: int, restriction: Iterable[int] | None = None) -> RootedTree:
    """
    Dijkstra tree of `g` (or of the subgraph induced by `restriction`) rooted at `root`,
    limited to the reachable vertices
    """
    dist, parent = dijkstra(g, root, restriction)
    parents = {v: p for v, p in parent.items() if dist[v] != float("inf")}
    weights = {v: g.weight(v, p) for v, p in parents.items() if p is not None}
    return RootedTree(root, parents, weights)


@dataclass(frozen=True)
class TreeLabel:
    self_id: int
    l: int
    r: int
    parent_id: int | None = None
    heavy_child_id: int | None = None
    exit_list: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def in_subtree(self, other: "TreeLabel") -> bool:
        """
        True iff `other` lies in the subtree of this label's vertex
        """
        return self.l <= other.r <= self.r

    def encode(self, writer: BitWriter, widths: Widths) -> None:
        writer.write(self.self_id, widths.ident)
        writer.write(self.l, widths.ident)
        writer.write(self.r, widths.ident)
        writer.write_optional(self.parent_id, widths.ident)
        writer.write_optional(self.heavy_child_id, widths.ident)
        writer.write(len(self.exit_list), widths.count)
        for a, b in self.exit_list:
            writer.write(a, widths.ident)
            writer.write(b, widths.ident)

    @classmethod
    def decode(cls, reader: BitReader, widths: Widths) -> "TreeLabel":
        self_id = reader.read(widths.ident)
        l = reader.read(widths.ident)
        r = reader.read(widths.ident)
        parent_id = reader.read_optional(widths.ident)
        heavy = reader.read_optional(widths.ident)
        count = reader.read(widths.count)
        exits = tuple((reader.read(widths.ident), reader.read(widths.ident)) for _ in range(count))
        return cls(self_id, l, r, parent_id, heavy, exits)


def build_tree_labels(tree: RootedTree) -> dict[int, TreeLabel]:
    """
    Heavy-path labels of every tree vertex
    :param tree: the tree
    :return: map vertex -> label
    """
    number: dict[int, int] = {}
    low: dict[int, int] = {}
    size: dict[int, int] = {}
    for i, v in enumerate(tree.postorder()):
        number[v] = i
        kids = tree.children[v]
        low[v] = min((low[c] for c in kids), default=i)
        size[v] = 1 + sum(size[c] for c in kids)

    heavy: dict[int, int | None] = {}
    for v, kids in tree.children.items():
        # largest subtree, smaller id on ties
        heavy[v] = min(kids, key=lambda c: (-size[c], c)) if kids else None

    exits: dict[int, tuple[tuple[int, int], ...]] = {tree.root: ()}
    for v in tree.preorder():
        for c in tree.children[v]:
            exits[c] = exits[v] if heavy[v] == c else exits[v] + ((v, c),)

    return {
        v: TreeLabel(
            self_id=v,
            l=low[v],
            r=number[v],
            parent_id=tree.parent[v],
            heavy_child_id=heavy[v],
            exit_list=exits[v],
        )
        for v in tree.parent
    }


def tree_next_hop(lab_s: TreeLabel, lab_t: TreeLabel) -> int:
    """
    Neighbor of s on the tree path from s to t
    :param lab_s: label of the current vertex
    :param lab_t: label of the target
    :return: id of the next vertex
    """
    if lab_s.self_id == lab_t.self_id:
        raise IncompatibleLabels(f"source and target are both {lab_s.self_id}")
    if not lab_s.in_subtree(lab_t):
        if lab_s.parent_id is None:
            raise IncompatibleLabels(f"{lab_t.self_id} is not in the tree of {lab_s.self_id}")
        return lab_s.parent_id
    for ancestor, nxt in lab_t.exit_list:
        if ancestor == lab_s.self_id:
            return nxt
    if lab_s.heavy_child_id is None:
        raise IncompatibleLabels(f"labels of {lab_s.self_id} and {lab_t.self_id} are inconsistent")
    return lab_s.heavy_child_id
