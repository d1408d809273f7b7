#!/usr/bin/env python

"""
Sites, unit disk graphs, shortest paths and the fixed-port access model.

A unit disk graph has an edge between two sites iff their Euclidean distance is at most 1,
the edge weight being that distance. The comparison is an exact `<=` on the squared distance
computed in double precision, so tests should keep a safe margin around the unit boundary.
"""

import heapq
import logging
import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from pyudgrouting.exceptions import DisconnectedGraph, DuplicateId

logger = logging.getLogger(__name__)

INF = math.inf


@dataclass(frozen=True)
class Site:
    """
    A point of the plane carrying a vertex identifier
    """

    id: int
    x: float
    y: float


def sites_from_points(points: Iterable[Sequence[float]]) -> list[Site]:
    """
    Numbers the points 0..n-1 in the given order
    :param points: iterable of (x, y)
    :return: list of sites
    """
    return [Site(i, float(p[0]), float(p[1])) for i, p in enumerate(points)]


def euclidean(a: Site, b: Site) -> float:
    dx = a.x - b.x
    dy = a.y - b.y
    return math.sqrt(dx * dx + dy * dy)


class WeightedGraph:
    """
    An undirected weighted graph on the vertices 0..n-1.

    `adjacency[v]` is the sequence of `(neighbor, weight)` pairs of `v` sorted by neighbor id.
    """

    def __init__(self, n: int, adjacency: Sequence[Sequence[tuple[int, float]]]):
        self.n = n
        self.adjacency: tuple[tuple[tuple[int, float], ...], ...] = tuple(
            tuple(sorted(nbrs)) for nbrs in adjacency
        )
        self._weights = [dict(nbrs) for nbrs in self.adjacency]

    def neighbors(self, v: int) -> list[int]:
        return [u for u, _ in self.adjacency[v]]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._weights[u]

    def weight(self, u: int, v: int) -> float:
        return self._weights[u][v]

    def edges(self) -> list[tuple[int, int, float]]:
        """
        Every edge once, as `(u, v, w)` with `u < v`
        """
        return [(u, v, w) for u in range(self.n) for v, w in self.adjacency[u] if u < v]

    @property
    def m(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    @cached_property
    def nx_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_weighted_edges_from(self.edges())
        return graph

    def is_connected(self, vertices: Iterable[int] | None = None) -> bool:
        if vertices is None:
            return n_components(self) == 1
        vertices = list(vertices)
        return len(vertices) > 0 and nx.is_connected(self.nx_graph.subgraph(vertices))

    def components(self, vertices: Iterable[int]) -> list[list[int]]:
        """
        Connected components of the subgraph induced by `vertices`,
        each sorted, ordered by their smallest vertex
        """
        comps = [sorted(c) for c in nx.connected_components(self.nx_graph.subgraph(vertices))]
        return sorted(comps, key=lambda c: c[0])


class UnitDiskGraph(WeightedGraph):
    """
    The unit disk graph of a set of sites.

    Example usage.
    ```python
    g = build_udg(sites_from_points([(0, 0), (0.8, 0), (1.6, 0)]))
    dist, parent = dijkstra(g, 0)
    ```
    """

    def __init__(self, sites: Sequence[Site], adjacency: Sequence[Sequence[tuple[int, float]]]):
        super().__init__(len(sites), adjacency)
        self.sites: tuple[Site, ...] = tuple(sites)
        self.coords = np.array([(s.x, s.y) for s in self.sites], dtype=np.float64)

    def distance(self, u: int, v: int) -> float:
        return euclidean(self.sites[u], self.sites[v])


def n_components(g: WeightedGraph) -> int:
    rows, cols = [], []
    for u, v, _ in g.edges():
        rows.append(u)
        cols.append(v)
    matrix = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n))
    count, _ = connected_components(matrix, directed=False)
    return int(count)


def _check_ids(sites: Sequence[Site]) -> list[Site]:
    by_id: dict[int, Site] = {}
    for site in sites:
        if site.id in by_id:
            logger.error(f"Duplicate site id {site.id}")
            raise DuplicateId(f"duplicate site id {site.id}")
        by_id[site.id] = site
    n = len(sites)
    if set(by_id) != set(range(n)):
        logger.error(f"Site ids must form the range [0, {n})")
        raise DuplicateId(f"site ids must be distinct and form the range [0, {n})")
    for site in by_id.values():
        if not (math.isfinite(site.x) and math.isfinite(site.y)):
            raise ValueError(f"site {site.id} has non-finite coordinates")
    return [by_id[i] for i in range(n)]


def unit_disk_adjacency(sites: Sequence[Site]) -> list[list[tuple[int, float]]]:
    """
    Neighborhoods of the unit disk graph through a uniform grid of cell side 1:
    only the 3x3 block of cells around a site can hold its neighbors
    :param sites: sites ordered by id
    :return: adjacency lists
    """
    n = len(sites)
    coords = np.array([(s.x, s.y) for s in sites], dtype=np.float64)
    cells = np.floor(coords).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
    for i in range(n):
        buckets[(int(cells[i, 0]), int(cells[i, 1]))].append(i)

    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for i in range(n):
        cx, cy = int(cells[i, 0]), int(cells[i, 1])
        xi, yi = coords[i, 0], coords[i, 1]
        for ox in (-1, 0, 1):
            for oy in (-1, 0, 1):
                for j in buckets.get((cx + ox, cy + oy), ()):
                    if j <= i:
                        continue
                    dx = float(xi - coords[j, 0])
                    dy = float(yi - coords[j, 1])
                    sq = dx * dx + dy * dy
                    if sq <= 1.0:
                        w = math.sqrt(sq)
                        adjacency[i].append((j, w))
                        adjacency[j].append((i, w))
    return adjacency


def build_udg(sites: Sequence[Site]) -> UnitDiskGraph:
    """
    Builds the unit disk graph of the sites and rejects disconnected inputs
    :param sites: at least two sites with ids 0..n-1
    :return: the graph
    """
    if len(sites) < 2:
        raise ValueError("a unit disk graph needs at least two sites")
    ordered = _check_ids(sites)
    graph = UnitDiskGraph(ordered, unit_disk_adjacency(ordered))
    count = n_components(graph)
    if count != 1:
        logger.error(f"The unit disk graph of {graph.n} sites has {count} components")
        raise DisconnectedGraph(f"unit disk graph has {count} components", components=count)
    logger.debug(f"Unit disk graph with n={graph.n}, m={graph.m}")
    return graph


def dijkstra(
    g: WeightedGraph,
    src: int,
    restriction: Iterable[int] | None = None,
    cutoff: float | None = None,
) -> tuple[dict[int, float], dict[int, int | None]]:
    """
    Weighted shortest paths from `src` inside the subgraph induced by `restriction`.

    Ties are resolved by the heap order `(distance, id)` and a vertex keeps the first
    parent reaching its final distance, so the tree is deterministic.

    :param g: the graph
    :param src: source vertex, must belong to `restriction` when given
    :param restriction: optional vertex subset
    :param cutoff: optional radius, vertices farther away are reported at +inf
    :return: `(distances, parents)` over the vertices of the restriction (or all vertices),
             unreachable vertices at +inf with parent None
    """
    allowed = None if restriction is None else set(restriction)
    if allowed is not None and src not in allowed:
        raise ValueError(f"source {src} is not in the restriction")
    dist: dict[int, float] = {src: 0.0}
    parent: dict[int, int | None] = {src: None}
    done: set[int] = set()
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, w in g.adjacency[u]:
            if allowed is not None and v not in allowed:
                continue
            nd = d + w
            if cutoff is not None and nd > cutoff:
                continue
            if nd < dist.get(v, INF):
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    universe = range(g.n) if allowed is None else allowed
    for v in universe:
        if v not in dist:
            dist[v] = INF
            parent[v] = None
    return dist, parent


class DistanceOracle:
    """
    All-pairs shortest paths on a graph or on the subgraph induced by a vertex subset.
    Used by the verification suite and to compute exact diameters.
    """

    def __init__(self, g: WeightedGraph, vertices: Iterable[int] | None = None, progress: bool = False):
        self.vertices: list[int] = sorted(range(g.n) if vertices is None else set(vertices))
        self.index = {v: i for i, v in enumerate(self.vertices)}
        size = len(self.vertices)
        self.distances = np.full((size, size), INF, dtype=np.float64)
        self.parents = np.full((size, size), -1, dtype=np.int64)
        restriction = None if vertices is None else self.vertices
        iterator = self.vertices
        if progress:
            from tqdm import tqdm

            iterator = tqdm(self.vertices, desc="All-pairs shortest paths", unit="src")
        for s in iterator:
            dist, parent = dijkstra(g, s, restriction)
            row = self.index[s]
            for v, d in dist.items():
                self.distances[row, self.index[v]] = d
                p = parent[v]
                self.parents[row, self.index[v]] = -1 if p is None else p

    def d(self, s: int, t: int) -> float:
        return float(self.distances[self.index[s], self.index[t]])

    def path(self, s: int, t: int) -> list[int]:
        """
        Vertices of the stored shortest path from s to t
        """
        if not math.isfinite(self.d(s, t)):
            return []
        row = self.index[s]
        path = [t]
        while path[-1] != s:
            path.append(int(self.parents[row, self.index[path[-1]]]))
        path.reverse()
        return path

    @property
    def diameter(self) -> float:
        return float(self.distances.max()) if len(self.vertices) else 0.0


def diameter(g: WeightedGraph, vertices: Iterable[int] | None = None) -> float:
    """
    Exact diameter `max d(u, v)` of a connected graph (or of an induced connected subgraph)
    """
    return DistanceOracle(g, vertices).diameter


class PortMap:
    """
    The fixed-port numbering: `node(v, p)` is the neighbor behind port p of v, `node(v, 0) = v`.
    Schemes read it through broadcast functions and never modify it.
    """

    def __init__(self, ports: Sequence[Sequence[int]]):
        self._ports: tuple[tuple[int, ...], ...] = tuple(tuple(p) for p in ports)
        self._inverse = [{w: i + 1 for i, w in enumerate(p)} for p in self._ports]

    @property
    def n(self) -> int:
        return len(self._ports)

    def node(self, v: int, p: int) -> int:
        if p == 0:
            return v
        return self._ports[v][p - 1]

    def port(self, v: int, w: int) -> int | None:
        if w == v:
            return 0
        return self._inverse[v].get(w)

    def ports_of(self, v: int) -> tuple[int, ...]:
        return self._ports[v]


def assign_ports(g: WeightedGraph, seed: int) -> PortMap:
    """
    A pseudo-random port permutation per vertex, deterministic in `seed`
    """
    rng = np.random.default_rng(seed)
    ports = []
    for v in range(g.n):
        nbrs = g.neighbors(v)
        order = rng.permutation(len(nbrs))
        ports.append([nbrs[int(i)] for i in order])
    return PortMap(ports)


class BroadcastFn:
    """
    The broadcast function of a vertex v: identifier -> port, or the sentinel n for non-neighbors
    """

    def __init__(self, g: WeightedGraph, ports: PortMap, v: int):
        self.g = g
        self.ports = ports
        self.v = v
        self.sentinel = g.n

    def __call__(self, target_id: int) -> int:
        port = self.ports.port(self.v, target_id)
        return self.sentinel if port is None else port


def broadcast(g: WeightedGraph, ports: PortMap, v: int, target_id: int) -> int:
    return BroadcastFn(g, ports, v)(target_id)
