#!/usr/bin/env python

"""
Planar spanner of a unit disk graph: the Delaunay edges of length at most 1.
"""

import logging
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy.spatial import Delaunay, QhullError

from pyudgrouting.constants import SPANNER_RATIO
from pyudgrouting.exceptions import DegenerateInput, SpannerPropertyViolated
from pyudgrouting.geometry import DistanceOracle, UnitDiskGraph, WeightedGraph, n_components

logger = logging.getLogger(__name__)


@dataclass
class PlanarSpanner:
    graph: WeightedGraph
    ratio: float | None = None

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return self.graph.edges()

    @property
    def m(self) -> int:
        return self.graph.m


def _collinear(coords: np.ndarray) -> bool:
    if len(coords) < 3:
        return True
    return np.linalg.matrix_rank(coords - coords[0], tol=1e-12) < 2


def _path_edges(g: UnitDiskGraph) -> set[tuple[int, int]]:
    # the extreme sites of a collinear set are a farthest pair
    a = int(np.argmax(np.linalg.norm(g.coords - g.coords[0], axis=1)))
    b = int(np.argmax(np.linalg.norm(g.coords - g.coords[a], axis=1)))
    projection = (g.coords - g.coords[a]) @ (g.coords[b] - g.coords[a])
    order = sorted(range(g.n), key=lambda v: (projection[v], v))
    return {(min(u, v), max(u, v)) for u, v in zip(order, order[1:]) if g.has_edge(u, v)}


def _delaunay_edges(g: UnitDiskGraph) -> tuple[set[tuple[int, int]], bool]:
    joggled = False
    try:
        tri = Delaunay(g.coords)
    except QhullError:
        logger.warning("Delaunay triangulation failed, retrying with joggled input")
        joggled = True
        try:
            tri = Delaunay(g.coords, qhull_options="QJ")
        except QhullError as e:
            logger.error(f"Delaunay triangulation failed on joggled input: {e}")
            raise DegenerateInput(f"Delaunay triangulation failed: {e}") from e
    edges = set()
    for simplex in tri.simplices:
        a, b, c = (int(x) for x in simplex)
        for u, v in ((a, b), (b, c), (a, c)):
            if g.has_edge(u, v):
                edges.add((min(u, v), max(u, v)))
    # coincident points are left out of the triangulation, attach them to their nearest vertex
    for point, _, nearest in tri.coplanar:
        u, v = int(point), int(nearest)
        if g.has_edge(u, v):
            edges.add((min(u, v), max(u, v)))
    return edges, joggled


def spanner_ratio(h: WeightedGraph, oracle: DistanceOracle) -> float:
    """
    max over pairs s != t of d_H(s, t) / d_G(s, t)
    """
    h_oracle = DistanceOracle(h)
    d_g = oracle.distances
    mask = d_g > 0
    return float(np.max(h_oracle.distances[mask] / d_g[mask])) if mask.any() else 1.0


def build_spanner(g: UnitDiskGraph, oracle: DistanceOracle | None = None) -> PlanarSpanner:
    """
    Delaunay triangulation restricted to unit edges. Collinear inputs get the path of consecutive sites.

    :param g: connected unit disk graph
    :param oracle: all-pairs distances of `g`, when given the 4-spanner ratio is checked
    :return: the spanner
    """
    if _collinear(g.coords):
        edges, joggled = _path_edges(g), False
    else:
        edges, joggled = _delaunay_edges(g)
    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(g.n)]
    for u, v in edges:
        w = g.weight(u, v)
        adjacency[u].append((v, w))
        adjacency[v].append((u, w))
    h = PlanarSpanner(WeightedGraph(g.n, adjacency))
    if n_components(h.graph) != 1:
        logger.error("Restricted Delaunay graph is disconnected")
        raise SpannerPropertyViolated("spanner is disconnected", instance=g)
    if joggled:
        crossings = find_crossings(g, h)
        if crossings:
            logger.error(f"Joggled triangulation has {len(crossings)} crossing edge pairs")
            raise DegenerateInput(f"joggled triangulation is not planar, {crossings[0]} cross")
    if oracle is not None:
        h.ratio = spanner_ratio(h.graph, oracle)
        if h.ratio > SPANNER_RATIO:
            logger.error(f"Spanner ratio {h.ratio:.4f} exceeds {SPANNER_RATIO}")
            raise SpannerPropertyViolated(
                f"spanner ratio {h.ratio} exceeds {SPANNER_RATIO}", ratio=h.ratio, instance=g
            )
        logger.info(f"Planar spanner: m={h.m}, ratio={h.ratio:.4f}")
    return h


def _orientation(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    return np.sign((q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0]))


def find_crossings(g: UnitDiskGraph, h: PlanarSpanner) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """
    Pairs of spanner edges whose segments cross properly, by exhaustive segment-pair tests
    """
    edges = [(u, v) for u, v, _ in h.edges]
    if len(edges) < 2:
        return []
    ends = np.array(edges, dtype=np.int64)
    a = g.coords[ends[:, 0]]
    b = g.coords[ends[:, 1]]
    crossings = []
    for i, (u, v) in enumerate(edges):
        others = slice(i + 1, None)
        o1 = _orientation(a[i], b[i], a[others])
        o2 = _orientation(a[i], b[i], b[others])
        o3 = _orientation(a[others], b[others], a[i])
        o4 = _orientation(a[others], b[others], b[i])
        hits = np.nonzero((o1 * o2 < 0) & (o3 * o4 < 0))[0]
        for j in hits:
            crossings.append(((u, v), edges[i + 1 + int(j)]))
    return crossings


def is_planar(h: PlanarSpanner) -> bool:
    """
    Combinatorial planarity of the spanner's abstract graph
    """
    planar, _ = nx.check_planarity(h.graph.nx_graph)
    return planar
