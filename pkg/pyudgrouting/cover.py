#!/usr/bin/env python

"""
Sparse r-covers of the planar spanner.

Centers form a greedy r-net in id order, each cluster is the closed 2r-ball around a center,
and the home cluster of a vertex is the one of the first center within distance r.
Every r-ball then lies in its home cluster and every cluster has diameter at most 4r.
"""

import logging
from dataclasses import dataclass, field

from pyudgrouting.constants import OVERLAP_WARNING
from pyudgrouting.geometry import INF, DistanceOracle, WeightedGraph, dijkstra
from pyudgrouting.spanner import PlanarSpanner

logger = logging.getLogger(__name__)


@dataclass
class SparseCover:
    radius: float
    centers: list[int]
    clusters: list[tuple[int, ...]]
    home: dict[int, int]
    membership: dict[int, list[int]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.membership:
            for i, cluster in enumerate(self.clusters):
                for v in cluster:
                    self.membership.setdefault(v, []).append(i)

    @property
    def overlap(self) -> int:
        return max((len(m) for m in self.membership.values()), default=0)

    def __len__(self) -> int:
        return len(self.clusters)


def build_cover(h: PlanarSpanner | WeightedGraph, r: float) -> SparseCover:
    """
    Net-ball cover of `h`
    :param h: connected spanner
    :param r: cover radius, positive
    :return: the cover
    """
    if r <= 0:
        raise ValueError(f"cover radius must be positive, got {r}")
    graph = h.graph if isinstance(h, PlanarSpanner) else h
    centers: list[int] = []
    clusters: list[tuple[int, ...]] = []
    home: dict[int, int] = {}
    for v in range(graph.n):
        if v in home:
            continue
        index = len(centers)
        dist, _ = dijkstra(graph, v, cutoff=2 * r)
        centers.append(v)
        clusters.append(tuple(sorted(u for u, d in dist.items() if d <= 2 * r)))
        for u, d in dist.items():
            if d <= r and u not in home:
                home[u] = index
    cover = SparseCover(r, centers, clusters, home)
    if cover.overlap > OVERLAP_WARNING:
        logger.warning(f"Cover of radius {r} has overlap {cover.overlap} > {OVERLAP_WARNING}")
    logger.debug(f"Cover of radius {r}: {len(cover)} clusters, overlap {cover.overlap}")
    return cover


def measure_beta(h: PlanarSpanner | WeightedGraph, cover: SparseCover) -> float:
    """
    max over clusters of diam(H_i) / r, distances taken inside each induced cluster
    """
    graph = h.graph if isinstance(h, PlanarSpanner) else h
    beta = 0.0
    for cluster in cover.clusters:
        diam = DistanceOracle(graph, cluster).diameter
        if diam == INF:
            return INF
        beta = max(beta, diam / cover.radius)
    return beta
