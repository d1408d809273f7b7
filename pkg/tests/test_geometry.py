#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Test geometry.py
"""
import math
import unittest
from unittest import TestCase

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import bellman_ford

from pyudgrouting.exceptions import DisconnectedGraph, DuplicateId
from pyudgrouting.geometry import (
    DistanceOracle,
    Site,
    assign_ports,
    broadcast,
    build_udg,
    diameter,
    dijkstra,
    sites_from_points,
)
from pyudgrouting.harness import generate

P5 = [(0.0, 0.0), (0.8, 0.0), (1.6, 0.0), (2.4, 0.0), (3.2, 0.0)]


class TestBuildUdg(TestCase):
    def test_boundary_is_an_edge(self):
        g = build_udg(sites_from_points([(0, 0), (1, 0)]))
        self.assertTrue(g.has_edge(0, 1))
        self.assertEqual(g.weight(0, 1), 1.0)

    def test_disconnected(self):
        with self.assertRaises(DisconnectedGraph) as ctx:
            build_udg(sites_from_points([(0, 0), (1.0000001, 0)]))
        self.assertEqual(ctx.exception.components, 2)

    def test_duplicate_id(self):
        with self.assertRaises(DuplicateId):
            build_udg([Site(0, 0.0, 0.0), Site(0, 0.5, 0.0)])

    def test_single_site(self):
        with self.assertRaises(ValueError):
            build_udg([Site(0, 0.0, 0.0)])

    def test_path(self):
        g = build_udg(sites_from_points(P5))
        self.assertEqual(g.m, 4)
        for v in range(4):
            self.assertAlmostEqual(g.weight(v, v + 1), 0.8)
        self.assertFalse(g.has_edge(0, 2))

    def test_symmetry(self):
        g = generate("uniform-square", 60, seed=2).graph
        for u in range(g.n):
            for v, w in g.adjacency[u]:
                self.assertEqual(g.weight(v, u), w)

    def test_edges_match_brute_force(self):
        g = generate("clustered-gaussian", 80, seed=5).graph
        for u in range(g.n):
            for v in range(u + 1, g.n):
                dx = g.sites[u].x - g.sites[v].x
                dy = g.sites[u].y - g.sites[v].y
                self.assertEqual(dx * dx + dy * dy <= 1.0, g.has_edge(u, v))


class TestShortestPaths(TestCase):
    g = build_udg(sites_from_points(P5))

    def test_dijkstra(self):
        dist, parent = dijkstra(self.g, 0)
        for v, expected in enumerate([0.0, 0.8, 1.6, 2.4, 3.2]):
            self.assertAlmostEqual(dist[v], expected)
        self.assertIsNone(parent[0])
        self.assertEqual([parent[v] for v in range(1, 5)], [0, 1, 2, 3])

    def test_dijkstra_restriction(self):
        dist, parent = dijkstra(self.g, 0, restriction=[0, 2, 4])
        self.assertEqual(set(dist), {0, 2, 4})
        self.assertEqual(dist[2], math.inf)
        self.assertEqual(dist[4], math.inf)
        self.assertIsNone(parent[4])

    def test_dijkstra_source_outside_restriction(self):
        with self.assertRaises(ValueError):
            dijkstra(self.g, 1, restriction=[0, 2])

    def test_against_bellman_ford(self):
        g = generate("uniform-square", 50, seed=7).graph
        rows, cols, weights = zip(*[(u, v, w) for u in range(g.n) for v, w in g.adjacency[u]])
        reference = bellman_ford(csr_matrix((weights, (rows, cols)), shape=(g.n, g.n)), directed=True)
        oracle = DistanceOracle(g)
        np.testing.assert_allclose(oracle.distances, reference, atol=1e-9)

    def test_diameter(self):
        self.assertAlmostEqual(diameter(self.g), 3.2)
        two = build_udg(sites_from_points([(0, 0), (0, 1)]))
        self.assertEqual(diameter(two), 1.0)

    def test_diameter_random(self):
        g = generate("uniform-square", 100, seed=1).graph
        oracle = DistanceOracle(g)
        self.assertEqual(diameter(g), float(oracle.distances.max()))
        self.assertLessEqual(diameter(g), g.n - 1)

    def test_oracle_path_and_metric(self):
        g = generate("grid-perturbed", 49, seed=3).graph
        oracle = DistanceOracle(g)
        for s, t in [(0, 48), (6, 42), (10, 30)]:
            path = oracle.path(s, t)
            self.assertEqual((path[0], path[-1]), (s, t))
            length = sum(g.weight(a, b) for a, b in zip(path, path[1:]))
            self.assertAlmostEqual(length, oracle.d(s, t))
            self.assertAlmostEqual(oracle.d(s, t), oracle.d(t, s))
            self.assertGreaterEqual(oracle.d(s, t), g.distance(s, t) - 1e-12)


class TestPorts(TestCase):
    g = build_udg(sites_from_points(P5))

    def test_deterministic(self):
        a = assign_ports(self.g, 11)
        b = assign_ports(self.g, 11)
        self.assertEqual([a.ports_of(v) for v in range(5)], [b.ports_of(v) for v in range(5)])

    def test_degree_one(self):
        ports = assign_ports(self.g, 0)
        self.assertEqual(ports.node(0, 1), 1)
        self.assertEqual(ports.node(0, 0), 0)

    def test_broadcast(self):
        ports = assign_ports(self.g, 4)
        self.assertEqual(broadcast(self.g, ports, 3, 3), 0)
        self.assertEqual(broadcast(self.g, ports, 0, 2), 5)
        p = broadcast(self.g, ports, 1, 0)
        self.assertEqual(ports.node(1, p), 0)

    def test_port_soundness(self):
        g = generate("uniform-square", 70, seed=9).graph
        ports = assign_ports(g, 3)
        for v in range(g.n):
            self.assertEqual(sorted(ports.ports_of(v)), g.neighbors(v))
            for p in range(1, g.degree(v) + 1):
                self.assertEqual(broadcast(g, ports, v, ports.node(v, p)), p)


if __name__ == '__main__':
    unittest.main()
