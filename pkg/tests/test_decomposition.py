#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Test decomposition.py
"""
import unittest
from collections import Counter
from unittest import TestCase

import numpy as np
import pytest

from pyudgrouting.constants import KAPPA_THETA_BUDGET, depth_limit, leaf_threshold
from pyudgrouting.decomposition import build_decomposition, oracle_theta
from pyudgrouting.exceptions import EpsilonTooSmall
from pyudgrouting.geometry import DistanceOracle, build_udg, sites_from_points
from pyudgrouting.harness import generate

P5 = [(0.0, 0.0), (0.8, 0.0), (1.6, 0.0), (2.4, 0.0), (3.2, 0.0)]


class TestPathDecomposition(TestCase):
    g = build_udg(sites_from_points(P5))

    def test_root_portal(self):
        tree = build_decomposition(self.g, 0.5)
        self.assertAlmostEqual(tree.diameter, 3.2)
        self.assertEqual(tree.root.portals, (2,))
        self.assertEqual(tree.root.axis, 0)
        self.assertEqual([tree.nodes[c].vertices for c in tree.root.children], [(0, 1), (3, 4)])
        self.assertEqual(tree.height, 1)
        self.assertIn("port=[2]", tree.dump())

    def test_epsilon_too_small(self):
        with self.assertRaises(EpsilonTooSmall):
            build_decomposition(self.g, 0.3)

    def test_crowded_strip_keeps_portal_net(self):
        g = build_udg(sites_from_points([(0.0, 0.0), (0.5, 0.5), (1.0, 1.0), (0.6, 0.4)]))
        tree = build_decomposition(g, 0.75)
        self.assertFalse(tree.root.is_leaf)
        self.assertEqual(tree.root.separator, (1, 2, 3))
        self.assertEqual(tree.root.portals, (1, 2))
        self.assertEqual([tree.nodes[c].vertices for c in tree.root.children], [(0,), (3,)])
        self.assertAlmostEqual(oracle_theta(tree, 0, 2), DistanceOracle(g).d(0, 2))

    def test_chain(self):
        tree = build_decomposition(self.g, 0.5)
        self.assertEqual([node.id for node in tree.chain(2)], [0])
        self.assertEqual(len(tree.chain(4)), 2)
        self.assertEqual([node.id for node in tree.common_nodes(0, 4)], [0])


class TestDecomposition(TestCase):
    instance = generate("uniform-square", 120, seed=3)

    def test_structure(self):
        g = self.instance.graph
        tree = build_decomposition(g, 0.25)
        owners = Counter(p for node in tree.nodes for p in node.portals)
        self.assertEqual(set(owners), set(range(g.n)))
        self.assertEqual(max(owners.values()), 1)
        for node in tree.nodes:
            self.assertTrue(g.is_connected(node.vertices))
            if node.is_leaf:
                self.assertEqual(set(node.portals), set(node.vertices))
                continue
            parts = [set(node.portals)] + [set(tree.nodes[c].vertices) for c in node.children]
            self.assertEqual(sum(len(p) for p in parts), len(node.vertices))
            self.assertEqual(set().union(*parts), set(node.vertices))
            for c in node.children:
                self.assertLessEqual(3 * len(tree.nodes[c].vertices), 2 * len(node.vertices))

    def test_theta_bounds(self):
        g = self.instance.graph
        oracle = DistanceOracle(g)
        eps = 0.25
        tree = build_decomposition(g, eps, oracle.diameter)
        for s in range(g.n):
            for t in range(g.n):
                theta, d = oracle_theta(tree, s, t), oracle.d(s, t)
                self.assertGreaterEqual(theta, d - 1e-9)
                self.assertLessEqual(theta, d + eps * oracle.diameter + 1e-9)


class TestDenseBlobWithTail(TestCase):
    rng = np.random.default_rng(7)
    points = [(float(x), float(y)) for x, y in rng.uniform(0.0, 0.9, size=(150, 2))]
    points += [(0.9 + 0.8 * i, 0.45) for i in range(39)]
    g = build_udg(sites_from_points(points))
    oracle = DistanceOracle(g)
    epsilon = 0.25

    def test_only_small_regions_become_leaves(self):
        tree = build_decomposition(self.g, self.epsilon, self.oracle.diameter)
        threshold = leaf_threshold(self.epsilon)
        for node in tree.nodes:
            if node.is_leaf:
                self.assertLessEqual(len(node.vertices), threshold)
            else:
                self.assertLess(len(node.portals), len(node.vertices))
        self.assertLessEqual(tree.max_portals, 4 / self.epsilon)
        self.assertLessEqual(tree.height, depth_limit(self.g.n))

    def test_theta_bounds(self):
        tree = build_decomposition(self.g, self.epsilon, self.oracle.diameter)
        slack = self.epsilon * self.oracle.diameter
        for s in range(self.g.n):
            for t in range(self.g.n):
                theta, d = oracle_theta(tree, s, t), self.oracle.d(s, t)
                self.assertGreaterEqual(theta, d - 1e-9)
                self.assertLessEqual(theta, d + slack + 1e-9)


@pytest.mark.slow
class TestOracleSuite(TestCase):
    instances = [generate("uniform-square", 128, seed) for seed in range(7)]
    instances += [generate("snake", 128, seed) for seed in range(3)]

    def test_theta_bounds(self):
        for instance in self.instances:
            g = instance.graph
            oracle = DistanceOracle(g)
            D = oracle.diameter
            for eps in (0.5, 0.25):
                tree = build_decomposition(g, eps, D)
                kappa = 0.0
                for s in range(g.n):
                    for t in range(g.n):
                        theta, d = oracle_theta(tree, s, t), oracle.d(s, t)
                        self.assertGreaterEqual(theta, d - 1e-9)
                        kappa = max(kappa, (theta - d) / (eps * D))
                self.assertLessEqual(kappa, KAPPA_THETA_BUDGET, instance.name)
                self.assertLessEqual(kappa, 1.0 + 1e-9, instance.name)


if __name__ == '__main__':
    unittest.main()
