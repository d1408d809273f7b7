#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Test lowdiam.py
"""
import unittest
from unittest import TestCase

import pytest

from pyudgrouting.encoding import BitReader, BitWriter, Widths
from pyudgrouting.exceptions import InvalidEpsilon
from pyudgrouting.geometry import BroadcastFn, DistanceOracle, assign_ports, build_udg, sites_from_points
from pyudgrouting.harness import generate, simulate
from pyudgrouting.lowdiam import LowDiamLabel, LowDiamScheme, build_rz, sigma_diam

P5 = [(0.0, 0.0), (0.8, 0.0), (1.6, 0.0), (2.4, 0.0), (3.2, 0.0)]


class TestClusterSets(TestCase):
    instance = generate("uniform-square", 90, seed=6)

    def test_path_keeps_every_vertex(self):
        g = build_udg(sites_from_points(P5))
        sets = build_rz(g, 1.0)
        self.assertEqual(sets.R, frozenset(range(5)))
        self.assertEqual(sets.Z, frozenset(range(5)))

    def test_single_cell(self):
        g = build_udg(sites_from_points([(0.0, 0.0), (0.1, 0.1), (0.2, 0.0)]))
        sets = build_rz(g, 1.0)
        self.assertEqual(sets.R, frozenset({0}))
        self.assertEqual(sets.rep, {0: 0, 1: 0, 2: 0})

    def test_invalid_epsilon(self):
        g = build_udg(sites_from_points(P5))
        for eps in (0.0, -0.5, 1.5):
            with self.assertRaises(InvalidEpsilon):
                build_rz(g, eps)

    def test_representative_distance(self):
        g = self.instance.graph
        for eps in (0.25, 0.5):
            sets = build_rz(g, eps)
            for v, r in sets.rep.items():
                self.assertLessEqual(g.distance(v, r), eps)
                self.assertIn(r, sets.R)

    def test_cluster_distances(self):
        g = self.instance.graph
        eps = 0.25
        sets = build_rz(g, eps)
        oracle = DistanceOracle(g)
        z_oracle = DistanceOracle(g, sets.Z)
        for s in sets.R:
            for t in sets.R:
                d, dz = oracle.d(s, t), z_oracle.d(s, t)
                self.assertLessEqual(d, dz + 1e-12)
                self.assertLessEqual(dz, (1 + 12 * eps) * d + 12 * eps)


class TestLowDiamScheme(TestCase):
    def test_stretch(self):
        g = generate("uniform-square", 60, seed=2).graph
        eps = 0.25
        oracle = DistanceOracle(g)
        report = simulate(LowDiamScheme(g, eps), assign_ports(g, 1), oracle, suffix_checks=50)
        self.assertEqual(len(report.rows), g.n * (g.n - 1))
        self.assertLessEqual(report.max_stretch, 1 + 64 * eps)

    def test_neighbor_hop(self):
        g = build_udg(sites_from_points(P5))
        scheme = LowDiamScheme(g, 0.5)
        ports = assign_ports(g, 0)
        port = sigma_diam(scheme.labels[2], scheme.labels[3], BroadcastFn(g, ports, 2))
        self.assertEqual(ports.node(2, port), 3)

    def test_region(self):
        g = build_udg(sites_from_points(P5))
        scheme = LowDiamScheme(g, 1.0, vertices=[2, 3, 4])
        self.assertEqual(set(scheme.labels), {2, 3, 4})
        self.assertEqual(scheme.sizes(), {"R": 3, "Z": 3})

    def test_encode_decode(self):
        g = generate("grid-perturbed", 36, seed=1).graph
        scheme = LowDiamScheme(g, 1.0)
        widths = Widths.for_graph(g.n)
        for v in (0, 17, 35):
            writer = BitWriter()
            scheme.labels[v].encode(writer, widths)
            decoded = LowDiamLabel.decode(BitReader(writer.to_bytes(), writer.bit_length), widths)
            self.assertEqual(decoded, scheme.labels[v])


@pytest.mark.slow
class TestLowDiamSuite(TestCase):
    epsilon = 0.25
    instances = [generate("uniform-square", 120, seed) for seed in range(12)]
    instances += [generate("grid-perturbed", 120, seed) for seed in range(8)]

    def test_stretch(self):
        for instance in self.instances:
            g = instance.graph
            oracle = DistanceOracle(g)
            self.assertLessEqual(oracle.diameter, 20.0)
            report = simulate(LowDiamScheme(g, self.epsilon), assign_ports(g, 1), oracle, suffix_checks=0)
            self.assertEqual(len(report.rows), g.n * (g.n - 1))
            self.assertLessEqual(report.max_stretch, 1 + 64 * self.epsilon, instance.name)

    def test_cluster_distances(self):
        eps = self.epsilon
        for instance in self.instances:
            g = instance.graph
            sets = build_rz(g, eps)
            oracle = DistanceOracle(g)
            z_oracle = DistanceOracle(g, sets.Z)
            for s in sets.R:
                for t in sets.R:
                    d, dz = oracle.d(s, t), z_oracle.d(s, t)
                    self.assertLessEqual(d, dz + 1e-12)
                    self.assertLessEqual(dz, (1 + 12 * eps) * d + 12 * eps, instance.name)


if __name__ == '__main__':
    unittest.main()
