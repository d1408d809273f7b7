#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Test additive.py
"""
import unittest
from unittest import TestCase

import pytest

from pyudgrouting.additive import (
    AdditiveLabel,
    AdditiveScheme,
    PortalEntry,
    Quantizer,
    build_additive_labels,
    theta_c,
)
from pyudgrouting.constants import KAPPA_ADDITIVE_BUDGET
from pyudgrouting.decomposition import oracle_theta
from pyudgrouting.encoding import BitReader, BitWriter, Widths
from pyudgrouting.exceptions import EpsilonTooSmall, NoCommonPortal
from pyudgrouting.geometry import DistanceOracle, assign_ports, build_udg, sites_from_points
from pyudgrouting.harness import generate, simulate
from pyudgrouting.tree_labels import TreeLabel

P5 = [(0.0, 0.0), (0.8, 0.0), (1.6, 0.0), (2.4, 0.0), (3.2, 0.0)]


class TestQuantizer(TestCase):
    def test_floor(self):
        quantize = Quantizer(2.0)
        self.assertEqual(quantize(0.74), 1)
        self.assertEqual(quantize(0.0), 0)
        self.assertAlmostEqual(Quantizer.for_region(5, 0.5, 3.2).c, 3.125)

    def test_floor_inequalities(self):
        quantize = Quantizer(7.3)
        for a, b in [(0.3, 1.7), (2.25, 0.01), (4.0, 4.0), (1.1, 5.9)]:
            self.assertLessEqual(quantize(a) + quantize(b), quantize(a + b))
            self.assertLessEqual(quantize(a + b), quantize(a) + quantize(b) + 1)


class TestAdditiveLabels(TestCase):
    g = build_udg(sites_from_points(P5))

    def test_path_distances(self):
        labels, tree, quantize = build_additive_labels(self.g, 0.5)
        self.assertAlmostEqual(quantize.c, 3.125)
        self.assertEqual(tree.root.portals, (2,))
        d_c = {v: labels[v].entry(2).d_c for v in range(5)}
        self.assertEqual(d_c, {0: 5, 1: 2, 2: 0, 3: 2, 4: 5})

    def test_epsilon_too_small(self):
        with self.assertRaises(EpsilonTooSmall):
            build_additive_labels(self.g, 0.25)

    def test_no_common_portal(self):
        tree_label = TreeLabel(0, 0, 0)
        lab_s = AdditiveLabel(0, (PortalEntry(1, 0, 0, 0, tree_label),))
        lab_t = AdditiveLabel(3, (PortalEntry(2, 0, 0, 0, tree_label),))
        with self.assertRaises(NoCommonPortal):
            theta_c(lab_s, lab_t)

    def test_theta_c_bound(self):
        g = generate("uniform-square", 80, seed=11).graph
        oracle = DistanceOracle(g)
        labels, tree, quantize = build_additive_labels(g, 0.3, D=oracle.diameter)
        for s in range(g.n):
            for t in range(g.n):
                value, p0 = theta_c(labels[s], labels[t])
                self.assertIsNotNone(labels[s].entry(p0))
                self.assertLessEqual(value, quantize.c * oracle_theta(tree, s, t) + 1 + 1e-9)

    def test_encode_decode(self):
        g = generate("grid-perturbed", 36, seed=2).graph
        labels, _, _ = build_additive_labels(g, 0.5)
        widths = Widths.for_graph(g.n)
        writer = BitWriter()
        labels[20].encode(writer, widths)
        self.assertEqual(AdditiveLabel.decode(BitReader(writer.to_bytes(), writer.bit_length), widths), labels[20])


class TestAdditiveScheme(TestCase):
    def test_path_is_exact(self):
        g = build_udg(sites_from_points(P5))
        report = simulate(AdditiveScheme(g, 0.5), assign_ports(g, 3), DistanceOracle(g))
        self.assertAlmostEqual(report.max_stretch, 1.0)

    def test_hop_invariants_and_stretch(self):
        for kind, seed in [("uniform-square", 5), ("snake", 1)]:
            g = generate(kind, 70, seed=seed).graph
            oracle = DistanceOracle(g)
            eps = 0.3
            scheme = AdditiveScheme(g, eps, D=oracle.diameter)
            # every hop is checked against the portal and potential invariants
            report = simulate(scheme, assign_ports(g, 1), oracle, suffix_checks=100)
            self.assertEqual(report.revisits, 0)
            for row in report.rows:
                self.assertLessEqual(row.delta, row.d + 3 * eps * oracle.diameter + 1e-9)


@pytest.mark.slow
class TestAdditiveSuite(TestCase):
    instances = [generate("uniform-square", 128, seed) for seed in range(7)]
    instances += [generate("snake", 128, seed) for seed in range(3)]

    def test_additive_stretch(self):
        eps = 0.25
        for instance in self.instances:
            g = instance.graph
            oracle = DistanceOracle(g)
            D = oracle.diameter
            # the simulation checks the portal, potential and progress invariants at every hop
            report = simulate(AdditiveScheme(g, eps, D=D), assign_ports(g, 1), oracle, suffix_checks=0)
            self.assertEqual(len(report.rows), g.n * (g.n - 1))
            self.assertEqual(report.revisits, 0)
            for row in report.rows:
                self.assertLessEqual(row.delta, row.d + KAPPA_ADDITIVE_BUDGET * eps * D, instance.name)
            self.assertLessEqual(report.constants["kappa_a"], KAPPA_ADDITIVE_BUDGET)


if __name__ == '__main__':
    unittest.main()
