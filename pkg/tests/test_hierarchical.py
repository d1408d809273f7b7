#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Test hierarchical.py
"""
import tempfile
import unittest
from pathlib import Path
from unittest import TestCase

import pytest

from pyudgrouting.constants import PAPER_BETA
from pyudgrouting.exceptions import CalibrationFailed, InvalidEpsilon, LabelFormatError, NoCommonLevel
from pyudgrouting.geometry import DistanceOracle, assign_ports, build_udg, sites_from_points
from pyudgrouting.harness import generate, select_pairs, simulate
from pyudgrouting.hierarchical import (
    HierarchicalScheme,
    StoredScheme,
    TopLabel,
    calibrate,
    dispatch,
    first_level,
    index_range,
    preprocess,
    read_label_store,
    write_label_store,
)
from pyudgrouting.lowdiam import LowDiamScheme
from pyudgrouting.routing import route

P5 = [(0.0, 0.0), (0.8, 0.0), (1.6, 0.0), (2.4, 0.0), (3.2, 0.0)]


class TestLevels(TestCase):
    def test_first_level(self):
        self.assertEqual(first_level(1.0), 3)
        self.assertEqual(first_level(0.5), 4)

    def test_index_range(self):
        self.assertEqual(index_range(1.0, 3.2), [3, 4])
        self.assertEqual(index_range(0.5, 3.2), [4])

    def test_calibrate(self):
        epsilon, kappa_total = calibrate(1.0, beta=PAPER_BETA, kappa_theta=1.0, kappa_a=32.0)
        self.assertEqual(kappa_total, 2.0**15)
        self.assertEqual(epsilon, 2.0**-15)
        epsilon, kappa_total = calibrate(0.5)
        self.assertEqual(kappa_total, 2048.0)
        self.assertEqual(epsilon, 0.5 / 2048)

    def test_calibrate_lifts_kappa_a(self):
        _, low = calibrate(1.0, beta=4.0, kappa_theta=40.0, kappa_a=1.0)
        _, lifted = calibrate(1.0, beta=4.0, kappa_theta=40.0, kappa_a=41.0)
        self.assertEqual(low, lifted)
        self.assertEqual(low, 8.0 * 2.0 * 41.0 * 4.0)

    def test_calibrate_errors(self):
        with self.assertRaises(InvalidEpsilon):
            calibrate(0.0)
        with self.assertRaises(InvalidEpsilon):
            calibrate(1.5)
        with self.assertRaises(CalibrationFailed):
            calibrate(1.0, beta=float("nan"))


class TestHierarchicalScheme(TestCase):
    g5 = build_udg(sites_from_points(P5))

    def test_path_is_exact(self):
        scheme = HierarchicalScheme(self.g5, epsilon_target=1.0)
        self.assertEqual(scheme.config.levels, [scheme.config.k0])
        report = simulate(scheme, assign_ports(self.g5, 1), DistanceOracle(self.g5))
        self.assertAlmostEqual(report.max_stretch, 1.0)
        self.assertLessEqual(report.max_stretch, 1.0 + scheme.config.epsilon_target)

    def test_raw_mode(self):
        scheme = HierarchicalScheme(self.g5, epsilon=0.5)
        self.assertTrue(scheme.config.raw)
        self.assertEqual(scheme.config.k0, 4)
        with self.assertRaises(InvalidEpsilon):
            HierarchicalScheme(self.g5, epsilon=2.0)

    def test_port_invariance(self):
        g = generate("uniform-square", 50, seed=2).graph
        scheme = HierarchicalScheme(g, epsilon=1.0)
        a, b = assign_ports(g, 1), assign_ports(g, 2)
        for s in range(0, g.n, 5):
            for t in range(g.n):
                self.assertEqual(route(scheme, a, s, t), route(scheme, b, s, t))

    def test_level_monotonicity(self):
        g = generate("grid-perturbed", 64, seed=1).graph
        oracle = DistanceOracle(g)
        scheme = HierarchicalScheme(g, epsilon=1.0, oracle=oracle)
        self.assertGreater(len(scheme.config.levels), 1)
        # per-hop level, cluster and sub-scheme invariants are checked by the simulation
        report = simulate(scheme, assign_ports(g, 3), oracle, suffix_checks=200)
        self.assertEqual(report.revisits, 0)
        self.assertEqual(len(report.rows), g.n * (g.n - 1))
        beta = scheme.config.beta_measured
        for row in report.rows:
            k, _ = scheme.level_of(row.s, row.t)
            self.assertLessEqual(row.d, beta * 2**k)
            if k > scheme.config.k0:
                self.assertGreaterEqual(row.d, 2 ** (k - 3))

    def test_level_k0_uses_lowdiam(self):
        g = generate("grid-perturbed", 64, seed=1).graph
        scheme = HierarchicalScheme(g, epsilon=1.0)
        k0 = scheme.config.k0
        for (k, _), cluster in scheme.clusters.items():
            if k == k0:
                self.assertIsInstance(cluster, LowDiamScheme)
        for lab in scheme.labels.values():
            self.assertEqual(sum(1 for e in lab.entries if e.home), len(scheme.config.levels))

    def test_no_common_level(self):
        scheme = HierarchicalScheme(self.g5, epsilon=0.5)
        lonely = TopLabel(0, scheme.config.k0, ())
        with self.assertRaises(NoCommonLevel):
            dispatch(lonely, scheme.labels[3])

    def test_preprocess(self):
        labels, config = preprocess(sites_from_points(P5), 0.5)
        self.assertEqual(set(labels), set(range(5)))
        self.assertFalse(config.raw)


class TestLabelStore(TestCase):
    def test_round_trip(self):
        g = generate("uniform-square", 40, seed=3).graph
        scheme = HierarchicalScheme(g, epsilon=1.0, seed=7)
        with tempfile.TemporaryDirectory() as tmp:
            path = write_label_store(Path(tmp) / "labels.bin", scheme)
            header, labels, widths = read_label_store(path)
        self.assertEqual(header["n"], g.n)
        self.assertEqual(header["seed"], 7)
        self.assertEqual(header["k0"], scheme.config.k0)
        self.assertEqual(widths, scheme.widths)
        self.assertEqual(labels, scheme.labels)
        stored = StoredScheme(g, labels, widths, header)
        ports = assign_ports(g, 1)
        for s, t in [(0, 39), (5, 12), (30, 2)]:
            self.assertEqual(route(stored, ports, s, t), route(scheme, ports, s, t))

    def test_bad_magic(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "labels.bin"
            path.write_bytes(b"XXXX" + bytes(64))
            with self.assertRaises(LabelFormatError):
                read_label_store(path)


@pytest.mark.slow
class TestEndToEndSuite(TestCase):
    instances = [generate("uniform-square", 128, seed) for seed in range(5)]
    instances += [generate("snake", 128, seed) for seed in range(2)]

    def test_calibrated_stretch(self):
        for instance in self.instances:
            g = instance.graph
            oracle = DistanceOracle(g)
            ports = assign_ports(g, 1)
            for epsilon_target in (1.0, 0.5):
                scheme = HierarchicalScheme(g, epsilon_target=epsilon_target, oracle=oracle)
                report = simulate(scheme, ports, oracle, suffix_checks=0)
                self.assertEqual(len(report.rows), g.n * (g.n - 1))
                self.assertEqual(report.revisits, 0)
                self.assertLessEqual(report.max_stretch, 1.0 + epsilon_target, instance.name)

    def test_sampled_pairs_are_stateless(self):
        g = generate("uniform-square", 128, seed=9).graph
        oracle = DistanceOracle(g)
        scheme = HierarchicalScheme(g, epsilon=1.0, oracle=oracle)
        self.assertGreater(len(scheme.config.levels), 1)
        pairs = select_pairs(g.n, all_pairs_limit=0, pairs=1000, pair_seed=5)
        a, b = assign_ports(g, 1), assign_ports(g, 2)
        # every one of the 1000 routes is re-routed from each of its intermediate vertices
        report = simulate(scheme, a, oracle, pairs=pairs, pair_seed=5, suffix_checks=1000)
        self.assertEqual(report.suffix_checked, 1000)
        for s, t in pairs:
            self.assertEqual(route(scheme, a, s, t), route(scheme, b, s, t))


if __name__ == '__main__':
    unittest.main()
