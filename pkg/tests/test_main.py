#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Test examples/main.py
"""
import argparse
import tempfile
import unittest
from pathlib import Path
from unittest import TestCase
from unittest.mock import patch

from pyudgrouting import utils
from pyudgrouting.constants import PARAMS_SCHEMA
from pyudgrouting.examples import main
from pyudgrouting.harness import generate, stretch_bound


def _bench_args(instance: str, **overrides) -> argparse.Namespace:
    params = {name: fields["default"] for name, fields in PARAMS_SCHEMA.items()}
    params.update(overrides)
    return argparse.Namespace(instance=instance, output_csv=None, output_json=None, **params)


class TestStretchBound(TestCase):
    def test_bounds(self):
        self.assertEqual(stretch_bound("hierarchical", 0.5), 1.5)
        self.assertIsNone(stretch_bound("hierarchical", 0.5, epsilon=0.1))
        self.assertEqual(stretch_bound("lowdiam", epsilon=0.25), 17.0)
        self.assertIsNone(stretch_bound("additive", epsilon=0.5))
        self.assertIsNone(stretch_bound("tree"))


class TestBench(TestCase):
    instance = generate("line-path", 5)

    def test_exit_codes(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = utils.write_instance(self.instance.sites, str(Path(tmp) / "line.txt"))
            dumps = Path(tmp) / "dumps"
            args = _bench_args(path, scheme="spt", dump_dir=str(dumps))
            self.assertEqual(main.bench(args), 0)
            self.assertFalse(dumps.exists())
            with patch("pyudgrouting.examples.main.stretch_bound", return_value=0.5):
                self.assertEqual(main.bench(args), 1)
            self.assertEqual(len(list(dumps.glob("*.json"))), 1)


if __name__ == '__main__':
    unittest.main()
