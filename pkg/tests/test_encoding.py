#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Test encoding.py
"""
import unittest
from unittest import TestCase

from pyudgrouting.encoding import BitReader, BitWriter, Widths, count_width, distance_width, encoded_bits, id_width
from pyudgrouting.exceptions import LabelFormatError
from pyudgrouting.tree_labels import TreeLabel


class TestWidths(TestCase):
    def test_id_width(self):
        self.assertEqual(id_width(1), 1)
        self.assertEqual(id_width(2), 1)
        self.assertEqual(id_width(5), 3)
        self.assertEqual(id_width(1024), 10)

    def test_for_graph(self):
        widths = Widths.for_graph(5, level=2)
        self.assertEqual(widths.ident, 3)
        self.assertEqual(widths.count, count_width(5))
        self.assertEqual(widths.count, 3)
        self.assertEqual(widths.distance, distance_width(5))
        self.assertEqual(widths.distance, 5)
        self.assertEqual(widths.level, 2)
        self.assertEqual(widths.cluster, 1)


class TestBits(TestCase):
    def test_write_read(self):
        writer = BitWriter()
        writer.write(5, 3)
        writer.write_bool(True)
        writer.write_optional(None, 4)
        writer.write_optional(9, 4)
        self.assertEqual(writer.bit_length, 13)
        data = writer.to_bytes()
        self.assertEqual(len(data), 2)
        reader = BitReader(data, writer.bit_length)
        self.assertEqual(reader.read(3), 5)
        self.assertTrue(reader.read_bool())
        self.assertIsNone(reader.read_optional(4))
        self.assertEqual(reader.read_optional(4), 9)
        self.assertEqual(reader.position, 13)
        self.assertTrue(reader.at_padding())

    def test_overflow(self):
        writer = BitWriter()
        with self.assertRaises(LabelFormatError):
            writer.write(8, 3)
        with self.assertRaises(LabelFormatError):
            writer.write(-1, 3)

    def test_truncated(self):
        writer = BitWriter()
        writer.write(3, 2)
        reader = BitReader(writer.to_bytes(), writer.bit_length)
        reader.read(2)
        with self.assertRaises(LabelFormatError):
            reader.read(1)

    def test_encoded_bits(self):
        widths = Widths.for_graph(8)
        label = TreeLabel(3, 0, 4, parent_id=1, heavy_child_id=None, exit_list=((1, 3),))
        # id, l, r: 3 x 3, parent: 1 + 3, heavy: 1, count: 4, one pair: 6
        self.assertEqual(encoded_bits(label, widths), 9 + 4 + 1 + 4 + 6)


if __name__ == '__main__':
    unittest.main()
