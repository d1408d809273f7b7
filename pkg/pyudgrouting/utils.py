#!/usr/bin/env python

"""
Helper functions: instance files, report writers and debug dumps
"""

import csv
import json
import logging
import os
import time
from collections.abc import Iterable, Sequence
from pathlib import Path

from pyudgrouting.constants import COUNTEREXAMPLES_DIR
from pyudgrouting.geometry import Site

logger = logging.getLogger(__name__)


def _with_suffix(output_file_path: str | Path, suffix: str) -> str:
    output_file_path = str(output_file_path)
    if not output_file_path.endswith(suffix):
        output_file_path = output_file_path + suffix
    return str(Path(output_file_path).absolute())


def write_instance(sites: Sequence[Site], output_file_path: str | Path) -> str:
    """
    Writes an instance file: the number of sites on the first line, then one `id x y` line per site.
    Coordinates use the shortest decimal that reads back to the same float.

    :param sites: sites
    :param output_file_path: path of the file
    :return: absolute path of the file
    """
    absolute_path = str(Path(output_file_path).absolute())
    with open(absolute_path, "w") as file:
        file.write(f"{len(sites)}\n")
        for s in sorted(sites, key=lambda s: s.id):
            file.write(f"{s.id} {s.x!r} {s.y!r}\n")
    return absolute_path


def read_instance(file_path: str | Path) -> list[Site]:
    """
    Reads an instance file written by `write_instance`
    :param file_path: path of the file
    :return: sites
    """
    with open(file_path) as file:
        lines = [line.split() for line in file if line.strip()]
    if not lines or len(lines[0]) != 1:
        raise ValueError(f"{file_path}: the first line must hold the number of sites")
    n = int(lines[0][0])
    if len(lines) - 1 != n:
        raise ValueError(f"{file_path}: expected {n} sites, found {len(lines) - 1}")
    sites = []
    for fields in lines[1:]:
        if len(fields) != 3:
            raise ValueError(f"{file_path}: malformed site line {' '.join(fields)!r}")
        sites.append(Site(int(fields[0]), float(fields[1]), float(fields[2])))
    return sites


def output_csv(rows: Iterable[dict], output_file_path: str | Path) -> str:
    """
    Writes dict rows as a csv file, the keys of the first row being the header
    :param rows: rows
    :param output_file_path: path of the file
    :return: absolute path of the file
    """
    absolute_path = _with_suffix(output_file_path, ".csv")
    rows = list(rows)
    with open(absolute_path, "w", newline="") as file:
        if rows:
            writer = csv.DictWriter(file, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    return absolute_path


def output_json(payload: dict, output_file_path: str | Path) -> str:
    absolute_path = _with_suffix(output_file_path, ".json")
    with open(absolute_path, "w") as file:
        json.dump(payload, file, indent=2, sort_keys=True)
        file.write("\n")
    return absolute_path


def output_edges(edges: Iterable[tuple[int, int, float]], output_file_path: str | Path) -> str:
    """
    Edge list dump, one `u v w` line per edge
    """
    absolute_path = str(Path(output_file_path).absolute())
    with open(absolute_path, "w") as file:
        for u, v, w in edges:
            file.write(f"{u} {v} {w!r}\n")
    return absolute_path


def output_clusters(clusters: Sequence[Sequence[int]], output_file_path: str | Path) -> str:
    """
    Cluster membership as csv rows `cluster,vertex`
    """
    return output_csv(
        ({"cluster": i, "vertex": v} for i, cluster in enumerate(clusters) for v in cluster),
        output_file_path,
    )


def dump_counterexample(
    sites: Sequence[Site],
    payload: dict,
    dump_dir: str | Path | None = None,
    name: str = "counterexample",
) -> str:
    """
    Writes a replayable instance file and a json file describing the failure next to it
    :param sites: the instance
    :param payload: failing property, pair, hop trace, ...
    :param dump_dir: where to write, defaults to the user data directory
    :param name: file name stem
    :return: absolute path of the json file
    """
    if dump_dir is None:
        dump_dir = str(COUNTEREXAMPLES_DIR)
        logger.info(f"No dump directory was provided, counterexamples go to {dump_dir}")
    os.makedirs(dump_dir, exist_ok=True)
    stem = Path(dump_dir) / f"{name}-{time.strftime('%Y%m%d-%H%M%S')}-{os.getpid()}"
    instance_path = write_instance(sites, f"{stem}.txt")
    payload = dict(payload, instance=instance_path)
    json_path = output_json(payload, stem)
    logger.warning(f"Counterexample written to {json_path}")
    return json_path
