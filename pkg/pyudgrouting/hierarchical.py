#!/usr/bin/env python

"""
The 1+eps scheme: planar spanner, sparse 2^k-covers for k in I = {k0, ..., max(k0, ceil(log2 4D))},
a sub-scheme per cluster and one label per vertex concatenating the cluster labels.

The packet for t is routed in the cluster of t's home at the smallest level whose home cluster
also holds the current vertex. Level k0 clusters use the low-diameter scheme, higher levels the
additive scheme.
"""

import logging
import math
import struct
from collections.abc import Hashable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from time import time

from pyudgrouting.additive import AdditiveLabel, AdditiveScheme, sigma_add
from pyudgrouting.constants import (
    CALIBRATION_MIN_TOTAL,
    COVER_BETA,
    DEFAULT_KAPPA_ADDITIVE,
    DEFAULT_KAPPA_THETA,
    LABEL_STORE_MAGIC,
    LABEL_STORE_VERSION,
    LOWDIAM_STRETCH_CONSTANT,
)
from pyudgrouting.cover import SparseCover, build_cover, measure_beta
from pyudgrouting.encoding import BitReader, BitWriter, Widths, encoded_bits
from pyudgrouting.exceptions import (
    AssertionViolation,
    CalibrationFailed,
    IncompatibleLabels,
    InvalidEpsilon,
    LabelFormatError,
    NoCommonLevel,
)
from pyudgrouting.geometry import BroadcastFn, DistanceOracle, Site, UnitDiskGraph, build_udg, diameter
from pyudgrouting.lowdiam import LowDiamLabel, LowDiamScheme, sigma_diam
from pyudgrouting.routing import RoutingScheme
from pyudgrouting.spanner import PlanarSpanner, build_spanner

logger = logging.getLogger(__name__)

LOWDIAM_KIND = 0
ADDITIVE_KIND = 1

_HEADER = struct.Struct(">4sHIdddqHHH")
_RECORD = struct.Struct(">III")


def calibrate(
    epsilon_target: float,
    beta: float = COVER_BETA,
    kappa_theta: float = DEFAULT_KAPPA_THETA,
    kappa_a: float = DEFAULT_KAPPA_ADDITIVE,
) -> tuple[float, float]:
    """
    Internal epsilon for a target stretch 1 + epsilon_target.

    kappa = max(64 beta, 2 kappa_a beta) and kappa_total = max(64, 8 kappa), where kappa_a is at least
    kappa_theta + 1. With the loose constants beta = 2^6 and kappa_a <= 2^5 this gives kappa_total = 2^15.

    :param epsilon_target: in (0, 1]
    :param beta: cover diameter constant
    :param kappa_theta: oracle constant of the decomposition
    :param kappa_a: additive stretch constant
    :return: `(epsilon, kappa_total)`
    """
    if not (0.0 < epsilon_target <= 1.0):
        logger.error(f"epsilon_target must be in (0, 1], got {epsilon_target}")
        raise InvalidEpsilon(f"epsilon_target must be in (0, 1], got {epsilon_target}")
    for name, value in (("beta", beta), ("kappa_theta", kappa_theta), ("kappa_a", kappa_a)):
        if not (math.isfinite(value) and value > 0):
            logger.error(f"Calibration constant {name}={value} is not a positive number")
            raise CalibrationFailed(f"{name}={value} is not a positive number")
    kappa_a = max(kappa_a, kappa_theta + 1.0)
    kappa = max(LOWDIAM_STRETCH_CONSTANT * beta, 2.0 * kappa_a * beta)
    kappa_total = max(float(CALIBRATION_MIN_TOTAL), 8.0 * kappa)
    return epsilon_target / kappa_total, kappa_total


def first_level(epsilon: float) -> int:
    """
    k0 = ceil(log2(8 / epsilon))
    """
    return math.ceil(math.log2(8.0 / epsilon))


def index_range(epsilon: float, D: float) -> list[int]:
    k0 = first_level(epsilon)
    top = math.ceil(math.log2(4.0 * D)) if D > 0 else k0
    return list(range(k0, max(k0, top) + 1))


@dataclass
class SchemeConfig:
    epsilon_target: float
    epsilon: float
    kappa_total: float
    k0: int
    levels: list[int]
    beta: float = COVER_BETA
    kappa_theta: float = DEFAULT_KAPPA_THETA
    kappa_a: float = DEFAULT_KAPPA_ADDITIVE
    beta_measured: float | None = None
    raw: bool = False
    seed: int = 0
    lowdiam_constant: int = LOWDIAM_STRETCH_CONSTANT
    fallbacks: list[tuple[int, int]] = field(default_factory=list)

    @property
    def k_max(self) -> int:
        return self.levels[-1]

    def as_dict(self) -> dict:
        return {
            "epsilon_target": self.epsilon_target,
            "epsilon": self.epsilon,
            "kappa_total": self.kappa_total,
            "k0": self.k0,
            "levels": list(self.levels),
            "beta": self.beta,
            "beta_measured": self.beta_measured,
            "kappa_theta": self.kappa_theta,
            "kappa_a": self.kappa_a,
            "raw": self.raw,
            "seed": self.seed,
            "fallbacks": [list(f) for f in self.fallbacks],
        }


@dataclass(frozen=True)
class TopEntry:
    k: int
    i: int
    home: bool
    sublabel: LowDiamLabel | AdditiveLabel

    @property
    def kind(self) -> int:
        return LOWDIAM_KIND if isinstance(self.sublabel, LowDiamLabel) else ADDITIVE_KIND


@dataclass(frozen=True)
class TopLabel:
    """
    The tuples `(k, i, home, sublabel)` of every cluster holding the vertex, sorted by `(k, i)`.
    Levels are written relative to k0 of the run.
    """

    self_id: int
    k0: int
    entries: tuple[TopEntry, ...]

    def encode(self, writer: BitWriter, widths: Widths) -> None:
        writer.write(self.self_id, widths.ident)
        writer.write(len(self.entries), widths.count)
        for e in self.entries:
            writer.write(e.k - self.k0, widths.level)
            writer.write(e.i, widths.cluster)
            writer.write_bool(e.home)
            writer.write(e.kind, 1)
            e.sublabel.encode(writer, widths)

    @classmethod
    def decode(cls, reader: BitReader, widths: Widths, k0: int) -> "TopLabel":
        self_id = reader.read(widths.ident)
        count = reader.read(widths.count)
        entries = []
        for _ in range(count):
            k = reader.read(widths.level) + k0
            i = reader.read(widths.cluster)
            home = reader.read_bool()
            kind = reader.read(1)
            sub_cls = LowDiamLabel if kind == LOWDIAM_KIND else AdditiveLabel
            entries.append(TopEntry(k, i, home, sub_cls.decode(reader, widths)))
        return cls(self_id, k0, tuple(entries))

    def part_bits(self, widths: Widths) -> dict[str, int]:
        """
        Bits spent on low-diameter and on additive sublabels
        """
        parts = {"lowdiam": 0, "additive": 0}
        for e in self.entries:
            parts["lowdiam" if e.kind == LOWDIAM_KIND else "additive"] += encoded_bits(e.sublabel, widths)
        return parts


def dispatch(lab_s: TopLabel, lab_t: TopLabel) -> TopEntry:
    """
    The tuple of s for the smallest level k whose home cluster of t also holds s
    """
    mine = {(e.k, e.i): e for e in lab_s.entries}
    for e in lab_t.entries:
        if e.home and (e.k, e.i) in mine:
            return mine[(e.k, e.i)]
    raise NoCommonLevel(f"no home cluster of {lab_t.self_id} holds {lab_s.self_id}")


def _target_entry(lab_t: TopLabel, k: int, i: int) -> TopEntry:
    for e in lab_t.entries:
        if e.k == k and e.i == i:
            return e
    raise NoCommonLevel(f"{lab_t.self_id} has no tuple for cluster ({k}, {i})")


def sigma(lab_s: TopLabel, lab_t: TopLabel, beta: BroadcastFn) -> int:
    """
    The routing function of the hierarchical scheme
    :param lab_s: label of the current vertex
    :param lab_t: label of the target
    :param beta: broadcast function of the current vertex
    :return: port
    """
    if lab_s.self_id == lab_t.self_id:
        raise IncompatibleLabels(f"source and target are both {lab_s.self_id}")
    entry_s = dispatch(lab_s, lab_t)
    entry_t = _target_entry(lab_t, entry_s.k, entry_s.i)
    if entry_s.kind == LOWDIAM_KIND:
        return sigma_diam(entry_s.sublabel, entry_t.sublabel, beta)
    return sigma_add(entry_s.sublabel, entry_t.sublabel, beta)


def _bit_width(count: int) -> int:
    return max(1, int(count).bit_length())


class HierarchicalScheme(RoutingScheme):
    """
    The hierarchical 1+eps scheme.

    Example usage.
    ```python
    scheme = HierarchicalScheme(g, epsilon_target=0.5)
    trace = route(scheme, assign_ports(g, seed=1), s, t)
    ```

    :param graph: connected unit disk graph
    :param epsilon_target: target stretch 1 + epsilon_target, in (0, 1]
    :param epsilon: internal epsilon, bypasses the calibration when given
    :param measured: measured calibration constants `beta`, `kappa_theta`, `kappa_a`
    :param oracle: all-pairs distances of `graph`, computed when omitted
    :param seed: recorded in the configuration and the label store
    """

    name = "hierarchical"

    def __init__(
        self,
        graph: UnitDiskGraph,
        epsilon_target: float = 1.0,
        epsilon: float | None = None,
        measured: dict[str, float] | None = None,
        oracle: DistanceOracle | None = None,
        seed: int = 0,
    ):
        t0 = time()
        if oracle is None:
            oracle = DistanceOracle(graph)
        self.oracle = oracle
        self.D = oracle.diameter
        measured = measured or {}
        beta = measured.get("beta", COVER_BETA)
        kappa_theta = measured.get("kappa_theta", DEFAULT_KAPPA_THETA)
        kappa_a = measured.get("kappa_a", DEFAULT_KAPPA_ADDITIVE)
        calibrated, kappa_total = calibrate(epsilon_target, beta, kappa_theta, kappa_a)
        if epsilon is not None and not (0.0 < epsilon <= 1.0):
            logger.error(f"epsilon must be in (0, 1], got {epsilon}")
            raise InvalidEpsilon(f"epsilon must be in (0, 1], got {epsilon}")
        internal = calibrated if epsilon is None else epsilon
        self.config = SchemeConfig(
            epsilon_target=epsilon_target,
            epsilon=internal,
            kappa_total=kappa_total if epsilon is None else epsilon_target / epsilon,
            k0=first_level(internal),
            levels=index_range(internal, self.D),
            beta=beta,
            kappa_theta=kappa_theta,
            kappa_a=kappa_a,
            raw=epsilon is not None,
            seed=seed,
        )
        logger.info(
            f"Preprocessing n={graph.n}, D={self.D:.3f}, epsilon={internal:.3g}, levels={self.config.levels}"
        )

        self.spanner: PlanarSpanner = build_spanner(graph, oracle)
        self.covers: dict[int, SparseCover] = {}
        self.clusters: dict[tuple[int, int], RoutingScheme] = {}
        for k in self.config.levels:
            cover = build_cover(self.spanner, float(2**k))
            self.covers[k] = cover
            for i, members in enumerate(cover.clusters):
                self.clusters[(k, i)] = self._cluster_scheme(graph, k, i, members)
        self.config.beta_measured = max(measure_beta(self.spanner, c) for c in self.covers.values())
        logger.info(f"Measured cover constant beta={self.config.beta_measured:.3f}")

        widths = Widths.for_graph(
            graph.n,
            level=_bit_width(self.config.k_max - self.config.k0),
            cluster=_bit_width(max(len(c) for c in self.covers.values()) - 1),
        )
        super().__init__(graph, self._assemble(graph.n), widths)
        self.preprocessing_time = time() - t0
        logger.info(f"Preprocessing time: {self.preprocessing_time:.3f} s")

    def _cluster_scheme(self, graph: UnitDiskGraph, k: int, i: int, members: Sequence[int]) -> RoutingScheme:
        widths = Widths.for_graph(graph.n)
        eps = self.config.epsilon
        if k == self.config.k0:
            return LowDiamScheme(graph, eps, members, widths)
        if len(members) == graph.n:
            D = self.D
        else:
            D = diameter(graph, members)
        if D > 0 and eps > 1.0 / D:
            return AdditiveScheme(graph, eps, members, D, widths)
        logger.debug(f"Cluster ({k}, {i}) has diameter {D:.3f} <= 1/epsilon, using the low-diameter scheme")
        self.config.fallbacks.append((k, i))
        return LowDiamScheme(graph, eps, members, widths)

    def _assemble(self, n: int) -> dict[int, TopLabel]:
        entries: dict[int, list[TopEntry]] = {v: [] for v in range(n)}
        for (k, i), scheme in sorted(self.clusters.items()):
            home = self.covers[k].home
            for v, sub in scheme.labels.items():
                entries[v].append(TopEntry(k, i, home[v] == i, sub))
        return {v: TopLabel(v, self.config.k0, tuple(es)) for v, es in entries.items()}

    @property
    def level_count(self) -> int:
        return len(self.config.levels)

    def sigma(self, lab_s: TopLabel, lab_t: TopLabel, beta: BroadcastFn) -> int:
        return sigma(lab_s, lab_t, beta)

    def level_of(self, current: int, target: int) -> tuple[int, int]:
        """
        `(k(s, t), i)`
        """
        e = dispatch(self.labels[current], self.labels[target])
        return e.k, e.i

    def dispatch_key(self, current: int, target: int) -> Hashable:
        k, i = self.level_of(current, target)
        return k, self.clusters[(k, i)].name

    def progress(self, current: int, target: int) -> tuple:
        k, i = self.level_of(current, target)
        sub = self.clusters[(k, i)].progress(current, target) or ()
        return (k, i) + tuple(sub)

    def check_hop(self, current: int, nxt: int, target: int) -> None:
        if nxt == target:
            return
        k, i = self.level_of(current, target)
        k_next, i_next = self.level_of(nxt, target)
        if k_next > k:
            raise AssertionViolation("level-monotonicity", f"level grew from {k} to {k_next} at hop {current}->{nxt}")
        if k_next == k:
            if i_next != i:
                raise AssertionViolation("cluster-fixed", f"cluster changed from {i} to {i_next} at level {k}")
            self.clusters[(k, i)].check_hop(current, nxt, target)

    def part_stats(self) -> dict[str, int]:
        """
        Maximal bits per label spent on each kind of sublabel
        """
        worst = {"lowdiam": 0, "additive": 0}
        for lab in self.labels.values():
            for key, bits in lab.part_bits(self.widths).items():
                worst[key] = max(worst[key], bits)
        return worst


class StoredScheme(RoutingScheme):
    """
    Hierarchical labels read back from a label store, routable without the preprocessing state
    """

    name = "hierarchical"

    def __init__(self, graph: UnitDiskGraph, labels: dict[int, TopLabel], widths: Widths, header: dict):
        super().__init__(graph, labels, widths)
        self.header = header

    @property
    def level_count(self) -> int:
        return self.header["k_max"] - self.header["k0"] + 1

    def sigma(self, lab_s: TopLabel, lab_t: TopLabel, beta: BroadcastFn) -> int:
        return sigma(lab_s, lab_t, beta)


def preprocess(
    sites: Sequence[Site], epsilon_target: float = 1.0, **kwargs
) -> tuple[dict[int, TopLabel], SchemeConfig]:
    """
    Builds the unit disk graph of the sites and the hierarchical labels
    :param sites: sites with ids 0..n-1
    :param epsilon_target: target stretch 1 + epsilon_target
    :param kwargs: forwarded to `HierarchicalScheme`
    :return: labels and configuration
    """
    scheme = HierarchicalScheme(build_udg(sites), epsilon_target, **kwargs)
    return scheme.labels, scheme.config


def write_label_store(path: str | Path, scheme: HierarchicalScheme) -> Path:
    """
    Binary label store: a versioned big-endian header, then one record per vertex with
    id, bit length, byte length and the canonical encoding of its label
    """
    config = scheme.config
    path = Path(path)
    with open(path, "wb") as f:
        f.write(
            _HEADER.pack(
                LABEL_STORE_MAGIC,
                LABEL_STORE_VERSION,
                scheme.graph.n,
                config.epsilon_target,
                config.epsilon,
                config.kappa_total,
                config.seed,
                config.k0,
                config.k_max,
                scheme.widths.cluster,
            )
        )
        for v in range(scheme.graph.n):
            writer = BitWriter()
            scheme.labels[v].encode(writer, scheme.widths)
            data = writer.to_bytes()
            f.write(_RECORD.pack(v, writer.bit_length, len(data)))
            f.write(data)
    return path


def read_label_store(path: str | Path) -> tuple[dict, dict[int, TopLabel], Widths]:
    """
    Reads a label store written by `write_label_store`
    :return: header, labels and field widths
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise LabelFormatError("label store is shorter than its header")
    magic, version, n, eps_target, eps, kappa_total, seed, k0, k_max, cluster_width = _HEADER.unpack_from(data)
    if magic != LABEL_STORE_MAGIC:
        raise LabelFormatError(f"bad magic {magic!r}")
    if version != LABEL_STORE_VERSION:
        raise LabelFormatError(f"unsupported label store version {version}")
    header = {
        "n": n,
        "epsilon_target": eps_target,
        "epsilon": eps,
        "kappa_total": kappa_total,
        "seed": seed,
        "k0": k0,
        "k_max": k_max,
        "cluster_width": cluster_width,
        "version": version,
    }
    widths = Widths.for_graph(n, level=_bit_width(k_max - k0), cluster=cluster_width)
    labels: dict[int, TopLabel] = {}
    offset = _HEADER.size
    for _ in range(n):
        if offset + _RECORD.size > len(data):
            raise LabelFormatError("truncated label store")
        v, bits, length = _RECORD.unpack_from(data, offset)
        offset += _RECORD.size
        chunk = data[offset : offset + length]
        if len(chunk) != length:
            raise LabelFormatError(f"truncated record of vertex {v}")
        offset += length
        reader = BitReader(chunk, bits)
        labels[v] = TopLabel.decode(reader, widths, k0)
        if reader.position != bits:
            raise LabelFormatError(f"record of vertex {v} has {bits - reader.position} trailing bits")
    return header, labels, widths
