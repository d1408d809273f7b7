#!/usr/bin/env python

"""
Instance generators, the routing simulator with per-hop invariant checks, and the verification suite.
"""

import logging
import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field
from functools import cached_property
from time import time

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import bellman_ford
from tqdm import tqdm

from pyudgrouting.additive import AdditiveScheme
from pyudgrouting.constants import (
    ALL_PAIRS_LIMIT,
    COVER_BETA,
    DEFAULT_SAMPLE_PAIRS,
    GENERATION_RETRIES,
    GENERATOR_KINDS,
    KAPPA_ADDITIVE_BUDGET,
    KAPPA_THETA_BUDGET,
    LOWDIAM_STRETCH_CONSTANT,
    SPANNER_RATIO,
    STEP_CAP_FACTOR,
    STRETCH_SLACK,
    VERIFY_COMPONENTS,
)
from pyudgrouting.cover import build_cover, measure_beta
from pyudgrouting.decomposition import build_decomposition, oracle_theta
from pyudgrouting.exceptions import AssertionViolation, DisconnectedGraph, GenerationFailed, NonTermination, RoutingError
from pyudgrouting.geometry import (
    DistanceOracle,
    PortMap,
    Site,
    UnitDiskGraph,
    assign_ports,
    broadcast,
    build_udg,
    sites_from_points,
)
from pyudgrouting.hierarchical import HierarchicalScheme
from pyudgrouting.lowdiam import LowDiamScheme, build_rz
from pyudgrouting.routing import RoutingScheme, SptScheme, TreeScheme, route, route_length
from pyudgrouting.spanner import build_spanner, find_crossings, is_planar
from pyudgrouting.tree_labels import build_tree_labels, shortest_path_tree, tree_next_hop
from pyudgrouting.utils import dump_counterexample

logger = logging.getLogger(__name__)


@dataclass
class Instance:
    name: str
    kind: str
    n: int
    seed: int
    params: dict
    sites: list[Site]

    @cached_property
    def graph(self) -> UnitDiskGraph:
        return build_udg(self.sites)


def _uniform_square(rng: np.random.Generator, n: int, side: float) -> np.ndarray:
    return rng.uniform(0.0, side, size=(n, 2))


def _clustered_gaussian(rng: np.random.Generator, n: int, side: float, clusters: int, spread: float) -> np.ndarray:
    centers = rng.uniform(0.0, side, size=(clusters, 2))
    assignment = rng.integers(clusters, size=n)
    return centers[assignment] + rng.normal(0.0, spread, size=(n, 2))


def _grid_perturbed(rng: np.random.Generator, n: int, spacing: float, jitter: float) -> np.ndarray:
    cols = math.ceil(math.sqrt(n))
    idx = np.arange(n)
    base = np.stack([idx % cols, idx // cols], axis=1).astype(np.float64) * spacing
    return base + rng.uniform(-jitter, jitter, size=(n, 2))


def _snake(rng: np.random.Generator, n: int, width: float, gap: float, spacing: float, jitter: float) -> np.ndarray:
    """
    Sites at arc-length `spacing` along a serpentine of rows of length `width` stacked `gap` apart
    """
    period = width + gap
    points = np.empty((n, 2))
    for i in range(n):
        a = i * spacing
        row = math.floor(a / period)
        off = a - row * period
        if off < width:
            x = off if row % 2 == 0 else width - off
            y = row * gap
        else:
            x = width if row % 2 == 0 else 0.0
            y = row * gap + (off - width)
        points[i] = (x, y)
    return points + rng.uniform(-jitter, jitter, size=(n, 2))


def _line_path(n: int, spacing: float) -> np.ndarray:
    return np.array([(round(i * spacing, 12), 0.0) for i in range(n)])


def generate(kind: str, n: int, seed: int = 0, **params) -> Instance:
    """
    Generates a connected instance, deterministic in `(kind, n, seed, params)`.
    Random kinds redraw on a disconnected sample and shrink their area every ten attempts.

    :param kind: one of ::: constants.GENERATOR_KINDS
    :param n: number of sites, at least 2
    :param seed: random seed
    :param params: scale parameters of the generator
    :return: the instance
    """
    if kind not in GENERATOR_KINDS:
        logger.error(f"Invalid generator `{kind}`, available generators are: {GENERATOR_KINDS}")
        raise ValueError(f"Invalid generator {kind}")
    if n < 2:
        raise ValueError("an instance needs at least two sites")
    rng = np.random.default_rng(seed)
    scale = 1.0
    for attempt in range(GENERATION_RETRIES):
        if attempt and attempt % 10 == 0:
            scale *= 0.9
        if kind == "uniform-square":
            side = params.get("side", math.sqrt(n / params.get("density", 3.0))) * scale
            points = _uniform_square(rng, n, side)
        elif kind == "clustered-gaussian":
            side = params.get("side", math.sqrt(n / params.get("density", 3.0))) * scale
            points = _clustered_gaussian(rng, n, side, params.get("clusters", 4), params.get("spread", 1.0) * scale)
        elif kind == "grid-perturbed":
            points = _grid_perturbed(rng, n, params.get("spacing", 0.7) * scale, params.get("jitter", 0.1))
        elif kind == "snake":
            points = _snake(
                rng,
                n,
                params.get("width", 8.0),
                params.get("gap", 1.2),
                params.get("spacing", 0.8) * scale,
                params.get("jitter", 0.02),
            )
        else:
            points = _line_path(n, params.get("spacing", 0.8) * scale)
        sites = sites_from_points(points)
        try:
            build_udg(sites)
        except DisconnectedGraph as e:
            logger.debug(f"Attempt {attempt} of {kind} n={n} seed={seed} is disconnected ({e.components} components)")
            continue
        return Instance(f"{kind}-n{n}-s{seed}", kind, n, seed, dict(params), sites)
    logger.error(f"Could not generate a connected {kind} instance with n={n}, seed={seed}")
    raise GenerationFailed(f"no connected {kind} instance after {GENERATION_RETRIES} attempts")


@dataclass
class PairResult:
    s: int
    t: int
    delta: float
    d: float
    stretch: float
    hops: int


@dataclass
class SimulationReport:
    scheme: str
    n: int
    rows: list[PairResult] = field(default_factory=list)
    revisits: int = 0
    dispatch: dict[str, int] = field(default_factory=dict)
    label_stats: dict[str, float] = field(default_factory=dict)
    constants: dict[str, float | None] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    pair_seed: int | None = None
    suffix_checked: int = 0

    @property
    def max_stretch(self) -> float:
        return max((r.stretch for r in self.rows), default=1.0)

    @property
    def mean_stretch(self) -> float:
        return float(np.mean([r.stretch for r in self.rows])) if self.rows else 1.0

    @property
    def max_hops(self) -> int:
        return max((r.hops for r in self.rows), default=0)

    def summary(self) -> dict:
        """
        Aggregates and measured constants, without the per-pair rows and the wall-clock timings
        """
        return {
            "scheme": self.scheme,
            "n": self.n,
            "pairs": len(self.rows),
            "pair_seed": self.pair_seed,
            "max_stretch": self.max_stretch,
            "mean_stretch": self.mean_stretch,
            "max_hops": self.max_hops,
            "revisits": self.revisits,
            "suffix_checked": self.suffix_checked,
            "dispatch": dict(sorted(self.dispatch.items())),
            "labels": self.label_stats,
            "constants": self.constants,
        }

    def csv_rows(self) -> list[dict]:
        return [asdict(r) for r in self.rows]


def select_pairs(
    n: int,
    all_pairs_limit: int = ALL_PAIRS_LIMIT,
    pairs: int = DEFAULT_SAMPLE_PAIRS,
    pair_seed: int = 0,
) -> list[tuple[int, int]]:
    """
    All ordered pairs of distinct vertices up to `all_pairs_limit` vertices, a seeded sample beyond
    """
    if n <= all_pairs_limit:
        return [(s, t) for s in range(n) for t in range(n) if s != t]
    rng = np.random.default_rng(pair_seed)
    chosen = []
    while len(chosen) < pairs:
        s, t = (int(x) for x in rng.integers(n, size=2))
        if s != t:
            chosen.append((s, t))
    return chosen


def trace_route(scheme: RoutingScheme, ports: PortMap, s: int, t: int, step_cap: int | None = None) -> list[int]:
    """
    `route` with the scheme's hop invariants and strict progress checked at every hop
    """
    if step_cap is None:
        step_cap = STEP_CAP_FACTOR * scheme.graph.n * scheme.level_count
    trace = [s]
    current = s
    previous = scheme.progress(s, t) if s != t else None
    while current != t:
        if len(trace) > step_cap:
            raise NonTermination(s, t, trace)
        nxt = scheme.next_vertex(ports, current, t)
        try:
            scheme.check_hop(current, nxt, t)
        except AssertionViolation as e:
            e.trace = trace + [nxt]
            raise
        if nxt != t:
            measure = scheme.progress(nxt, t)
            if previous is not None and measure is not None and not measure < previous:
                raise AssertionViolation(
                    "progress", f"{measure} does not decrease {previous} at hop {current}->{nxt}", trace + [nxt]
                )
            previous = measure
        trace.append(nxt)
        current = nxt
    return trace


def scheme_constants(scheme: RoutingScheme, rows: Sequence[PairResult]) -> dict[str, float | None]:
    """
    Constants measured from the routes: kappa_a for the additive scheme, kappa for the hierarchical one
    """
    if not rows:
        return {}
    excess = max(r.delta - r.d for r in rows)
    constants: dict[str, float | None] = {"max_excess": excess}
    if isinstance(scheme, AdditiveScheme):
        constants["kappa_a"] = excess / (scheme.epsilon * scheme.diameter)
    elif isinstance(scheme, HierarchicalScheme):
        eps = scheme.config.epsilon
        kappa = 0.0
        for r in rows:
            k, _ = scheme.level_of(r.s, r.t)
            kappa = max(kappa, (r.delta - r.d) / (eps * 2**k))
        constants.update(scheme.config.as_dict())
        constants["kappa"] = kappa
        constants.update({f"max_{key}_bits": v for key, v in scheme.part_stats().items()})
    elif isinstance(scheme, LowDiamScheme):
        constants.update(scheme.sizes())
    return constants


def simulate(
    scheme: RoutingScheme,
    ports: PortMap,
    oracle: DistanceOracle,
    pairs: Iterable[tuple[int, int]] | None = None,
    pair_seed: int = 0,
    suffix_checks: int = 1000,
    step_cap: int | None = None,
    progress: bool = False,
) -> SimulationReport:
    """
    Routes every pair, checks the per-hop invariants and collects the report
    :param scheme: a preprocessed scheme
    :param ports: the port numbering
    :param oracle: exact distances of the scheme's graph
    :param pairs: pairs to route, defaults to `select_pairs`
    :param pair_seed: seed of the pair sample and of the suffix-check sample
    :param suffix_checks: number of routes re-routed from every intermediate vertex
    :param step_cap: hop cap per route
    :param progress: show a progress bar
    :return: the report
    """
    t0 = time()
    graph = scheme.graph
    pairs = select_pairs(graph.n, pair_seed=pair_seed) if pairs is None else [(s, t) for s, t in pairs if s != t]
    rng = np.random.default_rng(pair_seed)
    checked = set(int(i) for i in rng.permutation(len(pairs))[:suffix_checks]) if pairs else set()

    report = SimulationReport(scheme.name, graph.n, pair_seed=pair_seed)
    dispatch: Counter = Counter()
    iterator = tqdm(pairs, desc=f"Routing ({scheme.name})", unit="pair") if progress else pairs
    for index, (s, t) in enumerate(iterator):
        trace = trace_route(scheme, ports, s, t, step_cap)
        for v in trace[:-1]:
            key = scheme.dispatch_key(v, t)
            dispatch[":".join(str(x) for x in key) if isinstance(key, tuple) else str(key)] += 1
        delta = route_length(graph, trace)
        d = oracle.d(s, t)
        stretch = delta / d
        if stretch < 1.0 - STRETCH_SLACK:
            raise AssertionViolation("stretch", f"route {s}->{t} is shorter than the shortest path", trace)
        if len(set(trace)) != len(trace):
            report.revisits += 1
        if index in checked:
            for i in range(1, len(trace) - 1):
                if route(scheme, ports, trace[i], t, step_cap) != trace[i:]:
                    raise AssertionViolation("suffix", f"rerouting {trace[i]}->{t} left the route {s}->{t}", trace)
            report.suffix_checked += 1
        report.rows.append(PairResult(s, t, delta, d, stretch, len(trace) - 1))
    report.timings["simulation"] = time() - t0
    report.dispatch = dict(dispatch)
    report.label_stats = scheme.label_stats()
    report.constants = scheme_constants(scheme, report.rows)
    logger.info(
        f"{scheme.name}: {len(report.rows)} pairs, max stretch {report.max_stretch:.6f}, "
        f"max label {report.label_stats['max_bits']} bits"
    )
    return report


def build_scheme(name: str, graph: UnitDiskGraph, oracle: DistanceOracle | None = None, **kwargs) -> RoutingScheme:
    """
    Builds one of ::: constants.AVAILABLE_SCHEMES.
    `epsilon` is the internal epsilon (raw mode) and `epsilon_target` the calibrated target.
    """
    epsilon = kwargs.get("epsilon")
    if name == "hierarchical":
        return HierarchicalScheme(
            graph,
            epsilon_target=kwargs.get("epsilon_target", 1.0),
            epsilon=epsilon,
            measured=kwargs.get("measured"),
            oracle=oracle,
            seed=kwargs.get("seed", 0),
        )
    if name == "additive":
        return AdditiveScheme(graph, epsilon or 0.5, D=None if oracle is None else oracle.diameter)
    if name == "lowdiam":
        return LowDiamScheme(graph, epsilon or 0.25)
    if name == "tree":
        return TreeScheme(graph)
    if name == "spt":
        return SptScheme(graph)
    raise ValueError(f"Invalid scheme {name}")


def stretch_bound(name: str, epsilon_target: float = 1.0, epsilon: float | None = None) -> float | None:
    """
    Multiplicative stretch a scheme guarantees, None when it only bounds the stretch additively or not at all.
    The hierarchical scheme guarantees 1 + epsilon_target once calibrated, raw mode guarantees nothing.
    """
    if name == "hierarchical":
        return 1.0 + epsilon_target if epsilon is None else None
    if name == "lowdiam":
        return 1.0 + LOWDIAM_STRETCH_CONSTANT * (epsilon or 0.25)
    if name == "spt":
        return 1.0 + STRETCH_SLACK
    return None


@dataclass
class CheckResult:
    component: str
    prop: str
    passed: bool
    value: float | None = None
    detail: str = ""


def _check(results: list[CheckResult], component: str, prop: str, passed: bool, value=None, detail="") -> None:
    results.append(CheckResult(component, prop, bool(passed), None if value is None else float(value), detail))
    if not passed:
        logger.warning(f"{component}/{prop} failed: {detail}")


def _verify_graph(g: UnitDiskGraph, oracle: DistanceOracle, ports: PortMap, results: list[CheckResult]) -> None:
    sym = all(g.has_edge(v, u) and g.weight(v, u) == w for u in range(g.n) for v, w in g.adjacency[u])
    _check(results, "graph", "symmetry", sym)
    coords = g.coords
    brute = 0
    for u in range(g.n):
        for v in range(u + 1, g.n):
            dx = float(coords[u, 0] - coords[v, 0])
            dy = float(coords[u, 1] - coords[v, 1])
            if (dx * dx + dy * dy <= 1.0) != g.has_edge(u, v):
                brute += 1
    _check(results, "graph", "unit-disk-edges", brute == 0, brute, f"{brute} mismatching pairs")
    sound = all(
        broadcast(g, ports, v, ports.node(v, p)) == p for v in range(g.n) for p in range(1, g.degree(v) + 1)
    )
    _check(results, "graph", "port-soundness", sound)
    _check(results, "graph", "diameter-bound", oracle.diameter <= g.n - 1, oracle.diameter)
    rows, cols, weights = zip(*[(u, v, w) for u in range(g.n) for v, w in g.adjacency[u]])
    bf = bellman_ford(csr_matrix((weights, (rows, cols)), shape=(g.n, g.n)), directed=True)
    gap = float(np.max(np.abs(bf - oracle.distances)))
    _check(results, "graph", "bellman-ford", gap <= 1e-9, gap)
    sandwich = all(
        oracle.d(s, t) >= g.distance(s, t) - STRETCH_SLACK for s in range(g.n) for t in range(g.n)
    )
    _check(results, "graph", "metric-sandwich", sandwich)


def _verify_tree(g: UnitDiskGraph, results: list[CheckResult]) -> None:
    tree = shortest_path_tree(g, 0)
    labels = build_tree_labels(tree)
    bound = math.floor(math.log2(len(tree))) if len(tree) > 1 else 0
    longest = max(len(lab.exit_list) for lab in labels.values())
    _check(results, "tree", "exit-list-length", longest <= bound, longest)
    wrong = 0
    for s in tree.vertices:
        for t in tree.vertices:
            if s == t:
                continue
            path = [s]
            while path[-1] != t and len(path) <= len(tree):
                path.append(tree_next_hop(labels[path[-1]], labels[t]))
            wrong += path != tree.path(s, t)
    _check(results, "tree", "exact-paths", wrong == 0, wrong)


def _verify_lowdiam(g, oracle, ports, epsilon, results) -> None:
    sets = build_rz(g, epsilon)
    far = max(g.distance(v, r) for v, r in sets.rep.items())
    _check(results, "lowdiam", "representative-distance", far <= epsilon, far)
    z_oracle = DistanceOracle(g, sets.Z)
    bad = 0
    for s in sets.R:
        for t in sets.R:
            d, dz = oracle.d(s, t), z_oracle.d(s, t)
            if not (d <= dz <= (1 + 12 * epsilon) * d + 12 * epsilon):
                bad += 1
    _check(results, "lowdiam", "cluster-distances", bad == 0, bad, f"{bad} pairs of R outside the bounds")
    report = simulate(LowDiamScheme(g, epsilon), ports, oracle, suffix_checks=0)
    bound = 1 + LOWDIAM_STRETCH_CONSTANT * epsilon
    _check(results, "lowdiam", "stretch", report.max_stretch <= bound, report.max_stretch)


def _verify_spanner(g, oracle, results) -> None:
    h = build_spanner(g, oracle)
    subgraph = all(g.has_edge(u, v) and g.weight(u, v) == w for u, v, w in h.edges)
    _check(results, "spanner", "subgraph", subgraph)
    crossings = find_crossings(g, h)
    _check(results, "spanner", "no-crossings", not crossings, len(crossings), str(crossings[:3]))
    _check(results, "spanner", "edge-count", g.n < 3 or h.m <= 3 * g.n - 6, h.m)
    _check(results, "spanner", "planar", is_planar(h))
    _check(results, "spanner", "ratio", h.ratio <= SPANNER_RATIO, h.ratio)


def _verify_cover(g, oracle, results) -> None:
    h = build_spanner(g, oracle)
    h_oracle = DistanceOracle(h.graph)
    for r in (1.0, 2.0, 4.0):
        cover = build_cover(h, r)
        missing = 0
        for v in range(g.n):
            home = set(cover.clusters[cover.home[v]])
            missing += sum(1 for w in range(g.n) if h_oracle.d(v, w) <= r and w not in home)
        _check(results, "cover", f"ball-in-home(r={r})", missing == 0, missing)
        connected = all(h.graph.is_connected(c) for c in cover.clusters)
        _check(results, "cover", f"connected(r={r})", connected)
        beta = measure_beta(h, cover)
        _check(results, "cover", f"beta(r={r})", beta <= COVER_BETA, beta)
        _check(results, "cover", f"overlap(r={r})", True, cover.overlap)


def _region_epsilon(epsilon: float, D: float) -> float:
    if epsilon > 1.0 / D:
        return epsilon
    logger.info(f"epsilon={epsilon} is not above 1/D={1.0 / D:.4f}, using {2.0 / D:.4f}")
    return 2.0 / D


def _verify_decomposition(g, oracle, epsilon, results) -> None:
    D = oracle.diameter
    epsilon = _region_epsilon(epsilon, D)
    tree = build_decomposition(g, epsilon, D)
    owners = Counter(p for node in tree.nodes for p in node.portals)
    _check(results, "decomposition", "portal-ownership", set(owners) == set(range(g.n)) and max(owners.values()) == 1)
    disjoint = True
    for node in tree.nodes:
        if node.is_leaf:
            disjoint &= set(node.vertices) == set(node.portals)
            continue
        parts = [set(node.portals)] + [set(tree.nodes[c].vertices) for c in node.children]
        union = set().union(*parts)
        disjoint &= sum(len(p) for p in parts) == len(union) and union == set(node.vertices)
    _check(results, "decomposition", "disjoint-parts", disjoint)
    connected = all(g.is_connected(node.vertices) for node in tree.nodes)
    _check(results, "decomposition", "connected-regions", connected)
    _check(results, "decomposition", "height", True, tree.height)
    _check(results, "decomposition", "max-portals", True, tree.max_portals)
    lower, kappa = 0, 0.0
    for s in range(g.n):
        for t in range(g.n):
            theta, d = oracle_theta(tree, s, t), oracle.d(s, t)
            lower += theta < d
            kappa = max(kappa, (theta - d) / (epsilon * D))
    _check(results, "decomposition", "theta-lower-bound", lower == 0, lower)
    _check(results, "decomposition", "theta-upper-bound", kappa <= KAPPA_THETA_BUDGET, kappa)


def _verify_additive(g, oracle, ports, epsilon, results) -> None:
    epsilon = _region_epsilon(epsilon, oracle.diameter)
    scheme = AdditiveScheme(g, epsilon, D=oracle.diameter)
    report = simulate(scheme, ports, oracle)
    _check(results, "additive", "hop-invariants", True, len(report.rows))
    kappa_a = report.constants["kappa_a"]
    _check(results, "additive", "additive-stretch", kappa_a <= KAPPA_ADDITIVE_BUDGET, kappa_a)
    _check(results, "additive", "revisits", report.revisits == 0, report.revisits)


def _verify_hierarchical(g, oracle, ports, port_seed, epsilon_target, epsilon, results) -> None:
    scheme = HierarchicalScheme(g, epsilon_target, epsilon=epsilon, oracle=oracle)
    report = simulate(scheme, ports, oracle)
    if epsilon is None:
        ok = report.max_stretch <= 1 + epsilon_target
        _check(results, "hierarchical", "stretch", ok, report.max_stretch)
    beta = scheme.config.beta_measured
    onion = 0
    for s in range(g.n):
        for t in range(g.n):
            if s == t:
                continue
            k, _ = scheme.level_of(s, t)
            d = oracle.d(s, t)
            if d > beta * 2**k or (k > scheme.config.k0 and d < 2 ** (k - 3)):
                onion += 1
    _check(results, "hierarchical", "level-bounds", onion == 0, onion)
    other = assign_ports(g, port_seed + 1)
    same = all(route(scheme, ports, r.s, r.t) == route(scheme, other, r.s, r.t) for r in report.rows[:1000])
    _check(results, "hierarchical", "port-invariance", same)


def verify(
    instance: Instance,
    components: Sequence[str] = VERIFY_COMPONENTS,
    epsilon_target: float = 1.0,
    epsilon: float | None = None,
    port_seed: int = 1,
    dump_dir: str | None = None,
) -> list[CheckResult]:
    """
    Runs the exact property checks of the named components. Failures are report entries and
    each failing component dumps the instance with its failed properties.

    :param instance: the instance
    :param components: subset of ::: constants.VERIFY_COMPONENTS
    :param epsilon_target: target of the hierarchical scheme
    :param epsilon: internal epsilon, raw mode when given
    :param port_seed: seed of the port numbering
    :param dump_dir: where counterexamples go
    :return: one entry per checked property
    """
    g = instance.graph
    oracle = DistanceOracle(g)
    ports = assign_ports(g, port_seed)
    results: list[CheckResult] = []
    for component in components:
        if component not in VERIFY_COMPONENTS:
            raise ValueError(f"Invalid component {component}, available components are: {VERIFY_COMPONENTS}")
        before = len(results)
        try:
            if component == "graph":
                _verify_graph(g, oracle, ports, results)
            elif component == "tree":
                _verify_tree(g, results)
            elif component == "lowdiam":
                _verify_lowdiam(g, oracle, ports, min(epsilon or 0.25, 1.0), results)
            elif component == "spanner":
                _verify_spanner(g, oracle, results)
            elif component == "cover":
                _verify_cover(g, oracle, results)
            elif component == "decomposition":
                _verify_decomposition(g, oracle, epsilon or 0.25, results)
            elif component == "additive":
                _verify_additive(g, oracle, ports, epsilon or 0.25, results)
            else:
                _verify_hierarchical(g, oracle, ports, port_seed, epsilon_target, epsilon, results)
        except RoutingError as e:
            detail = str(e)
            trace = getattr(e, "trace", None)
            _check(results, component, type(e).__name__, False, detail=detail)
            failed = [asdict(r) for r in results[before:] if not r.passed]
            dump_counterexample(
                instance.sites,
                {"component": component, "failures": failed, "trace": trace or []},
                dump_dir,
                name=f"{instance.name}-{component}",
            )
            continue
        failed = [asdict(r) for r in results[before:] if not r.passed]
        if failed:
            dump_counterexample(
                instance.sites, {"component": component, "failures": failed}, dump_dir, name=f"{instance.name}-{component}"
            )
    return results


def measure_constants(instances: Sequence[Instance], epsilon: float = 0.25, port_seed: int = 1) -> dict[str, float]:
    """
    beta, kappa_theta and kappa_a measured over a calibration suite
    """
    beta = kappa_theta = kappa_a = 0.0
    for instance in instances:
        g = instance.graph
        oracle = DistanceOracle(g)
        D = oracle.diameter
        eps = _region_epsilon(epsilon, D)
        h = build_spanner(g, oracle)
        for k in range(0, max(1, math.ceil(math.log2(4 * D))) + 1):
            beta = max(beta, measure_beta(h, build_cover(h, float(2**k))))
        scheme = AdditiveScheme(g, eps, D=D)
        for s in range(g.n):
            for t in range(g.n):
                kappa_theta = max(kappa_theta, (oracle_theta(scheme.decomposition, s, t) - oracle.d(s, t)) / (eps * D))
        report = simulate(scheme, assign_ports(g, port_seed), oracle, suffix_checks=0)
        kappa_a = max(kappa_a, report.constants["kappa_a"])
        logger.info(f"{instance.name}: beta={beta:.3f}, kappa_theta={kappa_theta:.3f}, kappa_a={kappa_a:.3f}")
    return {"beta": beta, "kappa_theta": kappa_theta, "kappa_a": kappa_a}


def label_size_fit(max_bits: int, n: int, D: float) -> float:
    """
    max_bits / (log2 D * log2(n)^3 / log2 log2 n)
    """
    log_n = math.log2(n)
    return max_bits / (max(math.log2(D), 1.0) * log_n**3 / math.log2(log_n))


def scaling(
    sizes: Sequence[int] = (2**7, 2**8, 2**9, 2**10),
    epsilon: float = 0.5,
    seed: int = 0,
) -> tuple[list[dict], float]:
    """
    Label sizes of the hierarchical scheme over growing uniform instances
    :return: one row per size and the spread max(kappa) / min(kappa)
    """
    rows = []
    for n in sizes:
        instance = generate("uniform-square", n, seed)
        oracle = DistanceOracle(instance.graph, progress=True)
        scheme = HierarchicalScheme(instance.graph, epsilon=epsilon, oracle=oracle, seed=seed)
        stats = scheme.label_stats()
        kappa = label_size_fit(stats["max_bits"], n, oracle.diameter)
        rows.append({"n": n, "D": oracle.diameter, "max_bits": stats["max_bits"], "kappa": kappa})
        logger.info(f"n={n}: D={oracle.diameter:.3f}, max label {stats['max_bits']} bits, kappa={kappa:.4f}")
    kappas = [r["kappa"] for r in rows]
    spread = max(kappas) / min(kappas)
    if spread > 2.0:
        logger.warning(f"Label size fit spread {spread:.3f} exceeds 2")
    return rows, spread
