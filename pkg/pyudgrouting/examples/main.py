#!/usr/bin/env python

"""
A simple Command Line Interface to generate instances, build labels, route and verify
"""

import argparse
import importlib.metadata
import json
import logging
import pprint
import sys

import pyudgrouting.constants as constants
import pyudgrouting.utils as utils
from pyudgrouting.exceptions import RoutingError
from pyudgrouting.geometry import DistanceOracle, assign_ports, build_udg
from pyudgrouting.harness import (
    Instance,
    build_scheme,
    generate,
    measure_constants,
    scaling,
    select_pairs,
    simulate,
    stretch_bound,
    verify,
)
from pyudgrouting.hierarchical import HierarchicalScheme, StoredScheme, calibrate, read_label_store, write_label_store
from pyudgrouting.routing import route, route_length

try:
    __version__ = importlib.metadata.version("pyudgrouting")
except importlib.metadata.PackageNotFoundError:
    __version__ = "unknown"

__header__ = f"""
PyUDGRouting
A simple Command Line Interface for compact routing in unit disk graphs
Version: {__version__}
====================================================
"""

logger = logging.getLogger("pyudgrouting-cli")
logger.setLevel(logging.INFO)
logging.basicConfig()


def _get_params(args) -> dict:
    """
    Helper function to get the params of PARAMS_SCHEMA from argparse as a `dict`
    """
    return {
        arg: getattr(args, arg)
        for arg in args.__dict__
        if arg in constants.PARAMS_SCHEMA and getattr(args, arg) is not None
    }


def _load_instance(path: str) -> Instance:
    sites = utils.read_instance(path)
    return Instance(path, "file", len(sites), 0, {}, sites)


def _parse_generator_params(pairs: list[str]) -> dict:
    params = {}
    for pair in pairs or []:
        key, _, value = pair.partition("=")
        params[key] = int(value) if value.isdigit() else float(value)
    return params


def gen(args) -> int:
    params = _parse_generator_params(args.param)
    instance = generate(args.kind, args.n, seed=args.seed, **params)
    path = utils.write_instance(instance.sites, args.output or f"{instance.name}.txt")
    logger.info(f"Instance {instance.name} written to {path}")
    return 0


def build(args) -> int:
    params = _get_params(args)
    logger.info(f"Running with params\n{pprint.pformat(params, indent=2, sort_dicts=False)}")
    instance = _load_instance(args.instance)
    measured = None
    if args.measured:
        with open(args.measured) as f:
            measured = json.load(f)
    scheme = HierarchicalScheme(
        instance.graph,
        epsilon_target=params["epsilon_target"],
        epsilon=params.get("epsilon"),
        measured=measured,
        oracle=DistanceOracle(instance.graph, progress=True),
        seed=params["seed"],
    )
    path = write_label_store(args.output, scheme)
    logger.info(f"Labels written to {path}, max label {scheme.label_stats()['max_bits']} bits")
    logger.info(f"Configuration\n{pprint.pformat(scheme.config.as_dict(), indent=2, sort_dicts=False)}")
    return 0


def route_cmd(args) -> int:
    instance = _load_instance(args.instance)
    header, labels, widths = read_label_store(args.labels)
    if header["n"] != instance.n:
        logger.error(f"Label store holds {header['n']} labels, the instance has {instance.n} sites")
        return 1
    graph = build_udg(instance.sites)
    scheme = StoredScheme(graph, labels, widths, header)
    trace = route(scheme, assign_ports(graph, args.port_seed), args.s, args.t)
    print(" ".join(str(v) for v in trace))
    logger.info(f"{len(trace) - 1} hops, routed length {route_length(graph, trace):.6f}")
    return 0


def bench(args) -> int:
    params = _get_params(args)
    logger.info(f"Running with params\n{pprint.pformat(params, indent=2, sort_dicts=False)}")
    instance = _load_instance(args.instance)
    graph = instance.graph
    oracle = DistanceOracle(graph, progress=True)
    ports = assign_ports(graph, params["port_seed"])
    try:
        scheme = build_scheme(params["scheme"], graph, oracle, **params)
        pairs = select_pairs(graph.n, params["all_pairs_limit"], params["pairs"], params["pair_seed"])
        report = simulate(
            scheme,
            ports,
            oracle,
            pairs=pairs,
            pair_seed=params["pair_seed"],
            suffix_checks=params["suffix_checks"],
            progress=True,
        )
    except RoutingError as e:
        logger.error(f"{type(e).__name__}: {e}")
        utils.dump_counterexample(
            instance.sites,
            {"property": type(e).__name__, "message": str(e), "trace": getattr(e, "trace", [])},
            params.get("dump_dir"),
        )
        return 1
    summary = report.summary()
    logger.info(f"Timings: {report.timings}")
    if args.output_csv:
        logger.info("Saving per-pair results as a csv file ...")
        logger.info(f"csv file saved to {utils.output_csv(report.csv_rows(), args.output_csv)}")
    if args.output_json:
        logger.info("Saving aggregates as a json file ...")
        logger.info(f"json file saved to {utils.output_json(summary, args.output_json)}")
    else:
        print(json.dumps(summary, indent=2, sort_keys=True))
    bound = stretch_bound(params["scheme"], params["epsilon_target"], params.get("epsilon"))
    if bound is not None and report.max_stretch > bound:
        worst = max(report.rows, key=lambda r: r.stretch)
        message = f"route {worst.s}->{worst.t} has stretch {worst.stretch:.6f} above {bound}"
        logger.error(message)
        utils.dump_counterexample(
            instance.sites,
            {
                "property": "stretch",
                "message": message,
                "pair": [worst.s, worst.t],
                "trace": [int(v) for v in route(scheme, ports, worst.s, worst.t)],
            },
            params.get("dump_dir"),
        )
        return 1
    return 0


def verify_cmd(args) -> int:
    params = _get_params(args)
    instance = _load_instance(args.instance)
    results = verify(
        instance,
        args.components or constants.VERIFY_COMPONENTS,
        epsilon_target=params["epsilon_target"],
        epsilon=params.get("epsilon"),
        port_seed=params["port_seed"],
        dump_dir=params.get("dump_dir"),
    )
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        value = "" if r.value is None else f" ({r.value:.6g})"
        print(f"{status} {r.component}/{r.prop}{value} {r.detail}".rstrip())
        failed += not r.passed
    logger.info(f"{len(results) - failed} passed, {failed} failed")
    return 1 if failed else 0


def scaling_cmd(args) -> int:
    rows, spread = scaling(args.sizes, args.epsilon or 0.5, args.seed)
    payload = {"rows": rows, "spread": spread}
    if args.output_json:
        logger.info(f"json file saved to {utils.output_json(payload, args.output_json)}")
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def calibrate_cmd(args) -> int:
    suite = [generate(kind, args.n, seed) for kind in args.kinds for seed in range(args.count)]
    measured = measure_constants(suite, args.epsilon or 0.25, args.port_seed)
    epsilon, kappa_total = calibrate(args.epsilon_target, **measured)
    payload = dict(measured, epsilon_target=args.epsilon_target, epsilon=epsilon, kappa_total=kappa_total)
    if args.output_json:
        logger.info(f"json file saved to {utils.output_json(measured, args.output_json)}")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _add_schema_params(parser: argparse.ArgumentParser, names: list[str]) -> None:
    """
    Adds the flags of the given PARAMS_SCHEMA entries
    """
    for param in names:
        param_fields = constants.PARAMS_SCHEMA[param]
        parser.add_argument(
            f"--{param.replace('_', '-')}",
            type=param_fields["type"],
            default=param_fields["default"],
            choices=param_fields["options"],
            help=param_fields["description"],
        )


def main():
    print(__header__)
    parser = argparse.ArgumentParser(description="", allow_abbrev=True)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("gen", help="generate an instance file")
    p.add_argument("kind", type=str, choices=constants.GENERATOR_KINDS)
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--param", action="append", help="generator parameter as key=value, e.g. spacing=0.8")
    p.add_argument("-o", "--output", type=str, default=None, help="instance file to write")
    p.set_defaults(func=gen)

    p = subparsers.add_parser("build", help="preprocess an instance into a label store")
    p.add_argument("instance", type=str)
    p.add_argument("-o", "--output", type=str, required=True, help="label store to write")
    p.add_argument("--measured", type=str, default=None, help="json file with measured beta, kappa_theta, kappa_a")
    _add_schema_params(p, ["epsilon_target", "epsilon", "seed"])
    p.set_defaults(func=build)

    p = subparsers.add_parser("route", help="route one packet with stored labels")
    p.add_argument("instance", type=str)
    p.add_argument("labels", type=str)
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    _add_schema_params(p, ["port_seed"])
    p.set_defaults(func=route_cmd)

    p = subparsers.add_parser("bench", help="simulate a scheme and report stretch and label sizes")
    p.add_argument("instance", type=str)
    p.add_argument("-ocsv", "--output-csv", type=str, default=None, help="per-pair csv file")
    p.add_argument("-ojson", "--output-json", type=str, default=None, help="aggregates json file")
    _add_schema_params(
        p,
        [
            "scheme",
            "epsilon_target",
            "epsilon",
            "seed",
            "port_seed",
            "pairs",
            "all_pairs_limit",
            "pair_seed",
            "suffix_checks",
            "dump_dir",
        ],
    )
    p.set_defaults(func=bench)

    p = subparsers.add_parser("verify", help="run the exact property checks")
    p.add_argument("instance", type=str)
    p.add_argument("components", nargs="*", default=[], help=f"any of {constants.VERIFY_COMPONENTS}, all by default")
    _add_schema_params(p, ["epsilon_target", "epsilon", "port_seed", "dump_dir"])
    p.set_defaults(func=verify_cmd)

    p = subparsers.add_parser("scaling", help="label size over growing uniform instances")
    p.add_argument("--sizes", type=int, nargs="+", default=[2**7, 2**8, 2**9, 2**10])
    p.add_argument("-ojson", "--output-json", type=str, default=None)
    _add_schema_params(p, ["epsilon", "seed"])
    p.set_defaults(func=scaling_cmd)

    p = subparsers.add_parser("calibrate", help="measure beta, kappa_theta, kappa_a and the internal epsilon")
    p.add_argument("--kinds", nargs="+", default=["uniform-square", "snake"], choices=constants.GENERATOR_KINDS)
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--count", type=int, default=3, help="instances per kind")
    p.add_argument("-ojson", "--output-json", type=str, default=None, help="measured constants, usable by build --measured")
    _add_schema_params(p, ["epsilon_target", "epsilon", "port_seed"])
    p.set_defaults(func=calibrate_cmd)

    args = parser.parse_args()
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
        logger.setLevel(logging.DEBUG)
    sys.exit(args.func(args))


if __name__ == "__main__":
    main()
