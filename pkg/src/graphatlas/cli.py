"""Command-line interface: preprocess, serve, synth."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import GraphAtlasError


def _add_preprocess(sub):
    p = sub.add_parser("preprocess", help="run the offline pipeline and write a store")
    p.add_argument("--input", required=True, help="input graph file")
    p.add_argument("--format", choices=["edgelist", "ntriples"], default="edgelist")
    p.add_argument("--output", required=True, help="store file to write (e.g. store.gvdb)")
    p.add_argument("--partitions", type=int, default=None, help="partition count (default: ~1 per 50K edges)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--balance", type=float, default=1.1, help="partition balance tolerance")
    p.add_argument("--layout", choices=["force", "circular", "grid"], default="force")
    p.add_argument("--iterations", type=int, default=300, help="force-layout iterations")
    p.add_argument("--edge-length", type=float, default=60.0, help="ideal edge length in px")
    p.add_argument("--gap", type=float, default=40.0, help="spacing between partition boxes in px")
    p.add_argument("--criterion", choices=["degree", "pagerank", "hits"], default="degree")
    p.add_argument("--layers", type=int, default=5)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--keep-fraction", type=float, default=None, help="fraction of nodes kept per layer (default 0.5)")
    g.add_argument("--threshold", type=float, default=None, help="minimum score kept per layer")
    p.add_argument("--report", default=None, help="also write the timing report JSON here")
    return p


def _add_serve(sub):
    p = sub.add_parser("serve", help="serve a store over HTTP")
    p.add_argument("--store", required=True, help="store file written by preprocess")
    p.add_argument("--bind", default="127.0.0.1:8420", help="host:port")
    p.add_argument("--chunk-size", type=int, default=500, help="rows per response chunk")
    p.add_argument("--ui", default=None, help="directory with the built web UI to mount at /")
    return p


def _add_synth(sub):
    p = sub.add_parser("synth", help="write a synthetic graph as an edge list")
    p.add_argument("--kind", choices=["demo", "random", "grid"], default="demo")
    p.add_argument("--nodes", type=int, default=1000)
    p.add_argument("--edges", type=int, default=3000)
    p.add_argument("--rows", type=int, default=100)
    p.add_argument("--cols", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    return p


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="graphatlas", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_preprocess(sub)
    _add_serve(sub)
    _add_synth(sub)
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "preprocess":
            return _cmd_preprocess(args)
        if args.command == "serve":
            return _cmd_serve(args)
        if args.command == "synth":
            return _cmd_synth(args)
    except GraphAtlasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def _cmd_preprocess(args) -> int:
    from .pipeline import preprocess

    _, report = preprocess(
        args.input,
        fmt=args.format,
        output=args.output,
        partitions=args.partitions,
        seed=args.seed,
        balance=args.balance,
        layout=args.layout,
        iterations=args.iterations,
        edge_length=args.edge_length,
        gap=args.gap,
        criterion=args.criterion,
        layers=args.layers,
        keep_fraction=args.keep_fraction,
        threshold=args.threshold,
    )
    print(report.format_table())
    print(f"store written to {args.output}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
        print(f"report written to {args.report}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve
    from .store import Store

    store = Store.load(args.store)
    print(f"serving {store.dataset!r} ({store.layer_count} layers) on http://{args.bind}")
    serve(store, bind=args.bind, chunk_size=args.chunk_size, ui_dir=args.ui)
    return 0


def _cmd_synth(args) -> int:
    from . import synth
    from .model import serialize_edge_list

    if args.kind == "demo":
        g = synth.demo_graph()
    elif args.kind == "random":
        g = synth.connected_random_graph(args.nodes, args.edges, seed=args.seed)
    else:
        g = synth.grid_graph(args.rows, args.cols)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(serialize_edge_list(g))
    print(f"{g.node_count} nodes, {g.edge_count} edges -> {args.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
