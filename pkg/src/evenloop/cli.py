"""Command-line surface: sampling, exact tables, verification, lab reports.

Exit codes: 0 pass, 1 verification failure, 2 input error, 3 resource cap.
Every stochastic command requires --seed; identical invocations produce
byte-identical output files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import __version__
from ._util import derive_seed
from .exact import CapExceeded, ZeroPartition
from .fk import CoalescenceFailure, FKParams, cftp_samples, exact_fk_distribution
from .graphs import (Graph, GraphError, build_graph, graph_to_json,
                     load_graph, odd_boundary, parse_family_spec,
                     wired_quotient)
from .loops import (beta_to_x, couple_samples, exact_loop_distribution,
                    h_to_y, loop_params, x_to_p)
from .verify import SUITES, run_suites
from .wilson import legal_order_invariance_check, wilson_ust


def _fingerprint(*parts) -> str:
    text = json.dumps([__version__, *parts], sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _wire_family(name: str, params: tuple[int, ...]) -> Graph:
    """Wired truncation of a family graph: build one step larger, glue the
    extra boundary layer into Delta."""
    if name == "path":
        (n,) = params
        return wired_quotient(build_graph("path", n + 2), range(1, n + 1))
    if name == "ladder":
        (n,) = params
        big = build_graph("ladder", n + 2)
        return wired_quotient(big, range(2, 2 * n + 2))
    if name == "grid":
        n, m = params if len(params) == 2 else (params[0], params[0])
        big = build_graph("grid", n + 2, m + 2)
        keep = [i * (m + 2) + j for i in range(1, n + 1) for j in range(1, m + 1)]
        return wired_quotient(big, keep)
    if name == "tree":
        (d,) = params
        big = build_graph("tree", d + 1)
        return wired_quotient(big, range(2 ** (d + 1) - 1))
    raise GraphError(f"family {name!r} has no wired form")


def resolve_graph(spec: str, boundary: str = "free") -> Graph:
    if spec.startswith("family:"):
        rest = spec[len("family:"):]
        if boundary == "wired":
            parts = rest.split(":")
            return _wire_family(parts[0], tuple(int(p) for p in parts[1:]))
        return parse_family_spec(rest)
    g = load_graph(spec)
    if boundary == "wired" and g.wired is None:
        raise GraphError("graph file has no wired vertex; set \"wired\": true")
    return g


def _config_row(g: Graph, cfg) -> str:
    ebits = "".join(str(cfg.edge_bits >> i & 1) for i in range(g.m))
    vbits = "".join(str(cfg.vertex_bits >> v & 1) for v in range(g.n))
    return f"{ebits},{vbits}"


def _write_samples(path, g, rows, meta, fmt):
    if fmt == "json":
        payload = {"meta": meta, "samples": rows}
        with open(path, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=1)
            fh.write("\n")
    else:
        with open(path, "w") as fh:
            for key in sorted(meta):
                fh.write(f"# {key}={meta[key]}\n")
            fh.write("edge_bits,vertex_bits\n")
            for row in rows:
                fh.write(row + "\n")


def cmd_sample(args) -> int:
    g = resolve_graph(args.graph, args.boundary)
    meta = {"command": f"sample {args.model}", "graph": args.graph,
            "boundary": args.boundary, "n": args.n, "seed": args.seed}
    rows = []
    if args.model == "loop":
        x, y = _loop_activities(args)
        params = loop_params(g, x, y, args.boundary)
        meta.update({"x": x, "y": y, "p": x_to_p(x), "p_h": x_to_p(y)})
        B = params.boundary_set
        for eta in couple_samples(g, params, args.seed, args.n):
            if not odd_boundary(g, eta) <= B:
                raise AssertionError("emitted sample violates its support")
            rows.append(_config_row(g, eta))
    elif args.model == "fk":
        p, ph = _fk_weights(args)
        params = FKParams(p, ph, args.boundary)
        meta.update({"p": p, "p_h": ph})
        for omega in cftp_samples(g, params, args.seed, args.n):
            rows.append(_config_row(g, omega))
    elif args.model == "wilson":
        sink = g.wired if args.sink == "auto" and g.wired is not None else int(
            0 if args.sink == "auto" else args.sink)
        meta.update({"sink": sink})
        for i in range(args.n):
            tree = wilson_ust(g, sink, seed=derive_seed(args.seed, i))
            rows.append("".join(
                "1" if e in tree.edge_set() else "0" for e in range(g.m)))
    meta["fingerprint"] = _fingerprint(graph_to_json(g), meta)
    _write_samples(args.out, g, rows, meta, args.format)
    return 0


def _loop_activities(args):
    if args.beta is not None:
        return beta_to_x(args.beta), h_to_y(args.h or 0.0)
    return args.x if args.x is not None else 0.5, args.y or 0.0


def _fk_weights(args):
    if args.beta is not None:
        import math

        return 1 - math.exp(-2 * args.beta), 1 - math.exp(-2 * (args.h or 0.0))
    return args.p if args.p is not None else 0.5, args.ph or 0.0


def cmd_exact(args) -> int:
    g = resolve_graph(args.graph, args.boundary)
    if args.model == "loop":
        x, y = _loop_activities(args)
        dist = exact_loop_distribution(g, loop_params(g, x, y, args.boundary))
        meta = {"model": "loop", "x": x, "y": y, "p": x_to_p(x),
                "p_h": x_to_p(y), "boundary": args.boundary}
    else:
        p, ph = _fk_weights(args)
        dist = exact_fk_distribution(g, FKParams(p, ph, args.boundary))
        meta = {"model": "fk", "p": p, "p_h": ph, "boundary": args.boundary}
    meta["graph"] = args.graph
    meta["fingerprint"] = _fingerprint(graph_to_json(g), meta)
    with open(args.out, "w") as fh:
        for key in sorted(meta):
            fh.write(f"# {key}={meta[key]}\n")
        fh.write("edge_bits,vertex_bits,probability\n")
        for cfg, prob in zip(dist.support, dist.probs):
            fh.write(f"{_config_row(g, cfg)},{float(prob):.17g}\n")
    return 0


def cmd_verify(args) -> int:
    report = run_suites(args.suite, seed=args.seed)
    for sub in report["suites"]:
        status = "pass" if sub["ok"] else "FAIL"
        print(f"[{sub['suite']}] {status} ({sub['checks']} checks)")
        for failure in sub["failures"]:
            print(f"    failure: {failure}")
    return 0 if report["ok"] else 1


def cmd_lab(args) -> int:
    from .families import get_family
    from .lab import (free_vs_wired_ues, loop_convergence, parity_experiment,
                      projection_stabilization)

    family = get_family(args.family)
    if args.experiment == "stabilize":
        report = projection_stabilization(family, args.k, args.nmax)
    elif args.experiment == "dichotomy":
        report = free_vs_wired_ues(family, args.k, args.nmax, args.samples,
                                   args.seed)
    elif args.experiment == "parity":
        report = parity_experiment(args.nmax, args.samples, args.seed)
    elif args.experiment == "converge":
        n_list = list(range(max(2, args.k + 1), args.nmax + 1, 2))
        report = loop_convergence(family, args.k, args.x, args.y, n_list,
                                  args.samples, args.seed)
    report["seed"] = args.seed
    report["fingerprint"] = _fingerprint(report)
    text = json.dumps(report, sort_keys=True, indent=1, default=str)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_popcheck(args) -> int:
    g = resolve_graph(args.graph, "free")
    sink = 0 if args.sink == "auto" else int(args.sink)
    report = legal_order_invariance_check(g, sink, args.seed, args.trials)
    text = json.dumps(report, sort_keys=True, indent=1, default=str)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if report["ok"] else 1


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="evenloop",
        description="Loop measures, random-cluster sampling and spanning "
                    "machinery on finite multigraphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_graph_opts(p, model=True):
        p.add_argument("--graph", required=True,
                       help="family:NAME:P[:Q] or a JSON graph file")
        p.add_argument("--boundary", choices=["free", "wired"], default="free")
        p.add_argument("--x", type=float)
        p.add_argument("--y", type=float)
        p.add_argument("--p", type=float)
        p.add_argument("--ph", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--h", type=float)

    sp = sub.add_parser("sample", help="draw exact samples")
    sp.add_argument("model", choices=["loop", "fk", "wilson"])
    add_graph_opts(sp)
    sp.add_argument("--sink", default="auto")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_sample)

    ep = sub.add_parser("exact", help="write an exact probability table")
    ep.add_argument("model", choices=["loop", "fk"])
    add_graph_opts(ep)
    ep.add_argument("--out", required=True)
    ep.set_defaults(func=cmd_exact)

    vp = sub.add_parser("verify", help="run the invariant suites")
    vp.add_argument("--suite", nargs="+", default=["all"],
                    choices=sorted(SUITES) + ["all"])
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--max-edges", type=int, default=10, dest="max_edges")
    vp.set_defaults(func=cmd_verify)

    lp = sub.add_parser("lab", help="exhaustion experiments")
    lp.add_argument("experiment",
                    choices=["converge", "stabilize", "parity", "dichotomy"])
    lp.add_argument("--family", default="ladder")
    lp.add_argument("--k", type=int, default=2)
    lp.add_argument("--nmax", type=int, default=8)
    lp.add_argument("--samples", type=int, default=10000)
    lp.add_argument("--seed", type=int, required=True)
    lp.add_argument("--x", type=float, default=0.5)
    lp.add_argument("--y", type=float, default=0.0)
    lp.add_argument("--out")
    lp.set_defaults(func=cmd_lab)

    pp = sub.add_parser("popcheck", help="popping-order invariance report")
    pp.add_argument("--graph", required=True)
    pp.add_argument("--sink", default="auto")
    pp.add_argument("--seed", type=int, required=True)
    pp.add_argument("--trials", type=int, default=20)
    pp.add_argument("--out")
    pp.set_defaults(func=cmd_popcheck)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, ZeroPartition, ValueError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (CapExceeded, CoalescenceFailure) as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
