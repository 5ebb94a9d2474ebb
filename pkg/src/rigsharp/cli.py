"""Command-line entry point: ``rigsharp <subcommand> ...``.

Exit codes: 0 success, 1 property does not hold (``check``), 2 config or
usage error, 3 ``check`` could not decide within the budget.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import PRESETS, ConfigError, dumps, preset
from .generators import MSpec, Seed, gen_gnp, gen_gstar, gen_rig, gen_uniform_rig
from .graph import Graph, min_degree
from .properties import (HamiltonBudget, has_perfect_matching, hamilton_solve, is_connected, is_k_connected,
                         maximum_matching)
from .runner import OUTPUT_ENV, load_any, parse_law, run


def _write_out(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_gen(args) -> int:
    seed = Seed(args.seed, args.stream)
    assignment = None
    if args.model == "gnp":
        g = gen_gnp(args.n, args.p, seed)
    elif args.model == "rig":
        assignment, g = gen_rig(args.n, args.m, args.p, seed)
    elif args.model == "urig":
        assignment, g = gen_uniform_rig(args.n, args.m, args.d, seed)
    else:
        law = parse_law(args.law, args.n)
        if not isinstance(law, MSpec):
            raise ConfigError("--law must be constant:, binomial: or poisson:")
        _, g = gen_gstar(args.n, law, seed)
    text = g.to_edgelist()
    if args.with_features and assignment is not None:
        text += "".join(f"{v}: " + " ".join(map(str, assignment.features_of(v))) + "\n" for v in range(args.n))
    _write_out(text, args.output)
    return 0


def _parse_property(spec: str) -> tuple[str, int]:
    name, _, arg = spec.partition(":")
    if name in ("kconn", "mindeg"):
        if not arg.isdigit() or int(arg) < 1:
            raise ConfigError(f"--property {name} needs a positive integer, e.g. {name}:2")
        return name, int(arg)
    if name in ("connected", "matching", "hamilton") and not arg:
        return name, 0
    raise ConfigError(f"unknown --property {spec!r}")


def cmd_check(args) -> int:
    text = sys.stdin.read() if args.graph == "-" else Path(args.graph).read_text(encoding="utf-8")
    g = Graph.from_edgelist(text)
    name, k = _parse_property(args.property)
    cert = None
    if name == "connected":
        ok = is_connected(g)
    elif name == "kconn":
        ok = is_k_connected(g, k)
    elif name == "mindeg":
        ok = min_degree(g) >= k
    elif name == "matching":
        ok = has_perfect_matching(g)
        if ok and args.certificate:
            mate = maximum_matching(g)
            cert = sorted((u, int(mate[u])) for u in range(g.n) if u < mate[u])
    else:
        verdict = hamilton_solve(g, HamiltonBudget(restarts=args.restarts), seed=args.seed)
        print(f"hamilton: {verdict.status}" + (f" ({verdict.reason})" if verdict.reason else ""))
        if verdict.certificate is not None and args.certificate:
            print(" ".join(map(str, verdict.certificate)))
        return {"yes": 0, "no": 1}.get(verdict.status, 3)
    print(f"{args.property}: {'yes' if ok else 'no'}")
    if cert is not None:
        print("\n".join(f"{u} {v}" for u, v in cert))
    return 0 if ok else 1


def _apply_overrides(cfg: dict, args) -> dict:
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    if getattr(args, "samples", None) is not None:
        cfg[cfg["task"]]["samples"] = args.samples
    if getattr(args, "threads", None) is not None:
        cfg["threads"] = args.threads
    if getattr(args, "output", None):
        cfg["output"] = args.output
    return cfg


def _report(result) -> int:
    print(f"wrote {result.directory}")
    print(json.dumps(result.summary, sort_keys=True, default=str))
    return result.status


def cmd_run(args) -> int:
    cfg = load_any(args.config)
    return _report(run(_apply_overrides(cfg, args)))


def cmd_preset(args) -> int:
    if args.name is None:
        print("\n".join(sorted(PRESETS)))
        return 0
    try:
        cfg = preset(args.name)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from exc
    _write_out(dumps(cfg), args.write)
    return 0


def cmd_sweep(args) -> int:
    sec = {"model": args.model, "n": args.n, "k": args.k, "properties": args.property,
           "grid": args.grid, "samples": args.samples if args.samples is not None else 300}
    if args.m is not None:
        sec["m"] = args.m
    elif args.alpha is not None:
        sec["alpha"] = args.alpha
    if args.formula_k is not None:
        sec["formula_k"] = args.formula_k
    cfg = {"name": args.name, "task": "sweep", "seed": args.seed if args.seed is not None else 20261019,
           "sweep": sec, "hamilton": {"restarts": args.restarts}}
    return _report(run(_apply_overrides(cfg, args)))


def cmd_couple(args) -> int:
    sec = {"n": args.n, "samples": args.samples if args.samples is not None else 200}
    if args.m is not None:
        sec["m"] = args.m
    else:
        sec["alpha"] = args.alpha
    if args.p is not None:
        sec["p"] = args.p
    else:
        sec.update(property=args.property, k=args.k, omega=args.omega)
    if args.omega_c is not None:
        sec["omega_c"] = args.omega_c
    if args.regime is not None:
        sec["regime"] = args.regime
    cfg = {"name": args.name, "task": "couple", "seed": args.seed if args.seed is not None else 20261019,
           "couple": sec}
    return _report(run(_apply_overrides(cfg, args)))


def cmd_tv(args) -> int:
    cfg = {"name": args.name, "task": "tv", "seed": 0, "tv": {"n": args.n, "law1": args.law1, "law2": args.law2}}
    if args.output:
        cfg["output"] = args.output
    return _report(run(cfg))


def cmd_bound(args) -> int:
    sec = {"mean": args.mean, "t": args.t}
    if args.poisson:
        sec.update(poisson=True, i=args.i)
    cfg = {"name": args.name, "task": "bound", "seed": 0, "bound": sec}
    if args.output:
        cfg["output"] = args.output
    return _report(run(cfg))


def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="root seed (overrides the config)")
    p.add_argument("--samples", type=int, help="samples per point (overrides the config)")
    p.add_argument("--threads", type=int, help="worker processes; results do not depend on it")
    p.add_argument("--output", help=f"output root (default: ${OUTPUT_ENV} or ./results)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rigsharp", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample one graph and print it as an edge list")
    p.add_argument("model", choices=["gnp", "rig", "urig", "gstar"])
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-m", type=int)
    p.add_argument("-p", type=float)
    p.add_argument("-d", type=int)
    p.add_argument("--law", default="poisson:1.0", help="M for gstar, e.g. binomial:10:0.3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--with-features", action="store_true", help="append '<v>: <features>' lines")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="test a property of an edge-list graph")
    p.add_argument("graph", help="edge-list file, or - for stdin")
    p.add_argument("--property", required=True, help="connected | kconn:K | matching | hamilton | mindeg:K")
    p.add_argument("--certificate", action="store_true")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="estimate a property's probability along a threshold offset grid")
    p.add_argument("--name", default="sweep")
    p.add_argument("--model", choices=["rig", "gnp"], default="rig")
    p.add_argument("-n", type=int, nargs="+", required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("-m", type=int)
    p.add_argument("-k", type=int, default=1)
    p.add_argument("--formula-k", type=int)
    p.add_argument("--property", nargs="+", required=True)
    p.add_argument("--grid", type=float, nargs="+", default=[-6, -4, -2, -1, 0, 1, 2, 4, 6])
    p.add_argument("--restarts", type=int, default=20)
    _run_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("couple", help="run the G(n, p_minus) into RIG coupling")
    p.add_argument("--name", default="couple")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("-m", type=int)
    p.add_argument("-p", type=float)
    p.add_argument("--property", default="connectivity", help="threshold formula used when -p is not given")
    p.add_argument("-k", type=int, default=1)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--omega-c", type=float)
    p.add_argument("--regime", choices=["small", "large"])
    _run_flags(p)
    p.set_defaults(func=cmd_couple)

    p = sub.add_parser("tv", help="exact total variation between two small-graph laws")
    p.add_argument("--name", default="tv")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--law1", required=True, help="constant:T | binomial:N:Q | poisson:L")
    p.add_argument("--law2", required=True, help="as --law1, or gnp:P | gnp:auto")
    p.add_argument("--output")
    p.set_defaults(func=cmd_tv)

    p = sub.add_parser("bound", help="Chernoff tail bounds")
    p.add_argument("--name", default="bound")
    p.add_argument("--mean", type=float, required=True)
    p.add_argument("-t", type=float, nargs="+", required=True)
    p.add_argument("--poisson", action="store_true")
    p.add_argument("-i", type=int, default=1)
    p.add_argument("--output")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("preset", help="list presets or print one as TOML")
    p.add_argument("name", nargs="?")
    p.add_argument("--write", help="write the TOML to this file instead of stdout")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("run", help="execute a TOML config or a manifest.json from an earlier run")
    p.add_argument("config")
    _run_flags(p)
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
