"""Execute a validated experiment config and persist its artifacts.

Outputs go to ``<output>/<name>/``: one CSV per task, a plot-data file for
sweeps, and ``manifest.json`` holding the full config, tool version and
wall time.  Every file is written to a temporary name and renamed, so a
crash never leaves a partial CSV behind.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, load, validate
from .coupling import (CouplingParams, chernoff_bound, chernoff_poisson_bound, couple, exact_tv_small, phat_minus,
                       tv_bound)
from .generators import MSpec, Seed
from .graph import is_subgraph
from .properties import HamiltonBudget
from .sweep import curves_csv, curves_plotdata, lemma7_mindeg_check, sweep_many
from .thresholds import ThresholdQuery, threshold_p

OUTPUT_ENV = "RIGSHARP_OUT"


@dataclass
class RunResult:
    status: int
    directory: Path
    files: list[Path] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if x is None else (f"{x:.10g}" if isinstance(x, float) else x) for x in row])
    return buf.getvalue()


def parse_law(spec: str, n: int, other: MSpec | None = None) -> MSpec | float:
    """``constant:t``, ``binomial:N:q``, ``poisson:lam``, ``gnp:p`` or ``gnp:auto``.

    ``gnp:auto`` picks ``1 - exp(-E[M] / C(n,2))`` for the other law's ``M``.
    """
    kind, *args = spec.split(":")
    try:
        if kind == "constant":
            return MSpec.constant(int(args[0]))
        if kind == "binomial":
            return MSpec.binomial(int(args[0]), float(args[1]))
        if kind == "poisson":
            return MSpec.poisson(float(args[0]))
        if kind == "gnp":
            if args[0] == "auto":
                if other is None:
                    raise ValueError("gnp:auto needs an MSpec as the other law")
                return -math.expm1(-other.mean / math.comb(n, 2))
            return float(args[0])
    except (IndexError, ValueError) as exc:
        raise ConfigError(f"bad law {spec!r}: {exc}") from exc
    raise ConfigError(f"bad law {spec!r}: unknown kind {kind!r}")


def _budget(cfg: dict) -> HamiltonBudget:
    return HamiltonBudget(**cfg.get("hamilton", {}))


def _run_sweep(cfg: dict, out: Path) -> tuple[list[Path], dict]:
    sec = cfg["sweep"]
    budget = _budget(cfg)
    curves = []
    kinds = list(sec["properties"])
    for n in sec["n"]:
        base = ThresholdQuery(sec["model"], n, kinds[0], k=sec.get("k", 1), m=sec.get("m"),
                              alpha=sec.get("alpha") if "m" not in sec else None,
                              formula_k=sec.get("formula_k"))
        # properties needing the same min-degree order share samples
        groups: dict[int, list[str]] = {}
        for kd in kinds:
            groups.setdefault(ThresholdQuery(base.model, n, kd, base.k, 0.0, base.m, base.alpha).order, []).append(kd)
        for _, group in sorted(groups.items()):
            curves.extend(sweep_many(base, group, sec["grid"], sec["samples"], cfg["seed"], budget,
                                     workers=cfg.get("threads") or os.cpu_count() or 1))
    csv_path, dat_path = out / "sweep.csv", out / "sweep.dat"
    atomic_write(csv_path, curves_csv(curves))
    atomic_write(dat_path, curves_plotdata(curves))
    skipped = sum(pt.skipped for c in curves for pt in c.points)
    return [csv_path, dat_path], {"curves": len(curves), "skipped_points": skipped,
                                  "exploratory": bool(sec.get("exploratory", False))}


def couple_probability(sec: dict) -> float:
    if "p" in sec:
        return float(sec["p"])
    q = ThresholdQuery("rig", sec["n"], sec["property"], k=sec.get("k", 1), omega=sec.get("omega", 0.0),
                       m=sec.get("m"), alpha=sec.get("alpha") if "m" not in sec else None)
    return threshold_p(q)


def _num_features(sec: dict) -> int:
    return sec["m"] if "m" in sec else round(sec["n"] ** sec["alpha"])


def _run_couple(cfg: dict, out: Path) -> tuple[list[Path], dict]:
    sec = cfg["couple"]
    n, m = sec["n"], _num_features(sec)
    try:
        p = couple_probability(sec)
        params = CouplingParams(n, m, p, sec.get("omega_c"), sec.get("regime"))
    except ValueError as exc:
        raise ConfigError(f"[couple]: {exc}") from exc
    rows, succ, sub_ok = [], 0, 0
    stages = {"count_domination": 0, "bin_po_mismatch": 0}
    for i in range(sec["samples"]):
        o = couple(params, Seed(cfg["seed"], i))
        sub = is_subgraph(o.g_lower, o.g_rig)
        succ += o.success
        sub_ok += o.success and sub
        if o.failure_stage:
            stages[o.failure_stage] += 1
        c = o.counters
        rows.append([i, int(o.success), o.failure_stage or "", o.regime, int(o.regime_supported), c["K"],
                     c.get("Z1", c.get("Z2")), c["T"], o.g_lower.num_edges, o.g_rig.num_edges, int(sub)])
    per_sample = out / "couple.csv"
    atomic_write(per_sample, _csv(["sample", "success", "failure_stage", "regime", "regime_supported", "K",
                                   "count", "T", "lower_edges", "rig_edges", "subgraph"], rows))
    samples = sec["samples"]
    pm = phat_minus(n, m, p, params.omega, params.resolved_regime)
    summary = {
        "n": n, "m": m, "p": p, "regime": params.resolved_regime, "regime_supported": params.regime_supported,
        "omega_c": params.omega, "phat_minus": pm.value, "degenerate": pm.degenerate, "samples": samples,
        "successes": succ, "success_rate": succ / samples if samples else None,
        "subgraph_on_success": sub_ok, **stages,
    }
    agg = out / "couple_summary.csv"
    atomic_write(agg, _csv(list(summary), [list(summary.values())]))
    return [per_sample, agg], summary


def _run_tv(cfg: dict, out: Path) -> tuple[list[Path], dict]:
    sec = cfg["tv"]
    n = sec["n"]
    law1 = parse_law(sec["law1"], n)
    law2 = parse_law(sec["law2"], n, law1 if isinstance(law1, MSpec) else None)
    tv = exact_tv_small(n, law1, law2)
    bound = tv_bound(law1.N, law1.q) if isinstance(law1, MSpec) and law1.kind == "binomial" else None
    path = out / "tv.csv"
    atomic_write(path, _csv(["n", "law1", "law2", "tv", "bound"], [[n, sec["law1"], sec["law2"], tv, bound]]))
    return [path], {"tv": tv, "bound": bound}


def _run_bound(cfg: dict, out: Path) -> tuple[list[Path], dict]:
    sec = cfg["bound"]
    rows = []
    for t in sec["t"]:
        if sec.get("poisson"):
            b = chernoff_poisson_bound(sec["mean"], t, sec.get("i", 1))
            rows.append([sec["mean"], float(t), b.value, b.caveat])
        else:
            rows.append([sec["mean"], float(t), chernoff_bound(sec["mean"], t), ""])
    path = out / "bound.csv"
    atomic_write(path, _csv(["mean", "t", "bound", "caveat"], rows))
    return [path], {"bounds": [r[2] for r in rows]}


def _run_mindeg(cfg: dict, out: Path) -> tuple[list[Path], dict]:
    sec = cfg["mindeg"]
    try:
        rep = lemma7_mindeg_check(sec["n"], sec["m"], sec["omega"], sec["samples"], cfg["seed"])
    except ValueError as exc:
        raise ConfigError(f"[mindeg]: {exc}") from exc
    path = out / "mindeg.csv"
    atomic_write(path, _csv(["sample", "normalized_min_degree"], list(enumerate(rep.normalized))))
    summary = {"p": rep.p, "q05": rep.quantiles.get(0.05), "median": rep.quantiles.get(0.5),
               "q95": rep.quantiles.get(0.95), "flagged": rep.flagged}
    agg = out / "mindeg_summary.csv"
    atomic_write(agg, _csv(list(summary), [list(summary.values())]))
    return [path, agg], summary


_TASKS = {"sweep": _run_sweep, "couple": _run_couple, "tv": _run_tv, "bound": _run_bound, "mindeg": _run_mindeg}


def output_root(cfg: dict) -> Path:
    return Path(cfg.get("output") or os.environ.get(OUTPUT_ENV) or "results")


def run(cfg: dict) -> RunResult:
    """Validate and execute ``cfg``; raises :class:`ConfigError` on a bad config."""
    validate(cfg)
    out = output_root(cfg) / cfg["name"]
    t0 = time.perf_counter()
    files, summary = _TASKS[cfg["task"]](cfg, out)
    manifest = {
        "config": cfg,
        "seed": cfg["seed"],
        "tool_version": __version__,
        "numpy_version": np.__version__,
        "python": platform.python_version(),
        "wall_time_s": round(time.perf_counter() - t0, 3),
        "outputs": [f.name for f in files],
        "summary": summary,
    }
    mpath = out / "manifest.json"
    atomic_write(mpath, json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return RunResult(0, out, files + [mpath], summary)


def load_any(path) -> dict:
    """A TOML config, or a ``manifest.json`` from an earlier run."""
    path = Path(path)
    if path.suffix == ".json":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if "config" not in data:
            raise ConfigError("manifest has no 'config' entry")
        return validate(data["config"])
    return load(path)
