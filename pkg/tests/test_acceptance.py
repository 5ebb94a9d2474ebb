"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even
under output capture) or ``python tests/test_acceptance.py``.

Criteria 1-4 build their CSV in memory; 5-8 go through the experiment
runner and read back the files it writes, so criterion 9 compares the
artifacts a user would actually get.
"""
from __future__ import annotations

import copy
import csv
import io
import math
import time

import numpy as np
import pytest

from oracles import (atlas_graphs, hamiltonian_oracle, k_connected_by_removal, perfect_matching_by_pairing,
                     random_graphs)
from rigsharp import runner
from rigsharp.config import preset
from rigsharp.coupling import chernoff_bound, exact_tv_small, tv_bound
from rigsharp.generators import MSpec, Seed
from rigsharp.properties import exact_hamilton_verdict, has_perfect_matching, is_k_connected, is_k_connected_flow
from rigsharp.sweep import crossing_from_points, isotonic

SEED = 20261019
FIRST_RUN: dict[int, dict[str, bytes]] = {}


def _line(capsys, num: int, ok: bool, title: str, detail: str, elapsed: float, budget: float | None) -> None:
    timing = f"{elapsed:.1f}s" + (f" / {budget:.0f}s" if budget else "")
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'}  criterion {num}: {title} [{timing}] {detail}")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _read(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- producers: each returns (artifacts, verdict, detail) -----------------------

def produce_1(tmp, threads):
    graphs = list(atlas_graphs(7)) + list(random_graphs(500, 10, seed=SEED))
    counts = {}

    def tally(name, agree):
        tot, ok = counts.get(name, (0, 0))
        counts[name] = (tot + 1, ok + bool(agree))

    for g in graphs:
        for k in (1, 2, 3):
            want = k_connected_by_removal(g, k)
            tally(f"is_k_connected[k={k}]", is_k_connected(g, k) == want)
            if g.n > k:
                tally(f"is_k_connected_flow[k={k}]", is_k_connected_flow(g, k) == want)
        tally("has_perfect_matching", has_perfect_matching(g) == perfect_matching_by_pairing(g))
        if g.n >= 3:
            want = "yes" if hamiltonian_oracle(g) else "no"
            tally("exact_hamilton", exact_hamilton_verdict(g).status == want)
    rows = [[name, tot, ok] for name, (tot, ok) in counts.items()]
    ok = all(tot == good for _, tot, good in rows)
    detail = f"{len(graphs)} graphs, " + ", ".join(f"{n} {g}/{t}" for n, t, g in rows)
    return {"oracle.csv": _csv_text(["check", "graphs", "agree"], rows).encode()}, ok, detail


def produce_2(tmp, threads):
    rows = []
    for n in (3, 4):
        for lam in (0.1, 1.0, 3.0):
            ph = -math.expm1(-lam / math.comb(n, 2))
            rows.append([n, lam, f"{exact_tv_small(n, MSpec.poisson(lam), ph):.6e}"])
    worst = max(float(r[2]) for r in rows)
    return {"poisson_tv.csv": _csv_text(["n", "lambda", "tv"], rows).encode()}, worst < 1e-10, f"max TV {worst:.2e} < 1e-10"


def produce_3(tmp, threads):
    rows = []
    for m, ph in ((2, 0.1), (5, 0.05), (10, 0.02)):
        tv = exact_tv_small(3, MSpec.binomial(m, ph), -math.expm1(-m * ph / 3))
        rows.append([m, ph, f"{tv:.10g}", tv_bound(m, ph), tv <= tv_bound(m, ph)])
    detail = ", ".join(f"(m={r[0]}, p={r[1]}): {float(r[2]):.4f} <= {r[3]:.2f}" for r in rows)
    return {"binomial_tv.csv": _csv_text(["m", "p_hat", "tv", "bound", "ok"], rows).encode()}, all(r[4] for r in rows), detail


def produce_4(tmp, threads):
    x = Seed(SEED).rng().binomial(1000, 0.01, size=100_000)
    rows = []
    for t in (5, 10, 20, 30):
        emp = float(np.mean(np.abs(x - 10.0) >= t))
        rows.append([t, f"{emp:.6g}", f"{chernoff_bound(10.0, t):.6g}", emp <= chernoff_bound(10.0, t)])
    detail = ", ".join(f"t={r[0]}: {r[1]} <= {r[2]}" for r in rows)
    return {"chernoff.csv": _csv_text(["t", "empirical", "bound", "ok"], rows).encode()}, all(r[3] for r in rows), detail


def _run(cfg, tmp, threads):
    cfg = copy.deepcopy(cfg)
    cfg.update(seed=SEED, output=str(tmp), threads=threads)
    res = runner.run(cfg)
    return res, {p.name: p.read_bytes() for p in res.files if p.suffix == ".csv"}


def produce_5(tmp, threads):
    res, files = _run(preset("coupling-case1"), tmp, threads)
    s = res.summary
    rows = _read(res.directory / "couple.csv")
    n, m, p = s["n"], s["m"], s["p"]
    ok_rows = [r for r in rows if r["success"] == "1"]
    rate = len(ok_rows) / len(rows)
    subgraph_all = all(r["subgraph"] == "1" for r in ok_rows)
    # intersection graph marginal: expected edge count is C(n,2)(1-(1-p^2)^m)
    rig = np.array([int(r["rig_edges"]) for r in rows], dtype=float)
    expect = math.comb(n, 2) * -math.expm1(m * math.log1p(-p * p))
    rig_ok = abs(rig.mean() - expect) <= 3 * rig.std(ddof=1) / math.sqrt(rig.size)
    # lower graph marginal on successes: edges are independent with probability p_minus
    trials = len(ok_rows) * math.comb(n, 2)
    freq = sum(int(r["lower_edges"]) for r in ok_rows) / trials
    pm = s["phat_minus"]
    low_ok = abs(freq - pm) <= 3 * math.sqrt(pm * (1 - pm) / trials)
    ok = rate >= 0.90 and subgraph_all and rig_ok and low_ok
    detail = (f"success {rate:.3f} (>= 0.90), subgraph on {sum(r['subgraph'] == '1' for r in ok_rows)}/{len(ok_rows)}"
              f" successes, rig edges {rig.mean():.1f} vs {expect:.1f}, lower edge freq {freq:.3e} vs {pm:.3e}")
    return files, ok, detail


def _sweep_points(path):
    by_prop: dict[str, list[dict]] = {}
    for r in _read(path):
        by_prop.setdefault(r["property"], []).append(r)
    return by_prop


def produce_6(tmp, threads):
    cfg = preset("theorem5")
    cfg["name"] = "theorems5-6"
    cfg["sweep"]["properties"] = ["connectivity", "perfect_matching"]
    res, files = _run(cfg, tmp, threads)
    ok, parts = True, []
    for prop, pts in _sweep_points(res.directory / "sweep.csv").items():
        omegas = [float(r["omega"]) for r in pts]
        est = [float(r["estimate"]) for r in pts]
        w = [int(r["samples"]) - int(r["unresolved"]) for r in pts]
        fit = isotonic(est, w)
        cross = crossing_from_points(omegas, est, w)
        good = fit[0] <= 0.2 and fit[-1] >= 0.9 and cross is not None and -5 <= cross <= 5
        ok &= good
        parts.append(f"{prop}: est(-6)={fit[0]:.3f} est(+6)={fit[-1]:.3f} crossing={cross}")
    return files, ok, "; ".join(parts)


def produce_7(tmp, threads):
    files, ok, parts = {}, True, []
    for name in ("theorem7-k1", "theorem7"):
        res, f = _run(preset(name), tmp, threads)
        files.update({f"{name}/{k}": v for k, v in f.items()})
        for prop, pts in _sweep_points(res.directory / "sweep.csv").items():
            dis = [1 - float(r["mindeg_agree_rate"]) for r in pts]
            unres = max(int(r["unresolved"]) / int(r["samples"]) for r in pts)
            if prop == "hamilton":
                good = max(dis) <= 0.10 and unres <= 0.10
            else:
                good = max(dis) <= 0.05
            ok &= good
            parts.append(f"{prop} k={pts[0]['k']}: max disagreement {max(dis):.3f}, max unresolved {unres:.3f}")
    return files, ok, "; ".join(parts)


def produce_8(tmp, threads):
    res, files = _run(preset("lemma7"), tmp, threads)
    q05 = res.summary["q05"]
    return files, q05 >= 0.5, f"5th percentile {q05:.3f} (>= 0.5), median {res.summary['median']:.3f}"


CRITERIA = {
    1: ("oracle equivalence", produce_1, 300),
    2: ("Poissonised G* equals G(n,p)", produce_2, 10),
    3: ("binomial count TV bound", produce_3, 10),
    4: ("Chernoff bound validity", produce_4, 30),
    5: ("coupling verification", produce_5, 300),
    6: ("threshold S-curves", produce_6, 900),
    7: ("minimum-degree phenomenon", produce_7, 1800),
    8: ("dense-regime minimum degree", produce_8, 300),
}


@pytest.mark.slow
@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num, tmp_path, capsys):
    title, produce, budget = CRITERIA[num]
    t0 = time.perf_counter()
    files, ok, detail = produce(tmp_path, 1)
    elapsed = time.perf_counter() - t0
    FIRST_RUN[num] = files
    ok_time = elapsed < budget
    _line(capsys, num, ok and ok_time, title, detail + ("" if ok_time else " (over budget)"), elapsed, budget)
    assert ok, detail
    assert ok_time, f"took {elapsed:.1f}s, budget {budget}s"


@pytest.mark.slow
def test_criterion_9_determinism(tmp_path, capsys):
    t0 = time.perf_counter()
    mismatched = []
    for num, (_, produce, _) in sorted(CRITERIA.items()):
        first = FIRST_RUN.get(num) or produce(tmp_path / f"a{num}", 1)[0]
        # the re-run also uses a different worker count, which must not matter
        again = produce(tmp_path / f"b{num}", 2)[0]
        if first != again:
            mismatched.append(num)
    ok = not mismatched
    detail = "all CSV outputs byte-identical on re-run" if ok else f"criteria {mismatched} differ"
    _line(capsys, 9, ok, "determinism", detail, time.perf_counter() - t0, None)
    assert ok, detail


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
