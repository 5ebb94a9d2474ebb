"""Monte Carlo sweeps over the threshold offset omega.

A sweep fixes a model and a threshold formula, walks a grid of offsets,
and on every sample records the property verdicts together with the
matching minimum-degree condition, so that property and min-degree curves
are paired sample by sample.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from statistics import NormalDist

import numpy as np

from .generators import Seed, gen_gnp, gen_rig, sample_assignment
from .graph import Graph, intersection_degrees, min_degree
from .properties import HamiltonBudget, has_perfect_matching, hamilton_solve, is_connected, is_k_connected
from .thresholds import OutOfRange, ThresholdQuery, log_term, threshold_p

MINDEG = "min_degree_k"
CSV_FIELDS = [
    "model", "n", "m", "alpha", "k", "omega", "p", "property", "samples", "successes",
    "unresolved", "estimate", "ci_lo", "ci_hi", "mindeg_agree_rate",
]


def wilson_ci(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("Wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    z = NormalDist().inv_cdf(1 - (1 - confidence) / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z / denom * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def isotonic(values, weights=None) -> list[float]:
    """Nondecreasing least-squares fit by pool-adjacent-violators."""
    vals = [float(v) for v in values]
    ws = [1.0] * len(vals) if weights is None else [float(w) for w in weights]
    blocks: list[list[float]] = []  # [mean, weight, length]
    for v, w in zip(vals, ws):
        blocks.append([v, w, 1])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            v2, w2, l2 = blocks.pop()
            v1, w1, l1 = blocks.pop()
            wt = w1 + w2
            blocks.append([(v1 * w1 + v2 * w2) / wt, wt, l1 + l2])
    out: list[float] = []
    for mean, _, length in blocks:
        out.extend([mean] * length)
    return out


def crossing_from_points(omegas, estimates, weights=None, level: float = 0.5) -> float | None:
    """Offset where the isotonic fit first reaches ``level``, linearly interpolated."""
    omegas = list(omegas)
    if len(omegas) < 2:
        raise ValueError("need at least two points to locate a crossing")
    iso = isotonic(estimates, weights)
    for i, y in enumerate(iso):
        if y >= level:
            if i == 0:
                return float(omegas[0]) if y == level else None
            x0, y0, x1 = omegas[i - 1], iso[i - 1], omegas[i]
            return float(x0 + (level - y0) * (x1 - x0) / (y - y0))
    return None


@dataclass
class SweepPoint:
    omega: float
    p: float | None
    outcomes: list = field(default_factory=list)  # 1 / 0 / None (unresolved)
    mindeg: list = field(default_factory=list)

    @property
    def skipped(self) -> bool:
        return self.p is None

    @property
    def samples(self) -> int:
        return len(self.outcomes)

    @property
    def successes(self) -> int:
        return sum(1 for o in self.outcomes if o == 1)

    @property
    def unresolved(self) -> int:
        return sum(1 for o in self.outcomes if o is None)

    @property
    def failures(self) -> int:
        return sum(1 for o in self.outcomes if o == 0)

    @property
    def resolved(self) -> int:
        return self.samples - self.unresolved

    @property
    def estimate(self) -> float | None:
        """Success fraction among resolved samples."""
        return self.successes / self.resolved if self.resolved else None

    def ci(self, confidence: float = 0.95) -> tuple[float, float] | None:
        return wilson_ci(self.successes, self.resolved, confidence) if self.resolved else None

    @property
    def agree_rate(self) -> float | None:
        pairs = [(o, d) for o, d in zip(self.outcomes, self.mindeg) if o is not None]
        if not pairs:
            return None
        return sum(1 for o, d in pairs if bool(o) == bool(d)) / len(pairs)


@dataclass
class SweepCurve:
    model: str
    property: str
    n: int
    m: int | None
    alpha: float | None
    k: int
    seed: int
    points: list[SweepPoint]
    note: str = ""

    @property
    def grid(self) -> list[float]:
        return [pt.omega for pt in self.points]

    def estimates(self) -> list[float | None]:
        return [pt.estimate for pt in self.points]

    def smoothed(self) -> dict[float, float]:
        """Isotonic fit of the estimates, keyed by omega (points without data are left out)."""
        used = [pt for pt in self.points if pt.estimate is not None]
        fit = isotonic([pt.estimate for pt in used], [pt.resolved for pt in used])
        return {pt.omega: y for pt, y in zip(used, fit)}


def crossing_estimate(curve: SweepCurve, level: float = 0.5) -> float | None:
    used = [pt for pt in curve.points if pt.estimate is not None]
    if len(curve.points) < 2:
        raise ValueError("need at least two points to locate a crossing")
    if len(used) < 2:
        return None
    return crossing_from_points([pt.omega for pt in used], [pt.estimate for pt in used],
                                [pt.resolved for pt in used], level)


def mindeg_curve(curve: SweepCurve) -> SweepCurve:
    """The paired ``min degree >= k`` curve recorded alongside ``curve``."""
    pts = [SweepPoint(pt.omega, pt.p, [int(d) for d in pt.mindeg], list(pt.mindeg)) for pt in curve.points]
    return SweepCurve(curve.model, MINDEG, curve.n, curve.m, curve.alpha, curve.k, curve.seed, pts, curve.note)


@dataclass(frozen=True)
class Disagreement:
    omega: float
    compared: int
    disagreements: int
    unresolved: int

    @property
    def rate(self) -> float | None:
        return self.disagreements / self.compared if self.compared else None


def mindeg_phenomenon_report(curve_a: SweepCurve, curve_b: SweepCurve) -> list[Disagreement]:
    """Per offset, how often the property verdict differs from the paired min-degree verdict."""
    if curve_a.grid != curve_b.grid:
        raise ValueError("curves do not share a grid")
    rows = []
    for pa, pb in zip(curve_a.points, curve_b.points):
        if pa.samples != pb.samples:
            raise ValueError(f"sample counts differ at omega={pa.omega}")
        compared = dis = unres = 0
        for a, b in zip(pa.outcomes, pb.outcomes):
            if a is None or b is None:
                unres += 1
                continue
            compared += 1
            dis += bool(a) != bool(b)
        rows.append(Disagreement(pa.omega, compared, dis, unres))
    return rows


# -- sampling ---------------------------------------------------------------

def evaluate(g: Graph, kind: str, k: int, budget: HamiltonBudget, ham_seed: int) -> int | None:
    if kind == "connectivity":
        return int(is_connected(g))
    if kind == "k_connectivity":
        return int(is_k_connected(g, k))
    if kind == "perfect_matching":
        return int(has_perfect_matching(g))
    if kind == "min_degree_k":
        return int(min_degree(g) >= k)
    if kind == "hamilton":
        v = hamilton_solve(g, budget, seed=ham_seed)
        return None if v.status == "unresolved" else int(v.status == "yes")
    raise ValueError(f"unknown property {kind!r}")


def _sample_task(args):
    model, n, m, p, kinds, k, order, budget, root, streams = args
    out = []
    for stream in streams:
        rng = Seed(root, stream).rng()
        g = gen_gnp(n, p, rng) if model == "gnp" else gen_rig(n, m, p, rng)[1]
        ham_seed = int(rng.integers(2**63))
        verdicts = [evaluate(g, kind, k, budget, ham_seed) for kind in kinds]
        md = min_degree(g) >= order
        if any(v == 1 for v in verdicts) and not md:
            # every swept property needs min degree >= order; a "yes" without it is a checker bug
            raise RuntimeError(f"property holds with min degree < {order} (stream {stream})")
        out.append((verdicts, md))
    return out


def stream_id(point_index: int, sample_index: int) -> int:
    return (point_index << 32) | sample_index


def sweep_many(q: ThresholdQuery, kinds, grid, samples: int, seed: int,
               budget: HamiltonBudget | None = None, workers: int = 1, chunk: int = 25) -> list[SweepCurve]:
    """Sweep several properties that share one threshold formula on the same samples."""
    grid = list(grid)
    if not grid:
        raise ValueError("grid must be nonempty")
    if grid != sorted(grid):
        raise ValueError("grid must be sorted")
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    kinds = list(kinds)
    budget = budget or HamiltonBudget()
    queries = [replace(q, kind=kd) for kd in kinds]
    orders = {qq.order for qq in queries}
    if len(orders) != 1:
        raise ValueError(f"properties {kinds} need different min-degree orders; sweep them separately")
    order = orders.pop()
    m = q.num_features if q.model == "rig" else None

    tasks, layout = [], []
    points_by_kind = {kd: [] for kd in kinds}
    for i, omega in enumerate(grid):
        try:
            ps = {threshold_p(qq.with_omega(omega)) for qq in queries}
        except (OutOfRange, ValueError):
            ps = None
        if ps is not None and len(ps) != 1:
            raise ValueError(f"properties {kinds} do not share a threshold formula")
        p = ps.pop() if ps else None
        for kd in kinds:
            points_by_kind[kd].append(SweepPoint(omega, p))
        if p is None:
            continue
        for start in range(0, samples, chunk):
            streams = [stream_id(i, j) for j in range(start, min(samples, start + chunk))]
            tasks.append((q.model, q.n, m, p, kinds, q.k, order, budget, seed, streams))
            layout.append(i)

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sample_task, tasks))
    else:
        results = [_sample_task(t) for t in tasks]

    for i, res in zip(layout, results):
        for verdicts, md in res:
            for kd, v in zip(kinds, verdicts):
                pt = points_by_kind[kd][i]
                pt.outcomes.append(v)
                pt.mindeg.append(bool(md))

    alpha = q.feature_exponent if q.model == "rig" else None
    curves = []
    for kd, qq in zip(kinds, queries):
        note = ""
        if q.model == "rig" and alpha is not None and alpha <= 1 and qq.order >= 2:
            note = "alpha<=1: upper side proven at p_k; lower side stated at p_1"
        curves.append(SweepCurve(q.model, kd, q.n, m, alpha, qq.order, seed, points_by_kind[kd], note))
    return curves


def sweep(q: ThresholdQuery, grid, samples: int, seed: int,
          budget: HamiltonBudget | None = None, workers: int = 1) -> SweepCurve:
    return sweep_many(q, [q.kind], grid, samples, seed, budget, workers)[0]


# -- output -----------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def curve_rows(curve: SweepCurve) -> list[dict]:
    rows = []
    for pt in curve.points:
        ci = pt.ci()
        rows.append({
            "model": curve.model, "n": curve.n, "m": curve.m, "alpha": curve.alpha, "k": curve.k,
            "omega": float(pt.omega), "p": pt.p, "property": curve.property, "samples": pt.samples,
            "successes": pt.successes, "unresolved": pt.unresolved, "estimate": pt.estimate,
            "ci_lo": ci[0] if ci else None, "ci_hi": ci[1] if ci else None,
            "mindeg_agree_rate": pt.agree_rate,
        })
    return rows


def curves_csv(curves) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for c in curves:
        for row in curve_rows(c):
            w.writerow([_fmt(row[f]) for f in CSV_FIELDS])
    return buf.getvalue()


def curves_plotdata(curves) -> str:
    """Two-column ``omega estimate`` blocks, one per series, separated by blank lines."""
    out = []
    for c in curves:
        out.append(f"# {c.model} {c.property} n={c.n} k={c.k}")
        for pt in c.points:
            if pt.estimate is not None:
                out.append(f"{_fmt(float(pt.omega))} {_fmt(pt.estimate)}")
        out.append("")
    return "\n".join(out) + "\n"


# -- dense regime minimum degree --------------------------------------------

@dataclass
class MinDegreeReport:
    n: int
    m: int
    omega: float
    p: float
    normalized: list[float]
    quantiles: dict[float, float]
    flagged: bool


def lemma7_mindeg_check(n: int, m: int, omega: float, samples: int, seed: int,
                        floor: float = 0.5) -> MinDegreeReport:
    """Minimum degree of the intersection graph at ``p_1`` with few features, in units of ``n ln n / m``."""
    alpha = math.log(m) / math.log(n)
    if alpha >= 1:
        raise ValueError(f"needs m < n (alpha={alpha:.4f} >= 1)")
    if omega < math.log(math.log(n)):
        raise ValueError("omega must be at least ln ln n")
    p = log_term(n, 1, omega) / m
    if p > 1:
        raise OutOfRange(f"p_1={p:.6g} exceeds 1")
    scale = n * math.log(n) / m
    vals = []
    for i in range(samples):
        a = sample_assignment(n, m, p, Seed(seed, i))
        vals.append(float(intersection_degrees(a).min()) / scale)
    qs = {q: float(np.quantile(vals, q)) for q in (0.05, 0.5, 0.95)} if vals else {}
    return MinDegreeReport(n, m, omega, p, vals, qs, bool(vals) and qs[0.05] < floor)
