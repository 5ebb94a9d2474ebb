"""Closed-form sharp-threshold functions for G(n, p) and the random intersection graph."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

MODELS = ("gnp", "rig")
KINDS = ("connectivity", "k_connectivity", "perfect_matching", "hamilton", "min_degree_k")


class OutOfRange(ValueError):
    """A threshold formula produced a value outside [0, 1] (offset too extreme for this n)."""


@dataclass(frozen=True)
class ThresholdQuery:
    model: str
    n: int
    kind: str
    k: int = 1
    omega: float = 0.0
    m: int | None = None
    alpha: float | None = None
    formula_k: int | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.formula_k is not None and self.formula_k < 1:
            raise ValueError("formula_k must be at least 1")
        if self.model == "rig":
            if self.m is None and self.alpha is None:
                raise ValueError("rig queries need m or alpha")
            if self.num_features < 1:
                raise ValueError("rig queries need m >= 1")

    @property
    def num_features(self) -> int:
        if self.m is not None:
            return self.m
        return round(self.n ** self.alpha)

    @property
    def feature_exponent(self) -> float:
        """``alpha`` with ``m = n**alpha`` (derived from ``m`` when only ``m`` was given)."""
        if self.alpha is not None:
            return self.alpha
        return math.log(self.m) / math.log(self.n)

    @property
    def order(self) -> int:
        """The minimum-degree order the property needs: 1, 2 or k."""
        if self.kind in ("connectivity", "perfect_matching"):
            return 1
        if self.kind == "hamilton":
            return 2
        return self.k

    @property
    def formula_order(self) -> int:
        """Order plugged into the threshold formula; differs from ``order`` only when overridden."""
        return self.formula_k if self.formula_k is not None else self.order

    def with_omega(self, omega: float) -> ThresholdQuery:
        return replace(self, omega=omega)


def log_term(n: int, k: int, omega: float) -> float:
    """``ln n + (k-1) ln ln n + omega``."""
    if k > 1 and n < 3:
        raise ValueError("ln ln n is undefined for n < 3")
    return math.log(n) + (k - 1) * math.log(math.log(n)) + omega


def threshold_p(q: ThresholdQuery) -> float:
    """Edge/feature probability at offset ``q.omega`` on the sharp threshold of ``q.kind``."""
    k = q.formula_order
    t = log_term(q.n, k, q.omega)
    if q.model == "gnp":
        p = t / q.n
    else:
        m = q.num_features
        if m > q.n:
            if t < 0:
                raise ValueError(f"negative argument {t:.6g} under the square root")
            p = math.sqrt(t / (m * q.n))
        else:
            p = t / m
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"threshold probability {p:.6g} outside [0, 1] at omega={q.omega}")
    return p
