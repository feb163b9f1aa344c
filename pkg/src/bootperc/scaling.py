"""Scaling functions and fits for critical lengths."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


def lambda_(p: float, i: int, a1: int, a2: int) -> float:
    """``p^-i`` when ``a1 == a2``, ``p^-i (log p)^2`` when ``a2 > a1`` (natural log)."""
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if i < 1:
        raise ValueError("i must be >= 1")
    if a2 < a1:
        raise ValueError("need a1 <= a2")
    base = p ** (-i)
    return base if a1 == a2 else base * math.log(p) ** 2


def exp_iter(k: int, x: float) -> float:
    """k-fold iterated exponential; ``inf`` once it overflows."""
    if k < 0:
        raise ValueError("k must be >= 0")
    for _ in range(k):
        try:
            x = math.exp(x)
        except OverflowError:
            return math.inf
    return x


def log_iter(k: int, x: float) -> float:
    """k-fold iterated natural log, the inverse of :func:`exp_iter` where defined."""
    if k < 0:
        raise ValueError("k must be >= 0")
    for j in range(k):
        if x <= 0:
            raise ValueError(f"iterate {j} is {x}, log undefined")
        x = math.log(x)
    return x


@dataclass(frozen=True)
class ScalingPoint:
    """A measured (or synthetic) critical length at density ``p``.

    Pass ``log_lc`` for lengths too large to hold as a float.
    """

    p: float
    lc: float
    lam: float
    log_lc: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")
        if self.lc < 1:
            raise ValueError("lc must be >= 1")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")

    @property
    def log_length(self) -> float:
        return self.log_lc if self.log_lc is not None else math.log(self.lc)


@dataclass
class ScalingFit:
    """Fit of ``log L_c`` against ``p``.

    For ``pure_power`` the model is ``log log L_c = intercept + exponent * log(1/p)``.
    For ``power_log2`` it is ``log L_c = coef * lambda`` and ``ratios`` hold
    ``log L_c / lambda`` per point. ``rss`` is measured on ``log L_c`` for
    both models so the two are comparable.
    """

    model: str
    n: int
    rss: float
    residuals: list[float]
    exponent: Optional[float] = None
    intercept: Optional[float] = None
    coef: Optional[float] = None
    ratios: list[float] = field(default_factory=list)
    spread: Optional[float] = None

    def predict_log_lc(self, p, lam=None) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.model == "pure_power":
            return np.exp(self.intercept + self.exponent * np.log(1 / p))
        if lam is None:
            raise ValueError("power_log2 predictions need lambda values")
        return self.coef * np.asarray(lam, dtype=float)

    def as_record(self) -> dict:
        rec = {"model": self.model, "n": self.n, "rss": self.rss}
        if self.model == "pure_power":
            rec.update(exponent=self.exponent, intercept=self.intercept)
        else:
            rec.update(coef=self.coef, spread=self.spread, ratio_min=min(self.ratios), ratio_max=max(self.ratios))
        return rec


MODELS = ("pure_power", "power_log2")


def scaling_fit(points: Sequence[ScalingPoint], model: str) -> ScalingFit:
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}")
    if len(points) < 3:
        raise ValueError("need at least 3 points")
    ps = np.array([pt.p for pt in points])
    if len(np.unique(ps)) != len(ps):
        raise ValueError("points must have distinct p")
    logL = np.array([pt.log_length for pt in points])
    if model == "pure_power":
        if np.any(logL <= 0):
            raise ValueError("pure_power needs every L_c > 1")
        x, y = np.log(1 / ps), np.log(logL)
        slope, icpt = np.polyfit(x, y, 1)
        pred = np.exp(icpt + slope * x)
        res = logL - pred
        return ScalingFit(model, len(points), float(res @ res), res.tolist(), exponent=float(slope), intercept=float(icpt))
    lam = np.array([pt.lam for pt in points])
    coef = float(lam @ logL / (lam @ lam))
    res = logL - coef * lam
    ratios = logL / lam
    if np.any(ratios <= 0):
        raise ValueError("power_log2 needs every L_c > 1")
    return ScalingFit(
        model, len(points), float(res @ res), res.tolist(), coef=coef,
        ratios=ratios.tolist(), spread=float(ratios.max() / ratios.min()),
    )


def compare_models(points: Sequence[ScalingPoint]) -> tuple[str, dict[str, ScalingFit]]:
    """Fit both models; the one with the smaller residual sum wins."""
    fits = {m: scaling_fit(points, m) for m in MODELS}
    return min(fits, key=lambda m: fits[m].rss), fits
