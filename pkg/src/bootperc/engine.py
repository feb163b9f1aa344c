"""Bootstrap closure dynamics for update families.

Two closure paths share one contract (least fixed point of :func:`step`
containing the input):

* ``"counting"`` -- per-site infected-neighbour counters driven by a FIFO
  frontier; valid for counting families (any ``r`` of a fixed offset set).
* ``"generic"`` -- synchronous :func:`step` repeated until nothing changes.
  Works for every family and serves as the oracle for the counting path.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np

from . import _kernels
from .lattice import Configuration, NeighborhoodSpec, neighborhood_offsets

DEFAULT_RULE_CAP = 1024

Offset = tuple[int, ...]


@dataclass(frozen=True)
class UpdateFamily:
    """A finite family of update rules, each a finite set of nonzero offsets.

    Counting families (all ``threshold``-subsets of ``offsets``) keep
    ``rules=None`` unless they were small enough to materialise.
    """

    d: int
    rules: Optional[tuple[frozenset, ...]] = None
    offsets: Optional[tuple[Offset, ...]] = None
    threshold: Optional[int] = None
    spec: Optional[NeighborhoodSpec] = None

    def __post_init__(self):
        if self.rules is None and self.offsets is None:
            raise ValueError("family needs explicit rules or counting offsets")
        if self.rules is not None:
            if not self.rules:
                raise ValueError("update family must contain at least one rule")
            for X in self.rules:
                if not X:
                    raise ValueError("update rules must be nonempty")
                for v in X:
                    if len(v) != self.d:
                        raise ValueError(f"offset {v} has wrong dimension")
                    if not any(v):
                        raise ValueError("update rules may not contain the zero vector")
        if self.offsets is not None:
            if self.threshold is None or not 1 <= self.threshold <= len(self.offsets):
                raise ValueError("counting family needs 1 <= threshold <= |offsets|")
            if any(not any(v) for v in self.offsets):
                raise ValueError("offsets may not contain the zero vector")

    @classmethod
    def from_rules(cls, rules) -> "UpdateFamily":
        rules = tuple(frozenset(tuple(int(c) for c in v) for v in X) for X in rules)
        if not rules:
            raise ValueError("update family must contain at least one rule")
        d = len(next(iter(rules[0])))
        return cls(d, rules=rules)

    @property
    def is_counting(self) -> bool:
        return self.offsets is not None

    @property
    def max_reach(self) -> int:
        """Largest sup-norm of any offset used by the family."""
        vs = self.offsets if self.is_counting else {v for X in self.rules for v in X}
        return max(max(abs(c) for c in v) for v in vs)

    def explicit_rules(self, cap: int = DEFAULT_RULE_CAP) -> tuple[frozenset, ...]:
        if self.rules is not None:
            return self.rules
        n = comb(len(self.offsets), self.threshold)
        if n > cap:
            raise ValueError(
                f"refusing to materialise {n} rules (cap {cap}); use the counting path"
            )
        return tuple(frozenset(c) for c in combinations(self.offsets, self.threshold))


def make_nr_family(spec: NeighborhoodSpec, cap: int = DEFAULT_RULE_CAP) -> UpdateFamily:
    """All ``r``-subsets of the anisotropic neighbourhood.

    Rules are materialised only when ``C(|N|, r) <= cap``; the family is
    always usable through the counting path.
    """
    offsets = tuple(neighborhood_offsets(spec))
    rules = None
    if comb(len(offsets), spec.r) <= cap:
        rules = tuple(frozenset(c) for c in combinations(offsets, spec.r))
    return UpdateFamily(spec.d, rules=rules, offsets=offsets, threshold=spec.r, spec=spec)


def shifted(state: np.ndarray, v: Offset, torus: bool) -> np.ndarray:
    """Array ``B`` with ``B[x] = state[x + v]``; out-of-range reads are healthy on the cube."""
    if torus:
        return np.roll(state, tuple(-c for c in v), axis=tuple(range(state.ndim)))
    out = np.zeros_like(state)
    src, dst = [], []
    for c, n in zip(v, state.shape):
        if abs(c) >= n:
            return out
        src.append(slice(max(c, 0), n + min(c, 0)))
        dst.append(slice(max(-c, 0), n - max(c, 0)))
    out[tuple(dst)] = state[tuple(src)]
    return out


def step_array(state: np.ndarray, family: UpdateFamily, torus: bool = False) -> np.ndarray:
    """One synchronous update. Uses explicit rules when the family has them."""
    state = np.asarray(state, dtype=bool)
    if family.rules is not None:
        new = np.zeros_like(state)
        cache = {}
        for X in family.rules:
            hit = np.ones_like(state)
            for v in X:
                if v not in cache:
                    cache[v] = shifted(state, v, torus)
                hit &= cache[v]
            new |= hit
        return state | new
    count = np.zeros(state.shape, dtype=np.int32)
    for v in family.offsets:
        count += shifted(state, v, torus)
    return state | (count >= family.threshold)


def closure_array(
    state: np.ndarray, family: UpdateFamily, torus: bool = False, method: str = "auto"
) -> np.ndarray:
    """Closure of a boolean array; returns a new array."""
    state = np.asarray(state, dtype=bool)
    if method == "auto":
        method = "counting" if family.is_counting else "generic"
    if method == "counting":
        if not family.is_counting:
            raise ValueError("counting closure needs a counting family")
        flat = np.ascontiguousarray(state).ravel().copy()
        dims = np.asarray(state.shape, dtype=np.int64)
        offs = np.asarray(family.offsets, dtype=np.int64).reshape(-1, state.ndim)
        _kernels.counting_closure(flat, dims, offs, family.threshold, torus)
        return flat.reshape(state.shape)
    if method == "generic":
        cur = state.copy()
        while True:
            nxt = step_array(cur, family, torus)
            if np.array_equal(nxt, cur):
                return cur
            cur = nxt
    raise ValueError(f"unknown closure method {method!r}")


def _check_dims(config: Configuration, family: UpdateFamily):
    if config.d != family.d:
        raise ValueError(f"configuration is {config.d}-dimensional, family is {family.d}-dimensional")


def step(config: Configuration, family: UpdateFamily) -> Configuration:
    _check_dims(config, family)
    out = step_array(config.to_array(), family, config.geometry == "torus")
    return Configuration.from_array(out, config.geometry)


def closure(config: Configuration, family: UpdateFamily, method: str = "auto") -> Configuration:
    """Least fixed point of :func:`step` containing ``config``."""
    _check_dims(config, family)
    out = closure_array(config.to_array(), family, config.geometry == "torus", method)
    return Configuration.from_array(out, config.geometry)


def percolates(config: Configuration, family: UpdateFamily, method: str = "auto") -> bool:
    return closure(config, family, method).is_full
