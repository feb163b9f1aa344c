"""Stable directions and criticality classes of update families.

Stability is decided exactly for integer directions only. The stable set of
an anisotropic family is returned as a symbolic union of axes and spheres.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import gcd
from typing import Optional

from .engine import UpdateFamily
from .lattice import NeighborhoodSpec


class CriticalityLabel(str, Enum):
    SUPERCRITICAL = "supercritical"
    CRITICAL = "critical"
    SUBCRITICAL = "subcritical"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Direction:
    """Rational direction, stored as a primitive integer vector."""

    v: tuple[int, ...]

    def __post_init__(self):
        v = tuple(int(x) for x in self.v)
        if not any(v):
            raise ValueError("direction must be nonzero")
        g = 0
        for x in v:
            g = gcd(g, abs(x))
        object.__setattr__(self, "v", tuple(x // g for x in v))

    @classmethod
    def axis(cls, j: int, d: int, sign: int = 1) -> "Direction":
        """``sign * e_j`` with ``j`` counted from 1."""
        if not 1 <= j <= d:
            raise ValueError(f"axis {j} outside 1..{d}")
        v = [0] * d
        v[j - 1] = sign
        return cls(tuple(v))

    def __neg__(self):
        return Direction(tuple(-x for x in self.v))


def _dot(x, v) -> int:
    return sum(a * b for a, b in zip(x, v))


def is_rule_in_halfspace(rule, dir: Direction) -> bool:
    """True iff every offset of ``rule`` has negative inner product with ``dir``."""
    if not rule:
        raise ValueError("rule must be nonempty")
    return all(_dot(x, dir.v) < 0 for x in rule)


def is_stable_direction(family: UpdateFamily, dir: Direction) -> bool:
    """True iff no rule of ``family`` fits in the open half-space ``<x, dir> < 0``."""
    if len(dir.v) != family.d:
        raise ValueError("direction and family dimensions differ")
    if family.is_counting:
        # some r-subset fits iff at least r offsets are strictly negative
        neg = sum(1 for x in family.offsets if _dot(x, dir.v) < 0)
        return neg < family.threshold
    return not any(is_rule_in_halfspace(X, dir) for X in family.rules)


def classify_nr(spec: NeighborhoodSpec) -> CriticalityLabel:
    if spec.r <= spec.a_max:
        return CriticalityLabel.SUPERCRITICAL
    if spec.r <= sum(spec.a):
        return CriticalityLabel.CRITICAL
    return CriticalityLabel.SUBCRITICAL


@dataclass(frozen=True)
class StableSetDescriptor:
    """Symbolic stable set of an anisotropic family.

    ``components`` holds strings such as ``"±e3"``, ``"S^1_{1,2}"`` (circle
    through ``e1`` and ``e2``) or ``"S^1_2"`` (sphere orthogonal to ``e2``).
    ``case`` is the index (1-based) of the matching listed range, or
    ``None`` when the spec is not covered. ``empty_cases`` lists listed
    ranges that are empty for this spec, i.e. coinciding boundaries.
    """

    spec: NeighborhoodSpec
    covered: bool
    case: Optional[int] = None
    components: tuple[str, ...] = ()
    reason: str = ""
    empty_cases: tuple[int, ...] = field(default=())

    def __str__(self):
        if not self.covered:
            return f"not-covered({self.reason})"
        return " U ".join(self.components) if self.components else "{}"


def _listed_cases(a):
    """(lo, hi, components) for each listed range ``lo < r <= hi`` that exists in dimension d."""
    d = len(a)
    axes = lambda start: tuple(f"±e{j}" for j in range(start, d + 1))
    cases = []
    if d >= 2:
        cases.append((a[-1], a[0] + a[1], axes(1)))
    if d >= 3:
        cases.append((a[0] + a[1], a[0] + a[2], ("S^1_{1,2}",) + axes(3)))
        cases.append((a[0] + a[2], a[1] + a[2], ("S^1_{1,2}", "S^1_{1,3}") + axes(4)))
    if d >= 2:
        spheres = tuple(f"S^{d - 2}_{j}" for j in range(1, d + 1))
        cases.append((sum(a[1:]), sum(a), spheres))
    return cases


def stable_supports(spec: NeighborhoodSpec) -> list[frozenset[int]]:
    """Maximal coordinate supports ``J`` (1-based) whose directions are stable.

    A direction with support ``J`` leaves ``sum(a_j, j in J)`` offsets in its
    open half-space, so it is stable iff that sum is below ``r``.
    """
    from itertools import combinations

    d = spec.d
    ok = [
        frozenset(J)
        for k in range(1, d + 1)
        for J in combinations(range(1, d + 1), k)
        if sum(spec.a[j - 1] for j in J) < spec.r
    ]
    return [J for J in ok if not any(J < K for K in ok)]


def _component_supports(comp: str, d: int) -> frozenset[int]:
    if comp.startswith("±e"):
        return frozenset({int(comp[2:])})
    if comp.startswith("S^1_{"):
        i, k = comp[5:-1].split(",")
        return frozenset({int(i), int(k)})
    j = int(comp.rsplit("_", 1)[1])
    return frozenset(range(1, d + 1)) - {j}


def stable_set_descriptor(spec: NeighborhoodSpec) -> StableSetDescriptor:
    """Look up the stable set among the listed closed-form cases.

    The first listed range containing ``r`` wins. If ``r`` is in no listed
    range, or the listed formula for that range disagrees with the exact
    support analysis of :func:`stable_supports` (this happens for the third
    range when ``d >= 4`` and ``a_4`` is small), the result is marked not
    covered rather than guessed.
    """
    a, r = spec.a, spec.r
    if not spec.a_max < r <= sum(a):
        return StableSetDescriptor(spec, False, reason=f"r={r} is outside the critical range")
    cases = _listed_cases(a)
    empty = tuple(i + 1 for i, (lo, hi, _) in enumerate(cases) if lo >= hi)
    for i, (lo, hi, comps) in enumerate(cases):
        if lo < r <= hi:
            exact = set(stable_supports(spec))
            listed = {_component_supports(c, spec.d) for c in comps}
            if listed != exact:
                return StableSetDescriptor(
                    spec, False, case=i + 1,
                    reason=f"listed case {i + 1} disagrees with exact supports",
                    empty_cases=empty,
                )
            return StableSetDescriptor(spec, True, i + 1, comps, empty_cases=empty)
    return StableSetDescriptor(spec, False, reason=f"r={r} lies in no listed range", empty_cases=empty)
