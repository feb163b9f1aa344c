import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bootperc.engine import UpdateFamily, make_nr_family
from bootperc.families import (
    CriticalityLabel, Direction, classify_nr, is_rule_in_halfspace, is_stable_direction,
    stable_set_descriptor, stable_supports,
)
from bootperc.lattice import NeighborhoodSpec, neighborhood_offsets

E1, E2 = (1, 0), (0, 1)
M1, M2 = (-1, 0), (0, -1)


def brute_stable(spec, v):
    """Stable iff no r-subset of offsets lies in the open half-space, checked rule by rule."""
    neg = [x for x in neighborhood_offsets(spec) if np.dot(x, v) < 0]
    return not any(True for _ in itertools.combinations(neg, spec.r))


def test_halfspace_examples():
    assert is_rule_in_halfspace({M1, M2}, Direction((1, 1)))
    assert not is_rule_in_halfspace({M1, E2}, Direction((1, 1)))
    assert is_rule_in_halfspace({M1}, Direction(E1))


def test_stability_examples():
    fam = make_nr_family(NeighborhoodSpec((1, 1), 2))
    assert is_stable_direction(fam, Direction(E2))
    assert not is_stable_direction(fam, Direction((1, 1)))


def test_direction_primitive_form():
    assert Direction((2, -4)).v == (1, -2)
    assert (-Direction((1, 2))).v == (-1, -2)
    assert Direction.axis(2, 3, -1).v == (0, -1, 0)
    with pytest.raises(ValueError):
        Direction((0, 0))


def test_explicit_and_counting_stability_agree():
    spec = NeighborhoodSpec((1, 2), 3)
    counting = make_nr_family(spec, cap=0)
    explicit = UpdateFamily.from_rules(make_nr_family(spec).explicit_rules())
    for v in itertools.product(range(-3, 4), repeat=2):
        if any(v):
            D = Direction(v)
            assert is_stable_direction(counting, D) == is_stable_direction(explicit, D)


@given(st.lists(st.integers(-4, 4), min_size=2, max_size=3).filter(any), st.integers(1, 8))
def test_negation_symmetry(v, r):
    a = (1, 2, 2)[: len(v)]
    fam = make_nr_family(NeighborhoodSpec(a, min(r, 2 * sum(a))))
    D = Direction(tuple(v))
    assert is_stable_direction(fam, D) == is_stable_direction(fam, -D)


@pytest.mark.parametrize(
    "a,r,label",
    [
        ((1, 2, 4), 8, CriticalityLabel.SUBCRITICAL),
        ((1, 2, 4), 4, CriticalityLabel.SUPERCRITICAL),
        ((1, 2, 4), 5, CriticalityLabel.CRITICAL),
        ((1, 1), 2, CriticalityLabel.CRITICAL),
        ((1, 1), 1, CriticalityLabel.SUPERCRITICAL),
        ((1, 1), 3, CriticalityLabel.SUBCRITICAL),
    ],
)
def test_classify_examples(a, r, label):
    assert classify_nr(NeighborhoodSpec(a, r)) is label


def all_specs(dmax=4, amax=4):
    for d in range(1, dmax + 1):
        for a in itertools.combinations_with_replacement(range(1, amax + 1), d):
            for r in range(1, 2 * sum(a) + 1):
                yield NeighborhoodSpec(a, r)


def test_classification_matches_axis_stability():
    for spec in all_specs():
        fam = make_nr_family(spec, cap=0)
        axes = [Direction.axis(j, spec.d, s) for j in range(1, spec.d + 1) for s in (1, -1)]
        label = classify_nr(spec)
        some_unstable = not all(is_stable_direction(fam, D) for D in axes)
        assert (label is CriticalityLabel.SUPERCRITICAL) == some_unstable
        # every support stable means the whole sphere is stable
        all_stable = sum(spec.a) < spec.r
        assert (label is CriticalityLabel.SUBCRITICAL) == all_stable


def test_descriptor_examples():
    d = stable_set_descriptor(NeighborhoodSpec((1, 1, 1), 2))
    assert d.covered and d.components == ("±e1", "±e2", "±e3") and d.case == 1
    d = stable_set_descriptor(NeighborhoodSpec((1, 2, 4), 7))
    assert d.covered and d.components == ("S^1_1", "S^1_2", "S^1_3")
    d = stable_set_descriptor(NeighborhoodSpec((1, 1, 2), 3))
    assert d.covered and d.components == ("S^1_{1,2}", "±e3")


def test_descriptor_not_covered():
    assert not stable_set_descriptor(NeighborhoodSpec((1, 2, 4), 4)).covered
    assert not stable_set_descriptor(NeighborhoodSpec((1, 2, 4), 8)).covered
    # the third listed range misses the circle through e1 and e4 here (a1 + a4 < r)
    d = stable_set_descriptor(NeighborhoodSpec((1, 2, 2, 2), 4))
    assert not d.covered and d.case == 3
    assert frozenset({1, 4}) in stable_supports(NeighborhoodSpec((1, 2, 2, 2), 4))


def test_descriptor_flags_empty_ranges():
    d = stable_set_descriptor(NeighborhoodSpec((1, 2, 2), 4))
    assert d.case == 3 and 2 in d.empty_cases


def test_descriptor_consistent_with_direction_checks():
    rng = np.random.default_rng(0)
    checked = 0
    for spec in all_specs(dmax=4, amax=3):
        desc = stable_set_descriptor(spec)
        if not desc.covered:
            continue
        fam = make_nr_family(spec, cap=0)
        for comp in desc.components:
            if comp.startswith("±e"):
                j = int(comp[2:])
                for s in (1, -1):
                    assert is_stable_direction(fam, Direction.axis(j, spec.d, s))
        supports = set(stable_supports(spec))
        for _ in range(20):
            v = rng.integers(-3, 4, size=spec.d)
            if not v.any():
                continue
            J = frozenset(int(j) + 1 for j in np.flatnonzero(v))
            on_listed = any(J <= K for K in supports)
            D = Direction(tuple(int(c) for c in v))
            assert is_stable_direction(fam, D) == on_listed == brute_stable(spec, D.v)
            checked += 1
    assert checked > 500
