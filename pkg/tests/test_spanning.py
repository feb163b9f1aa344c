import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bootperc.engine import closure_array, make_nr_family
from bootperc.lattice import Block, Configuration, NeighborhoodSpec, bounding_block
from bootperc.spanning import (
    NoWitnessError, SlabWitness, StrongGraphParam, al_witness, components_process, diam,
    is_internally_filled, is_internally_spanned, strong_components,
)

from .oracles import brute_diam, strong_parts

NN = make_nr_family(NeighborhoodSpec((1, 1), 2))
T2 = StrongGraphParam(2)


def closure_sites(config, fam):
    return {tuple(int(c) + 1 for c in x) for x in np.argwhere(closure_array(config.to_array(), fam))}


def test_strong_components_examples():
    assert strong_components([], T2) == []
    assert strong_components([(1, 1), (3, 3)], T2) == [frozenset({(1, 1), (3, 3)})]
    assert strong_components([(1, 1), (4, 4)], T2) == [frozenset({(1, 1)}), frozenset({(4, 4)})]


def test_diam_examples():
    assert diam([], T2) == 0
    assert diam([(1, 1), (3, 3)], T2) == 3
    assert diam([(1, 1), (4, 4)], T2) == 1


def test_param_defaults():
    assert StrongGraphParam.for_spec(NeighborhoodSpec((1, 3), 4)).threshold == 6
    with pytest.raises(ValueError):
        StrongGraphParam(0)


site_sets = st.sets(st.tuples(st.integers(1, 8), st.integers(1, 8)), max_size=10)


@settings(max_examples=80, deadline=None)
@given(site_sets, st.integers(1, 3))
def test_components_match_bfs(S, t):
    got = sorted(sorted(c) for c in strong_components(S, StrongGraphParam(t)))
    assert got == sorted(sorted(c) for c in strong_parts(S, t))


@settings(max_examples=40, deadline=None)
@given(st.sets(st.tuples(st.integers(1, 7), st.integers(1, 7)), max_size=9), st.integers(1, 2))
def test_diam_matches_brute_force(S, t):
    assert diam(S, StrongGraphParam(t)) == brute_diam(S, t)


def test_diam_brute_force_3d(rng):
    for _ in range(25):
        S = {tuple(int(c) for c in rng.integers(1, 6, size=3)) for _ in range(rng.integers(1, 12))}
        assert diam(S, T2) == brute_diam(S, 2)


def test_filled_examples():
    R = Block((1, 1), (2, 2))
    assert is_internally_filled(R, Configuration.full((2, 2)), NN)
    assert is_internally_filled(R, Configuration.from_sites((2, 2), [(1, 1), (2, 2)]), NN)
    R3 = Block.cube(3, 2)
    assert not is_internally_filled(R3, Configuration.from_sites((3, 3), [(1, 1), (3, 3)]), NN)


def test_spanned_examples():
    R3 = Block.cube(3, 2)
    corners = Configuration.from_sites((3, 3), [(1, 1), (3, 3)])
    assert is_internally_spanned(R3, corners, NN, T2)
    assert not is_internally_filled(R3, corners, NN)
    assert not is_internally_spanned(R3, Configuration.from_sites((3, 3), [(1, 1)]), NN, T2)
    one = Block((2, 2), (2, 2))
    assert is_internally_spanned(one, Configuration.from_sites((3, 3), [(2, 2)]), NN, T2)


def test_internal_ignores_outside_sites():
    # (1,2) and (2,1) only appear because of sites outside R
    A = Configuration.from_sites((3, 3), [(1, 1), (2, 2), (3, 3)])
    R = Block((1, 1), (2, 1))
    assert not is_internally_filled(R, A, NN)


def test_block_outside_domain():
    with pytest.raises(ValueError):
        is_internally_filled(Block((1, 1), (4, 4)), Configuration.from_sites((3, 3), []), NN)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_filled_implies_spanned(data):
    A = np.array(data.draw(st.lists(st.booleans(), min_size=36, max_size=36))).reshape(6, 6)
    lo = data.draw(st.tuples(st.integers(1, 6), st.integers(1, 6)))
    hi = data.draw(st.tuples(st.integers(lo[0], 6), st.integers(lo[1], 6)))
    R, config = Block(lo, hi), Configuration.from_array(A)
    if is_internally_filled(R, config, NN):
        assert is_internally_spanned(R, config, NN, T2)


def test_process_examples():
    assert len(components_process(Configuration.from_sites((3, 3), []), NN)) == 0
    out = components_process(Configuration.from_sites((5, 5), [(1, 1), (3, 3)]), NN, T2)
    assert out.sets == [frozenset({(1, 1), (3, 3)})]
    assert len(out.history) == 1
    out = components_process(Configuration.from_sites((3, 3), [(1, 1), (2, 2), (3, 3)]), NN, T2)
    assert out.sets == [frozenset(itertools.product((1, 2, 3), repeat=2))]


def test_process_rejects_supercritical_and_torus():
    with pytest.raises(ValueError):
        components_process(Configuration.from_sites((3, 3), [(1, 1)]), make_nr_family(NeighborhoodSpec((1, 1), 1)))
    with pytest.raises(ValueError):
        components_process(Configuration.from_sites((3, 3), [(1, 1)], "torus"), NN)


@pytest.mark.parametrize("a,r", [((1, 1), 2), ((1, 2), 3), ((1, 2), 4), ((1, 1, 2), 3)])
def test_process_union_and_order_independence(rng, a, r):
    spec = NeighborhoodSpec(a, r)
    fam = make_nr_family(spec)
    for _ in range(15):
        A = Configuration.from_array(rng.random((7,) * spec.d) < 0.15)
        want = closure_sites(A, fam)
        canon = components_process(A, fam)
        assert canon.union() == want
        shuffled = components_process(A, fam, rng=np.random.default_rng(int(rng.integers(1 << 30))))
        assert shuffled.union() == want
        for ev in canon.history:
            assert ev.diam_child <= ev.diam_left + ev.diam_right + 2 * spec.a_max
        # final sets are pairwise far apart
        for S, T in itertools.combinations(canon.sets, 2):
            assert min(max(abs(x - y) for x, y in zip(u, v)) for u in S for v in T) > 2 * spec.a_max


def test_witness_diagonal():
    diag = Configuration.from_sites((8, 8), [(i, i) for i in range(1, 9)])
    R = al_witness(diag, NN, 4)
    assert 4 <= R.long <= 8
    assert is_internally_spanned(R, diag, NN)
    assert al_witness(diag, NN, 1).long == 1


def test_witness_missing():
    A = Configuration.from_sites((8, 8), [(1, 1), (8, 8)])
    with pytest.raises(NoWitnessError):
        al_witness(A, NN, 2)
    with pytest.raises(ValueError):
        al_witness(A, NN, 0)


def test_slab_witness():
    fam = make_nr_family(NeighborhoodSpec((1, 1, 1), 2))
    A = Configuration.from_sites((6, 6, 6), [(1, 1, 1), (2, 2, 2), (3, 3, 3)])
    w = al_witness(A, fam, 3, mode="slab", l=10)
    assert isinstance(w, SlabWitness)
    assert w.h >= 3 and w.block.sides[-1] == w.h
    with pytest.raises(ValueError):
        al_witness(A, fam, 3, mode="slab")
