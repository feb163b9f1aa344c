"""Monte Carlo estimates on anisotropic bootstrap percolation.

Every trial draws its own uniform field from a counter-based stream keyed
by ``(seed, *key, trial)``, and a site is initially infected iff its
uniform is below ``p``. Results therefore do not depend on how trials are
scheduled, and runs at different ``p`` with the same seed are coupled.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import binomtest

from . import _kernels
from .engine import closure_array, make_nr_family
from .lattice import NeighborhoodSpec
from .spanning import StrongGraphParam, diam_array

STREAM_RULE = "philox4x64:seedseq(seed,spawn_key=(*key,trial))"


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one trial; ``key`` entries must be nonnegative ints."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def sample_configuration(rng: np.random.Generator, dims, p: float) -> np.ndarray:
    return rng.random(tuple(dims)) < p


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class TrialEstimate:
    estimate: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int
    successes: Optional[int] = None
    per_trial_streams: str = STREAM_RULE

    @classmethod
    def from_counts(cls, successes: int, trials: int, seed: int) -> "TrialEstimate":
        if trials < 1:
            raise ValueError("trials must be >= 1")
        est = successes / trials
        lo, hi = wilson_interval(successes, trials)
        return cls(est, min(lo, est), max(hi, est), trials, seed, successes)

    def excludes(self, value: float) -> bool:
        return value < self.ci_low or value > self.ci_high


def _map_trials(fn: Callable[[int], object], indices: Sequence[int], n_jobs: int = 1) -> list:
    if n_jobs == 1:
        return [fn(t) for t in indices]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, indices))


def _check_p(p: float):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")


def _count_percolating(family, dims, p, seed, key, start, n, torus, n_jobs, seed_block=None):
    def one(t):
        A = sample_configuration(trial_rng(seed, *key, t), dims, p)
        if seed_block is not None:
            A[seed_block] = True
        return bool(closure_array(A, family, torus).all())

    return sum(_map_trials(one, range(start, start + n), n_jobs))


def percolation_probability(
    spec: NeighborhoodSpec,
    L: int,
    p: float,
    trials: int,
    seed: int,
    geometry: str = "cube",
    n_jobs: int = 1,
    key: tuple[int, ...] = (),
) -> TrialEstimate:
    """Fraction of ``Bernoulli(p)`` samples on ``[L]^d`` whose closure is everything."""
    _check_p(p)
    if L < 1 or trials < 1:
        raise ValueError("L and trials must be >= 1")
    family = make_nr_family(spec)
    k = _count_percolating(
        family, (L,) * spec.d, p, seed, key, 0, trials, geometry == "torus", n_jobs
    )
    return TrialEstimate.from_counts(k, trials, seed)


@dataclass(frozen=True)
class Probe:
    L: int
    estimate: TrialEstimate
    passed: bool
    resolved: bool
    exact: bool = False


@dataclass
class CriticalLengthResult:
    """Outcome of a critical-length search.

    ``lc`` is the smallest probed ``L`` judged to percolate with probability
    at least 1/2, ``bracket = (lo, lc)`` with ``lo`` the largest probed
    ``L`` judged below. ``status`` is ``"resolved"`` when every probe's
    interval excluded 1/2, ``"unresolved at budget"`` otherwise.
    """

    spec: NeighborhoodSpec
    p: float
    seed: int
    lc: Optional[int]
    bracket: tuple[int, Optional[int]]
    probes: list[Probe] = field(default_factory=list)
    status: str = "resolved"
    nonmonotone: bool = False


def critical_length(
    spec: NeighborhoodSpec,
    p: float,
    trials_per_probe: int,
    seed: int,
    geometry: str = "cube",
    batch: Optional[int] = None,
    max_L: int = 1 << 14,
    n_jobs: int = 1,
) -> CriticalLengthResult:
    """Estimate ``min{L : P_p(closure = [L]^d) >= 1/2}``.

    ``L`` is doubled until a probe passes, then the bracket is bisected.
    Each probe adds trials in batches until the Wilson interval excludes
    1/2 or ``trials_per_probe`` trials were used. ``L = 1`` is evaluated
    exactly (the single site percolates iff it is initially infected).
    """
    _check_p(p)
    if trials_per_probe < 1:
        raise ValueError("trials_per_probe must be >= 1")
    batch = batch or max(1, min(trials_per_probe, 200))
    family = make_nr_family(spec)
    torus = geometry == "torus"
    probes: dict[int, Probe] = {}

    def probe(L: int) -> Probe:
        if L in probes:
            return probes[L]
        if L == 1:
            est = TrialEstimate(p, p, p, 1, seed, None, "exact")
            res = Probe(1, est, p >= 0.5, True, exact=True)
        else:
            dims = (L,) * spec.d
            k = n = 0
            while n < trials_per_probe:
                m = min(batch, trials_per_probe - n)
                k += _count_percolating(family, dims, p, seed, (L,), n, m, torus, n_jobs)
                n += m
                est = TrialEstimate.from_counts(k, n, seed)
                if est.excludes(0.5):
                    break
            res = Probe(L, est, est.estimate >= 0.5, est.excludes(0.5))
        probes[L] = res
        return res

    lo, L = 0, 1
    while not probe(L).passed:
        lo = L
        if L >= max_L:
            out = CriticalLengthResult(spec, p, seed, None, (lo, None), sorted(probes.values(), key=lambda q: q.L))
            out.status = f"no crossing up to L={max_L}"
            return out
        L = min(2 * L, max_L)
    hi = L
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if probe(mid).passed:
            hi = mid
        else:
            lo = mid
    ordered = sorted(probes.values(), key=lambda q: q.L)
    out = CriticalLengthResult(spec, p, seed, hi, (lo, hi), ordered)
    if not all(q.resolved for q in ordered):
        out.status = "unresolved at budget"
    out.nonmonotone = any(
        a.passed and a.resolved and not b.passed and b.resolved
        for i, a in enumerate(ordered)
        for b in ordered[i + 1:]
    )
    return out


@dataclass(frozen=True)
class ClusterStats:
    """Center-cluster statistics.

    ``mean_size`` is the plain mean of ``|K|``. ``mean_size_given_cutoff``
    averages ``|K|`` over trials with ``diam(K) <= cutoff`` only (``nan``
    if there were none); ``conditioned_trials`` counts those trials.
    ``diam_tail`` is the fraction with ``diam(K) >= cutoff``.
    """

    mean_size: float
    diam_tail: float
    cutoff: float
    trials: int = 0
    mean_size_given_cutoff: float = math.nan
    conditioned_trials: int = 0
    full_fraction: float = 0.0


def center_site(dims) -> tuple[int, ...]:
    """1-based center ``(floor(N/2), ...)``, clamped into the domain."""
    return tuple(max(n // 2, 1) for n in dims)


def center_cluster_stats(
    spec: NeighborhoodSpec,
    N: int,
    p: float,
    cutoff: float,
    trials: int,
    seed: int,
    param: Optional[StrongGraphParam] = None,
    n_jobs: int = 1,
) -> ClusterStats:
    """Size and diameter of the strong component of the closure at the center of ``[N]^d``."""
    _check_p(p)
    if N < 1 or trials < 1:
        raise ValueError("N and trials must be >= 1")
    family = make_nr_family(spec)
    t = (param or StrongGraphParam.for_spec(spec)).threshold
    dims = (N,) * spec.d
    dims_arr = np.asarray(dims, dtype=np.int64)
    center = int(np.ravel_multi_index(tuple(c - 1 for c in center_site(dims)), dims))

    def one(i):
        A = sample_configuration(trial_rng(seed, i), dims, p)
        B = closure_array(A, family)
        if B.all():
            return N ** spec.d, N, True
        K = _kernels.component_of(B.ravel(), dims_arr, t, center)
        if len(K) == 0:
            return 0, 0, False
        xy = np.stack(np.unravel_index(K, dims), axis=1)
        return len(K), int((xy.max(axis=0) - xy.min(axis=0)).max()) + 1, False

    res = _map_trials(one, range(trials), n_jobs)
    sizes = np.array([r[0] for r in res], dtype=float)
    diams = np.array([r[1] for r in res], dtype=float)
    cond = diams <= cutoff
    return ClusterStats(
        mean_size=float(sizes.mean()),
        diam_tail=float((diams >= cutoff).mean()),
        cutoff=float(cutoff),
        trials=trials,
        mean_size_given_cutoff=float(sizes[cond].mean()) if cond.any() else math.nan,
        conditioned_trials=int(cond.sum()),
        full_fraction=float(np.mean([r[2] for r in res])),
    )


def diam_tail_probability(
    spec: NeighborhoodSpec,
    L: int,
    p: float,
    threshold: float,
    trials: int,
    seed: int,
    geometry: str = "cube",
    n_jobs: int = 1,
) -> TrialEstimate:
    """Fraction of samples with ``diam(closure(A)) >= threshold`` (strong graph ``2 a_d``)."""
    _check_p(p)
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    family = make_nr_family(spec)
    t = StrongGraphParam.for_spec(spec).threshold
    dims = (L,) * spec.d

    def one(i):
        B = closure_array(sample_configuration(trial_rng(seed, i), dims, p), family, geometry == "torus")
        return diam_array(B, t) >= threshold

    k = sum(_map_trials(one, range(trials), n_jobs))
    return TrialEstimate.from_counts(k, trials, seed)


def seeded_growth(
    spec: NeighborhoodSpec,
    L: int,
    seed_block_dims: Sequence[int],
    p: float,
    trials: int,
    seed: int,
    geometry: str = "cube",
    n_jobs: int = 1,
) -> TrialEstimate:
    """Fill probability of ``[L]^d`` when a block at the lower corner starts fully infected."""
    _check_p(p)
    seed_block_dims = tuple(int(x) for x in seed_block_dims)
    if len(seed_block_dims) != spec.d or any(not 1 <= x <= L for x in seed_block_dims):
        raise ValueError(f"seed block {seed_block_dims} does not fit in [{L}]^{spec.d}")
    family = make_nr_family(spec)
    block = tuple(slice(0, x) for x in seed_block_dims)
    k = _count_percolating(
        family, (L,) * spec.d, p, seed, (), 0, trials, geometry == "torus", n_jobs, block
    )
    return TrialEstimate.from_counts(k, trials, seed)
