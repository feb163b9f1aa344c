"""Strong connectivity, internally filled/spanned blocks and the components process."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from . import _kernels
from .engine import UpdateFamily, closure_array
from .families import CriticalityLabel, classify_nr
from .lattice import Block, Configuration, NeighborhoodSpec, Site, bounding_block


class NoWitnessError(ValueError):
    """Raised when no set of the components process reaches the requested scale."""


@dataclass(frozen=True)
class StrongGraphParam:
    """Sites ``u, v`` are adjacent when ``||u - v||_inf <= threshold``."""

    threshold: int

    def __post_init__(self):
        if int(self.threshold) < 1:
            raise ValueError("threshold must be a positive integer")
        object.__setattr__(self, "threshold", int(self.threshold))

    @classmethod
    def for_spec(cls, spec: NeighborhoodSpec) -> "StrongGraphParam":
        return cls(2 * spec.a_max)


def _default_param(family: UpdateFamily, param: Optional[StrongGraphParam]) -> StrongGraphParam:
    if param is not None:
        return param
    if family.spec is not None:
        return StrongGraphParam.for_spec(family.spec)
    return StrongGraphParam(2 * family.max_reach)


def label_array(mask: np.ndarray, t: int) -> np.ndarray:
    """Strong-component labels of a boolean array (``-1`` on healthy sites)."""
    mask = np.ascontiguousarray(mask, dtype=bool)
    dims = np.asarray(mask.shape, dtype=np.int64)
    return _kernels.label_strong(mask.ravel(), dims, int(t)).reshape(mask.shape)


def component_blocks(mask: np.ndarray, t: int) -> list[tuple[slice, ...]]:
    """0-based bounding slices of each strong component, in canonical order."""
    labels = label_array(mask, t)
    return [s for s in ndimage.find_objects(labels + 1) if s is not None]


def diam_array(mask: np.ndarray, t: int) -> int:
    blocks = component_blocks(mask, t)
    if not blocks:
        return 0
    return max(max(s.stop - s.start for s in sl) for sl in blocks)


def _site_mask(S) -> tuple[np.ndarray, np.ndarray]:
    pts = np.asarray(sorted(set(tuple(int(c) for c in s) for s in S)), dtype=np.int64)
    lo = pts.min(axis=0)
    shape = tuple(pts.max(axis=0) - lo + 1)
    mask = np.zeros(shape, dtype=bool)
    mask[tuple((pts - lo).T)] = True
    return mask, lo


def strong_components(S: Iterable[Site], param: StrongGraphParam) -> list[frozenset]:
    """Partition ``S`` into strong components, ordered by lexicographically smallest site."""
    S = list(S)
    if not S:
        return []
    mask, lo = _site_mask(S)
    labels = label_array(mask, param.threshold)
    idx = np.argwhere(labels >= 0)
    labs = labels[tuple(idx.T)]
    out: list[list[Site]] = [[] for _ in range(int(labs.max()) + 1)]
    for row, lab in zip(idx + lo, labs):
        out[lab].append(tuple(int(c) for c in row))
    return [frozenset(c) for c in out]


def diam(S: Iterable[Site], param: StrongGraphParam) -> int:
    """Largest bounding-block side over strong components; 0 for the empty set."""
    S = list(S)
    if not S:
        return 0
    mask, _ = _site_mask(S)
    return diam_array(mask, param.threshold)


def _check_block(R: Block, config: Configuration):
    if R.d != config.d or not config.domain.contains(R):
        raise ValueError(f"block {R} is not inside the domain {config.dims}")


def _closure_in_block(R: Block, config: Configuration, family: UpdateFamily) -> np.ndarray:
    _check_block(R, config)
    return closure_array(config.to_array()[R.slices()], family, torus=False)


def is_internally_filled(R: Block, config: Configuration, family: UpdateFamily) -> bool:
    """``R`` is covered by the closure of ``A ∩ R`` run inside ``R``."""
    return bool(_closure_in_block(R, config, family).all())


def is_internally_spanned(
    R: Block, config: Configuration, family: UpdateFamily, param: Optional[StrongGraphParam] = None
) -> bool:
    """Some strong component of the closure of ``A ∩ R`` (inside ``R``) has bounding block ``R``."""
    param = _default_param(family, param)
    inner = _closure_in_block(R, config, family)
    sides = R.sides
    for sl in component_blocks(inner, param.threshold):
        if all(s.start == 0 and s.stop == n for s, n in zip(sl, sides)):
            return True
    return False


@dataclass(frozen=True)
class MergeEvent:
    """One step of the components process: ``child = [left ∪ right]``."""

    left: int
    right: int
    child: int
    block: Block
    diam_left: int
    diam_right: int
    diam_child: int


@dataclass
class ComponentCollection:
    """Final sets of the components process plus the full merge history.

    ``initial_blocks`` are the singleton blocks the process started from
    (ids ``0..len-1``); merged sets get the following ids in creation order.
    """

    sets: list[frozenset] = field(default_factory=list)
    history: list[MergeEvent] = field(default_factory=list)
    initial_blocks: list[Block] = field(default_factory=list)
    threshold: int = 1

    def union(self) -> frozenset:
        out = set()
        for s in self.sets:
            out |= s
        return frozenset(out)

    def __len__(self):
        return len(self.sets)


def _set_diam(coords: np.ndarray, t: int, connected: bool) -> int:
    ext = coords.max(axis=0) - coords.min(axis=0) + 1
    if connected:
        return int(ext.max())
    mask = np.zeros(tuple(ext), dtype=bool)
    mask[tuple((coords - coords.min(axis=0)).T)] = True
    return diam_array(mask, t)


def components_process(
    config: Configuration,
    family: UpdateFamily,
    param: Optional[StrongGraphParam] = None,
    rng: Optional[np.random.Generator] = None,
) -> ComponentCollection:
    """Merge strongly connected pairs into the closure of their union until none remain.

    With ``rng=None`` the pair merged next is the one with the smallest
    ``(min site, id)`` keys; otherwise a uniformly random adjacent pair.
    Closures are taken in the whole (cube) domain.
    """
    if config.geometry != "cube":
        raise ValueError("the components process is defined on the cube only")
    if family.spec is not None and classify_nr(family.spec) is CriticalityLabel.SUPERCRITICAL:
        raise ValueError(
            f"components process needs r > a_d (family {family.spec} is supercritical)"
        )
    param = _default_param(family, param)
    t = param.threshold
    connected = t >= family.max_reach
    dims = config.dims
    state = config.to_array()

    coords: dict[int, np.ndarray] = {}
    key: dict[int, tuple] = {}
    adj: dict[int, set] = {}
    diams: dict[int, int] = {}
    init = np.argwhere(state)
    for i, row in enumerate(init):
        coords[i] = row[None, :]
        key[i] = (tuple(int(c) for c in row), i)
        adj[i] = set()
        diams[i] = 1
    if len(init) > 1:
        for i, j in cKDTree(init).query_pairs(t + 0.5, p=np.inf):
            adj[i].add(j)
            adj[j].add(i)
    out = ComponentCollection(
        initial_blocks=[Block(tuple(r + 1), tuple(r + 1)) for r in init], threshold=t
    )
    next_id = len(init)

    while True:
        live = [k for k in adj if adj[k]]
        if not live:
            break
        if rng is None:
            i = min(live, key=key.__getitem__)
            j = min(adj[i], key=key.__getitem__)
        else:
            i = live[rng.integers(len(live))]
            nb = sorted(adj[i])
            j = nb[rng.integers(len(nb))]
        union = np.concatenate([coords[i], coords[j]])
        seed = np.zeros(dims, dtype=bool)
        seed[tuple(union.T)] = True
        new = np.argwhere(closure_array(seed, family, torus=False))
        for k in (i, j):
            for nb in adj.pop(k):
                if nb not in (i, j):
                    adj[nb].discard(k)
        c = next_id
        next_id += 1
        d_child = _set_diam(new, t, connected)
        lo, hi = new.min(axis=0), new.max(axis=0)
        out.history.append(
            MergeEvent(i, j, c, Block(tuple(lo + 1), tuple(hi + 1)), diams[i], diams[j], d_child)
        )
        if family.spec is not None and d_child > diams[i] + diams[j] + t:
            raise RuntimeError(
                f"diameter subadditivity violated at merge {i}+{j}: "
                f"{d_child} > {diams[i]} + {diams[j]} + {t}"
            )
        for k in (i, j):
            del coords[k], key[k], diams[k]
        adj[c] = set()
        if coords:
            others = list(coords)
            pts = np.concatenate([coords[k] for k in others])
            owner = np.repeat(np.arange(len(others)), [len(coords[k]) for k in others])
            dist, _ = cKDTree(new).query(pts, k=1, p=np.inf, distance_upper_bound=t + 0.5)
            for o in np.unique(owner[np.isfinite(dist)]):
                k = others[o]
                adj[c].add(k)
                adj[k].add(c)
        coords[c] = new
        key[c] = (tuple(int(x) for x in new[0]), c)
        diams[c] = d_child

    finals = sorted(coords, key=key.__getitem__)
    out.sets = [frozenset(tuple(int(x) + 1 for x in row) for row in coords[k]) for k in finals]
    return out


@dataclass(frozen=True)
class SlabWitness:
    """Block ``W x [h]``: ``W`` spans all axes but the last, ``h`` is the last-axis side."""

    block: Block
    w_diam: int
    h: int


def al_witness(
    config: Configuration,
    family: UpdateFamily,
    k: int,
    mode: str = "block",
    l: Optional[int] = None,
    param: Optional[StrongGraphParam] = None,
):
    """Internally spanned block at scale ``k`` extracted from the components process.

    Block mode returns the bounding block of the first set whose diameter
    reaches ``k``; for a non-supercritical family its diameter lies in
    ``[k, 2 a_d k]``. Slab mode returns the first set whose last-axis side
    reaches ``k`` or whose remaining sides reach ``l``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if mode not in ("block", "slab"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "slab":
        if l is None or l < 1:
            raise ValueError("slab mode needs a width target l >= 1")
        if config.d < 2:
            raise ValueError("slab mode needs at least two dimensions")
    proc = components_process(config, family, param)
    blocks = list(proc.initial_blocks) + [ev.block for ev in proc.history]
    diams = [1] * len(proc.initial_blocks) + [ev.diam_child for ev in proc.history]
    for R, dm in zip(blocks, diams):
        if mode == "block":
            if dm >= k:
                return R
        else:
            sides = R.sides
            w, h = max(sides[:-1]), sides[-1]
            if w >= l or h >= k:
                return SlabWitness(R, w, h)
    if mode == "block":
        raise NoWitnessError(f"no witness at scale k={k}: diam of the closure is {max(diams, default=0)}")
    raise NoWitnessError(f"no slab witness for k={k}, l={l}")
