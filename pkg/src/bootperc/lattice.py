"""Lattice geometry: neighbourhood specs, blocks and bit-packed configurations.

Coordinates exposed by this module are 1-based, so a site of the cube
``[L]^d`` is a tuple with entries in ``1..L``. Arrays handed to the engine
are ordinary 0-based numpy arrays of shape ``dims``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

GEOMETRIES = ("cube", "torus")

Site = tuple[int, ...]


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Exponents ``a_1 <= ... <= a_d`` and infection threshold ``r``."""

    a: tuple[int, ...]
    r: int

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "r", int(self.r))
        if len(a) == 0:
            raise ValueError("a must have at least one entry")
        if any(x < 1 for x in a):
            raise ValueError(f"a entries must be positive, got {a}")
        if any(x > y for x, y in zip(a, a[1:])):
            raise ValueError(f"a must be nondecreasing, got {a}")
        if not 1 <= self.r <= self.size:
            raise ValueError(f"r must lie in [1, {self.size}], got {self.r}")

    @property
    def d(self) -> int:
        return len(self.a)

    @property
    def size(self) -> int:
        """Number of sites in the neighbourhood, ``2 * sum(a)``."""
        return 2 * sum(self.a)

    @property
    def a_max(self) -> int:
        return self.a[-1]

    def __str__(self):
        return f"N_{self.r}^{{{','.join(map(str, self.a))}}}"


@dataclass(frozen=True)
class Block:
    """Axis-aligned block ``[lo_1, hi_1] x ... x [lo_d, hi_d]``, inclusive."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        lo = tuple(int(x) for x in self.lo)
        hi = tuple(int(x) for x in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("lo and hi must be nonempty and of equal length")
        if any(l > h for l, h in zip(lo, hi)):
            raise ValueError(f"lo must be <= hi coordinatewise, got {lo}, {hi}")

    @classmethod
    def cube(cls, L: int, d: int) -> "Block":
        return cls((1,) * d, (L,) * d)

    @property
    def d(self) -> int:
        return len(self.lo)

    @property
    def sides(self) -> tuple[int, ...]:
        return tuple(h - l + 1 for l, h in zip(self.lo, self.hi))

    @property
    def long(self) -> int:
        return max(self.sides)

    @property
    def volume(self) -> int:
        return int(np.prod(self.sides))

    def contains(self, other: "Block") -> bool:
        return all(a <= b for a, b in zip(self.lo, other.lo)) and all(
            a >= b for a, b in zip(self.hi, other.hi)
        )

    def __contains__(self, site) -> bool:
        return all(l <= x <= h for l, x, h in zip(self.lo, site, self.hi))

    def slices(self) -> tuple[slice, ...]:
        """0-based array slices selecting this block."""
        return tuple(slice(l - 1, h) for l, h in zip(self.lo, self.hi))


def neighborhood_offsets(spec: NeighborhoodSpec) -> list[tuple[int, ...]]:
    """Offsets ``{±e_j, ..., ±a_j e_j}`` ordered axis-major, then by signed magnitude."""
    out = []
    for j, aj in enumerate(spec.a):
        for m in (*range(-aj, 0), *range(1, aj + 1)):
            v = [0] * spec.d
            v[j] = m
            out.append(tuple(v))
    return out


def _as_site_array(S) -> np.ndarray:
    pts = np.asarray(list(S) if not isinstance(S, np.ndarray) else S, dtype=np.int64)
    if pts.size == 0:
        raise ValueError("bounding block of an empty set is undefined")
    return pts.reshape(len(pts), -1)


def bounding_block(S: Iterable[Site]) -> Block:
    """Smallest block containing every site of ``S``."""
    pts = _as_site_array(S)
    return Block(tuple(pts.min(axis=0)), tuple(pts.max(axis=0)))


def long(S: Iterable[Site]) -> int:
    """Largest sidelength (in sites) of the bounding block of ``S``."""
    return bounding_block(S).long


@dataclass(eq=False)
class Configuration:
    """Infection state over a box, one bit per site (little-endian packed).

    Mutable and single-owner; use :meth:`copy` before handing a
    configuration to code that may modify it.
    """

    dims: tuple[int, ...]
    geometry: str = "cube"
    bits: np.ndarray = field(default=None, repr=False)
    infected_count: int = 0

    def __post_init__(self):
        self.dims = tuple(int(x) for x in self.dims)
        if not self.dims or any(x < 1 for x in self.dims):
            raise ValueError(f"dims must be positive, got {self.dims}")
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"geometry must be one of {GEOMETRIES}, got {self.geometry!r}")
        nbytes = (self.n_sites + 7) // 8
        if self.bits is None:
            self.bits = np.zeros(nbytes, dtype=np.uint8)
            self.infected_count = 0
        else:
            self.bits = np.asarray(self.bits, dtype=np.uint8)
            if self.bits.shape != (nbytes,):
                raise ValueError("bits length does not match dims")
            self.infected_count = int(np.unpackbits(self.bits, bitorder="little")[: self.n_sites].sum())

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.dims))

    @property
    def domain(self) -> Block:
        return Block((1,) * self.d, self.dims)

    @classmethod
    def from_array(cls, arr, geometry: str = "cube") -> "Configuration":
        arr = np.asarray(arr, dtype=bool)
        bits = np.packbits(arr.ravel(), bitorder="little")
        return cls(arr.shape, geometry, bits)

    @classmethod
    def from_sites(cls, dims: Sequence[int], sites: Iterable[Site], geometry: str = "cube") -> "Configuration":
        arr = np.zeros(tuple(dims), dtype=bool)
        for s in sites:
            s = tuple(int(x) for x in s)
            if len(s) != arr.ndim or any(not 1 <= x <= L for x, L in zip(s, arr.shape)):
                raise ValueError(f"site {s} outside domain {tuple(dims)}")
            arr[tuple(x - 1 for x in s)] = True
        return cls.from_array(arr, geometry)

    @classmethod
    def full(cls, dims: Sequence[int], geometry: str = "cube") -> "Configuration":
        return cls.from_array(np.ones(tuple(dims), dtype=bool), geometry)

    def to_array(self) -> np.ndarray:
        flat = np.unpackbits(self.bits, count=self.n_sites, bitorder="little")
        return flat.astype(bool).reshape(self.dims)

    def sites(self) -> list[Site]:
        """Infected sites, 1-based, in lexicographic order."""
        idx = np.argwhere(self.to_array()) + 1
        return [tuple(int(x) for x in row) for row in idx]

    def infect(self, site: Site) -> None:
        i = self._flat(site)
        byte, bit = divmod(i, 8)
        if not (self.bits[byte] >> bit) & 1:
            self.bits[byte] |= np.uint8(1 << bit)
            self.infected_count += 1

    def __contains__(self, site) -> bool:
        i = self._flat(site)
        byte, bit = divmod(i, 8)
        return bool((self.bits[byte] >> bit) & 1)

    def _flat(self, site) -> int:
        site = tuple(int(x) for x in site)
        if len(site) != self.d or any(not 1 <= x <= L for x, L in zip(site, self.dims)):
            raise ValueError(f"site {site} outside domain {self.dims}")
        return int(np.ravel_multi_index(tuple(x - 1 for x in site), self.dims))

    @property
    def is_full(self) -> bool:
        return self.infected_count == self.n_sites

    def copy(self) -> "Configuration":
        return Configuration(self.dims, self.geometry, self.bits.copy())

    def restrict(self, R: Block) -> "Configuration":
        """Sites of ``R`` as a standalone cube configuration."""
        if R.d != self.d or not self.domain.contains(R):
            raise ValueError(f"block {R} is not inside the domain {self.dims}")
        return Configuration.from_array(self.to_array()[R.slices()], "cube")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return (
            self.dims == other.dims
            and self.geometry == other.geometry
            and np.array_equal(self.bits, other.bits)
        )

    def __le__(self, other: "Configuration") -> bool:
        """Subset order on infected sets."""
        return self.dims == other.dims and not np.any(self.bits & ~other.bits)
