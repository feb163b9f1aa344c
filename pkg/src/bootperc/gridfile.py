"""Plain-text grid files.

::

    d L1 ... Ld geometry
    a1 ... ad r
    x1 ... xd        # one infected site per line, 1-based

Blank lines and ``#`` comments are ignored; site order and duplicates do
not matter. :func:`format_grid` writes the canonical form (sites sorted).
"""
from __future__ import annotations

from pathlib import Path
from typing import Union

from .lattice import GEOMETRIES, Configuration, NeighborhoodSpec


class GridFormatError(ValueError):
    pass


def parse_grid(text: str) -> tuple[Configuration, NeighborhoodSpec]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if line:
            lines.append(line)
    if len(lines) < 2:
        raise GridFormatError("grid file needs a header line and a family line")
    head, fam = lines[0], lines[1]
    try:
        d = int(head[0])
        if len(head) != d + 2:
            raise GridFormatError(f"header must read 'd L1..Ld geometry', got {' '.join(head)!r}")
        dims = tuple(int(x) for x in head[1 : d + 1])
        geometry = head[d + 1]
        if geometry not in GEOMETRIES:
            raise GridFormatError(f"unknown geometry {geometry!r}")
        if len(fam) != d + 1:
            raise GridFormatError(f"family line must read 'a1..a{d} r', got {' '.join(fam)!r}")
        spec = NeighborhoodSpec(tuple(int(x) for x in fam[:d]), int(fam[d]))
        sites = []
        for row in lines[2:]:
            if len(row) != d:
                raise GridFormatError(f"site line {' '.join(row)!r} does not have {d} coordinates")
            sites.append(tuple(int(x) for x in row))
        config = Configuration.from_sites(dims, sites, geometry)
    except GridFormatError:
        raise
    except ValueError as exc:
        raise GridFormatError(str(exc)) from exc
    return config, spec


def format_grid(config: Configuration, spec: NeighborhoodSpec) -> str:
    out = [
        " ".join([str(config.d), *map(str, config.dims), config.geometry]),
        " ".join([*map(str, spec.a), str(spec.r)]),
    ]
    out += [" ".join(map(str, s)) for s in config.sites()]
    return "\n".join(out) + "\n"


def read_grid(path: Union[str, Path]) -> tuple[Configuration, NeighborhoodSpec]:
    return parse_grid(Path(path).read_text(encoding="utf-8"))


def write_grid(path: Union[str, Path], config: Configuration, spec: NeighborhoodSpec) -> None:
    Path(path).write_text(format_grid(config, spec), encoding="utf-8")
