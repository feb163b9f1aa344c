"""Input checks shared by the estimators and the CLI."""
from __future__ import annotations

import numbers

import numpy as np

from .lattice import NeighborhoodSpec


def parse_int_list(value) -> tuple[int, ...]:
    """Accept ``"1,2,4"``, ``"1 2 4"`` or any iterable of ints."""
    if isinstance(value, str):
        parts = value.replace(",", " ").split()
        return tuple(int(x) for x in parts)
    if isinstance(value, numbers.Integral):
        return (int(value),)
    return tuple(int(x) for x in value)


def parse_float_list(value) -> tuple[float, ...]:
    if isinstance(value, str):
        return tuple(float(x) for x in value.replace(",", " ").split())
    if isinstance(value, numbers.Real):
        return (float(value),)
    return tuple(float(x) for x in value)


def check_spec(a, r) -> NeighborhoodSpec:
    return NeighborhoodSpec(parse_int_list(a), int(r))


def check_probability(p, open_interval: bool = True) -> float:
    p = float(p)
    ok = 0.0 < p < 1.0 if open_interval else 0.0 <= p <= 1.0
    if not ok:
        raise ValueError(f"probability {p} is outside {'(0, 1)' if open_interval else '[0, 1]'}")
    return p


def check_probabilities(P, open_interval: bool = True) -> np.ndarray:
    """1-D float array of probabilities; a column vector ``(n, 1)`` is flattened."""
    P = np.asarray(P, dtype=float)
    if P.ndim == 2 and P.shape[1] == 1:
        P = P[:, 0]
    if P.ndim != 1 or P.size == 0:
        raise ValueError(f"expected a nonempty 1-D array of probabilities, got shape {P.shape}")
    for p in P:
        check_probability(p, open_interval)
    return P


def check_grids(X, d: int) -> np.ndarray:
    """Boolean batch of shape ``(n_samples, L1, ..., Ld)``; a single grid gets a batch axis."""
    X = np.asarray(X)
    if X.dtype != bool:
        if not np.isin(X, (0, 1)).all():
            raise ValueError("grids must be boolean or 0/1 valued")
        X = X.astype(bool)
    if X.ndim == d:
        X = X[None]
    if X.ndim != d + 1 or X.shape[0] == 0 or 0 in X.shape[1:]:
        raise ValueError(f"expected grids of dimension {d} (optionally batched), got shape {X.shape}")
    return X
