"""Compiled inner loops. Arrays here are flat, 0-based, C-ordered."""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _unravel(i, dims, out):
    for j in range(dims.shape[0] - 1, -1, -1):
        out[j] = i % dims[j]
        i //= dims[j]


@njit(cache=True, nogil=True)
def _ravel(coords, dims):
    i = 0
    for j in range(dims.shape[0]):
        i = i * dims[j] + coords[j]
    return i


@njit(cache=True, nogil=True)
def counting_closure(state, dims, offsets, r, torus):
    """In-place closure of ``state`` under "at least r of the offsets infected".

    Each newly infected site ``y`` bumps the counter of every ``x = y - v``.
    Work is O(|offsets|) per infected site.
    """
    n = state.shape[0]
    d = dims.shape[0]
    m = offsets.shape[0]
    count = np.zeros(n, dtype=np.int32)
    queue = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    for i in range(n):
        if state[i]:
            queue[tail] = i
            tail += 1
    y = np.empty(d, dtype=np.int64)
    x = np.empty(d, dtype=np.int64)
    while head < tail:
        site = queue[head]
        head += 1
        _unravel(site, dims, y)
        for k in range(m):
            ok = True
            for j in range(d):
                c = y[j] - offsets[k, j]
                if c < 0 or c >= dims[j]:
                    if torus:
                        c %= dims[j]
                    else:
                        ok = False
                        break
                x[j] = c
            if not ok:
                continue
            xi = _ravel(x, dims)
            if state[xi]:
                continue
            count[xi] += 1
            if count[xi] >= r:
                state[xi] = True
                queue[tail] = xi
                tail += 1
    return tail


@njit(cache=True, nogil=True)
def _box_offsets(d, t):
    side = 2 * t + 1
    total = side ** d
    out = np.empty((total - 1, d), dtype=np.int64)
    row = np.empty(d, dtype=np.int64)
    k = 0
    for idx in range(total):
        rem = idx
        zero = True
        for j in range(d - 1, -1, -1):
            row[j] = rem % side - t
            rem //= side
            if row[j] != 0:
                zero = False
        if not zero:
            out[k] = row
            k += 1
    return out


@njit(cache=True, nogil=True)
def label_strong(state, dims, t):
    """Label components of the infected sites under ``||u - v||_inf <= t``.

    Returns an int64 array (-1 for healthy sites); labels are assigned in
    increasing order of the smallest flat index in each component.
    """
    n = state.shape[0]
    d = dims.shape[0]
    box = _box_offsets(d, t)
    labels = -np.ones(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    y = np.empty(d, dtype=np.int64)
    x = np.empty(d, dtype=np.int64)
    nlab = 0
    for s in range(n):
        if not state[s] or labels[s] >= 0:
            continue
        labels[s] = nlab
        top = 0
        stack[top] = s
        top += 1
        while top > 0:
            top -= 1
            cur = stack[top]
            _unravel(cur, dims, y)
            for k in range(box.shape[0]):
                ok = True
                for j in range(d):
                    c = y[j] + box[k, j]
                    if c < 0 or c >= dims[j]:
                        ok = False
                        break
                    x[j] = c
                if not ok:
                    continue
                xi = _ravel(x, dims)
                if state[xi] and labels[xi] < 0:
                    labels[xi] = nlab
                    stack[top] = xi
                    top += 1
        nlab += 1
    return labels


@njit(cache=True, nogil=True)
def component_of(state, dims, t, start):
    """Flat indices of the strong component containing ``start`` (empty if healthy)."""
    n = state.shape[0]
    d = dims.shape[0]
    if not state[start]:
        return np.empty(0, dtype=np.int64)
    box = _box_offsets(d, t)
    seen = np.zeros(n, dtype=np.bool_)
    out = np.empty(n, dtype=np.int64)
    seen[start] = True
    out[0] = start
    size = 1
    head = 0
    y = np.empty(d, dtype=np.int64)
    x = np.empty(d, dtype=np.int64)
    while head < size:
        cur = out[head]
        head += 1
        _unravel(cur, dims, y)
        for k in range(box.shape[0]):
            ok = True
            for j in range(d):
                c = y[j] + box[k, j]
                if c < 0 or c >= dims[j]:
                    ok = False
                    break
                x[j] = c
            if not ok:
                continue
            xi = _ravel(x, dims)
            if state[xi] and not seen[xi]:
                seen[xi] = True
                out[size] = xi
                size += 1
    return out[:size]
