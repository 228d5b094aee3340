"""Seeded families of test functions for the probes.

Each generator draws continuum parameters (centres, widths, breakpoints)
from the seed and only then samples them on the grid, so the same seed
yields the same underlying functions on a refined grid.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import Grid, GridFunction

__all__ = ["make_family", "FAMILY_KINDS"]


def _coords(grid):
    if grid.dim == 1:
        return (np.asarray(grid.midpoints[0]),)
    return tuple(np.meshgrid(*grid.midpoints, indexing="ij"))


def _box(grid, margin):
    lo = np.array(grid.lo) + margin
    hi = np.array(grid.hi) - margin
    if np.any(hi <= lo):
        raise ValueError("margin leaves no room inside the domain")
    return lo, hi


def _random_steps(grid, rng, margin):
    lo, hi = _box(grid, margin)
    X = _coords(grid)
    out = np.zeros(grid.shape)
    for _ in range(int(rng.integers(1, 6))):
        a = rng.uniform(lo, hi)
        b = rng.uniform(lo, hi)
        a, b = np.minimum(a, b), np.maximum(a, b)
        mask = np.ones(grid.shape, dtype=bool)
        for x, u, v in zip(X, a, b):
            mask &= (x >= u) & (x < v)
        out += rng.uniform(-2, 2) * mask
    return out


def _cube_indicator(grid, rng, margin):
    lo, hi = _box(grid, margin)
    X = _coords(grid)
    side = math.exp(rng.uniform(math.log(float(min(grid.widths[0].min(), 1.0))),
                                math.log(float(np.min(hi - lo)))))
    a = rng.uniform(lo, np.maximum(lo, hi - side))
    mask = np.ones(grid.shape, dtype=bool)
    for x, u in zip(X, a):
        mask &= (x >= u) & (x < u + side)
    return mask.astype(float)


def _comb(grid, rng, margin):
    lo, hi = _box(grid, margin)
    X = _coords(grid)
    out = np.zeros(grid.shape)
    start = rng.uniform(lo[0], lo[0] + 0.25 * (hi[0] - lo[0]))
    width = math.exp(rng.uniform(math.log(float(grid.widths[0].min())), math.log(1.0)))
    gap = width
    x = start
    while x + width < hi[0]:
        mask = (X[0] >= x) & (X[0] < x + width)
        out += mask
        x += width + gap
        gap *= 2
    return out


def _smooth(grid, rng, margin):
    lo, hi = _box(grid, margin)
    X = _coords(grid)
    out = np.zeros(grid.shape)
    room = float(np.min(hi - lo)) / 2
    for _ in range(int(rng.integers(1, 4))):
        w = rng.uniform(min(0.5, room / 2), room)
        c = rng.uniform(lo + w, hi - w)
        freq = rng.uniform(0, 3)
        r2 = sum((x - ci) ** 2 for x, ci in zip(X, c)) / w ** 2
        # smooth bump, compactly supported inside the margin box
        with np.errstate(divide="ignore", over="ignore"):
            bump = np.where(r2 < 1, np.exp(-1.0 / np.maximum(1.0 - r2, 1e-300)), 0.0)
        out += rng.uniform(0.5, 2) * bump * np.cos(freq * (X[0] - c[0]))
    return out


def _singular(grid, rng, margin, p=None):
    lo, hi = _box(grid, margin)
    X = _coords(grid)
    c = rng.uniform(lo, hi)
    r = np.sqrt(sum((x - ci) ** 2 for x, ci in zip(X, c)))
    radius = rng.uniform(0.25, 2.0)
    hmin = float(min(w.min() for w in grid.widths))
    expo = p.values if p is not None else np.full(grid.shape, 2.0)
    return np.where(r < radius, np.maximum(r, hmin) ** (-grid.dim / expo), 0.0)


FAMILY_KINDS = {
    "random-steps": _random_steps,
    "cube-indicators": _cube_indicator,
    "combs": _comb,
    "smooth": _smooth,
    "singular": _singular,
}


def make_family(grid: Grid, spec, seed: int = 0, p=None):
    """List of non-zero test functions described by ``spec``.

    ``spec`` is ``{"kinds": [...], "count": n, "margin": m}``; kinds cycle
    over the requested count.  ``margin`` keeps supports away from the
    domain boundary (useful when convolving).
    """
    kinds = spec.get("kinds", ["random-steps"])
    if isinstance(kinds, str):
        kinds = [kinds]
    count = int(spec.get("count", 20))
    margin = float(spec.get("margin", 0.0))
    if grid.dim == 2 and any(k == "combs" for k in kinds):
        raise ValueError("combs are 1D only")
    rng = np.random.default_rng(seed)
    out = []
    i = 0
    attempts = 0
    while len(out) < count:
        kind = kinds[i % len(kinds)]
        i += 1
        gen = FAMILY_KINDS[kind]
        v = gen(grid, rng, margin, p) if kind == "singular" else gen(grid, rng, margin)
        attempts += 1
        if np.any(v != 0):
            out.append(GridFunction(grid, v))
        elif attempts > 50 * count:
            raise ValueError("family keeps producing zero functions on this grid")
    return out
